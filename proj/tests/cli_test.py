"""End-to-end checks of the lzeros command line tool.

Usage: cli_test.py <lzeros binary> <repository root>
"""

import json
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

import jsonschema

BINARY = pathlib.Path(sys.argv[1])
ROOT = pathlib.Path(sys.argv[2])
SCHEMAS = ROOT / "schemas"
CONFIGS = ROOT / "configs"

failures = []


def check(condition, message):
    if not condition:
        failures.append(message)
        print("FAIL", message)


def run(command, config, out, *extra):
    return subprocess.run(
        [str(BINARY), command, "--config", str(config), "--out", str(out), *extra],
        capture_output=True,
        text=True,
        timeout=600,
    )


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir()) if p.is_file()}


def validate(directory):
    names = {
        "report.json": "report",
        "timing.json": "timing",
        "quench.json": "quench",
        "envelope.json": "envelope",
        "zeros_exact.json": "zero_set",
        "zeros_approximate.json": "zero_set",
        "zeros_analytic.json": "zero_set",
    }
    seen = 0
    for file, kind in names.items():
        path = directory / file
        if not path.exists():
            continue
        try:
            jsonschema.validate(json.loads(path.read_text()), schema(kind))
            seen += 1
        except jsonschema.ValidationError as e:
            check(False, f"{directory.name}/{file} does not match {kind}: {e.message}")
    return seen


def write_two_level(directory, t_min, max_jitter):
    (directory / "levels.csv").write_text("energy,population\n0,0.5\n1,0.5\n")
    config = directory / "two_level.toml"
    config.write_text(
        "[distribution]\n"
        'file = "levels.csv"\n\n'
        "[window]\n"
        "beta_min = -1.0\nbeta_max = 1.0\n"
        f"t_min = {t_min!r}\nt_max = 12.0\n"
        f"max_jitter = {max_jitter}\n"
    )
    return config


def main():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)

        # Schema validation over every command that writes JSON.
        runs = [
            ("quench", "fig3a.toml"),
            ("envelope", "fig5.toml"),
            ("twoband", "fig3d.toml"),
            ("gaussian", "fig8b.toml"),
            ("compare", "fig4_n100.toml"),
            ("zeros", "fig7.toml"),
        ]
        for command, name in runs:
            out = tmp / f"{command}_{name}"
            result = run(command, CONFIGS / name, out)
            check(result.returncode == 0, f"{command} {name} exited {result.returncode}: {result.stderr}")
            if result.returncode != 0:
                continue
            stdout_report = json.loads(result.stdout)
            check(stdout_report == json.loads((out / "report.json").read_text()),
                  f"{command} {name}: stdout report differs from report.json")
            check(validate(out) >= 3, f"{command} {name}: too few JSON files validated")
            check("isa" in json.loads((out / "timing.json").read_text()), f"{command} {name}: timing lacks isa")

        # Same config and seed: byte-identical outputs apart from timing.
        out = tmp / "repeat"
        first = run("quench", CONFIGS / "fig3d.toml", out, "--seed", "11")
        before = snapshot(out)
        shutil.rmtree(out)
        second = run("quench", CONFIGS / "fig3d.toml", out, "--seed", "11")
        after = snapshot(out)
        check(first.returncode == 0 and second.returncode == 0, "repeat runs failed")
        check(first.stdout == second.stdout, "repeat runs print different reports")
        before.pop("timing.json", None)
        after.pop("timing.json", None)
        check(before.keys() == after.keys(), "repeat runs wrote different file sets")
        for name in before:
            check(before[name] == after.get(name), f"repeat runs differ in {name}")
        report = json.loads(before["report.json"])
        check("timing" not in json.dumps(report), "report.json carries timing")

        # Output files listed in the report carry their FNV-1a checksum.
        for record in report["files"]:
            data = before[record["name"]]
            h = 0xCBF29CE484222325
            for byte in data:
                h = ((h ^ byte) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
            check(record["fnv1a64"] == f"{h:016x}", f"checksum mismatch for {record['name']}")
            check(record["bytes"] == len(data), f"size mismatch for {record['name']}")

        # The mirror flag changes the picture and nothing else.
        plain = tmp / "plain"
        mirrored = tmp / "mirrored"
        run("heatmap", CONFIGS / "fig8b.toml", plain)
        run("heatmap", CONFIGS / "fig8b.toml", mirrored, "--mirror-beta")
        a, b = snapshot(plain), snapshot(mirrored)
        check(a["heatmap.svg"] != b["heatmap.svg"], "--mirror-beta left the heatmap unchanged")
        check(a["zeros_exact.csv"] == b["zeros_exact.csv"], "--mirror-beta changed the zero set")

        # Exit codes: 2 for configuration problems, 3 for numerical failure.
        bad = tmp / "bad.toml"
        bad.write_text("[ising]\nN = 10\nh_i = 0.1\nh_f = 0.2\nbogus = 1\n")
        result = run("quench", bad, tmp / "bad_out")
        check(result.returncode == 2, f"unknown key exited {result.returncode}")
        check("bad.toml" in result.stderr, "config error does not name the file")

        result = run("quench", tmp / "missing.toml", tmp / "missing_out")
        check(result.returncode == 2, f"missing config exited {result.returncode}")

        result = subprocess.run([str(BINARY), "quench"], capture_output=True, text=True)
        check(result.returncode == 2, f"missing --config exited {result.returncode}")

        result = run("gaussian", CONFIGS / "fig3a.toml", tmp / "wrong_model")
        check(result.returncode == 2, f"gaussian on a spin config exited {result.returncode}")

        # A zero of the two-level amplitude sits on the bottom edge at t = pi.
        edge = tmp / "edge"
        edge.mkdir()
        config = write_two_level(edge, math.pi, 0)
        result = run("zeros", config, edge / "out")
        check(result.returncode == 3, f"zero on the contour exited {result.returncode}: {result.stderr}")
        config = write_two_level(edge, math.pi, 5)
        result = run("zeros", config, edge / "out_jitter")
        check(result.returncode == 0, f"window growth did not recover: {result.stderr}")

    if failures:
        print(f"{len(failures)} failure(s)")
        return 1
    print("all CLI checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
