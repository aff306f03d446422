#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lzeros/config.hpp"
#include "lzeros/envelope.hpp"
#include "lzeros/zero_set.hpp"

namespace lzeros {

enum class Command { quench, envelope, zeros, compare, gaussian, twoband, heatmap };

std::string_view command_name(Command c);
Command parse_command(std::string_view name);

// Command line overrides applied on top of a RunConfig.
struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool mirror_beta = false;
};

void apply_options(RunConfig& config, const RunOptions& options);

struct FileRecord {
  std::string name;  // relative to the output directory
  std::uintmax_t bytes = 0;
  std::string fnv1a64;  // 16 hex digits
};

std::string fnv1a64_hex(std::string_view bytes);

struct DeltaEtaRow {
  double width = 0.0;
  double box_height = 0.0;
  DeltaEta entry;
  // value missing (no exact zero) or above one.
  bool divergent = false;
};

struct RunReport {
  std::string command;
  std::string directory;
  std::optional<ZeroSet> exact;
  std::optional<ZeroSet> approximate;
  std::optional<ZeroSet> analytic;
  std::optional<Envelope> envelope;
  std::vector<DeltaEtaRow> delta_eta;
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
  std::vector<FileRecord> files;
  // Wall-clock seconds per stage; written to timing.json, never to report.json.
  std::vector<std::pair<std::string, double>> timing;

  // Deterministic summary (no timing): the content of report.json.
  nlohmann::ordered_json to_json() const;
};

RunReport cmd_quench(const RunConfig& config);
RunReport cmd_envelope(const RunConfig& config);
RunReport cmd_zeros(const RunConfig& config);
RunReport cmd_compare(const RunConfig& config);
RunReport cmd_gaussian(const RunConfig& config);
RunReport cmd_twoband(const RunConfig& config);
RunReport cmd_heatmap(const RunConfig& config);

// Dispatch with module errors re-raised as ConfigError (bad input) or
// NumericalError, their message prefixed by the config path.
RunReport run_command(Command command, const RunConfig& config);

}  // namespace lzeros
