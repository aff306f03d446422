#include "lzeros/heatmap.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lzeros/errors.hpp"

namespace lzeros {
namespace {

struct Anchor {
  double s;
  double r, g, b;
};

// Dark purple to pale yellow; luminance increases between every pair.
constexpr Anchor kAnchors[] = {
    {0.00, 0, 0, 4},        {0.25, 80, 18, 123},   {0.50, 182, 54, 121},
    {0.75, 251, 136, 97},   {1.00, 252, 253, 191},
};

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>(v & 0xFF));
}

void put_chunk(std::string& out, const char* type, const std::string& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

std::array<std::uint8_t, 3> heat_color(double s) {
  if (!(s >= 0.0)) s = 0.0;
  s = std::min(s, 1.0);
  std::size_t i = 0;
  while (i + 2 < std::size(kAnchors) && s > kAnchors[i + 1].s) ++i;
  const Anchor& a = kAnchors[i];
  const Anchor& b = kAnchors[i + 1];
  const double f = (s - a.s) / (b.s - a.s);
  auto mix = [f](double x, double y) { return static_cast<std::uint8_t>(std::lround(x + f * (y - x))); };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

std::vector<std::uint8_t> render_raster(const LogModulusField& field, const Rect& window,
                                        const HeatmapOptions& options) {
  if (options.width < 1 || options.height < 1) throw InvalidArgument("heatmap size must be positive");
  if (!(window.width() > 0.0) || !(window.height() > 0.0)) throw InvalidArgument("heatmap window is empty");
  const int W = options.width, H = options.height;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(W) * H * 3);
#pragma omp parallel for schedule(static)
  for (int row = 0; row < H; ++row) {
    const double t = window.t_max - (row + 0.5) * window.height() / H;
    for (int col = 0; col < W; ++col) {
      const double x = (col + 0.5) / W;
      const double beta =
          options.mirror_beta ? window.beta_max - x * window.width() : window.beta_min + x * window.width();
      const double v = field({beta, t});
      // 1 at |L| = 1, 0 at or below the floor.
      double s = std::isnan(v) ? 0.0 : 1.0 - std::min(std::max(v, options.log_floor), 0.0) / options.log_floor;
      const auto c = heat_color(s);
      const std::size_t k = (static_cast<std::size_t>(row) * W + col) * 3;
      rgb[k] = c[0];
      rgb[k + 1] = c[1];
      rgb[k + 2] = c[2];
    }
  }
  return rgb;
}

std::string encode_png(const std::vector<std::uint8_t>& rgb, int width, int height) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) throw InvalidArgument("raster size mismatch");
  std::string raw;
  raw.reserve(static_cast<std::size_t>(height) * (width * 3 + 1));
  for (int row = 0; row < height; ++row) {
    raw.push_back('\0');  // filter type none
    raw.append(reinterpret_cast<const char*>(rgb.data()) + static_cast<std::size_t>(row) * width * 3,
               static_cast<std::size_t>(width) * 3);
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  std::string packed(len, '\0');
  if (compress2(reinterpret_cast<Bytef*>(packed.data()), &len, reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw Error("zlib compression failed");
  packed.resize(len);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(width));
  put_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);  // 8-bit RGB, no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", packed);
  put_chunk(out, "IEND", "");
  return out;
}

std::string base64_encode(std::string_view bytes) {
  static constexpr char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (static_cast<std::uint8_t>(bytes[i]) << 16) |
                            (static_cast<std::uint8_t>(bytes[i + 1]) << 8) | static_cast<std::uint8_t>(bytes[i + 2]);
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.push_back(table[(v >> 6) & 63]);
    out.push_back(table[v & 63]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t v = static_cast<std::uint8_t>(bytes[i]) << 16;
    if (rest == 2) v |= static_cast<std::uint8_t>(bytes[i + 1]) << 8;
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.push_back(rest == 2 ? table[(v >> 6) & 63] : '=');
    out.push_back('=');
  }
  return out;
}

std::string render_heatmap_svg(const LogModulusField& field, const Rect& window,
                               const std::vector<const ZeroSet*>& zero_sets, const HeatmapOptions& options) {
  const auto rgb = render_raster(field, window, options);
  const std::string png = encode_png(rgb, options.width, options.height);
  const int W = options.width, H = options.height;
  const int margin = 48;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 2 * margin << "\" height=\"" << H + 2 * margin
     << "\" viewBox=\"0 0 " << W + 2 * margin << ' ' << H + 2 * margin << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<image x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << W << "\" height=\"" << H
     << "\" preserveAspectRatio=\"none\" href=\"data:image/png;base64," << base64_encode(png) << "\"/>\n";

  auto px = [&](double beta) {
    const double x = (beta - window.beta_min) / window.width();
    return margin + (options.mirror_beta ? 1.0 - x : x) * W;
  };
  auto py = [&](double t) { return margin + (window.t_max - t) / window.height() * H; };

  os << "<g stroke-width=\"1\" fill=\"none\">\n";
  for (const ZeroSet* set : zero_sets) {
    if (!set) continue;
    for (const auto& z : set->zeros) {
      if (!window.contains(z.z.beta, z.z.t)) continue;
      const std::string x = num(px(z.z.beta)), y = num(py(z.z.t));
      switch (z.provenance) {
        case Provenance::exact:
          os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" stroke=\"#ffffff\"/>\n";
          break;
        case Provenance::approximate: {
          const double cx = px(z.z.beta), cy = py(z.z.t);
          os << "<path d=\"M" << num(cx - 2.5) << ' ' << num(cy - 2.5) << "L" << num(cx + 2.5) << ' '
             << num(cy + 2.5) << "M" << num(cx - 2.5) << ' ' << num(cy + 2.5) << "L" << num(cx + 2.5) << ' '
             << num(cy - 2.5) << "\" stroke=\"#e4002b\"/>\n";
          break;
        }
        case Provenance::analytic:
          os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"1.5\" fill=\"#00b7eb\"/>\n";
          break;
      }
    }
  }
  os << "</g>\n";

  // Frame and axis labels.
  os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << W << "\" height=\"" << H
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  const double left = options.mirror_beta ? -window.beta_max : window.beta_min;
  const double right = options.mirror_beta ? -window.beta_min : window.beta_max;
  const char* xlabel = options.mirror_beta ? "-beta" : "beta";
  os << "<text x=\"" << margin << "\" y=\"" << H + margin + 16 << "\">" << num(left) << "</text>\n";
  os << "<text x=\"" << W + margin << "\" y=\"" << H + margin + 16 << "\" text-anchor=\"end\">" << num(right)
     << "</text>\n";
  os << "<text x=\"" << margin + W / 2 << "\" y=\"" << H + margin + 32 << "\" text-anchor=\"middle\">" << xlabel
     << "</text>\n";
  os << "<text x=\"" << margin - 4 << "\" y=\"" << H + margin << "\" text-anchor=\"end\">" << num(window.t_min)
     << "</text>\n";
  os << "<text x=\"" << margin - 4 << "\" y=\"" << margin + 10 << "\" text-anchor=\"end\">" << num(window.t_max)
     << "</text>\n";
  os << "<text x=\"" << margin - 30 << "\" y=\"" << margin + H / 2 << "\" text-anchor=\"middle\">t</text>\n";
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace lzeros
