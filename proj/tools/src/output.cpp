#include "flagcert_cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "flagcert/errors.hpp"

namespace flagcert::cli {

const char* const kToolVersion = FLAGCERT_VERSION;

std::string Provenance::line() const {
  std::string s = std::string("flagcert ") + kToolVersion + " command=" + command + " config_hash=" + config_hash +
                  " seed=" + std::to_string(seed);
  for (const auto& [k, v] : budgets) s += " " + k + "=" + v;
  return s;
}

std::string csv_number(double x) { return format_double(x); }

CsvWriter::CsvWriter(const Provenance& provenance, const std::vector<std::string>& columns)
    : columns_(columns.size()) {
  text_ = "# " + provenance.line() + "\n";
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) fail(ErrorCode::DimensionMismatch, "CSV row width differs from the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

std::optional<std::string> embedded_hash(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  // The header sits in the first few lines of every format we write.
  static const std::regex pattern(R"re(config_hash"?\s*[=:]\s*"?([0-9a-f]{16}))re");
  std::string line;
  for (int i = 0; i < 8 && std::getline(in, line); ++i) {
    std::smatch m;
    if (std::regex_search(line, m, pattern)) return m[1].str();
  }
  return std::nullopt;
}

bool is_stale(const std::filesystem::path& file, const std::string& config_hash) {
  const auto h = embedded_hash(file);
  return !h || *h != config_hash;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::ConfigError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::ConfigError, "write failed for " + path.string());
}

namespace {

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

}  // namespace

std::string render_svg(const LimitSetCloud& cloud, const Provenance& provenance) {
  const std::size_t dim = cloud.points.empty() ? 0 : cloud.points.front().point.dim();
  if (dim > 3) fail(ErrorCode::DimensionMismatch, "SVG plots need d <= 3");

  std::vector<std::pair<double, double>> xy;
  std::string projection;
  std::size_t skipped = 0;
  if (dim == 2) {
    projection = "RP^1 as the unit circle: [cos a : sin a] -> (cos 2a, sin 2a)";
    for (const CloudPoint& p : cloud.points) {
      const double a = std::atan2(p.point[1], p.point[0]);
      xy.emplace_back(std::cos(2 * a), std::sin(2 * a));
    }
  } else if (dim == 3) {
    // Chart about the sign-aligned mean direction of the cloud.
    Vec mean(3, 0.0);
    const Vec& ref = cloud.points.front().point.coords();
    for (const CloudPoint& p : cloud.points) {
      const double s = dot(p.point.coords(), ref) < 0 ? -1.0 : 1.0;
      for (std::size_t i = 0; i < 3; ++i) mean[i] += s * p.point[i];
    }
    const ChartFrame frame{ProjHyperplane(mean)};
    const Vec& n = frame.normal();
    projection = "affine chart opposite the hyperplane with covector (" + fixed(n[0]) + ", " + fixed(n[1]) + ", " +
                 fixed(n[2]) + "), orthonormal chart coordinates";
    for (const CloudPoint& p : cloud.points) {
      if (std::abs(dot(p.point.coords(), n)) < 1e-6) {
        ++skipped;
        continue;
      }
      const Vec c = frame.coordinates(p.point, 0.0);
      xy.emplace_back(c[0], c[1]);
    }
  }

  double lo_x = -1.1, hi_x = 1.1, lo_y = -1.1, hi_y = 1.1;
  if (dim == 3 && !xy.empty()) {
    lo_x = hi_x = xy.front().first;
    lo_y = hi_y = xy.front().second;
    for (const auto& [x, y] : xy) {
      lo_x = std::min(lo_x, x);
      hi_x = std::max(hi_x, x);
      lo_y = std::min(lo_y, y);
      hi_y = std::max(hi_y, y);
    }
    const double pad = 0.05 * std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
    lo_x -= pad;
    hi_x += pad;
    lo_y -= pad;
    hi_y += pad;
  }
  const double size = 800.0;
  const double scale = size / std::max(hi_x - lo_x, hi_y - lo_y);
  auto sx = [&](double x) { return fixed((x - lo_x) * scale); };
  auto sy = [&](double y) { return fixed((hi_y - y) * scale); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<!-- " << provenance.line() << " -->\n";
  out << "<!-- projection: " << projection << " -->\n";
  out << "<!-- points: " << xy.size() << " plotted, " << skipped << " on the chart boundary skipped -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
      << size << ' ' << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (dim == 2)
    out << "<circle cx=\"" << sx(0) << "\" cy=\"" << sy(0) << "\" r=\"" << fixed(scale)
        << "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
  out << "<g fill=\"#1f4e9c\">\n";
  for (const auto& [x, y] : xy) out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"1.5\"/>\n";
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace flagcert::cli
