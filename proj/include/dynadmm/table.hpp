#ifndef DYNADMM_TABLE_HPP_
#define DYNADMM_TABLE_HPP_

// Numeric tables and their CSV / SVG renderings.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynadmm {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::out_of_range("Table: no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }

  std::vector<double> values(const std::string& name) const {
    const auto c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
};

/// 17 significant digits, so values round-trip exactly.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      os << (i ? "," : "");
      // the first column is always the integer step index
      if (i == 0 && std::isfinite(r[i]) && r[i] == std::floor(r[i])) {
        os << static_cast<long long>(r[i]);
      } else {
        os << format_real(r[i]);
      }
    }
    os << '\n';
  }
  return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

/// Line chart of every column against the first. Log-scale y when all
/// plotted values are positive.
inline std::string to_svg(const Table& t, const std::string& title) {
  constexpr double W = 720, H = 440, L = 70, R = 170, T = 40, B = 50;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  bool positive = true;
  for (const auto& r : t.rows) {
    xmin = std::min(xmin, r[0]);
    xmax = std::max(xmax, r[0]);
    for (std::size_t c = 1; c < r.size(); ++c) {
      if (!std::isfinite(r[c])) continue;
      ymin = std::min(ymin, r[c]);
      ymax = std::max(ymax, r[c]);
      positive = positive && r[c] > 0;
    }
  }
  if (!std::isfinite(xmin) || !std::isfinite(ymin)) {
    xmin = ymin = 0;
    xmax = ymax = 1;
  }
  auto fy = [&](double v) { return positive ? std::log10(v) : v; };
  double y0 = fy(ymin), y1 = fy(ymax);
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return T + (1.0 - (fy(y) - y0) / (y1 - y0)) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << L << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n"
     << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << (W - L - R) << "\" height=\"" << (H - T - B)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  char buf[64];
  for (int i = 0; i <= 4; ++i) {
    const double yv = y0 + (y1 - y0) * i / 4.0;
    const double ypix = T + (1.0 - i / 4.0) * (H - T - B);
    std::snprintf(buf, sizeof buf, "%.3g", positive ? std::pow(10.0, yv) : yv);
    os << "<text x=\"" << (L - 6) << "\" y=\"" << ypix + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
       << "font-size=\"11\">" << buf << "</text>\n";
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    std::snprintf(buf, sizeof buf, "%.4g", xv);
    os << "<text x=\"" << px(xv) << "\" y=\"" << (H - B + 16) << "\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";
  }
  os << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"" << (H - 12) << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"12\">" << t.header[0] << "</text>\n";
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    const char* color = colors[(c - 1) % (sizeof colors / sizeof *colors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : t.rows) {
      if (!std::isfinite(r[c]) || (positive && r[c] <= 0)) continue;
      os << px(r[0]) << "," << py(r[c]) << " ";
    }
    os << "\"/>\n";
    const double ly = T + 16.0 * static_cast<double>(c);
    os << "<line x1=\"" << (W - R + 10) << "\" y1=\"" << ly << "\" x2=\"" << (W - R + 30) << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << (W - R + 36) << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
       << t.header[c] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace dynadmm

#endif  // DYNADMM_TABLE_HPP_
