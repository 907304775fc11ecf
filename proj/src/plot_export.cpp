#include "simcal/plot_export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "simcal/error.hpp"

namespace simcal {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_row(const std::string& line, std::size_t line_no) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw ValidationError("csv line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
    }
  }
  return out;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void svg_open(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "font-size=\"14\">" << escape_xml(title) << "</text>\n";
  os << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
     << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
}

}  // namespace

void write_curve_csv(std::ostream& out, const DensityCurve& curve) {
  out << "x,density\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) out << fmt17(curve.grid[i]) << ',' << fmt17(curve.values[i]) << '\n';
}

void write_grid_csv(std::ostream& out, const DensityGrid2D& grid) {
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    for (std::size_t j = 0; j < grid.ny(); ++j) out << (j ? "," : "") << fmt17(grid.at(i, j));
    out << '\n';
  }
}

void write_edges_csv(std::ostream& out, const std::vector<double>& edges) {
  out << "edge\n";
  for (double e : edges) out << fmt17(e) << '\n';
}

CurveCsv read_curve_csv(std::istream& in) {
  CurveCsv c;
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,density", 0) != 0) throw ValidationError("curve csv: bad header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto row = parse_row(line, line_no);
    if (row.size() != 2) throw ValidationError("curve csv line " + std::to_string(line_no) + ": expected 2 columns");
    c.grid.push_back(row[0]);
    c.values.push_back(row[1]);
  }
  return c;
}

std::vector<std::vector<double>> read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    rows.push_back(parse_row(line, line_no));
  }
  return rows;
}

std::vector<double> read_edges_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("edge", 0) != 0) throw ValidationError("edges csv: bad header");
  std::vector<double> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    out.push_back(parse_row(line, line_no).at(0));
  }
  return out;
}

std::string render_density_svg(const std::vector<LabeledCurve>& curves, std::optional<double> threshold,
                               const std::string& title) {
  double x_lo = 0.0, x_hi = 1.0, y_hi = 0.0;
  for (const auto& c : curves) {
    if (c.curve == nullptr || c.curve->grid.empty()) continue;
    x_lo = std::min(x_lo, c.curve->grid.front());
    x_hi = std::max(x_hi, c.curve->grid.back());
    for (double v : c.curve->values) y_hi = std::max(y_hi, v);
  }
  if (y_hi <= 0.0) y_hi = 1.0;
  const double pw = kWidth - 2 * kMargin;
  const double ph = kHeight - 2 * kMargin;
  const auto px = [&](double x) { return kMargin + pw * (x - x_lo) / (x_hi - x_lo); };
  const auto py = [&](double y) { return kHeight - kMargin - ph * y / (1.05 * y_hi); };

  std::ostringstream os;
  svg_open(os, title);
  double legend_y = kMargin + 16;
  for (const auto& c : curves) {
    if (c.curve == nullptr) continue;
    os << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < c.curve->grid.size(); ++i) {
      os << px(c.curve->grid[i]) << ',' << py(c.curve->values[i]) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << kWidth - kMargin - 8 << "\" y=\"" << legend_y << "\" text-anchor=\"end\" "
       << "font-family=\"sans-serif\" font-size=\"12\" fill=\"" << c.color << "\">" << escape_xml(c.label)
       << "</text>\n";
    legend_y += 16;
  }
  if (threshold) {
    os << "<line class=\"threshold\" x1=\"" << px(*threshold) << "\" y1=\"" << kMargin << "\" x2=\"" << px(*threshold)
       << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"green\" stroke-width=\"2\"/>\n";
  }
  os << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\" font-family=\"sans-serif\" "
     << "font-size=\"11\">" << x_lo << "</text>\n";
  os << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\" text-anchor=\"end\" "
     << "font-family=\"sans-serif\" font-size=\"11\">" << x_hi << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string render_heatmap_svg(const DensityGrid2D& grid, const std::string& title) {
  const double pw = kWidth - 2 * kMargin;
  const double ph = kHeight - 2 * kMargin;
  double peak = 0.0;
  for (double v : grid.densities) peak = std::max(peak, v);
  if (peak <= 0.0) peak = 1.0;

  std::ostringstream os;
  svg_open(os, title);
  const double cw = pw / static_cast<double>(grid.nx());
  const double ch = ph / static_cast<double>(grid.ny());
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    for (std::size_t j = 0; j < grid.ny(); ++j) {
      const double v = grid.at(i, j);
      if (v <= 0.0) continue;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - std::sqrt(v / peak))));
      os << "<rect x=\"" << kMargin + cw * static_cast<double>(i) << "\" y=\""
         << kHeight - kMargin - ch * static_cast<double>(j + 1) << "\" width=\"" << cw << "\" height=\"" << ch
         << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\"/>\n";
    }
  }
  os << "<line class=\"diagonal\" x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
     << kWidth - kMargin << "\" y2=\"" << kMargin << "\" stroke=\"red\" stroke-dasharray=\"6,4\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"12\">human score</text>\n";
  os << "<text x=\"14\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 14 " << kHeight / 2
     << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">model score</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace simcal
