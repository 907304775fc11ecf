#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "simcal/density.hpp"

namespace simcal {

// CSV layouts (values at 17 significant digits):
//   curve:  header "x,density", one row per grid point
//   grid:   nx rows of ny comma-separated densities, no header
//   edges:  header "edge", one edge per row
void write_curve_csv(std::ostream& out, const DensityCurve& curve);
void write_grid_csv(std::ostream& out, const DensityGrid2D& grid);
void write_edges_csv(std::ostream& out, const std::vector<double>& edges);

struct CurveCsv {
  std::vector<double> grid;
  std::vector<double> values;
};
CurveCsv read_curve_csv(std::istream& in);
std::vector<std::vector<double>> read_matrix_csv(std::istream& in);
std::vector<double> read_edges_csv(std::istream& in);

struct LabeledCurve {
  std::string label;
  std::string color;
  const DensityCurve* curve = nullptr;
};

/// Standalone SVG with the density curves and, when given, a vertical
/// threshold marker.
std::string render_density_svg(const std::vector<LabeledCurve>& curves, std::optional<double> threshold,
                               const std::string& title);

/// Standalone SVG heatmap of a joint grid with the y = x diagonal.
std::string render_heatmap_svg(const DensityGrid2D& grid, const std::string& title);

}  // namespace simcal
