#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "simcal/density.hpp"
#include "simcal/plot_export.hpp"
#include "unit/support.hpp"

using namespace simcal;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(CurveCsv, RowsAndRoundTrip) {
  const auto curve = kde_1d(std::vector<double>{0.2, 0.7}, uniform_grid(0.0, 1.0, 3), 0.1);
  std::stringstream ss;
  write_curve_csv(ss, curve);
  EXPECT_EQ(count_lines(ss.str()), 4u);
  EXPECT_EQ(ss.str().substr(0, 10), "x,density\n");
  const auto back = read_curve_csv(ss);
  EXPECT_EQ(back.grid, curve.grid);
  EXPECT_EQ(back.values, curve.values);
}

TEST(GridCsv, ShapeAndRoundTrip) {
  std::mt19937_64 rng(1);
  const auto grid = gaussian_smooth(joint_histogram(testing_support::random_pairs(rng, 500), 10, 10), 1.0);
  std::stringstream g, xe, ye;
  write_grid_csv(g, grid);
  write_edges_csv(xe, grid.x_edges);
  write_edges_csv(ye, grid.y_edges);
  EXPECT_EQ(count_lines(g.str()), 10u);
  EXPECT_EQ(count_lines(xe.str()), 12u);
  const auto rows = read_matrix_csv(g);
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    ASSERT_EQ(rows[i].size(), 10u);
    for (std::size_t j = 0; j < 10; ++j) {
      const double want = grid.at(i, j);
      ASSERT_NEAR(rows[i][j], want, 1e-15 * std::max(1.0, std::fabs(want)));
    }
  }
  EXPECT_EQ(read_edges_csv(xe), grid.x_edges);
  EXPECT_EQ(read_edges_csv(ye), grid.y_edges);
}

TEST(Svg, DensityFigureHasCurvesAndMarker) {
  const auto a = kde_1d(std::vector<double>{0.2, 0.4, 0.5});
  const auto b = kde_1d(std::vector<double>{0.8, 0.85, 0.9});
  const auto svg = render_density_svg({{"human", "black", &a}, {"model", "blue", &b}}, 0.72, "t");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("class=\"threshold\""), std::string::npos);
  EXPECT_EQ(std::count(svg.begin(), svg.end(), 'p') > 0, true);
  const auto plain = render_density_svg({{"human", "black", &a}}, std::nullopt, "t");
  EXPECT_EQ(plain.find("class=\"threshold\""), std::string::npos);
}

TEST(Svg, HeatmapHasDiagonal) {
  std::mt19937_64 rng(2);
  const auto grid = joint_histogram(testing_support::random_pairs(rng, 100), 5, 5);
  const auto svg = render_heatmap_svg(grid, "joint");
  EXPECT_NE(svg.find("class=\"diagonal\""), std::string::npos);
  const auto nonzero = std::count_if(grid.densities.begin(), grid.densities.end(), [](double d) { return d > 0.0; });
  std::size_t rects = 0;
  for (auto pos = svg.find("<rect"); pos != std::string::npos; pos = svg.find("<rect", pos + 1)) ++rects;
  EXPECT_EQ(rects, static_cast<std::size_t>(nonzero) + 2);
}
