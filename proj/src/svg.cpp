#include "morphevo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

namespace morphevo {

namespace {

struct Color {
  int r, g, b;
};

// Three-stop linear ramp (dark violet -> teal -> yellow).
Color ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const auto lerp = [](int a, int b, double u) {
    return static_cast<int>(std::lround(a + (b - a) * u));
  };
  const Color low{68, 1, 84}, mid{33, 145, 140}, high{253, 231, 37};
  if (t < 0.5) {
    const double u = t * 2.0;
    return {lerp(low.r, mid.r, u), lerp(low.g, mid.g, u), lerp(low.b, mid.b, u)};
  }
  const double u = (t - 0.5) * 2.0;
  return {lerp(mid.r, high.r, u), lerp(mid.g, high.g, u), lerp(mid.b, high.b, u)};
}

std::string fmt(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

}  // namespace

std::string render_heatmap_svg(const FitnessGrid& grid, const std::string& title) {
  const int nx = grid.grid.nx;
  const int ny = grid.grid.ny;
  const int cell_px = 24;
  const int margin_left = 64, margin_top = title.empty() ? 24 : 48;
  const int margin_bottom = 56, margin_right = 24;
  const int width = margin_left + nx * cell_px + margin_right;
  const int height = margin_top + ny * cell_px + margin_bottom;

  double lo = grid.mean_reward.empty() ? 0.0 : grid.mean_reward[0];
  double hi = lo;
  for (double v : grid.mean_reward) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo;

  std::string svg;
  svg += fmt("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
             "viewBox=\"0 0 %d %d\">\n", width, height, width, height);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg += fmt("<text x=\"%d\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">%s</text>\n",
               margin_left, title.c_str());
  }
  // y axis runs upward: row 0 (smallest y_param) at the bottom.
  for (int cell = 0; cell < grid.grid.size(); ++cell) {
    const int i = grid.grid.col(cell);
    const int j = grid.grid.row(cell);
    const double v = grid.mean_reward[static_cast<std::size_t>(cell)];
    const double t = span > 0.0 ? (v - lo) / span : 0.5;
    const Color c = ramp(t);
    svg += fmt("<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"#%02x%02x%02x\"/>\n",
               margin_left + i * cell_px, margin_top + (ny - 1 - j) * cell_px,
               cell_px, cell_px, c.r, c.g, c.b);
  }
  // axis extents
  svg += fmt("<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">x: %.6g .. %.6g</text>\n",
             margin_left, margin_top + ny * cell_px + 16, grid.grid.origin_x,
             grid.grid.origin_x + (nx - 1) * grid.grid.step_x);
  svg += fmt("<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">y: %.6g .. %.6g</text>\n",
             margin_left, margin_top + ny * cell_px + 32, grid.grid.origin_y,
             grid.grid.origin_y + (ny - 1) * grid.grid.step_y);
  // legend: linear ramp with annotated min/max mean reward
  const Color clo = ramp(0.0), chi = ramp(1.0);
  svg += fmt("<rect x=\"%d\" y=\"%d\" width=\"12\" height=\"12\" fill=\"#%02x%02x%02x\"/>\n",
             margin_left, margin_top + ny * cell_px + 38, clo.r, clo.g, clo.b);
  svg += fmt("<rect x=\"%d\" y=\"%d\" width=\"12\" height=\"12\" fill=\"#%02x%02x%02x\"/>\n",
             margin_left + 120, margin_top + ny * cell_px + 38, chi.r, chi.g, chi.b);
  svg += fmt("<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">min %.6g</text>\n",
             margin_left + 16, margin_top + ny * cell_px + 48, lo);
  svg += fmt("<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">max %.6g (n_eval=%d)</text>\n",
             margin_left + 136, margin_top + ny * cell_px + 48, hi, grid.n_eval);
  svg += "</svg>\n";
  return svg;
}

}  // namespace morphevo
