#pragma once

#include <string>

#include "morphevo/metrics.hpp"

namespace morphevo {

// Self-contained SVG heatmap of a fitness grid. Linear color ramp between
// the grid's min and max (annotated in the legend); byte-identical output
// for identical input data.
std::string render_heatmap_svg(const FitnessGrid& grid,
                               const std::string& title = "");

}  // namespace morphevo
