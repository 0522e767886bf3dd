#pragma once

#include <string>
#include <vector>

#include "aimrom/linalg.hpp"

namespace aimrom {

struct PlotSeries {
  std::string label;
  Vec x;
  Vec y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  std::string provenance;  // embedded as an XML comment
};

// Self-contained SVG document.
std::string render_svg(const LinePlot& plot);

}  // namespace aimrom
