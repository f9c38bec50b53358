#pragma once

#include <string>
#include <vector>

namespace nfres::io {

// Minimal static SVG line plots for the transmission / finesse figures.
// Output only; deterministic byte-for-byte for identical inputs.

struct PlotSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> yerr;   // empty = no error bars
  std::string color = "#1f77b4";
  bool points_only = false;   // markers (+ error bars) instead of a line
  std::string label;
};

struct PlotPanel {
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

struct Figure {
  std::string title;
  std::vector<PlotPanel> panels;  // stacked vertically
  int width = 800;
  int panel_height = 280;
};

std::string render_svg(const Figure& fig);
void write_svg(const Figure& fig, const std::string& path);

}  // namespace nfres::io
