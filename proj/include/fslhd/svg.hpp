#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fslhd/level_matrix.hpp"
#include "fslhd/slice_spec.hpp"

namespace fslhd {

struct PlotOptions {
  int dim_x = 1;
  int dim_y = 2;
  int grid = 0;  // 0 = no overlay, g > 1 draws the g x g coarse grid
  int size = 480;
  int margin = 36;
};

struct PlotGlyph {
  double px = 0.0;
  double py = 0.0;
  int slice = 0;
  int cell_x = 0;  // coarse-grid cell indices when a grid overlay is set
  int cell_y = 0;
};

/// Pixel layout of one 2-D projection; y grows upward in design space, so it
/// is flipped for screen coordinates.
inline std::vector<PlotGlyph> scatter_layout(const DesignMatrix& d, const PlotOptions& opts) {
  const int q = d.spec.factors();
  if (opts.dim_x < 1 || opts.dim_x > q || opts.dim_y < 1 || opts.dim_y > q)
    throw std::invalid_argument("plot: dimension index out of range");
  const double inner = opts.size - 2.0 * opts.margin;
  std::vector<PlotGlyph> glyphs;
  glyphs.reserve(static_cast<std::size_t>(d.spec.total_runs()));
  for (int r = 1; r <= d.spec.total_runs(); ++r) {
    PlotGlyph g;
    const double x = d.points(r, opts.dim_x);
    const double y = d.points(r, opts.dim_y);
    g.px = opts.margin + x * inner;
    g.py = opts.margin + (1.0 - y) * inner;
    g.slice = slice_of_row(d.spec, r);
    if (opts.grid > 1) {
      g.cell_x = static_cast<int>(std::ceil(x * opts.grid));
      g.cell_y = static_cast<int>(std::ceil(y * opts.grid));
    }
    glyphs.push_back(g);
  }
  return glyphs;
}

namespace detail {

inline const char* slice_color(int slice) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[(slice - 1) % 8];
}

inline std::string glyph_element(const PlotGlyph& g) {
  std::ostringstream ss;
  const std::string cls = "pt slice-" + std::to_string(g.slice);
  const char* color = slice_color(g.slice);
  const double r = 4.5;
  switch ((g.slice - 1) % 4) {
    case 0:
      ss << "<circle class=\"" << cls << "\" cx=\"" << g.px << "\" cy=\"" << g.py << "\" r=\"" << r
         << "\" fill=\"" << color << "\"/>";
      break;
    case 1:
      ss << "<rect class=\"" << cls << "\" x=\"" << g.px - r << "\" y=\"" << g.py - r
         << "\" width=\"" << 2 * r << "\" height=\"" << 2 * r << "\" fill=\"" << color << "\"/>";
      break;
    case 2:
      ss << "<polygon class=\"" << cls << "\" points=\"" << g.px << "," << g.py - r << " "
         << g.px - r << "," << g.py + r << " " << g.px + r << "," << g.py + r << "\" fill=\""
         << color << "\"/>";
      break;
    default:
      ss << "<polygon class=\"" << cls << "\" points=\"" << g.px << "," << g.py - r << " "
         << g.px + r << "," << g.py << " " << g.px << "," << g.py + r << " " << g.px - r << ","
         << g.py << "\" fill=\"" << color << "\"/>";
      break;
  }
  return ss.str();
}

}  // namespace detail

/// Static SVG scatter of one 2-D projection with per-slice markers and an
/// optional coarse-grid overlay (grid g draws g-1 interior lines each way).
inline std::string render_scatter_svg(const DesignMatrix& d, const PlotOptions& opts) {
  const std::vector<PlotGlyph> glyphs = scatter_layout(d, opts);
  const double inner = opts.size - 2.0 * opts.margin;
  const double lo = opts.margin;
  const double hi = opts.margin + inner;
  std::ostringstream ss;
  ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.size << "\" height=\""
     << opts.size << "\" viewBox=\"0 0 " << opts.size << " " << opts.size << "\">\n";
  ss << "<rect class=\"frame\" x=\"" << lo << "\" y=\"" << lo << "\" width=\"" << inner
     << "\" height=\"" << inner << "\" fill=\"white\" stroke=\"black\"/>\n";
  if (opts.grid > 1) {
    for (int k = 1; k < opts.grid; ++k) {
      const double t = lo + inner * static_cast<double>(k) / opts.grid;
      ss << "<line class=\"grid-v\" x1=\"" << t << "\" y1=\"" << lo << "\" x2=\"" << t
         << "\" y2=\"" << hi << "\" stroke=\"#bbbbbb\"/>\n";
      ss << "<line class=\"grid-h\" x1=\"" << lo << "\" y1=\"" << t << "\" x2=\"" << hi
         << "\" y2=\"" << t << "\" stroke=\"#bbbbbb\"/>\n";
    }
  }
  for (const PlotGlyph& g : glyphs) ss << detail::glyph_element(g) << "\n";
  ss << "</svg>\n";
  return ss.str();
}

}  // namespace fslhd
