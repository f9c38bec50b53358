#include "nfres/io/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "nfres/errors.hpp"
#include "nfres/io/scan_file.hpp"

namespace nfres::io {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

}  // namespace

std::string render_svg(const Figure& fig) {
  if (fig.panels.empty()) {
    throw ValidationError("render_svg: figure has no panels");
  }
  const int margin_l = 70, margin_r = 20, margin_t = 36, margin_b = 46;
  const int total_h =
      margin_t + static_cast<int>(fig.panels.size()) * (fig.panel_height + margin_b);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fig.width << "\" height=\""
     << total_h << "\" viewBox=\"0 0 " << fig.width << " " << total_h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fig.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"15\">" << fig.title << "</text>\n";

  int top = margin_t;
  for (const auto& panel : fig.panels) {
    const int plot_w = fig.width - margin_l - margin_r;
    const int plot_h = fig.panel_height;

    Range rx, ry;
    for (const auto& s : panel.series) {
      for (size_t i = 0; i < s.x.size(); ++i) {
        rx.include(s.x[i]);
        ry.include(s.y[i]);
        if (!s.yerr.empty()) {
          ry.include(s.y[i] + s.yerr[i]);
          ry.include(s.y[i] - s.yerr[i]);
        }
      }
    }
    rx.pad();
    ry.pad();

    auto px = [&](double x) { return margin_l + (x - rx.lo) / (rx.hi - rx.lo) * plot_w; };
    auto py = [&](double y) { return top + plot_h - (y - ry.lo) / (ry.hi - ry.lo) * plot_h; };

    os << "<rect x=\"" << margin_l << "\" y=\"" << top << "\" width=\"" << plot_w
       << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";

    // 5 ticks per axis.
    for (int t = 0; t <= 4; ++t) {
      const double xv = rx.lo + (rx.hi - rx.lo) * t / 4;
      const double yv = ry.lo + (ry.hi - ry.lo) * t / 4;
      os << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << top + plot_h << "\" x2=\""
         << fmt(px(xv)) << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"#333\"/>\n";
      os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << top + plot_h + 18
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
         << fmt_tick(xv) << "</text>\n";
      os << "<line x1=\"" << margin_l - 5 << "\" y1=\"" << fmt(py(yv)) << "\" x2=\""
         << margin_l << "\" y2=\"" << fmt(py(yv)) << "\" stroke=\"#333\"/>\n";
      os << "<text x=\"" << margin_l - 8 << "\" y=\"" << fmt(py(yv) + 4)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
         << fmt_tick(yv) << "</text>\n";
    }
    os << "<text x=\"" << margin_l + plot_w / 2 << "\" y=\"" << top + plot_h + 36
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << panel.x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << top + plot_h / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
       << "transform=\"rotate(-90 16 " << top + plot_h / 2 << ")\">" << panel.y_label
       << "</text>\n";

    int legend_y = top + 16;
    for (const auto& s : panel.series) {
      if (s.x.empty()) continue;
      if (s.points_only) {
        for (size_t i = 0; i < s.x.size(); ++i) {
          const double cx = px(s.x[i]);
          const double cy = py(s.y[i]);
          if (!s.yerr.empty() && s.yerr[i] > 0.0) {
            os << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(py(s.y[i] - s.yerr[i]))
               << "\" x2=\"" << fmt(cx) << "\" y2=\"" << fmt(py(s.y[i] + s.yerr[i]))
               << "\" stroke=\"" << s.color << "\"/>\n";
          }
          os << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy)
             << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
        }
      } else {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
          os << fmt(px(s.x[i])) << "," << fmt(py(s.y[i])) << " ";
        }
        os << "\"/>\n";
      }
      if (!s.label.empty()) {
        os << "<text x=\"" << margin_l + plot_w - 8 << "\" y=\"" << legend_y
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
           << s.color << "\">" << s.label << "</text>\n";
        legend_y += 14;
      }
    }
    top += plot_h + margin_b;
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg(const Figure& fig, const std::string& path) {
  atomic_write(path, render_svg(fig));
}

}  // namespace nfres::io
