#include "delaysync/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace delaysync::io {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr int kPaletteSize = 8;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

// Maps data coordinates into a pixel rectangle.
struct Frame {
  double x0, y0, w, h;          // pixel box
  double xmin, xmax, ymin, ymax;  // data box

  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void axes(std::ostringstream& os, const Frame& f, const std::string& xlabel,
          const std::string& ylabel) {
  os << "<rect x='" << f.x0 << "' y='" << f.y0 << "' width='" << f.w << "' height='" << f.h
     << "' fill='none' stroke='#444'/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.xmin + (f.xmax - f.xmin) * k / 4.0;
    const double yv = f.ymin + (f.ymax - f.ymin) * k / 4.0;
    os << "<text x='" << f.px(xv) << "' y='" << f.y0 + f.h + 14
       << "' font-size='10' text-anchor='middle'>" << num(xv) << "</text>\n";
    os << "<text x='" << f.x0 - 4 << "' y='" << f.py(yv) + 3
       << "' font-size='10' text-anchor='end'>" << num(yv) << "</text>\n";
    os << "<line x1='" << f.px(xv) << "' y1='" << f.y0 << "' x2='" << f.px(xv) << "' y2='"
       << f.y0 + f.h << "' stroke='#eee'/>\n";
    os << "<line x1='" << f.x0 << "' y1='" << f.py(yv) << "' x2='" << f.x0 + f.w << "' y2='"
       << f.py(yv) << "' stroke='#eee'/>\n";
  }
  os << "<text x='" << f.x0 + f.w / 2 << "' y='" << f.y0 + f.h + 30
     << "' font-size='11' text-anchor='middle'>" << escape(xlabel) << "</text>\n";
  os << "<text x='" << f.x0 - 40 << "' y='" << f.y0 + f.h / 2 << "' font-size='11' "
     << "text-anchor='middle' transform='rotate(-90 " << f.x0 - 40 << " " << f.y0 + f.h / 2
     << ")'>" << escape(ylabel) << "</text>\n";
}

void pad(double& lo, double& hi) {
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double m = 0.05 * (hi - lo);
  lo -= m;
  hi += m;
}

}  // namespace

std::string region_svg(const std::vector<RegionLayer>& layers,
                       const std::vector<Complex>& eigenvalues, const std::string& title) {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  auto include = [&](Complex z) {
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymin = std::min(ymin, z.imag());
    ymax = std::max(ymax, z.imag());
  };
  for (const auto& l : layers)
    for (const auto& z : l.hull) include(z);
  for (const auto& z : eigenvalues) include(z);
  pad(xmin, xmax);
  pad(ymin, ymax);

  const Frame f{70, 40, 560, 400, xmin, xmax, ymin, ymax};
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='760' height='500' "
        "font-family='sans-serif'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='350' y='22' font-size='14' text-anchor='middle'>" << escape(title) << "</text>\n";
  axes(os, f, "Re", "Im");
  os << "<line x1='" << f.px(xmin) << "' y1='" << f.py(0) << "' x2='" << f.px(xmax) << "' y2='"
     << f.py(0) << "' stroke='#999' stroke-dasharray='3,3'/>\n";

  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto* color = kPalette[k % kPaletteSize];
    const auto& l = layers[k];
    if (!l.hull.empty()) {
      os << "<polygon fill='" << color << "' fill-opacity='0.15' stroke='" << color
         << "' stroke-width='1.5' points='";
      for (const auto& z : l.hull) os << f.px(z.real()) << "," << f.py(z.imag()) << " ";
      os << "'/>\n";
    }
    for (const auto& z : l.vertices) {
      os << "<circle cx='" << f.px(z.real()) << "' cy='" << f.py(z.imag()) << "' r='2' fill='"
         << color << "'/>\n";
    }
    os << "<rect x='645' y='" << 50 + 18 * k << "' width='12' height='12' fill='" << color
       << "' fill-opacity='0.4'/>\n";
    os << "<text x='662' y='" << 60 + 18 * k << "' font-size='11'>" << escape(l.label) << "</text>\n";
  }
  for (const auto& z : eigenvalues) {
    const double x = f.px(z.real());
    const double y = f.py(z.imag());
    os << "<path d='M" << x - 5 << "," << y - 5 << " L" << x + 5 << "," << y + 5 << " M"
       << x - 5 << "," << y + 5 << " L" << x + 5 << "," << y - 5
       << "' stroke='black' stroke-width='1.5'/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string trajectory_svg(const Trajectory& tr, const std::string& title) {
  const int n = static_cast<int>(tr.leader_states.cols());
  const std::size_t T = tr.times.size();
  const std::size_t stride = std::max<std::size_t>(1, T / 1500);
  const int panels = n + 1;
  const double panel_h = 160.0;
  const double height = 50 + panels * (panel_h + 50);

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='760' height='" << height
     << "' font-family='sans-serif'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='380' y='22' font-size='14' text-anchor='middle'>" << escape(title) << "</text>\n";
  if (T == 0) {
    os << "</svg>\n";
    return os.str();
  }
  const double tmax = std::max(tr.times.back(), 1e-12);

  auto polyline = [&](const Frame& f, auto value, const char* color, bool dashed) {
    os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.2'"
       << (dashed ? " stroke-dasharray='6,3'" : "") << " points='";
    for (std::size_t k = 0; k < T; k += stride) {
      os << f.px(tr.times[k]) << "," << f.py(value(k)) << " ";
    }
    os << f.px(tr.times[T - 1]) << "," << f.py(value(T - 1)) << "'/>\n";
  };

  for (int c = 0; c < panels; ++c) {
    const double top = 40 + c * (panel_h + 50);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    if (c < n) {
      for (std::size_t k = 0; k < T; ++k) {
        lo = std::min(lo, tr.leader_states(k, c));
        hi = std::max(hi, tr.leader_states(k, c));
        for (const auto& a : tr.agent_states) {
          lo = std::min(lo, a(k, c));
          hi = std::max(hi, a(k, c));
        }
      }
    } else {
      for (std::size_t k = 0; k < T; ++k) {
        const double v = std::log10(std::max(tr.sync_error_norm(k), 1e-300));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      lo = std::max(lo, -16.0);
    }
    pad(lo, hi);
    const Frame f{70, top, 560, panel_h, 0.0, tmax, lo, hi};
    if (c < n) {
      axes(os, f, "t [s]", "x" + std::to_string(c + 1));
      for (std::size_t a = 0; a < tr.agent_states.size(); ++a) {
        polyline(f, [&](std::size_t k) { return tr.agent_states[a](k, c); },
                 kPalette[a % kPaletteSize], false);
      }
      polyline(f, [&](std::size_t k) { return tr.leader_states(k, c); }, "black", true);
    } else {
      axes(os, f, "t [s]", "log10 |delta|");
      polyline(f, [&](std::size_t k) {
        return std::max(std::log10(std::max(tr.sync_error_norm(k), 1e-300)), lo);
      }, "black", false);
    }
  }
  os << "<text x='645' y='60' font-size='11'>leader (dashed)</text>\n";
  for (std::size_t a = 0; a < tr.agent_states.size() && a < 16; ++a) {
    os << "<line x1='645' y1='" << 74 + 14 * a << "' x2='660' y2='" << 74 + 14 * a
       << "' stroke='" << kPalette[a % kPaletteSize] << "' stroke-width='2'/>\n";
    os << "<text x='664' y='" << 78 + 14 * a << "' font-size='11'>agent " << a + 1 << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace delaysync::io
