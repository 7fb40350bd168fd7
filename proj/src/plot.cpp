#include "csilab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace csilab::plot {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 200, kTop = 40, kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  bool log_x;
  double px(double x) const {
    const double a = log_x ? std::log10(x) : x;
    const double lo = log_x ? std::log10(x0) : x0;
    const double hi = log_x ? std::log10(x1) : x1;
    return kLeft + (a - lo) / (hi - lo) * (kWidth - kLeft - kRight);
  }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void pad_range(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double m = 0.05 * (hi - lo);
  lo -= m;
  hi += m;
}

void write_frame(std::ostringstream& os, const Axes& axes, const Frame& f) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(axes.title)
     << "</text>\n"
     << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
     << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << f.py(y) + 4 << "\" text-anchor=\"end\">" << std::setprecision(3)
       << y << "</text>\n";
    double x;
    if (f.log_x)
      x = std::pow(10.0, std::log10(f.x0) + (std::log10(f.x1) - std::log10(f.x0)) * i / 4.0);
    else
      x = f.x0 + (f.x1 - f.x0) * i / 4.0;
    os << "<text x=\"" << f.px(x) << "\" y=\"" << kHeight - kBottom + 18 << "\" text-anchor=\"middle\">" << x
       << "</text>\n";
  }
  os << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
     << escape(axes.x_label) << "</text>\n"
     << "<text x=\"18\" y=\"" << (kTop + kHeight - kBottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << (kTop + kHeight - kBottom) / 2 << ")\">" << escape(axes.y_label) << "</text>\n";
}

void commit(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path.string() + ".tmp", std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << text;
  out.close();
  if (!out) throw IoError(path.string() + ": write failed");
  fs::rename(path.string() + ".tmp", path);
}

}  // namespace

Series cdf_series(const std::string& label, const std::vector<metrics::CdfPoint>& cdf) {
  Series s{label, {}, {}, false};
  double prev = 0.0;
  for (const auto& p : cdf) {
    s.x.push_back(p.value);
    s.y.push_back(prev);
    s.x.push_back(p.value);
    s.y.push_back(p.fraction);
    prev = p.fraction;
  }
  return s;
}

void line_chart(const fs::path& path, const Axes& axes, const std::vector<Series>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (axes.log_x && !(s.x[i] > 0.0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (axes.log_x) {
    if (!(x1 > x0)) x1 = x0 * 10;
  } else {
    pad_range(x0, x1);
  }
  pad_range(y0, y1);
  const Frame f{x0, x1, y0, y1, axes.log_x};
  std::ostringstream os;
  write_frame(os, axes, f);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
       << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (axes.log_x && !(s.x[i] > 0.0)) continue;
      os << f.px(s.x[i]) << "," << f.py(s.y[i]) << " ";
    }
    os << "\"/>\n";
    const double ly = kTop + 14 + 18 * static_cast<double>(k);
    os << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kWidth - kRight + 30
       << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\""
       << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n"
       << "<text x=\"" << kWidth - kRight + 35 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  commit(path, os.str());
}

void box_chart(const fs::path& path, const Axes& axes, const std::vector<Box>& boxes) {
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const auto& b : boxes) {
    y0 = std::min(y0, b.stats.whisker_lo);
    y1 = std::max(y1, b.stats.whisker_hi);
  }
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  pad_range(y0, y1);
  const double n = static_cast<double>(std::max<std::size_t>(boxes.size(), 1));
  const Frame f{0.0, n, y0, y1, false};
  std::ostringstream os;
  Axes a = axes;
  write_frame(os, a, f);
  const double slot = (kWidth - kLeft - kRight) / n;
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const auto& s = boxes[k].stats;
    const double cx = kLeft + slot * (static_cast<double>(k) + 0.5);
    const double hw = slot * 0.25;
    const char* color = kPalette[k % std::size(kPalette)];
    os << "<line x1=\"" << cx << "\" y1=\"" << f.py(s.whisker_lo) << "\" x2=\"" << cx << "\" y2=\"" << f.py(s.q1)
       << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << cx << "\" y1=\"" << f.py(s.q3) << "\" x2=\"" << cx << "\" y2=\"" << f.py(s.whisker_hi)
       << "\" stroke=\"black\"/>\n"
       << "<rect x=\"" << cx - hw << "\" y=\"" << f.py(s.q3) << "\" width=\"" << 2 * hw << "\" height=\""
       << std::max(1.0, f.py(s.q1) - f.py(s.q3)) << "\" fill=\"" << color << "\" fill-opacity=\"0.4\" stroke=\"black\"/>\n"
       << "<line x1=\"" << cx - hw << "\" y1=\"" << f.py(s.median) << "\" x2=\"" << cx + hw << "\" y2=\""
       << f.py(s.median) << "\" stroke=\"black\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << cx << "\" y=\"" << kHeight - kBottom + 34 << "\" text-anchor=\"middle\">"
       << escape(boxes[k].label) << "</text>\n";
  }
  os << "</svg>\n";
  commit(path, os.str());
}

}  // namespace csilab::plot
