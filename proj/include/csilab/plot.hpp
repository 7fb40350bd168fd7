#pragma once

// Static SVG charts rendered from the same data that goes to CSV.

#include <filesystem>
#include <string>
#include <vector>

#include "csilab/metrics.hpp"

namespace csilab::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
};

void line_chart(const std::filesystem::path& path, const Axes& axes, const std::vector<Series>& series);

struct Box {
  std::string label;
  metrics::BoxStats stats;
};

void box_chart(const std::filesystem::path& path, const Axes& axes, const std::vector<Box>& boxes);

/// Step-shaped series for an empirical CDF.
Series cdf_series(const std::string& label, const std::vector<metrics::CdfPoint>& cdf);

}  // namespace csilab::plot
