#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lrgan {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label;
  /// Dashed horizontal line, drawn and labelled when set.
  std::optional<double> reference_y;
  int width = 720;
  int height = 420;
};

/// Self-contained SVG with axes, ticks, legend and one polyline per series.
/// Non-finite points are dropped. Throws std::invalid_argument for an empty list.
std::string render_svg_lineplot(const std::vector<Series>& series, const PlotOptions& options = {});

/// Writes render_svg_lineplot to `path`; throws std::runtime_error when unwritable.
void emit_svg_lineplot(const std::vector<Series>& series, const std::filesystem::path& path,
                       const PlotOptions& options = {});

}  // namespace lrgan
