#ifndef WINKLER_REPORT_HPP
#define WINKLER_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "winkler/decomposition.hpp"

namespace winkler {

/// One labeled point of a miscalibration-discrimination plot. mcb/dsc
/// are display values (already clamped at zero); all entries of a plot
/// must share the same uncertainty term.
struct McbDscEntry {
  std::string label;
  double mcb = 0.0;
  double dsc = 0.0;
  double unc = 0.0;
};

struct PlotSpec {
  std::vector<McbDscEntry> entries;
  double x_min = 0.0, x_max = 1.0;  // MCB axis
  double y_min = 0.0, y_max = 1.0;  // DSC axis
  std::vector<double> isolines;     // interval-score values, increasing
  int width = 640;
  int height = 480;
};

/// Computes axis ranges (entries covered with a 5% margin) and at most
/// eight round-valued score isolines spanning the entries' scores.
/// Throws when entries disagree on unc.
PlotSpec make_plot_spec(std::vector<McbDscEntry> entries, int width = 640,
                        int height = 480);

/// Affine data-to-pixel mapping used by the renderer; exposed so the
/// geometry of emitted plots can be checked directly.
struct PlotLayout {
  double x_min, x_max, y_min, y_max;
  double plot_left, plot_top, plot_width, plot_height;
  double px(double x) const {
    return plot_left + (x - x_min) / (x_max - x_min) * plot_width;
  }
  double py(double y) const {
    return plot_top + (y_max - y) / (y_max - y_min) * plot_height;
  }
};

PlotLayout plot_layout(const PlotSpec& spec);

/// Renders the plot as an SVG 1.1 document: MCB on x, DSC on y, grey
/// slope-one isolines at the configured score values, a green isoline
/// at score == unc through the origin, and one labeled point per entry.
/// Byte-identical output for identical input.
std::string mcb_dsc_plot(const PlotSpec& spec);

nlohmann::ordered_json report_to_json(const DecompositionReport& report);
DecompositionReport report_from_json(const nlohmann::ordered_json& j);

/// Writes the report JSON (schema of the decomposition module) with an
/// atomic rename; rejects non-finite values before touching the file.
void write_report_json(const DecompositionReport& report,
                       const std::filesystem::path& path);
DecompositionReport read_report_json(const std::filesystem::path& path);

}  // namespace winkler

#endif  // WINKLER_REPORT_HPP
