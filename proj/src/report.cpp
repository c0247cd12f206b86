#include "winkler/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "winkler/csv_io.hpp"

namespace winkler {

namespace {

// Fixed-precision, locale-free formatting for axis annotations.
std::string fmt_tick(double x) {
  char buf[48];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 4);
  if (ec != std::errc()) {
    throw internal_error("tick formatting failed");
  }
  return std::string(buf, ptr);
}

double nice_step(double span, int max_steps) {
  const double raw = span / static_cast<double>(max_steps);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) return mag * mult;
  }
  return mag * 10.0;
}

void validate_spec(const PlotSpec& spec) {
  if (spec.entries.empty()) {
    throw validation_error("plot needs at least one entry");
  }
  if (spec.width <= 0 || spec.height <= 0) {
    throw validation_error("plot size must be positive");
  }
  const double unc = spec.entries.front().unc;
  for (const McbDscEntry& e : spec.entries) {
    if (!std::isfinite(e.mcb) || !std::isfinite(e.dsc) || !std::isfinite(e.unc)) {
      throw validation_error("plot entries must be finite");
    }
    if (std::abs(e.unc - unc) > 1e-12 * std::max(1.0, std::abs(unc))) {
      throw validation_error(
          "plot entries disagree on the uncertainty term; all entries must "
          "come from the same outcome set");
    }
  }
  if (!(spec.x_min < spec.x_max) || !(spec.y_min < spec.y_max)) {
    throw validation_error("plot axis ranges must be non-empty");
  }
  for (std::size_t i = 1; i < spec.isolines.size(); ++i) {
    if (spec.isolines[i] <= spec.isolines[i - 1]) {
      throw validation_error("isoline score values must be strictly increasing");
    }
  }
}

}  // namespace

PlotSpec make_plot_spec(std::vector<McbDscEntry> entries, int width,
                        int height) {
  if (entries.empty()) {
    throw validation_error("plot needs at least one entry");
  }
  PlotSpec spec;
  for (McbDscEntry& e : entries) {
    e.mcb = std::max(0.0, e.mcb);  // display clamp
    e.dsc = std::max(0.0, e.dsc);
  }
  spec.entries = std::move(entries);
  spec.width = width;
  spec.height = height;

  double max_mcb = 0.0, max_dsc = 0.0;
  double min_score = std::numeric_limits<double>::infinity();
  double max_score = -std::numeric_limits<double>::infinity();
  const double unc = spec.entries.front().unc;
  for (const McbDscEntry& e : spec.entries) {
    max_mcb = std::max(max_mcb, e.mcb);
    max_dsc = std::max(max_dsc, e.dsc);
    const double score = e.unc - e.dsc + e.mcb;
    min_score = std::min(min_score, score);
    max_score = std::max(max_score, score);
  }
  const double x_span = std::max(max_mcb, 1e-3);
  const double y_span = std::max(max_dsc, 1e-3);
  spec.x_min = 0.0;
  spec.x_max = x_span * 1.08;
  spec.y_min = 0.0;
  spec.y_max = y_span * 1.08;

  min_score = std::min(min_score, unc);
  max_score = std::max(max_score, unc);
  if (max_score > min_score) {
    const double step = nice_step(max_score - min_score, 8);
    double value = std::ceil(min_score / step) * step;
    while (value <= max_score + 1e-12 * std::max(1.0, std::abs(max_score))) {
      spec.isolines.push_back(value);
      value += step;
    }
  }
  validate_spec(spec);
  return spec;
}

PlotLayout plot_layout(const PlotSpec& spec) {
  PlotLayout layout;
  layout.x_min = spec.x_min;
  layout.x_max = spec.x_max;
  layout.y_min = spec.y_min;
  layout.y_max = spec.y_max;
  layout.plot_left = 62.0;
  layout.plot_top = 18.0;
  layout.plot_width = static_cast<double>(spec.width) - layout.plot_left - 18.0;
  layout.plot_height = static_cast<double>(spec.height) - layout.plot_top - 50.0;
  return layout;
}

std::string mcb_dsc_plot(const PlotSpec& spec) {
  validate_spec(spec);
  const PlotLayout lay = plot_layout(spec);
  const double unc = spec.entries.front().unc;
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << spec.width << "\" height=\"" << spec.height << "\" viewBox=\"0 0 "
      << spec.width << " " << spec.height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" fill=\"white\"/>\n";

  // A score isoline is dsc = mcb + (unc - score), clipped to the axis box.
  const auto isoline = [&](double score, const char* stroke, double stroke_w) {
    const double shift = unc - score;
    const double x1 = std::max(lay.x_min, lay.y_min - shift);
    const double x2 = std::min(lay.x_max, lay.y_max - shift);
    if (x1 >= x2) return;
    svg << "<line x1=\"" << format_double(lay.px(x1)) << "\" y1=\""
        << format_double(lay.py(x1 + shift)) << "\" x2=\""
        << format_double(lay.px(x2)) << "\" y2=\""
        << format_double(lay.py(x2 + shift)) << "\" stroke=\"" << stroke
        << "\" stroke-width=\"" << format_double(stroke_w) << "\"/>\n";
  };
  for (double score : spec.isolines) {
    isoline(score, "#b8b8b8", 1.0);
    const double shift = unc - score;
    const double x_at = std::min(lay.x_max, lay.y_max - shift) ;
    if (x_at > lay.x_min && x_at <= lay.x_max) {
      svg << "<text x=\"" << format_double(lay.px(x_at) - 4.0) << "\" y=\""
          << format_double(std::max(lay.plot_top + 10.0,
                                    lay.py(x_at + shift) + 12.0))
          << "\" font-family=\"sans-serif\" font-size=\"9\" fill=\"#909090\" "
             "text-anchor=\"end\">"
          << fmt_tick(score) << "</text>\n";
    }
  }
  isoline(unc, "#2e8b57", 1.6);

  // Axes with five ticks each.
  svg << "<rect x=\"" << format_double(lay.plot_left) << "\" y=\""
      << format_double(lay.plot_top) << "\" width=\""
      << format_double(lay.plot_width) << "\" height=\""
      << format_double(lay.plot_height)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = lay.x_min + (lay.x_max - lay.x_min) * i / 4.0;
    const double fy = lay.y_min + (lay.y_max - lay.y_min) * i / 4.0;
    const double pxv = lay.px(fx);
    const double pyv = lay.py(fy);
    const double bottom = lay.plot_top + lay.plot_height;
    svg << "<line x1=\"" << format_double(pxv) << "\" y1=\""
        << format_double(bottom) << "\" x2=\"" << format_double(pxv)
        << "\" y2=\"" << format_double(bottom + 5.0)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << format_double(pxv) << "\" y=\""
        << format_double(bottom + 18.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">"
        << fmt_tick(fx) << "</text>\n"
        << "<line x1=\"" << format_double(lay.plot_left - 5.0) << "\" y1=\""
        << format_double(pyv) << "\" x2=\"" << format_double(lay.plot_left)
        << "\" y2=\"" << format_double(pyv)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << format_double(lay.plot_left - 8.0) << "\" y=\""
        << format_double(pyv + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">"
        << fmt_tick(fy) << "</text>\n";
  }
  svg << "<text x=\"" << format_double(lay.plot_left + lay.plot_width / 2.0)
      << "\" y=\"" << format_double(lay.plot_top + lay.plot_height + 38.0)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">MCB</text>\n"
      << "<text x=\"16\" y=\""
      << format_double(lay.plot_top + lay.plot_height / 2.0)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << format_double(lay.plot_top + lay.plot_height / 2.0)
      << ")\">DSC</text>\n";

  // Points and labels; labels are nudged downward deterministically until
  // they stop overlapping earlier ones.
  struct Box {
    double x0, x1, y0, y1;
  };
  std::vector<Box> placed;
  for (const McbDscEntry& e : spec.entries) {
    const double pxv = lay.px(e.mcb);
    const double pyv = lay.py(e.dsc);
    svg << "<circle cx=\"" << format_double(pxv) << "\" cy=\""
        << format_double(pyv)
        << "\" r=\"4\" fill=\"#1f4e9c\" stroke=\"white\" stroke-width=\"1\"/>\n";
    double lx = pxv + 7.0;
    double ly = pyv - 7.0;
    const double w = 6.5 * static_cast<double>(e.label.size()) + 2.0;
    for (int guard = 0; guard < 64; ++guard) {
      bool collides = false;
      for (const Box& b : placed) {
        if (lx < b.x1 && lx + w > b.x0 && ly - 10.0 < b.y1 && ly + 2.0 > b.y0) {
          collides = true;
          break;
        }
      }
      if (!collides) break;
      ly += 13.0;
    }
    placed.push_back({lx, lx + w, ly - 10.0, ly + 2.0});
    svg << "<text x=\"" << format_double(lx) << "\" y=\"" << format_double(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << e.label
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

namespace {

void require_finite_report(const DecompositionReport& r) {
  const double values[] = {r.mean_score,
                           r.unc,
                           r.dsc,
                           r.mcb,
                           r.dsc_raw,
                           r.mcb_raw,
                           r.comparability,
                           r.open_coverage,
                           r.closed_coverage,
                           r.mean_length_original,
                           r.mean_length_recalibrated};
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw validation_error("report contains a non-finite value");
    }
  }
}

}  // namespace

nlohmann::ordered_json report_to_json(const DecompositionReport& report) {
  require_finite_report(report);
  nlohmann::ordered_json j;
  j["mean_score"] = report.mean_score;
  j["unc"] = report.unc;
  j["dsc"] = report.dsc;
  j["mcb"] = report.mcb;
  j["n"] = report.n;
  j["comparability"] = report.comparability;
  j["open_coverage"] = report.open_coverage;
  j["closed_coverage"] = report.closed_coverage;
  j["mean_length_original"] = report.mean_length_original;
  j["mean_length_recalibrated"] = report.mean_length_recalibrated;
  j["warnings"] = report.warnings;
  j["dsc_raw"] = report.dsc_raw;
  j["mcb_raw"] = report.mcb_raw;
  return j;
}

DecompositionReport report_from_json(const nlohmann::ordered_json& j) {
  DecompositionReport r;
  r.mean_score = j.at("mean_score").get<double>();
  r.unc = j.at("unc").get<double>();
  r.dsc = j.at("dsc").get<double>();
  r.mcb = j.at("mcb").get<double>();
  r.n = j.at("n").get<std::size_t>();
  r.comparability = j.at("comparability").get<double>();
  r.open_coverage = j.at("open_coverage").get<double>();
  r.closed_coverage = j.at("closed_coverage").get<double>();
  r.mean_length_original = j.at("mean_length_original").get<double>();
  r.mean_length_recalibrated = j.at("mean_length_recalibrated").get<double>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  r.dsc_raw = j.value("dsc_raw", r.dsc);
  r.mcb_raw = j.value("mcb_raw", r.mcb);
  return r;
}

void write_report_json(const DecompositionReport& report,
                       const std::filesystem::path& path) {
  const nlohmann::ordered_json j = report_to_json(report);
  try {
    atomic_write_text(path, j.dump(2) + "\n");
  } catch (const validation_error& err) {
    throw validation_error(std::string("writing report: ") + err.what());
  }
}

DecompositionReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw validation_error("cannot open '" + path.string() + "' for reading");
  }
  nlohmann::ordered_json j;
  in >> j;
  return report_from_json(j);
}

}  // namespace winkler
