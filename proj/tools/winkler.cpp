// Command line front end: evaluate CSV interval forecasts, run the
// seeded simulation study, or score rows without recalibration.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "winkler/csv_io.hpp"
#include "winkler/report.hpp"
#include "winkler/simulation.hpp"

namespace {

using namespace winkler;

enum class LogLevel { Quiet, Warn, Debug };

LogLevel log_level() {
  const char* env = std::getenv("WINKLER_LOG");
  if (env == nullptr) return LogLevel::Warn;
  const std::string value(env);
  if (value == "quiet") return LogLevel::Quiet;
  if (value == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

void print_warnings(const std::string& prefix,
                    const std::vector<std::string>& warnings) {
  if (log_level() == LogLevel::Quiet) return;
  for (const std::string& w : warnings) {
    std::cerr << "warning: " << prefix << w << "\n";
  }
}

struct ScoreOptions {
  double alpha = 0.1;
  std::string levels;     // "a1,a2" switches to non-central
  std::string transform;  // identity | log-shift=<offset> | table=<csv>
  bool allow_degenerate = false;

  NonCentralLevels resolve_levels() const {
    if (levels.empty()) {
      CentralLevel level{alpha};
      validate_level(level);
      return to_noncentral(level);
    }
    const auto comma = levels.find(',');
    if (comma == std::string::npos) {
      throw validation_error("--levels expects two values: a1,a2");
    }
    try {
      NonCentralLevels out{std::stod(levels.substr(0, comma)),
                           std::stod(levels.substr(comma + 1))};
      validate_levels(out);
      return out;
    } catch (const std::invalid_argument&) {
      throw validation_error("--levels expects numeric values: a1,a2");
    } catch (const std::out_of_range&) {
      throw validation_error("--levels values out of range");
    }
  }

  Transform resolve_transform() const {
    if (transform.empty() || transform == "identity") {
      return Transform::identity();
    }
    if (transform.rfind("log-shift=", 0) == 0) {
      try {
        return Transform::log_shift(std::stod(transform.substr(10)));
      } catch (const std::invalid_argument&) {
        throw validation_error("log-shift offset must be numeric");
      }
    }
    if (transform.rfind("table=", 0) == 0) {
      const std::string path = transform.substr(6);
      std::ifstream in(path);
      if (!in) {
        throw validation_error("cannot open transform table '" + path + "'");
      }
      std::string line;
      std::vector<std::pair<double, double>> points;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b)) {
          throw validation_error("transform table line " +
                                 std::to_string(line_no) +
                                 ": expected 'x,g'");
        }
        try {
          points.emplace_back(std::stod(a), std::stod(b));
        } catch (const std::exception&) {
          throw validation_error("transform table line " +
                                 std::to_string(line_no) +
                                 ": values must be numeric");
        }
      }
      return Transform::table(std::move(points));
    }
    throw validation_error(
        "unknown --transform; use identity, log-shift=<offset> or "
        "table=<csv path>");
  }
};

struct EvaluateOptions {
  std::string input;
  ScoreOptions score;
  std::string order = "componentwise";
  bool allow_unsafe_order = false;
  std::string group_col;
  std::string emit_recalibrated;
  std::string plot_path;

  OrderKind resolve_order() const {
    if (order == "componentwise") return OrderKind::Componentwise;
    if (order == "midpoint") return OrderKind::Midpoint;
    throw validation_error("--order must be componentwise or midpoint");
  }
};

EvaluationSet make_set(const ScoreOptions& opts, OrderKind order,
                       bool allow_unsafe, std::vector<Interval> ivs,
                       std::vector<double> y) {
  EvaluationSet es =
      EvaluationSet::noncentral(std::move(ivs), std::move(y),
                                opts.resolve_levels());
  es.transform = opts.resolve_transform();
  es.order_kind = order;
  es.allow_unsafe_order = allow_unsafe;
  es.allow_degenerate = opts.allow_degenerate;
  return es;
}

int run_evaluate(const EvaluateOptions& opts) {
  const CsvRecordSet data = read_record_set_file(
      opts.input, opts.group_col, opts.score.allow_degenerate);
  const OrderKind order = opts.resolve_order();

  // Groups keep their order of first appearance.
  std::vector<std::string> group_names;
  std::map<std::string, std::vector<std::size_t>> group_rows;
  if (data.has_group) {
    for (std::size_t i = 0; i < data.records.size(); ++i) {
      const std::string& g = data.records[i].group;
      if (group_rows.find(g) == group_rows.end()) {
        group_names.push_back(g);
      }
      group_rows[g].push_back(i);
    }
  } else {
    group_names.push_back("");
    auto& rows = group_rows[""];
    rows.resize(data.records.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  }

  std::vector<DecompositionReport> reports;
  std::vector<std::vector<Interval>> recalibrated;
  for (const std::string& name : group_names) {
    const std::vector<std::size_t>& rows = group_rows[name];
    std::vector<Interval> ivs;
    std::vector<double> y;
    ivs.reserve(rows.size());
    y.reserve(rows.size());
    for (std::size_t r : rows) {
      ivs.push_back(data.records[r].interval);
      y.push_back(data.records[r].observed);
    }
    EvaluationSet es = make_set(opts.score, order, opts.allow_unsafe_order,
                                std::move(ivs), std::move(y));
    const auto started = std::chrono::steady_clock::now();
    reports.push_back(decompose(es));
    if (!opts.emit_recalibrated.empty()) {
      recalibrated.push_back(recalibrate(es));
    }
    if (log_level() == LogLevel::Debug) {
      const auto elapsed = std::chrono::duration<double>(
          std::chrono::steady_clock::now() - started);
      std::cerr << "debug: group '" << name << "' decomposed in "
                << elapsed.count() << " s\n";
    }
    const std::string prefix = name.empty() ? "" : "[" + name + "] ";
    print_warnings(prefix, reports.back().warnings);
  }

  if (data.has_group) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (std::size_t g = 0; g < group_names.size(); ++g) {
      nlohmann::ordered_json j = report_to_json(reports[g]);
      nlohmann::ordered_json entry;
      entry["group"] = group_names[g];
      entry.update(j);
      out.push_back(std::move(entry));
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << report_to_json(reports.front()).dump(2) << "\n";
  }

  if (!opts.emit_recalibrated.empty()) {
    std::ostringstream csv;
    if (data.has_group) {
      csv << "group,lower,upper\n";
      // Restore the original row order.
      std::vector<Interval> by_row(data.records.size());
      for (std::size_t g = 0; g < group_names.size(); ++g) {
        const auto& rows = group_rows[group_names[g]];
        for (std::size_t k = 0; k < rows.size(); ++k) {
          by_row[rows[k]] = recalibrated[g][k];
        }
      }
      for (std::size_t i = 0; i < by_row.size(); ++i) {
        csv << data.records[i].group << "," << format_double(by_row[i].lower)
            << "," << format_double(by_row[i].upper) << "\n";
      }
    } else {
      csv << "lower,upper\n";
      for (const Interval& iv : recalibrated.front()) {
        csv << format_double(iv.lower) << "," << format_double(iv.upper)
            << "\n";
      }
    }
    atomic_write_text(opts.emit_recalibrated, csv.str());
  }

  if (!opts.plot_path.empty()) {
    std::vector<McbDscEntry> entries;
    for (std::size_t g = 0; g < group_names.size(); ++g) {
      entries.push_back({group_names[g].empty() ? "all" : group_names[g],
                         reports[g].mcb, reports[g].dsc, reports[g].unc});
    }
    atomic_write_text(opts.plot_path, mcb_dsc_plot(make_plot_spec(entries)));
  }
  return 0;
}

struct SimulateOptions {
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  double alpha = 0.1;
  std::string out_dir = ".";
};

int run_simulate(const SimulateOptions& opts) {
  const CentralLevel level{opts.alpha};
  const std::vector<StudyRow> rows =
      run_simulation_study(opts.n, opts.seed, level);

  std::filesystem::path dir(opts.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw validation_error("cannot create output directory '" +
                           dir.string() + "': " + ec.message());
  }

  std::ostringstream csv;
  csv << "forecaster,interval_score,coverage,length,recal_open_coverage,"
         "recal_closed_coverage,recal_length\n";
  for (const StudyRow& row : rows) {
    csv << forecaster_name(row.kind) << ","
        << format_double(row.report.mean_score) << ","
        << format_double(row.original_coverage) << ","
        << format_double(row.original_length) << ","
        << format_double(row.report.open_coverage) << ","
        << format_double(row.report.closed_coverage) << ","
        << format_double(row.report.mean_length_recalibrated) << "\n";
  }
  atomic_write_text(dir / "study.csv", csv.str());

  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const StudyRow& row : rows) {
    nlohmann::ordered_json entry;
    entry["forecaster"] = forecaster_name(row.kind);
    entry.update(report_to_json(row.report));
    arr.push_back(std::move(entry));
    print_warnings("[" + forecaster_name(row.kind) + "] ",
                   row.report.warnings);
  }
  atomic_write_text(dir / "reports.json", arr.dump(2) + "\n");

  std::vector<McbDscEntry> entries;
  for (const StudyRow& row : rows) {
    entries.push_back({forecaster_name(row.kind), row.report.mcb,
                       row.report.dsc, row.report.unc});
  }
  atomic_write_text(dir / "mcb_dsc.svg", mcb_dsc_plot(make_plot_spec(entries)));
  return 0;
}

struct ScoreCmdOptions {
  std::string input;
  ScoreOptions score;
};

int run_score(const ScoreCmdOptions& opts) {
  const CsvRecordSet data =
      read_record_set_file(opts.input, "", opts.score.allow_degenerate);
  const NonCentralLevels levels = opts.score.resolve_levels();
  const Transform g = opts.score.resolve_transform();
  std::vector<double> scores;
  scores.reserve(data.records.size());
  std::cout << "index,score\n";
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const CsvRecord& rec = data.records[i];
    const double s = generalized_noncentral_interval_score(
        rec.interval, rec.observed, levels, g, opts.score.allow_degenerate);
    scores.push_back(s);
    std::cout << (i + 1) << "," << format_double(s) << "\n";
  }
  std::cout << "mean," << format_double(mean_score(scores)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interval forecast evaluation: interval scores, isotonic "
               "recalibration, and the uncertainty/discrimination/"
               "miscalibration decomposition"};
  app.require_subcommand(1);

  EvaluateOptions eval_opts;
  CLI::App* eval = app.add_subcommand(
      "evaluate", "Decompose interval forecasts read from a CSV file");
  eval->add_option("input", eval_opts.input, "CSV with lower,upper,observed")
      ->required();
  eval->add_option("--alpha", eval_opts.score.alpha,
                   "Central level alpha (default 0.1)");
  eval->add_option("--levels", eval_opts.score.levels,
                   "Non-central quantile levels a1,a2");
  eval->add_option("--transform", eval_opts.score.transform,
                   "identity | log-shift=<offset> | table=<csv>");
  eval->add_option("--order", eval_opts.order, "componentwise | midpoint");
  eval->add_flag("--allow-unsafe-order", eval_opts.allow_unsafe_order,
                 "Permit the midpoint order (diagnostic only)");
  eval->add_flag("--allow-degenerate", eval_opts.score.allow_degenerate,
                 "Accept intervals with lower == upper");
  eval->add_option("--emit-recalibrated", eval_opts.emit_recalibrated,
                   "Write recalibrated intervals to this CSV path");
  eval->add_option("--plot", eval_opts.plot_path,
                   "Write an MCB-DSC plot to this SVG path");
  eval->add_option("--group-col", eval_opts.group_col,
                   "Evaluate each value of this column separately");

  SimulateOptions sim_opts;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run the six-forecaster simulation study");
  sim->add_option("--n", sim_opts.n, "Number of simulated cases");
  sim->add_option("--seed", sim_opts.seed, "RNG seed");
  sim->add_option("--alpha", sim_opts.alpha, "Central level alpha");
  sim->add_option("--out-dir", sim_opts.out_dir,
                  "Directory for study.csv, reports.json, mcb_dsc.svg");

  ScoreCmdOptions score_opts;
  CLI::App* score = app.add_subcommand(
      "score", "Per-row interval scores without recalibration");
  score->add_option("input", score_opts.input, "CSV with lower,upper,observed")
      ->required();
  score->add_option("--alpha", score_opts.score.alpha, "Central level alpha");
  score->add_option("--levels", score_opts.score.levels,
                    "Non-central quantile levels a1,a2");
  score->add_option("--transform", score_opts.score.transform,
                    "identity | log-shift=<offset> | table=<csv>");
  score->add_flag("--allow-degenerate", score_opts.score.allow_degenerate,
                  "Accept intervals with lower == upper");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    app.exit(e);
    return 2;
  }

  try {
    if (eval->parsed()) return run_evaluate(eval_opts);
    if (sim->parsed()) return run_simulate(sim_opts);
    if (score->parsed()) return run_score(score_opts);
  } catch (const internal_error& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return 3;
  } catch (const validation_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
