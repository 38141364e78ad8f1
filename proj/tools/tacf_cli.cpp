// tacf: command-line front end for time-aware item-based collaborative filtering.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tacf/dataset.hpp"
#include "tacf/decay.hpp"
#include "tacf/evaluation.hpp"
#include "tacf/format.hpp"
#include "tacf/recommender.hpp"
#include "tacf/similarity.hpp"
#include "tacf/synthetic.hpp"
#include "tacf/temporal.hpp"

namespace {

constexpr const char* kVersion = "tacf 1.0.0";

using Json = nlohmann::ordered_json;
using namespace tacf;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every field has a default; CLI11 rejects unknown flags and unknown config keys.
struct RunConfig {
  int threads = 0;
  bool json_errors = false;

  std::string input;
  std::string output;
  std::string delimiter = "\\t";
  std::string columns = "user,item,timestamp";
  std::string cache;

  std::string decay = "constant";
  std::vector<std::size_t> depths{10, 20, 50};
  bool normalize_hitrate = false;
  bool timing = false;

  double bin_ratio = kDefaultBinRatio;
  double age_min = kDefaultAgeMin;
  std::string fit_output;
  std::string curve_input;
  std::string short_grid = "100:1e5:20";
  std::string long_grid = "5e5:5e7:20";

  std::string user;
  Seconds at = -1;
  std::size_t top = 10;
  bool holdout = false;

  std::string family = "piecewise";
  std::size_t points = 10;
  std::vector<std::string> grid_overrides;
  std::size_t objective = 10;
  std::string best_output = "best.json";

  SynthConfig synth;
};

char parse_delimiter(const std::string& text) {
  if (text == "\\t" || text == "tab") return '\t';
  if (text == "comma") return ',';
  if (text == "space") return ' ';
  if (text.size() == 1) return text[0];
  throw UsageError("delimiter must be a single character, 'tab', 'comma' or 'space'");
}

LogFormat log_format(const RunConfig& cfg) {
  LogFormat format;
  format.delimiter = parse_delimiter(cfg.delimiter);
  try {
    format.columns = LogFormat::parse_columns(cfg.columns);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return format;
}

std::vector<double> parse_grid(const std::string& name, const std::string& text) {
  ParamRange range{name, 0, 0, 1};
  ParamGrid grid{"", {range}};
  try {
    grid.override_range(name + "=" + text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return grid.ranges.front().points();
}

DecaySpec parse_decay_arg(const std::string& text) {
  try {
    return parse_decay(text);
  } catch (const DecayParseError& e) {
    throw UsageError(std::string("--decay: ") + e.what());
  }
}

double num(double v) { return round12(v); }

void emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    std::cout.flush();
  } else {
    write_file_atomic(path, contents);
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct Loaded {
  Dataset dataset;
  std::size_t skipped = 0;
};

Loaded load_dataset(const RunConfig& cfg) {
  const auto format = log_format(cfg);
  auto parsed = parse_events_file(cfg.input, format);
  return {preprocess(parsed.events), parsed.skipped};
}

// Similarity over `train`, read from and/or written to the cache when one is named.
SimilarityModel similarity_for(const TrainSet& train, const RunConfig& cfg) {
  if (cfg.cache.empty()) return build_similarity(train, cfg.threads);
  const auto hash = train_set_hash(train);
  if (std::FILE* f = std::fopen(cfg.cache.c_str(), "rb")) {
    std::fclose(f);
    return load_similarity(cfg.cache, hash);
  }
  auto model = build_similarity(train, cfg.threads);
  save_similarity(cfg.cache, model, hash);
  return model;
}

EvalContext context_for(const Dataset& dataset, const RunConfig& cfg) {
  EvalContext context;
  context.split = split_leave_latest(dataset);
  context.model = similarity_for(context.split.train, cfg);
  return context;
}

Json params_json(const DecaySpec& spec) {
  Json p = Json::object();
  std::visit(
      [&p](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, decay::Window>) {
          p["Tw"] = num(d.window);
        } else if constexpr (std::is_same_v<T, decay::Logistic>) {
          p["Tg"] = num(d.scale);
          p["b"] = num(d.offset);
        } else if constexpr (std::is_same_v<T, decay::Exponential>) {
          p["Te"] = num(d.scale);
        } else if constexpr (std::is_same_v<T, decay::Outraday>) {
          p["Ko"] = num(d.exponent);
        } else if constexpr (std::is_same_v<T, decay::Piecewise>) {
          p["Ts"] = num(d.short_end);
          p["Tl"] = num(d.long_start);
          p["Ks"] = num(d.short_exponent);
          p["Kl"] = num(d.long_exponent);
        }
      },
      spec);
  return p;
}

Json report_json(const EvalReport& report, const RunConfig& cfg) {
  Json j;
  j["decay"] = to_string(report.decay);
  j["family"] = family_name(report.decay);
  j["params"] = params_json(report.decay);
  j["evaluated_users"] = report.depths.empty() ? 0 : report.depths.front().users;
  Json depths = Json::array();
  for (const auto& d : report.depths) {
    Json row;
    row["N"] = d.depth;
    row["hits"] = d.hits;
    row["hit_rate"] = num(d.hit_rate);
    if (cfg.normalize_hitrate) row["normalized_hit_rate"] = num(d.normalized);
    depths.push_back(row);
  }
  j["depths"] = depths;
  if (cfg.timing) j["wall_seconds"] = report.wall_seconds;
  return j;
}

Json fit_json(const TrendFit& fit) {
  Json j;
  j["Ts"] = num(fit.short_end);
  j["Tl"] = num(fit.long_start);
  j["Ks"] = num(fit.short_exponent);
  j["Kl"] = num(fit.long_exponent);
  j["plateau"] = num(fit.plateau);
  j["residual"] = num(fit.residual);
  j["decay"] = to_string(DecaySpec{fit.to_decay()});
  return j;
}

TrendFit fit_curve(const BinnedCurve& curve, const RunConfig& cfg) {
  BreakpointGrids grids{parse_grid("Ts", cfg.short_grid), parse_grid("Tl", cfg.long_grid)};
  return fit_piecewise_trend(curve, grids);
}

// ---------------------------------------------------------------------------

void run_ingest(const RunConfig& cfg) {
  const auto loaded = load_dataset(cfg);
  const auto stats = loaded.dataset.stats();
  const auto split = split_leave_latest(loaded.dataset);
  if (!cfg.cache.empty()) {
    save_similarity(cfg.cache, build_similarity(split.train, cfg.threads), train_set_hash(split.train));
  }
  Json j;
  j["users"] = stats.users;
  j["items"] = stats.items;
  j["ratings"] = stats.ratings;
  j["sparsity"] = num(stats.sparsity);
  j["excluded_users"] = split.probe.excluded.size();
  j["skipped_lines"] = loaded.skipped;
  emit(cfg.output, dump(j));
}

void run_analyze(const RunConfig& cfg) {
  const auto loaded = load_dataset(cfg);
  const auto context = context_for(loaded.dataset, cfg);
  const auto collection = collect_ssnr_ages(context.split.train, context.split.probe, context.model, cfg.threads);
  const auto curve = log_bin_average(collection.samples, cfg.bin_ratio, cfg.age_min);

  std::ostringstream csv;
  write_curve_csv(csv, curve);
  emit(cfg.output, csv.str());

  std::cerr << "ssnr samples: " << collection.samples.size() << ", degenerate-infinite: "
            << collection.degenerate_infinite << ", isolated: " << collection.isolated << "\n";
  if (!cfg.fit_output.empty()) {
    auto j = fit_json(fit_curve(curve, cfg));
    j["samples"] = collection.samples.size();
    j["degenerate_infinite"] = collection.degenerate_infinite;
    j["isolated"] = collection.isolated;
    emit(cfg.fit_output, dump(j));
  }
}

void run_fit(const RunConfig& cfg) {
  std::ifstream in(cfg.curve_input);
  if (!in) throw std::runtime_error("cannot open curve '" + cfg.curve_input + "'");
  emit(cfg.output, dump(fit_json(fit_curve(read_curve_csv(in), cfg))));
}

void run_recommend(const RunConfig& cfg) {
  const auto decay = parse_decay_arg(cfg.decay);
  const auto loaded = load_dataset(cfg);
  const auto& ds = loaded.dataset;
  const auto user = ds.find_user(cfg.user);
  if (user < 0) throw std::runtime_error("unknown user '" + cfg.user + "' (absent or removed by preprocessing)");

  TrainSet train = cfg.holdout ? split_leave_latest(ds).train : full_train_set(ds);
  const auto model = similarity_for(train, cfg);
  const auto& profile = train.profiles[static_cast<std::size_t>(user)];
  if (profile.empty()) throw std::runtime_error("user '" + cfg.user + "' has no training ratings");
  const Seconds at = cfg.at >= 0 ? cfg.at : profile.back().time;

  const auto scores = score_items(train, model, static_cast<UserIndex>(user), at, decay);
  Json list = Json::array();
  for (const auto& s : top_n(scores, cfg.top)) {
    list.push_back({{"item", ds.item_ids[s.item]}, {"score", num(s.score)}});
  }
  emit(cfg.output, dump(list));
}

void run_evaluate(const RunConfig& cfg) {
  const auto decay = parse_decay_arg(cfg.decay);
  const auto loaded = load_dataset(cfg);
  const auto context = context_for(loaded.dataset, cfg);
  const auto report = evaluate(context, decay, cfg.depths, cfg.threads);
  emit(cfg.output, dump(report_json(report, cfg)));
}

void run_sweep(const RunConfig& cfg) {
  if (std::find(cfg.depths.begin(), cfg.depths.end(), cfg.objective) == cfg.depths.end()) {
    throw UsageError("--objective must be one of the --n depths");
  }
  ParamGrid grid;
  try {
    grid = ParamGrid::defaults(cfg.family, cfg.points);
    for (const auto& o : cfg.grid_overrides) grid.override_range(o);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto points = grid.enumerate();
  const auto loaded = load_dataset(cfg);
  const auto context = context_for(loaded.dataset, cfg);
  const auto sweep = grid_sweep(context, points, cfg.objective, cfg.depths, cfg.threads);

  std::ostringstream csv;
  csv << "decay";
  for (const auto& r : grid.ranges) csv << ',' << r.name;
  for (const auto d : cfg.depths) csv << ",H@" << d;
  if (cfg.normalize_hitrate) {
    for (const auto d : cfg.depths) csv << ",norm@" << d;
  }
  csv << '\n';
  for (const auto& row : sweep.rows) {
    csv << to_string(row.decay);
    const auto params = params_json(row.decay);
    for (const auto& r : grid.ranges) csv << ',' << format_real(params.at(r.name).get<double>());
    for (const auto& d : row.report.depths) csv << ',' << format_real(d.hit_rate);
    if (cfg.normalize_hitrate) {
      for (const auto& d : row.report.depths) csv << ',' << format_real(d.normalized);
    }
    csv << '\n';
  }
  emit(cfg.output, csv.str());

  const auto& best = sweep.best_row();
  Json j;
  j["family"] = grid.family;
  j["decay"] = to_string(best.decay);
  j["params"] = params_json(best.decay);
  j["objective"] = "H@" + std::to_string(cfg.objective);
  j["grid_points"] = sweep.rows.size();
  j["row"] = sweep.best;
  for (const auto& d : best.report.depths) j["H@" + std::to_string(d.depth)] = num(d.hit_rate);
  emit(cfg.best_output, dump(j));
}

void run_synth(const RunConfig& cfg) {
  const auto log = generate_synthetic(cfg.synth);
  std::ostringstream out;
  write_events(out, log, parse_delimiter(cfg.delimiter));
  emit(cfg.output, out.str());
}

// ---------------------------------------------------------------------------

void report_error(bool json, const std::string& kind, const std::string& message) {
  if (json) {
    Json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    std::cerr << j.dump() << "\n";
  } else {
    std::cerr << "tacf: " << kind << " error: " << message << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  for (int k = 1; k < argc; ++k) {
    if (std::string(argv[k]) == "--json-errors") cfg.json_errors = true;
  }

  CLI::App app{"Time-aware item-based collaborative filtering with piecewise decay"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.allow_config_extras(false);
  app.fallthrough();
  app.require_subcommand(1);
  auto* threads_opt = app.add_option("--threads", cfg.threads, "Worker threads (0 = OpenMP default)")
      ->envname("TACF_THREADS")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--json-errors", cfg.json_errors, "Report errors as one JSON object on stderr");

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--in", cfg.input, "Event log (user, item, timestamp)")->required()->check(CLI::ExistingFile);
    sub->add_option("--delimiter", cfg.delimiter, "Field delimiter: a character, 'tab', 'comma' or 'space'")
        ->capture_default_str();
    sub->add_option("--columns", cfg.columns, "Column order")->capture_default_str();
  };
  auto add_cache = [&](CLI::App* sub) {
    sub->add_option("--cache", cfg.cache, "Similarity cache file (read when present, else written)");
  };
  auto add_depths = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.depths, "Search depths N")->delimiter(',')->capture_default_str()->check(
        CLI::PositiveNumber);
    sub->add_flag("--normalize-hitrate", cfg.normalize_hitrate, "Also report hits / users");
  };
  auto add_grids = [&](CLI::App* sub) {
    sub->add_option("--ts-grid", cfg.short_grid, "Short breakpoint candidates lo:hi:count")->capture_default_str();
    sub->add_option("--tl-grid", cfg.long_grid, "Long breakpoint candidates lo:hi:count")->capture_default_str();
  };

  auto* ingest = app.add_subcommand("ingest", "Preprocess a log and print dataset statistics as JSON");
  add_input(ingest);
  ingest->add_option("--out", cfg.output, "Summary JSON (default stdout)");
  add_cache(ingest);

  auto* analyze = app.add_subcommand("analyze-ssnr", "Log-binned SSNR-versus-age curve as CSV");
  add_input(analyze);
  analyze->add_option("--out", cfg.output, "Curve CSV")->required();
  analyze->add_option("--fit-out", cfg.fit_output, "Also fit the piecewise trend and write it as JSON");
  analyze->add_option("--ratio", cfg.bin_ratio, "Geometric bin ratio")->capture_default_str();
  analyze->add_option("--age-min", cfg.age_min, "Lower edge of bin 0, seconds")->capture_default_str();
  add_grids(analyze);
  add_cache(analyze);

  auto* fit = app.add_subcommand("fit-trend", "Fit the piecewise power-law trend to a curve CSV");
  fit->add_option("--curve", cfg.curve_input, "Curve CSV from analyze-ssnr")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", cfg.output, "Fit JSON (default stdout)");
  add_grids(fit);

  auto* recommend = app.add_subcommand("recommend", "Top-N recommendations for one user");
  add_input(recommend);
  recommend->add_option("--user", cfg.user, "External user id")->required();
  recommend->add_option("--at", cfg.at, "Query time in seconds (default: the user's latest rating)");
  recommend->add_option("--decay", cfg.decay, "Decay spec, e.g. piecewise:Ts=5e4,Tl=1e6,Ks=0.6,Kl=0.3")
      ->capture_default_str();
  recommend->add_option("--n", cfg.top, "List length")->capture_default_str()->check(CLI::PositiveNumber);
  recommend->add_flag("--holdout", cfg.holdout, "Train without every user's latest rating");
  recommend->add_option("--out", cfg.output, "JSON list (default stdout)");
  add_cache(recommend);

  auto* eval = app.add_subcommand("evaluate", "Leave-the-latest-out hit rates for one decay spec");
  add_input(eval);
  eval->add_option("--decay", cfg.decay, "Decay spec")->capture_default_str();
  add_depths(eval);
  eval->add_flag("--timing", cfg.timing, "Include wall time (output is then not reproducible)");
  eval->add_option("--out", cfg.output, "Report JSON (default stdout)");
  add_cache(eval);

  auto* sweep = app.add_subcommand("sweep", "Grid sweep over one decay family");
  add_input(sweep);
  sweep->add_option("--family", cfg.family, "constant, window, logistic, exp, outraday or piecewise")
      ->capture_default_str();
  sweep->add_option("--points", cfg.points, "Geometric points per parameter range")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--grid", cfg.grid_overrides, "Range override Key=lo:hi:count or Key=value (repeatable)");
  sweep->add_option("--objective", cfg.objective, "Depth whose hit rate selects the best point")
      ->capture_default_str();
  add_depths(sweep);
  sweep->add_option("--out", cfg.output, "Results table CSV")->capture_default_str();
  sweep->add_option("--best", cfg.best_output, "Best parameters JSON")->capture_default_str();
  add_cache(sweep);
  sweep->callback([&] {
    if (cfg.output.empty()) cfg.output = "sweep.csv";
  });

  auto* synth = app.add_subcommand("synth", "Generate a synthetic event log with planted drift");
  synth->add_option("--out", cfg.output, "Output log")->required();
  synth->add_option("--seed", cfg.synth.seed, "Random seed")->capture_default_str();
  synth->add_option("--users", cfg.synth.users)->capture_default_str();
  synth->add_option("--items", cfg.synth.items)->capture_default_str();
  synth->add_option("--events", cfg.synth.events)->capture_default_str();
  synth->add_option("--topics", cfg.synth.topics)->capture_default_str();
  synth->add_option("--cluster-size", cfg.synth.cluster_size)->capture_default_str();
  synth->add_option("--drift-rate", cfg.synth.drift_rate, "Topic switches per second")->capture_default_str();
  synth->add_option("--burst", cfg.synth.burst_strength, "Probability a pick stays in the session cluster")
      ->capture_default_str();
  synth->add_option("--noise", cfg.synth.noise, "Probability a pick ignores topics")->capture_default_str();
  synth->add_option("--session-length", cfg.synth.mean_session_length, "Mean events per session")
      ->capture_default_str();
  synth->add_option("--in-session-gap", cfg.synth.mean_in_session_gap, "Mean seconds between session events")
      ->capture_default_str();
  synth->add_option("--session-gap", cfg.synth.mean_session_gap, "Mean seconds between sessions")
      ->capture_default_str();
  synth->add_option("--start", cfg.synth.start_time, "Earliest timestamp")->capture_default_str();
  synth->add_option("--delimiter", cfg.delimiter, "Field delimiter")->capture_default_str();
  bool no_signal = false;
  synth->add_flag("--no-temporal-signal", no_signal, "Disable drift and bursts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (cfg.json_errors) {
      report_error(true, "usage", e.what());
    } else {
      app.exit(e);
    }
    return 2;
  }
  if (no_signal) cfg.synth = cfg.synth.without_temporal_signal();
  // CLI11 silently ignores an environment value that fails validation; refuse it instead.
  if (threads_opt->count() == 0) {
    if (const char* env = std::getenv("TACF_THREADS"); env != nullptr && *env != '\0') {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (*end != '\0' || v < 0 || v > 4096) {
        report_error(cfg.json_errors, "usage", std::string("TACF_THREADS: invalid thread count '") + env + "'");
        return 2;
      }
      cfg.threads = static_cast<int>(v);
    }
  }

  try {
    if (*ingest) run_ingest(cfg);
    if (*analyze) run_analyze(cfg);
    if (*fit) run_fit(cfg);
    if (*recommend) run_recommend(cfg);
    if (*eval) run_evaluate(cfg);
    if (*sweep) run_sweep(cfg);
    if (*synth) run_synth(cfg);
  } catch (const UsageError& e) {
    report_error(cfg.json_errors, "usage", e.what());
    return 2;
  } catch (const CacheMismatch& e) {
    report_error(cfg.json_errors, "cache", e.what());
    return 1;
  } catch (const FitError& e) {
    report_error(cfg.json_errors, "fit", e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error(cfg.json_errors, "runtime", e.what());
    return 1;
  }
  return 0;
}
