#include "anm/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "anm/error.hpp"
#include "anm/harness.hpp"
#include "anm/parallel.hpp"
#include "anm/serialize.hpp"

namespace anm::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { json, csv };

Format output_format(const std::string& path, bool csv_allowed = true, bool json_allowed = true) {
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".json" && json_allowed) return Format::json;
  if (ext == ".csv" && csv_allowed) return Format::csv;
  std::string allowed = json_allowed && csv_allowed ? ".json or .csv" : (json_allowed ? ".json" : ".csv");
  throw UsageError("--out: '" + path + "' must end in " + allowed);
}

std::vector<double> parse_range(const std::string& flag, const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) {
    try {
      std::size_t pos = 0;
      parts.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (...) {
      throw UsageError(flag + ": cannot parse '" + text + "' as lo:hi:count");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || parts[2] < 1 || parts[2] != static_cast<double>(static_cast<long>(parts[2])))
    throw UsageError(flag + ": expected lo:hi:count, got '" + text + "'");
  const auto count = static_cast<std::size_t>(parts[2]);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = count == 1 ? parts[0] : parts[0] + (parts[1] - parts[0]) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

std::pair<double, double> parse_interval(const std::string& flag, const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const double v = std::stod(text);
      return {v, v};
    }
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (...) {
    throw UsageError(flag + ": expected lo:hi, got '" + text + "'");
  }
}

struct ScoreFlags {
  std::string penalty = "sqrtn";
  std::string density = "kde";
  std::string bandwidth = "silverman";
  double span = 0.75;
  int degree = 2;
  int backfit_iter = 20;
  double backfit_tol = 1e-6;

  void attach(CLI::App* app) {
    app->add_option("--penalty", penalty, "Edge penalty rule: sqrtn, logn, none, or fixed:<a>");
    app->add_option("--density", density, "Residual density estimator: kde or kde_loo");
    app->add_option("--bandwidth", bandwidth, "KDE bandwidth: silverman or a fixed positive value");
    app->add_option("--span", span, "LOESS span (fraction of points per local window)");
    app->add_option("--degree", degree, "Local polynomial degree for single-parent fits (1 or 2)");
    app->add_option("--backfit-iter", backfit_iter, "Maximum backfitting sweeps");
    app->add_option("--backfit-tol", backfit_tol, "Backfitting relative convergence tolerance");
  }

  ScoreConfig resolve() const {
    ScoreConfig c;
    if (penalty == "sqrtn") {
      c.penalty = PenaltyRule::inv_sqrt_n();
    } else if (penalty == "logn") {
      c.penalty = PenaltyRule::inv_log_n();
    } else if (penalty == "none") {
      c.penalty = PenaltyRule::none();
    } else if (penalty.rfind("fixed:", 0) == 0) {
      try {
        c.penalty = PenaltyRule::fixed(std::stod(penalty.substr(6)));
      } catch (...) {
        throw UsageError("--penalty: bad fixed value in '" + penalty + "'");
      }
      if (!(c.penalty.a > 0.0)) throw UsageError("--penalty: fixed value must be > 0");
    } else {
      throw UsageError("--penalty: unknown rule '" + penalty + "'");
    }
    if (density == "kde") {
      c.density.kind = DensityKind::kde;
    } else if (density == "kde_loo") {
      c.density.kind = DensityKind::kde_loo;
    } else {
      throw UsageError("--density: unknown estimator '" + density + "'");
    }
    if (bandwidth != "silverman") {
      double h = 0.0;
      try {
        h = std::stod(bandwidth);
      } catch (...) {
        throw UsageError("--bandwidth: expected 'silverman' or a number, got '" + bandwidth + "'");
      }
      if (!(h > 0.0)) throw UsageError("--bandwidth: must be > 0");
      c.density.bandwidth = BandwidthRule::fixed(h);
    }
    if (!(span > 0.0 && span <= 1.0)) throw UsageError("--span: must lie in (0, 1]");
    if (degree != 1 && degree != 2) throw UsageError("--degree: must be 1 or 2");
    if (backfit_iter < 1) throw UsageError("--backfit-iter: must be >= 1");
    if (!(backfit_tol > 0.0)) throw UsageError("--backfit-tol: must be > 0");
    c.smoother.span = span;
    c.smoother.degree = degree;
    c.smoother.backfit_max_iter = backfit_iter;
    c.smoother.backfit_tol = backfit_tol;
    return c;
  }
};

// Every option of the command except --jobs, so output does not depend on it.
json echo_options(const CLI::App* app, const std::string& command) {
  json out = {{"command", command}};
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_name();
    if (name.empty() || name == "--help" || name == "--help-all" || name == "--jobs" || name.rfind("--", 0) != 0) continue;
    const std::string key = name.substr(2);
    if (opt->count() > 0) {
      const auto& res = opt->results();
      out[key] = res.size() == 1 ? json(res.front()) : json(res);
    } else {
      out[key] = opt->get_default_str();
    }
  }
  return out;
}

std::vector<Edge> parse_edges(const std::string& text, int d) {
  std::vector<Edge> edges;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    const auto sep = item.find('>');
    try {
      if (sep == std::string::npos) throw std::invalid_argument(item);
      const int u = std::stoi(item.substr(0, sep)) - 1;
      const int v = std::stoi(item.substr(sep + 1)) - 1;
      if (u < 0 || v < 0 || u >= d || v >= d) throw std::out_of_range(item);
      edges.emplace_back(u, v);
    } catch (...) {
      throw UsageError("--edges: bad edge '" + item + "' (expected from>to with 1-indexed vertices)");
    }
  }
  return edges;
}

NoiseSpec parse_noise(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  double value = 1.0;
  if (colon != std::string::npos) {
    try {
      value = std::stod(text.substr(colon + 1));
    } catch (...) {
      throw UsageError("--noise: bad parameter in '" + text + "'");
    }
  }
  if (kind == "gaussian") {
    if (!(value > 0.0)) throw UsageError("--noise: sigma must be > 0");
    return NoiseSpec::gaussian(value);
  }
  if (kind == "power") {
    if (!(value >= 0.5 && value <= 2.0)) throw UsageError("--noise: exponent must lie in [0.5, 2]");
    return NoiseSpec::power(value);
  }
  throw UsageError("--noise: expected gaussian:<sigma> or power:<q>, got '" + text + "'");
}

std::string summary_line(const GroupSummary& s) {
  std::ostringstream os;
  os << s.group << ": trials=" << s.trials << " decided=" << s.decided << " correct=" << s.correct
     << " wrong=" << s.wrong << " abstained=" << s.abstained << " accuracy=" << s.accuracy
     << " mean_shd=" << s.mean_shd;
  return os.str();
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Score-based causal discovery for additive noise models"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  int jobs = default_jobs();
  std::uint64_t seed = 1;
  std::string out_path;
  ScoreFlags score_flags;

  auto common = [&](CLI::App* sub, bool with_score = true) {
    sub->add_option("--jobs", jobs, "Worker threads (default from ANM_JOBS, else 1)");
    sub->add_option("--seed", seed, "Master random seed");
    sub->add_option("--out", out_path, "Output file (.json or .csv)")->required();
    if (with_score) score_flags.attach(sub);
  };

  // discover
  auto* discover = app.add_subcommand("discover", "Rank candidate DAGs for a dataset");
  std::string data_path, search_kind = "exhaustive";
  double threshold = 0.0;
  discover->add_option("--data", data_path, "Numeric data file (whitespace or comma separated)")->required();
  discover->add_option("--search", search_kind, "exhaustive or greedy");
  discover->add_option("--threshold", threshold, "Abstain when delta1/delta2 falls below this");
  common(discover);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Synthetic data and identifiability experiments");
  simulate->require_subcommand(1);
  std::size_t n = 300, trials = 100, functions = 100;
  double b = 1.0, q = 1.0;
  auto* sim_cubic = simulate->add_subcommand("cubic", "Sample X2 = X1 + b X1^3 + e2 with power-transformed noise");
  sim_cubic->add_option("--n", n, "Sample size");
  sim_cubic->add_option("--b", b, "Cubic coefficient in [-1, 1]");
  sim_cubic->add_option("--q", q, "Noise exponent in [0.5, 2]");
  common(sim_cubic, false);

  std::string b_range = "-1:1:9", q_range = "0.5:2:7";
  auto* sim_grid = simulate->add_subcommand("grid", "False-decision rates over a (b, q) grid");
  sim_grid->add_option("--b", b_range, "b values as lo:hi:count");
  sim_grid->add_option("--q", q_range, "q values as lo:hi:count");
  sim_grid->add_option("--n", n, "Sample size per trial");
  sim_grid->add_option("--trials", trials, "Trials per cell");
  common(sim_grid);

  std::string nl_range = "0:0.4:9", dump_functions;
  auto* sim_funcs = simulate->add_subcommand("random-funcs", "False-decision rates against edge-function nonlinearity");
  sim_funcs->add_option("--nl", nl_range, "Nonlinearity levels as lo:hi:count");
  sim_funcs->add_option("--functions", functions, "Random functions per level");
  sim_funcs->add_option("--trials", trials, "Datasets per function");
  sim_funcs->add_option("--n", n, "Sample size per dataset");
  sim_funcs->add_option("--dump-functions", dump_functions, "Also write the first function of each level as JSON");
  common(sim_funcs);

  int anm_d = 3;
  std::string anm_edges = "1>2,1>3,2>3", anm_nl = "0.39:0.4", anm_noise = "gaussian:1", spec_out;
  auto* sim_anm = simulate->add_subcommand("anm", "Sample an additive noise model with random edge functions");
  sim_anm->add_option("--d", anm_d, "Number of variables (1..6)");
  sim_anm->add_option("--edges", anm_edges, "Comma-separated edges from>to, 1-indexed");
  sim_anm->add_option("--nl", anm_nl, "Edge-function nonlinearity range lo:hi");
  sim_anm->add_option("--noise", anm_noise, "gaussian:<sigma> or power:<q>");
  sim_anm->add_option("--n", n, "Sample size");
  sim_anm->add_option("--spec-out", spec_out, "Also write the DAG and edge functions as JSON");
  common(sim_anm, false);

  // bench
  auto* bench = app.add_subcommand("bench", "Structure-recovery benchmarks");
  bench->require_subcommand(1);
  std::size_t function_sets = 20, datasets = 20;
  std::string three_nl = "0.39:0.4";
  auto* bench_three = bench->add_subcommand("three-node", "Full 3-node DAG recovery with thresholded decisions");
  bench_three->add_option("--function-sets", function_sets, "Random edge-function sets");
  bench_three->add_option("--datasets", datasets, "Datasets per function set");
  bench_three->add_option("--n", n, "Sample size");
  bench_three->add_option("--nl", three_nl, "Nonlinearity range lo:hi");
  bench_three->add_option("--threshold", threshold, "Decision threshold t");
  common(bench_three);

  std::string n_values_text = "100,300,1000", generator = "random", cons_nl = "0.39:0.4";
  double noise_sd = 1.0;
  auto* bench_cons = bench->add_subcommand("consistency", "Top-rank accuracy as the sample size grows");
  bench_cons->add_option("--n-values", n_values_text, "Increasing comma-separated sample sizes");
  bench_cons->add_option("--trials", trials, "Trials per sample size");
  bench_cons->add_option("--generator", generator, "random, cubic, or independent");
  bench_cons->add_option("--b", b, "Cubic coefficient (cubic generator)");
  bench_cons->add_option("--q", q, "Noise exponent (cubic generator)");
  bench_cons->add_option("--nl", cons_nl, "Nonlinearity range lo:hi (random generator)");
  bench_cons->add_option("--noise-sd", noise_sd, "Gaussian noise SD (random and independent generators)");
  common(bench_cons);

  // pairs
  auto* pairs = app.add_subcommand("pairs", "Cause-effect direction accuracy on a pairs corpus");
  std::string pairs_dir, pairs_meta;
  PairsOptions pairs_options;
  pairs->add_option("--dir", pairs_dir, "Corpus directory")->required();
  pairs->add_option("--meta", pairs_meta, "Metadata file: pair_id cause_col effect_col per line")->required();
  pairs->add_option("--cap", pairs_options.subsample_cap, "Subsample pairs larger than this");
  pairs->add_option("--reps", pairs_options.reps, "Subsamples per large pair");
  common(pairs);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    set_jobs(jobs);
    const ScoreConfig config = score_flags.resolve();
    auto emit = [&](Format fmt, const json& j, const std::string& csv) {
      write_text(out_path, fmt == Format::json ? j.dump(2) + "\n" : csv);
    };

    if (*discover) {
      const Format fmt = output_format(out_path);
      if (search_kind != "exhaustive" && search_kind != "greedy")
        throw UsageError("--search: expected exhaustive or greedy, got '" + search_kind + "'");
      if (threshold < 0.0) throw UsageError("--threshold: must be >= 0");
      const Dataset data = load_dataset(data_path);
      const Ranking ranking = search_kind == "greedy" ? greedy_search(data, config) : exhaustive_search(data, config);
      const Decision decision = decide(ranking, threshold);
      json j = {{"config", echo_options(discover, "discover")},
                {"score", to_json(config)},
                {"data", {{"path", data_path}, {"n", data.rows()}, {"d", data.cols()}, {"names", data.names()}}},
                {"family_fits", ranking.family_fits},
                {"ranking", to_json(ranking)},
                {"decision", to_json(decision)}};
      if (search_kind == "greedy") j["accepted_moves"] = ranking.accepted_moves;
      emit(fmt, j, ranking_to_csv(ranking));
      out << "models ranked: " << ranking.models.size() << "\n"
          << "best: " << ranking.best().score.dag.to_string() << " total=" << ranking.best().score.total << "\n"
          << "decision: " << (decision.abstained() ? "abstained" : "selected " + decision.selected->to_string())
          << " (delta1=" << decision.delta1 << ", delta2=" << decision.delta2 << ", ratio=" << decision.ratio << ")\n";
      return 0;
    }

    if (*sim_cubic) {
      output_format(out_path, true, false);
      const Dataset data = gen_cubic(n, b, q, seed);
      write_csv(data, out_path);
      out << "wrote " << data.rows() << "x" << data.cols() << " cubic sample (b=" << b << ", q=" << q << ")\n";
      return 0;
    }

    if (*sim_grid) {
      const Format fmt = output_format(out_path);
      const auto bs = parse_range("--b", b_range);
      const auto qs = parse_range("--q", q_range);
      const GridResult grid = run_bq_grid(bs, qs, n, trials, config, seed);
      json j = to_json(grid);
      j["cli"] = echo_options(sim_grid, "simulate grid");
      emit(fmt, j, to_csv(grid));
      out << echo_options(sim_grid, "simulate grid").dump() << "\n"
          << "cells: " << bs.size() * qs.size() << ", trials per cell: " << trials << "\n";
      return 0;
    }

    if (*sim_funcs) {
      const Format fmt = output_format(out_path);
      const auto levels = parse_range("--nl", nl_range);
      const SweepResult sweep = run_nonlinearity_sweep(levels, functions, trials, n, config, seed);
      json j = to_json(sweep);
      j["cli"] = echo_options(sim_funcs, "simulate random-funcs");
      emit(fmt, j, to_csv(sweep));
      if (!dump_functions.empty()) {
        json fs = json::array();
        for (double nl : levels) fs.push_back(to_json(gen_wiener_function(derive_seed(seed, {1, 0}), nl)));
        write_text(dump_functions, fs.dump() + "\n");
      }
      out << echo_options(sim_funcs, "simulate random-funcs").dump() << "\n";
      for (std::size_t i = 0; i < levels.size(); ++i)
        out << "nonlinearity " << levels[i] << ": false rate " << sweep.rates[i] << "\n";
      return 0;
    }

    if (*sim_anm) {
      output_format(out_path, true, false);
      if (anm_d < 1 || anm_d > kMaxNodes) throw UsageError("--d: must lie in 1..6");
      const Dag dag = make_dag(anm_d, parse_edges(anm_edges, anm_d));
      const auto [lo, hi] = parse_interval("--nl", anm_nl);
      const AnmSpec spec = random_anm_spec(dag, lo, hi, parse_noise(anm_noise), derive_seed(seed, {1}));
      const Dataset data = sample_anm(spec, n, derive_seed(seed, {2}));
      write_csv(data, out_path);
      if (!spec_out.empty()) {
        json fns = json::array();
        for (int k = 0; k < dag.size(); ++k) {
          const auto ps = dag.parents(k);
          for (std::size_t i = 0; i < ps.size(); ++i)
            fns.push_back({{"from", ps[i]}, {"to", k}, {"function", to_json(spec.functions[k][i])}});
        }
        write_text(spec_out, json{{"dag", to_json(dag)}, {"edge_functions", fns}}.dump() + "\n");
      }
      out << "wrote " << data.rows() << "x" << data.cols() << " sample from " << dag.to_string() << "\n";
      return 0;
    }

    if (*bench_three) {
      const Format fmt = output_format(out_path);
      const auto [lo, hi] = parse_interval("--nl", three_nl);
      ExperimentReport report = run_three_node(function_sets, datasets, n, lo, hi, threshold, config, seed);
      json j = to_json(report);
      j["cli"] = echo_options(bench_three, "bench three-node");
      emit(fmt, j, to_csv(report));
      out << echo_options(bench_three, "bench three-node").dump() << "\n" << summary_line(report.overall) << "\n";
      return 0;
    }

    if (*bench_cons) {
      const Format fmt = output_format(out_path);
      std::vector<std::size_t> n_values;
      std::stringstream ss(n_values_text);
      for (std::string item; std::getline(ss, item, ',');) {
        try {
          n_values.push_back(static_cast<std::size_t>(std::stoul(item)));
        } catch (...) {
          throw UsageError("--n-values: bad sample size '" + item + "'");
        }
      }
      BivariateGenerator gen;
      if (generator == "random") {
        gen.kind = BivariateGenerator::Kind::random_function;
      } else if (generator == "cubic") {
        gen.kind = BivariateGenerator::Kind::cubic;
      } else if (generator == "independent") {
        gen.kind = BivariateGenerator::Kind::independent;
      } else {
        throw UsageError("--generator: expected random, cubic, or independent");
      }
      gen.b = b;
      gen.q = q;
      std::tie(gen.nl_lo, gen.nl_hi) = parse_interval("--nl", cons_nl);
      gen.noise_sd = noise_sd;
      ExperimentReport report = run_consistency_curve(n_values, trials, gen, config, seed);
      json j = to_json(report);
      j["cli"] = echo_options(bench_cons, "bench consistency");
      emit(fmt, j, to_csv(report));
      out << echo_options(bench_cons, "bench consistency").dump() << "\n";
      for (const auto& g : report.groups) out << summary_line(g) << "\n";
      return 0;
    }

    if (*pairs) {
      const Format fmt = output_format(out_path);
      ExperimentReport report = eval_pairs(pairs_dir, pairs_meta, pairs_options, config, seed);
      json j = to_json(report);
      j["cli"] = echo_options(pairs, "pairs");
      emit(fmt, j, to_csv(report));
      out << echo_options(pairs, "pairs").dump() << "\n"
          << summary_line(report.overall) << "\nskipped: " << report.skipped.size() << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace anm::cli
