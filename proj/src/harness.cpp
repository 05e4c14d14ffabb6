#include "anm/harness.hpp"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "anm/error.hpp"
#include "anm/parallel.hpp"
#include "anm/serialize.hpp"

namespace anm {

namespace {

const Dag& forward_dag() {
  static const Dag g = make_dag(2, {{0, 1}});
  return g;
}

const Dag& backward_dag() {
  static const Dag g = make_dag(2, {{1, 0}});
  return g;
}

// Backward model strictly outranks the forward one.
bool backward_wins(const Dataset& data, const ScoreConfig& config) {
  const Ranking r = exhaustive_search(data, config);
  return r.find(backward_dag())->total > r.find(forward_dag())->total;
}

// Runs body(i) for i in [0, count) across workers and rethrows the first error
// by index, so failures are reported deterministically.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
  std::vector<std::exception_ptr> errors(count);
  const auto total = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < total; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void require_trials(std::size_t trials) {
  if (trials == 0) throw Error(ErrorCode::empty_experiment, "trial count must be >= 1");
}

}  // namespace

GridResult run_bq_grid(const std::vector<double>& b_values, const std::vector<double>& q_values, std::size_t n,
                       std::size_t trials, const ScoreConfig& config, std::uint64_t seed) {
  require_trials(trials);
  if (b_values.empty() || q_values.empty()) throw Error(ErrorCode::empty_experiment, "empty (b, q) grid");
  for (double b : b_values)
    if (!(b >= -1.0 && b <= 1.0)) throw Error(ErrorCode::invalid_argument, "b values must lie in [-1, 1]");
  for (double q : q_values)
    if (!(q >= 0.5 && q <= 2.0)) throw Error(ErrorCode::invalid_argument, "q values must lie in [0.5, 2]");

  GridResult out{b_values, q_values, n, trials, {}, {}, seed, config};
  const std::size_t cells = b_values.size() * q_values.size();
  std::vector<char> wrong(cells * trials, 0);
  parallel_for(cells * trials, [&](std::size_t i) {
    const std::size_t cell = i / trials;
    const std::size_t trial = i % trials;
    const double b = b_values[cell / q_values.size()];
    const double q = q_values[cell % q_values.size()];
    try {
      wrong[i] = backward_wins(gen_cubic(n, b, q, derive_seed(seed, {trial})), config) ? 1 : 0;
    } catch (const Error& e) {
      std::ostringstream os;
      os << "cell (b=" << b << ", q=" << q << ") trial " << trial << ": " << e.what();
      throw Error(e.code(), os.str());
    }
  });
  out.wrong.assign(cells, 0);
  out.rates.assign(cells, 0.0);
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t t = 0; t < trials; ++t) out.wrong[c] += static_cast<std::size_t>(wrong[c * trials + t]);
    out.rates[c] = static_cast<double>(out.wrong[c]) / static_cast<double>(trials);
  }
  return out;
}

SweepResult run_nonlinearity_sweep(const std::vector<double>& nl_values, std::size_t functions, std::size_t trials,
                                   std::size_t n, const ScoreConfig& config, std::uint64_t seed) {
  require_trials(trials);
  require_trials(functions);
  const std::size_t levels = nl_values.size();
  std::vector<EdgeFunction> fns(levels * functions);
  parallel_for(fns.size(), [&](std::size_t i) {
    fns[i] = gen_wiener_function(derive_seed(seed, {1, i % functions}), nl_values[i / functions]);
  });
  const Dag chain = forward_dag();
  std::vector<char> wrong(fns.size() * trials, 0);
  parallel_for(wrong.size(), [&](std::size_t i) {
    const std::size_t fi = i / trials;
    const std::size_t trial = i % trials;
    const AnmSpec spec{chain, {{}, {fns[fi]}}, {NoiseSpec::gaussian(1.0), NoiseSpec::gaussian(1.0)}};
    const Dataset data = sample_anm(spec, n, derive_seed(seed, {2, fi % functions, trial}));
    wrong[i] = backward_wins(data, config) ? 1 : 0;
  });
  SweepResult out{nl_values, functions, trials, n, std::vector<std::size_t>(levels, 0), std::vector<double>(levels, 0.0),
                  seed, config};
  for (std::size_t l = 0; l < levels; ++l) {
    for (std::size_t k = 0; k < functions * trials; ++k) out.wrong[l] += static_cast<std::size_t>(wrong[l * functions * trials + k]);
    out.rates[l] = static_cast<double>(out.wrong[l]) / static_cast<double>(functions * trials);
  }
  return out;
}

const GroupSummary& ExperimentReport::group(const std::string& name) const {
  for (const auto& g : groups)
    if (g.group == name) return g;
  throw Error(ErrorCode::invalid_argument, "no group named " + name);
}

GroupSummary summarize(const std::vector<TrialRecord>& records, const std::string& group) {
  GroupSummary s;
  s.group = group.empty() ? "overall" : group;
  std::size_t shd_sum = 0;
  for (const auto& r : records) {
    if (!group.empty() && r.group != group) continue;
    ++s.trials;
    if (!r.chosen) {
      ++s.abstained;
      continue;
    }
    ++s.decided;
    (r.correct ? s.correct : s.wrong) += 1;
    shd_sum += static_cast<std::size_t>(std::max(r.shd, 0));
  }
  if (s.trials) {
    const double t = static_cast<double>(s.trials);
    s.accuracy = static_cast<double>(s.correct) / t;
    s.wrong_rate = static_cast<double>(s.wrong) / t;
    s.abstain_rate = static_cast<double>(s.abstained) / t;
    s.decision_rate = static_cast<double>(s.decided) / t;
  }
  if (s.decided) s.mean_shd = static_cast<double>(shd_sum) / static_cast<double>(s.decided);
  return s;
}

void finalize_report(ExperimentReport& report) {
  report.groups.clear();
  std::vector<std::string> names;
  for (const auto& r : report.records)
    if (std::find(names.begin(), names.end(), r.group) == names.end()) names.push_back(r.group);
  for (const auto& name : names) report.groups.push_back(summarize(report.records, name));
  report.overall = summarize(report.records);
}

namespace {

TrialRecord make_record(std::string group, std::size_t unit, std::size_t replicate, std::uint64_t seed,
                        std::size_t n, const Dag& truth, const Decision& decision) {
  TrialRecord r{std::move(group), {}, unit, replicate, seed, n, truth, decision.selected, false, -1};
  if (r.chosen) {
    r.shd = shd(*r.chosen, truth);
    r.correct = r.shd == 0;
  }
  return r;
}

}  // namespace

ExperimentReport run_three_node(std::size_t function_sets, std::size_t datasets_per_set, std::size_t n, double nl_lo,
                                double nl_hi, double t, const ScoreConfig& config, std::uint64_t seed) {
  require_trials(function_sets);
  require_trials(datasets_per_set);
  const Dag truth = make_dag(3, {{0, 1}, {0, 2}, {1, 2}});
  std::vector<AnmSpec> specs(function_sets);
  parallel_for(function_sets, [&](std::size_t s) {
    specs[s] = random_anm_spec(truth, nl_lo, nl_hi, NoiseSpec::gaussian(1.0), derive_seed(seed, {1, s}));
  });

  ExperimentReport report;
  report.experiment = "three-node";
  report.seed = seed;
  report.config_json = json{{"function_sets", function_sets},
                            {"datasets_per_set", datasets_per_set},
                            {"n", n},
                            {"nonlinearity", {nl_lo, nl_hi}},
                            {"threshold", t},
                            {"truth", to_json(truth)},
                            {"score", to_json(config)}}
                           .dump();
  report.records.resize(function_sets * datasets_per_set);
  parallel_for(report.records.size(), [&](std::size_t i) {
    const std::size_t s = i / datasets_per_set;
    const std::size_t j = i % datasets_per_set;
    const std::uint64_t data_seed = derive_seed(seed, {2, s, j});
    const Ranking ranking = exhaustive_search(sample_anm(specs[s], n, data_seed), config);
    if (!ranking.find(truth)) throw Error(ErrorCode::invalid_argument, "ground truth missing from the ranking");
    report.records[i] = make_record("three-node", s, j, data_seed, n, truth, decide(ranking, t));
  });
  finalize_report(report);
  return report;
}

Dag BivariateGenerator::truth() const {
  return kind == Kind::independent ? Dag::empty(2) : forward_dag();
}

Dataset BivariateGenerator::sample(std::size_t n, std::uint64_t function_seed, std::uint64_t data_seed) const {
  switch (kind) {
    case Kind::cubic:
      return gen_cubic(n, b, q, data_seed);
    case Kind::random_function: {
      Rng rng(function_seed);
      const double target = nl_lo == nl_hi ? nl_lo : std::uniform_real_distribution<double>(nl_lo, nl_hi)(rng);
      const AnmSpec spec{forward_dag(),
                         {{}, {gen_wiener_function(derive_seed(function_seed, {0}), target)}},
                         {NoiseSpec::gaussian(noise_sd), NoiseSpec::gaussian(noise_sd)}};
      return sample_anm(spec, n, data_seed);
    }
    case Kind::independent: {
      const AnmSpec spec{Dag::empty(2), {{}, {}}, {NoiseSpec::gaussian(noise_sd), NoiseSpec::gaussian(noise_sd)}};
      return sample_anm(spec, n, data_seed);
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown generator");
}

namespace {

const char* generator_name(BivariateGenerator::Kind k) {
  switch (k) {
    case BivariateGenerator::Kind::cubic: return "cubic";
    case BivariateGenerator::Kind::random_function: return "random-function";
    case BivariateGenerator::Kind::independent: return "independent";
  }
  return "?";
}

}  // namespace

ExperimentReport run_consistency_curve(const std::vector<std::size_t>& n_values, std::size_t trials,
                                       const BivariateGenerator& generator, const ScoreConfig& config,
                                       std::uint64_t seed) {
  if (trials == 0 || n_values.empty())
    throw Error(ErrorCode::empty_experiment, "consistency curve needs trials >= 1 and at least one sample size");
  for (std::size_t i = 1; i < n_values.size(); ++i)
    if (n_values[i] <= n_values[i - 1]) throw Error(ErrorCode::invalid_argument, "sample sizes must increase");

  const Dag truth = generator.truth();
  ExperimentReport report;
  report.experiment = "consistency";
  report.seed = seed;
  report.config_json = json{{"n_values", n_values},
                            {"trials", trials},
                            {"generator",
                             {{"kind", generator_name(generator.kind)},
                              {"b", generator.b},
                              {"q", generator.q},
                              {"nonlinearity", {generator.nl_lo, generator.nl_hi}},
                              {"noise_sd", generator.noise_sd}}},
                            {"truth", to_json(truth)},
                            {"score", to_json(config)}}
                           .dump();
  report.records.resize(n_values.size() * trials);
  parallel_for(report.records.size(), [&](std::size_t i) {
    const std::size_t n = n_values[i / trials];
    const std::size_t trial = i % trials;
    const std::uint64_t data_seed = derive_seed(seed, {2, trial, n});
    const Dataset data = generator.sample(n, derive_seed(seed, {1, trial}), data_seed);
    report.records[i] =
        make_record("n=" + std::to_string(n), trial, 0, data_seed, n, truth, decide(exhaustive_search(data, config), 0.0));
  });
  finalize_report(report);
  return report;
}

std::vector<PairEntry> load_pairs_metadata(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::missing_metadata, "cannot read pairs metadata " + path);
  std::vector<PairEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    auto column = [&](const std::string& tok) -> std::size_t {
      std::size_t pos = 0;
      long v = 0;
      try {
        v = std::stol(tok, &pos);
      } catch (...) {
        pos = 0;
      }
      if (pos != tok.size() || v < 1)
        throw Error(ErrorCode::parse_error, path + ":" + std::to_string(line_no) + ": bad column '" + tok + "'");
      return static_cast<std::size_t>(v - 1);
    };
    PairEntry e;
    e.id = tokens[0];
    if (tokens.size() == 3) {
      e.cause = column(tokens[1]);
      e.effect = column(tokens[2]);
    } else if (tokens.size() >= 5) {
      const std::size_t cs = column(tokens[1]), ce = column(tokens[2]);
      const std::size_t es = column(tokens[3]), ee = column(tokens[4]);
      e.cause = cs;
      e.effect = es;
      e.multivariate = cs != ce || es != ee;
    } else {
      throw Error(ErrorCode::parse_error, path + ":" + std::to_string(line_no) + ": expected 3 or 5+ fields");
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

std::string find_pair_file(const std::filesystem::path& dir, const std::string& id) {
  for (const auto& name : {id, id + ".txt", "pair" + id + ".txt"}) {
    const auto p = dir / name;
    if (std::filesystem::is_regular_file(p)) return p.string();
  }
  return {};
}

}  // namespace

ExperimentReport eval_pairs(const std::string& corpus_dir, const std::string& metadata_path,
                            const PairsOptions& options, const ScoreConfig& config, std::uint64_t seed) {
  const std::vector<PairEntry> entries = load_pairs_metadata(metadata_path);
  if (options.reps == 0) throw Error(ErrorCode::empty_experiment, "reps must be >= 1");

  ExperimentReport report;
  report.experiment = "pairs";
  report.seed = seed;
  report.config_json = json{{"corpus", corpus_dir},
                            {"metadata", metadata_path},
                            {"subsample_cap", options.subsample_cap},
                            {"reps", options.reps},
                            {"score", to_json(config)}}
                           .dump();

  struct Job {
    std::size_t index;
    std::string id;
    Dataset data;
    Dag truth;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const PairEntry& e = entries[i];
    if (e.multivariate) {
      report.skipped.emplace_back(e.id, "multivariate pair");
      continue;
    }
    if (e.cause == e.effect) {
      report.skipped.emplace_back(e.id, "cause and effect columns coincide");
      continue;
    }
    const std::string file = find_pair_file(corpus_dir, e.id);
    if (file.empty()) {
      report.skipped.emplace_back(e.id, "data file not found");
      continue;
    }
    try {
      const Dataset raw = load_dataset(file);
      const std::size_t a = std::min(e.cause, e.effect);
      const std::size_t b = std::max(e.cause, e.effect);
      if (b >= raw.cols()) {
        report.skipped.emplace_back(e.id, "column index beyond the file's " + std::to_string(raw.cols()) + " columns");
        continue;
      }
      const std::size_t cols[] = {a, b};
      jobs.push_back({i, e.id, raw.select_columns(cols), e.cause == a ? forward_dag() : backward_dag()});
    } catch (const Error& err) {
      report.skipped.emplace_back(e.id, err.what());
    }
  }

  std::vector<std::optional<TrialRecord>> results(jobs.size());
  std::vector<std::string> failures(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    const std::size_t n = job.data.rows();
    const bool subsample = n > options.subsample_cap;
    const std::size_t reps = subsample ? options.reps : 1;
    double forward = 0.0, backward = 0.0;
    try {
      for (std::size_t r = 0; r < reps; ++r) {
        Dataset sample = job.data;
        if (subsample) {
          Rng rng(derive_seed(seed, {job.index, r}));
          std::vector<std::size_t> idx(n);
          for (std::size_t k = 0; k < n; ++k) idx[k] = k;
          for (std::size_t k = 0; k < options.subsample_cap; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, n - 1);
            std::swap(idx[k], idx[pick(rng)]);
          }
          idx.resize(options.subsample_cap);
          sample = job.data.select_rows(idx, job.data.provenance() + " subsample " + std::to_string(r));
        }
        FamilyCache cache;
        forward += score_dag(sample, forward_dag(), config, cache).total;
        backward += score_dag(sample, backward_dag(), config, cache).total;
      }
    } catch (const Error& err) {
      failures[j] = err.what();
      return;
    }
    forward /= static_cast<double>(reps);
    backward /= static_cast<double>(reps);
    Decision d;
    d.selected = forward >= backward ? forward_dag() : backward_dag();
    TrialRecord rec = make_record("pairs", job.index, reps, seed, subsample ? options.subsample_cap : n, job.truth, d);
    rec.label = job.id;
    results[j] = std::move(rec);
  });
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (results[j]) {
      report.records.push_back(std::move(*results[j]));
    } else {
      report.skipped.emplace_back(jobs[j].id, failures[j]);
    }
  }
  finalize_report(report);
  return report;
}

}  // namespace anm
