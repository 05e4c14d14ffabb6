#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anm/dataset.hpp"
#include "anm/graph.hpp"
#include "anm/search.hpp"
#include "anm/simgen.hpp"

namespace anm {

/// False-decision rates of the two-variable cubic model over a (b, q) grid.
/// Cells are stored b-major. Trial t of every cell draws its data from the
/// stream derive_seed(seed, {t}), so equal parameters give equal cells.
struct GridResult {
  std::vector<double> b_values;
  std::vector<double> q_values;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::vector<std::size_t> wrong;
  std::vector<double> rates;
  std::uint64_t seed = 0;
  ScoreConfig config;

  double rate(std::size_t bi, std::size_t qi) const { return rates[bi * q_values.size() + qi]; }
};

/// Wrong = the backward model X1 <- X2 scores strictly above the forward one.
GridResult run_bq_grid(const std::vector<double>& b_values, const std::vector<double>& q_values, std::size_t n,
                       std::size_t trials, const ScoreConfig& config, std::uint64_t seed);

/// False-decision rates for X1 -> X2 with random Wiener edge functions of fixed
/// nonlinearity and standard Gaussian noise. Function f is drawn from the same
/// path at every level, only its blend with the identity changes.
struct SweepResult {
  std::vector<double> nl_values;
  std::size_t functions = 0;
  std::size_t trials = 0;  // per function
  std::size_t n = 0;
  std::vector<std::size_t> wrong;
  std::vector<double> rates;
  std::uint64_t seed = 0;
  ScoreConfig config;
};

SweepResult run_nonlinearity_sweep(const std::vector<double>& nl_values, std::size_t functions, std::size_t trials,
                                   std::size_t n, const ScoreConfig& config, std::uint64_t seed);

struct TrialRecord {
  std::string group;
  std::string label;
  std::size_t unit = 0;       // function set, trial, or pair index
  std::size_t replicate = 0;  // dataset index within the unit; subsample count for pairs
  std::uint64_t seed = 0;
  std::size_t n = 0;
  Dag truth;
  std::optional<Dag> chosen;
  bool correct = false;
  int shd = -1;  // -1 when abstained
};

struct GroupSummary {
  std::string group;
  std::size_t trials = 0;
  std::size_t decided = 0;
  std::size_t correct = 0;
  std::size_t wrong = 0;
  std::size_t abstained = 0;
  double accuracy = 0.0;      // correct / trials
  double wrong_rate = 0.0;    // wrong / trials
  double abstain_rate = 0.0;  // abstained / trials
  double decision_rate = 0.0;
  double mean_shd = 0.0;  // over decided trials
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string config_json;  // resolved experiment configuration
  std::vector<TrialRecord> records;
  std::vector<GroupSummary> groups;  // in order of first appearance
  GroupSummary overall;
  std::vector<std::pair<std::string, std::string>> skipped;  // (id, reason)

  const GroupSummary& group(const std::string& name) const;
};

/// Aggregates recomputed from the records.
GroupSummary summarize(const std::vector<TrialRecord>& records, const std::string& group = {});
void finalize_report(ExperimentReport& report);

/// Full three-node DAG truth with random edge functions; exhaustive search and
/// thresholded decision per dataset.
ExperimentReport run_three_node(std::size_t function_sets, std::size_t datasets_per_set, std::size_t n,
                                double nl_lo, double nl_hi, double t, const ScoreConfig& config, std::uint64_t seed);

struct BivariateGenerator {
  enum class Kind { cubic, random_function, independent };
  Kind kind = Kind::random_function;
  double b = 1.0;
  double q = 1.0;
  double nl_lo = 0.39;
  double nl_hi = 0.4;
  double noise_sd = 1.0;

  Dag truth() const;
  Dataset sample(std::size_t n, std::uint64_t function_seed, std::uint64_t data_seed) const;
};

/// Per sample size, the fraction of trials whose top-ranked DAG is the truth.
/// Throws Error{empty_experiment} for zero trials or no sample sizes.
ExperimentReport run_consistency_curve(const std::vector<std::size_t>& n_values, std::size_t trials,
                                       const BivariateGenerator& generator, const ScoreConfig& config,
                                       std::uint64_t seed);

struct PairsOptions {
  std::size_t subsample_cap = 500;
  std::size_t reps = 3;
};

struct PairEntry {
  std::string id;
  std::size_t cause = 0;  // 0-indexed file columns
  std::size_t effect = 0;
  bool multivariate = false;
};

/// One pair per line: `pair_id cause_col effect_col` (1-indexed). Lines with
/// five or more fields are read as `id cause_lo cause_hi effect_lo effect_hi
/// [weight]`; ranges wider than one column mark the pair multivariate.
/// Throws Error{missing_metadata}.
std::vector<PairEntry> load_pairs_metadata(const std::string& path);

/// Direction accuracy over the bivariate pairs of a corpus directory. Data for
/// pair `id` is read from `id`, `id.txt`, or `pair<id>.txt`. Unreadable or
/// multivariate pairs are skipped and listed in the report.
ExperimentReport eval_pairs(const std::string& corpus_dir, const std::string& metadata_path,
                            const PairsOptions& options, const ScoreConfig& config, std::uint64_t seed);

}  // namespace anm
