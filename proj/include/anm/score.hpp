#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "anm/dataset.hpp"
#include "anm/density.hpp"
#include "anm/graph.hpp"
#include "anm/smooth.hpp"

namespace anm {

struct PenaltyRule {
  enum class Kind { inv_log_n, inv_sqrt_n, fixed, none };
  Kind kind = Kind::inv_sqrt_n;
  double a = 0.0;  // used when kind == fixed

  static PenaltyRule inv_log_n() { return {Kind::inv_log_n, 0.0}; }
  static PenaltyRule inv_sqrt_n() { return {Kind::inv_sqrt_n, 0.0}; }
  static PenaltyRule fixed(double a) { return {Kind::fixed, a}; }
  static PenaltyRule none() { return {Kind::none, 0.0}; }

  /// Per-edge penalty a_n.
  double rate(double n) const;
  friend bool operator==(const PenaltyRule&, const PenaltyRule&) = default;
};

/// edges * a_n. Requires n >= 2.
double penalty(double n, int edges, const PenaltyRule& rule);

struct ScoreConfig {
  SmootherConfig smoother;
  DensityConfig density;
  PenaltyRule penalty;
  friend bool operator==(const ScoreConfig&, const ScoreConfig&) = default;
};

/// Residuals, residual density and mean in-sample log-density for one node
/// given one parent set.
struct FamilyFit {
  int node = 0;
  std::uint32_t parents = 0;  // bitmask over columns
  std::vector<double> residuals;
  DensityModel density;
  double loglik = 0.0;
  bool converged = true;
};

/// Decomposable score units for a single (dataset, config) context. A family is
/// fitted at most once even under concurrent requests. Rebinding to another
/// dataset or config clears it.
class FamilyCache {
 public:
  FamilyCache() = default;
  FamilyCache(const FamilyCache&) = delete;
  FamilyCache& operator=(const FamilyCache&) = delete;

  /// Number of family fits performed since the last (re)binding.
  std::size_t fit_count() const noexcept { return fits_.load(); }
  std::size_t size() const;

 private:
  friend const FamilyFit& family_score(const Dataset&, int, std::uint32_t, const ScoreConfig&, FamilyCache&);

  struct Slot {
    std::once_flag once;
    std::unique_ptr<const FamilyFit> fit;
  };

  Slot& slot(const Dataset& data, const ScoreConfig& config, int node, std::uint32_t parents);

  mutable std::mutex mutex_;
  const Dataset* data_ = nullptr;
  ScoreConfig config_;
  std::map<std::pair<int, std::uint32_t>, std::unique_ptr<Slot>> slots_;
  std::atomic<std::size_t> fits_{0};
};

/// Fits (or fetches) the family of `node` with parent bitmask `parents`.
/// Empty parents: residuals are the column itself; one parent: local polynomial;
/// more: additive backfitting. Errors are rethrown annotated with the family.
const FamilyFit& family_score(const Dataset& data, int node, std::uint32_t parents, const ScoreConfig& config,
                              FamilyCache& cache);

struct Score {
  Dag dag;
  double loglik = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

/// Combines per-node logliks (in node order) into a Score.
Score assemble_score(const Dag& dag, std::span<const double> node_logliks, std::size_t n, const PenaltyRule& rule);

/// Throws Error{dimension_mismatch} when the DAG size differs from the column count.
Score score_dag(const Dataset& data, const Dag& dag, const ScoreConfig& config, FamilyCache& cache);

}  // namespace anm
