#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "anm/score.hpp"

namespace anm {

struct RankedModel {
  Score score;
  std::uint64_t order = 0;  // enumeration position used as the final tie-break
};

/// Candidate models sorted by total score (descending), then fewer edges, then
/// enumeration order.
struct Ranking {
  std::vector<RankedModel> models;
  std::size_t n = 0;
  ScoreConfig config;
  std::size_t family_fits = 0;
  int accepted_moves = 0;  // greedy only

  const RankedModel& best() const { return models.front(); }
  /// Score of a specific DAG if it is part of the ranking.
  std::optional<Score> find(const Dag& dag) const;
};

/// Sorts in place by the ranking order.
void sort_ranking(std::vector<RankedModel>& models);

/// Scores every DAG on d = data.cols() nodes. Throws Error{dimension_too_large} for d > 6.
Ranking exhaustive_search(const Dataset& data, const ScoreConfig& config);
Ranking exhaustive_search(const Dataset& data, const ScoreConfig& config, FamilyCache& cache);

/// Best-improvement hill climbing from the empty DAG over single-edge additions,
/// deletions, and reversals. The ranking holds the accepted states.
Ranking greedy_search(const Dataset& data, const ScoreConfig& config);
Ranking greedy_search(const Dataset& data, const ScoreConfig& config, FamilyCache& cache);

struct Decision {
  std::optional<Dag> selected;  // empty when abstained
  double delta1 = 0.0;          // best - second
  double delta2 = 0.0;          // best - worst
  double ratio = 0.0;           // delta1 / delta2, 0 when delta2 == 0
  double threshold = 0.0;

  bool abstained() const noexcept { return !selected.has_value(); }
};

/// Abstains iff delta2 > 0 and delta1 / delta2 < t. t = 0 never abstains.
Decision decide(const Ranking& ranking, double t);

}  // namespace anm
