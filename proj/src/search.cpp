#include "anm/search.hpp"

#include <algorithm>
#include <string>

#include "anm/error.hpp"

namespace anm {

namespace {

bool ranks_before(const RankedModel& a, const RankedModel& b) {
  if (a.score.total != b.score.total) return a.score.total > b.score.total;
  const int ea = a.score.dag.edge_count();
  const int eb = b.score.dag.edge_count();
  if (ea != eb) return ea < eb;
  return a.order < b.order;
}

}  // namespace

void sort_ranking(std::vector<RankedModel>& models) { std::sort(models.begin(), models.end(), ranks_before); }

std::optional<Score> Ranking::find(const Dag& dag) const {
  for (const auto& m : models)
    if (m.score.dag == dag) return m.score;
  return std::nullopt;
}

Ranking exhaustive_search(const Dataset& data, const ScoreConfig& config) {
  FamilyCache cache;
  return exhaustive_search(data, config, cache);
}

Ranking exhaustive_search(const Dataset& data, const ScoreConfig& config, FamilyCache& cache) {
  const int d = static_cast<int>(data.cols());
  const std::vector<Dag> dags = enumerate_dags(d);

  // Every (node, parent subset) family occurs in some DAG; fit them all up front.
  const std::size_t subsets = std::size_t{1} << d;
  std::vector<std::pair<int, std::uint32_t>> families;
  for (int k = 0; k < d; ++k)
    for (std::uint32_t p = 0; p < subsets; ++p)
      if (!((p >> k) & 1U)) families.emplace_back(k, p);
  std::vector<double> table(static_cast<std::size_t>(d) * subsets, 0.0);

  const auto family_count = static_cast<std::ptrdiff_t>(families.size());
  std::vector<std::exception_ptr> errors(families.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < family_count; ++i) {
    try {
      const auto [k, p] = families[i];
      table[static_cast<std::size_t>(k) * subsets + p] = family_score(data, k, p, config, cache).loglik;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Ranking ranking;
  ranking.n = data.rows();
  ranking.config = config;
  ranking.models.resize(dags.size());
  const auto dag_count = static_cast<std::ptrdiff_t>(dags.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < dag_count; ++i) {
    const Dag& g = dags[i];
    double logliks[kMaxNodes];
    for (int k = 0; k < d; ++k) logliks[k] = table[static_cast<std::size_t>(k) * subsets + g.parent_mask(k)];
    ranking.models[i] = {assemble_score(g, std::span<const double>(logliks, d), data.rows(), config.penalty),
                         static_cast<std::uint64_t>(i)};
  }
  sort_ranking(ranking.models);
  ranking.family_fits = cache.fit_count();
  return ranking;
}

Ranking greedy_search(const Dataset& data, const ScoreConfig& config) {
  FamilyCache cache;
  return greedy_search(data, config, cache);
}

Ranking greedy_search(const Dataset& data, const ScoreConfig& config, FamilyCache& cache) {
  const int d = static_cast<int>(data.cols());
  if (d < 2) throw Error(ErrorCode::invalid_argument, "greedy search needs at least two variables");
  Ranking ranking;
  ranking.n = data.rows();
  ranking.config = config;

  Dag current = Dag::empty(d);
  Score current_score = score_dag(data, current, config, cache);
  ranking.models.push_back({current_score, current.mask()});

  for (;;) {
    const std::vector<Dag> moves = neighbors(current);
    std::vector<RankedModel> scored(moves.size());
    std::vector<std::exception_ptr> errors(moves.size());
    const auto count = static_cast<std::ptrdiff_t>(moves.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        scored[i] = {score_dag(data, moves[i], config, cache), moves[i].mask()};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    if (scored.empty()) break;
    const auto best = std::min_element(scored.begin(), scored.end(), ranks_before);
    if (!(best->score.total > current_score.total)) break;
    current = best->score.dag;
    current_score = best->score;
    ranking.models.push_back(*best);
    ++ranking.accepted_moves;
  }
  sort_ranking(ranking.models);
  ranking.family_fits = cache.fit_count();
  return ranking;
}

Decision decide(const Ranking& ranking, double t) {
  if (ranking.models.empty()) throw Error(ErrorCode::invalid_argument, "cannot decide on an empty ranking");
  if (t < 0.0) throw Error(ErrorCode::invalid_argument, "threshold must be >= 0");
  Decision out;
  out.threshold = t;
  const double best = ranking.models.front().score.total;
  if (ranking.models.size() > 1) {
    out.delta1 = best - ranking.models[1].score.total;
    out.delta2 = best - ranking.models.back().score.total;
  }
  out.ratio = out.delta2 > 0.0 ? out.delta1 / out.delta2 : 0.0;
  if (!(out.delta2 > 0.0 && out.ratio < t)) out.selected = ranking.models.front().score.dag;
  return out;
}

}  // namespace anm
