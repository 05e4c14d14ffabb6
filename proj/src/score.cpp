#include "anm/score.hpp"

#include <cmath>
#include <string>

#include "anm/error.hpp"

namespace anm {

double PenaltyRule::rate(double n) const {
  switch (kind) {
    case Kind::inv_log_n: return 1.0 / std::log(n);
    case Kind::inv_sqrt_n: return 1.0 / std::sqrt(n);
    case Kind::fixed: return a;
    case Kind::none: return 0.0;
  }
  return 0.0;
}

double penalty(double n, int edges, const PenaltyRule& rule) {
  if (!(n >= 2.0)) throw Error(ErrorCode::too_few_points, "penalty requires n >= 2");
  if (edges == 0) return 0.0;
  return static_cast<double>(edges) * rule.rate(n);
}

std::size_t FamilyCache::size() const {
  std::lock_guard lock(mutex_);
  return slots_.size();
}

FamilyCache::Slot& FamilyCache::slot(const Dataset& data, const ScoreConfig& config, int node,
                                     std::uint32_t parents) {
  std::lock_guard lock(mutex_);
  if (data_ != &data || !(config_ == config)) {
    slots_.clear();
    fits_ = 0;
    data_ = &data;
    config_ = config;
  }
  auto& entry = slots_[{node, parents}];
  if (!entry) entry = std::make_unique<Slot>();
  return *entry;
}

namespace {

std::string family_label(int node, std::uint32_t parents) {
  std::string s = "family X" + std::to_string(node + 1) + " | {";
  bool first = true;
  for (int u = 0; u < 32; ++u) {
    if ((parents >> u) & 1U) {
      s += (first ? "X" : ",X") + std::to_string(u + 1);
      first = false;
    }
  }
  return s + "}";
}

std::unique_ptr<const FamilyFit> fit_family(const Dataset& data, int node, std::uint32_t parents,
                                            const ScoreConfig& config) {
  const auto y = data.column(static_cast<std::size_t>(node));
  std::vector<double> resid;
  bool converged = true;
  if (parents == 0) {
    resid.assign(y.begin(), y.end());
  } else {
    std::vector<std::span<const double>> columns;
    for (std::size_t u = 0; u < data.cols(); ++u)
      if ((parents >> u) & 1U) columns.push_back(data.column(u));
    const FittedSmoother fit =
        columns.size() == 1 ? fit_local_poly(columns[0], y, config.smoother) : fit_additive(columns, y, config.smoother);
    converged = fit.converged();
    resid.resize(y.size());
    const auto& fitted = fit.fitted();
    for (std::size_t j = 0; j < y.size(); ++j) resid[j] = y[j] - fitted[j];
  }
  DensityModel density = fit_density(resid, config.density);
  const std::vector<double> logp = density.log_density(resid, true);
  double sum = 0.0;
  for (double v : logp) sum += v;
  const double loglik = sum / static_cast<double>(logp.size());
  return std::make_unique<const FamilyFit>(
      FamilyFit{node, parents, std::move(resid), std::move(density), loglik, converged});
}

}  // namespace

const FamilyFit& family_score(const Dataset& data, int node, std::uint32_t parents, const ScoreConfig& config,
                              FamilyCache& cache) {
  const auto d = static_cast<int>(data.cols());
  if (node < 0 || node >= d || (parents >> d) != 0)
    throw Error(ErrorCode::invalid_argument, "node or parent index outside the dataset columns");
  if ((parents >> node) & 1U) throw Error(ErrorCode::invalid_argument, "a node cannot be its own parent");

  FamilyCache::Slot& slot = cache.slot(data, config, node, parents);
  std::call_once(slot.once, [&] {
    try {
      slot.fit = fit_family(data, node, parents, config);
    } catch (const Error& e) {
      throw Error(e.code(), family_label(node, parents) + ": " + e.what());
    }
    ++cache.fits_;
  });
  return *slot.fit;
}

Score assemble_score(const Dag& dag, std::span<const double> node_logliks, std::size_t n, const PenaltyRule& rule) {
  Score s;
  s.dag = dag;
  for (double v : node_logliks) s.loglik += v;
  s.penalty = penalty(n, dag.edge_count(), rule);
  s.total = s.loglik - s.penalty;
  return s;
}

Score score_dag(const Dataset& data, const Dag& dag, const ScoreConfig& config, FamilyCache& cache) {
  if (static_cast<std::size_t>(dag.size()) != data.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "DAG has " + std::to_string(dag.size()) + " nodes, data has " +
                                                   std::to_string(data.cols()) + " columns");
  }
  std::vector<double> logliks;
  for (int k = 0; k < dag.size(); ++k) logliks.push_back(family_score(data, k, dag.parent_mask(k), config, cache).loglik);
  return assemble_score(dag, logliks, data.rows(), config.penalty);
}

}  // namespace anm
