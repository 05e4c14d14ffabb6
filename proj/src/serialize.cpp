#include "anm/serialize.hpp"

#include <cstdio>
#include <fstream>

#include "anm/error.hpp"

namespace anm {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::io_error, "cannot open " + path + " for writing");
  os << content;
  if (!os) throw Error(ErrorCode::io_error, "write failed for " + path);
}

json to_json(const Dag& dag) {
  json edges = json::array();
  for (auto [u, v] : dag.edges()) edges.push_back({u, v});
  return {{"d", dag.size()}, {"edges", edges}};
}

Dag dag_from_json(const json& j) {
  try {
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return make_dag(j.at("d").get<int>(), edges);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bad DAG JSON: ") + e.what());
  }
}

namespace {

const char* penalty_name(PenaltyRule::Kind k) {
  switch (k) {
    case PenaltyRule::Kind::inv_log_n: return "logn";
    case PenaltyRule::Kind::inv_sqrt_n: return "sqrtn";
    case PenaltyRule::Kind::fixed: return "fixed";
    case PenaltyRule::Kind::none: return "none";
  }
  return "?";
}

}  // namespace

json to_json(const ScoreConfig& config) {
  json penalty = {{"rule", penalty_name(config.penalty.kind)}};
  if (config.penalty.kind == PenaltyRule::Kind::fixed) penalty["a"] = config.penalty.a;
  json bandwidth = config.density.bandwidth.kind == BandwidthRule::Kind::silverman
                       ? json("silverman")
                       : json({{"fixed", config.density.bandwidth.h}});
  return {
      {"smoother",
       {{"span", config.smoother.span},
        {"degree", config.smoother.degree},
        {"backfit_max_iter", config.smoother.backfit_max_iter},
        {"backfit_tol", config.smoother.backfit_tol}}},
      {"density",
       {{"kind", config.density.kind == DensityKind::kde ? "kde" : "kde_loo"}, {"bandwidth", bandwidth}}},
      {"penalty", penalty},
  };
}

json to_json(const Ranking& ranking) {
  json out = json::array();
  for (const auto& m : ranking.models) {
    out.push_back({{"dag", to_json(m.score.dag)},
                   {"loglik", m.score.loglik},
                   {"penalty", m.score.penalty},
                   {"total", m.score.total}});
  }
  return out;
}

json to_json(const Decision& decision) {
  json out = {{"outcome", decision.abstained() ? "abstained" : "selected"}};
  if (decision.selected) out["dag"] = to_json(*decision.selected);
  out["delta1"] = decision.delta1;
  out["delta2"] = decision.delta2;
  out["ratio"] = decision.ratio;
  out["t"] = decision.threshold;
  return out;
}

json to_json(const EdgeFunction& f) {
  return {{"grid", EdgeFunction::grid()},
          {"ordinates", f.ordinates()},
          {"left_slope", f.left_slope()},
          {"right_slope", f.right_slope()},
          {"nonlinearity", f.nonlinearity()}};
}

EdgeFunction edge_function_from_json(const json& j) {
  try {
    return EdgeFunction::from_ordinates(j.at("ordinates").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bad edge function JSON: ") + e.what());
  }
}

json to_json(const GridResult& grid) {
  json cells = json::array();
  for (std::size_t bi = 0; bi < grid.b_values.size(); ++bi) {
    for (std::size_t qi = 0; qi < grid.q_values.size(); ++qi) {
      const std::size_t c = bi * grid.q_values.size() + qi;
      cells.push_back({{"b", grid.b_values[bi]},
                       {"q", grid.q_values[qi]},
                       {"trials", grid.trials},
                       {"wrong", grid.wrong[c]},
                       {"false_rate", grid.rates[c]}});
    }
  }
  return {{"experiment", "bq-grid"}, {"seed", grid.seed}, {"n", grid.n}, {"trials", grid.trials},
          {"config", to_json(grid.config)}, {"cells", cells}};
}

json to_json(const SweepResult& sweep) {
  json rows = json::array();
  for (std::size_t i = 0; i < sweep.nl_values.size(); ++i) {
    rows.push_back({{"nonlinearity", sweep.nl_values[i]},
                    {"functions", sweep.functions},
                    {"trials", sweep.trials},
                    {"wrong", sweep.wrong[i]},
                    {"false_rate", sweep.rates[i]}});
  }
  return {{"experiment", "random-funcs"}, {"seed", sweep.seed}, {"n", sweep.n},
          {"config", to_json(sweep.config)}, {"rows", rows}};
}

json to_json(const GroupSummary& s) {
  return {{"group", s.group},           {"trials", s.trials},         {"decided", s.decided},
          {"correct", s.correct},       {"wrong", s.wrong},           {"abstained", s.abstained},
          {"accuracy", s.accuracy},     {"wrong_rate", s.wrong_rate}, {"abstain_rate", s.abstain_rate},
          {"decision_rate", s.decision_rate}, {"mean_shd", s.mean_shd}};
}

json to_json(const ExperimentReport& report) {
  json records = json::array();
  for (const auto& r : report.records) {
    json rec = {{"group", r.group}, {"label", r.label}, {"unit", r.unit},   {"replicate", r.replicate},
                {"seed", r.seed},   {"n", r.n},         {"truth", to_json(r.truth)}};
    rec["chosen"] = r.chosen ? to_json(*r.chosen) : json(nullptr);
    rec["abstained"] = !r.chosen.has_value();
    rec["correct"] = r.correct;
    rec["shd"] = r.shd;
    records.push_back(std::move(rec));
  }
  json groups = json::array();
  for (const auto& g : report.groups) groups.push_back(to_json(g));
  json skipped = json::array();
  for (const auto& [id, reason] : report.skipped) skipped.push_back({{"id", id}, {"reason", reason}});
  return {{"experiment", report.experiment},
          {"seed", report.seed},
          {"config", json::parse(report.config_json)},
          {"overall", to_json(report.overall)},
          {"groups", groups},
          {"skipped", skipped},
          {"records", records}};
}

std::string to_csv(const GridResult& grid) {
  std::string out = "b,q,trials,false_rate\n";
  for (std::size_t bi = 0; bi < grid.b_values.size(); ++bi) {
    for (std::size_t qi = 0; qi < grid.q_values.size(); ++qi) {
      out += format_double(grid.b_values[bi]) + "," + format_double(grid.q_values[qi]) + "," +
             std::to_string(grid.trials) + "," + format_double(grid.rate(bi, qi)) + "\n";
    }
  }
  return out;
}

std::string to_csv(const SweepResult& sweep) {
  std::string out = "nonlinearity,functions,trials,false_rate\n";
  for (std::size_t i = 0; i < sweep.nl_values.size(); ++i) {
    out += format_double(sweep.nl_values[i]) + "," + std::to_string(sweep.functions) + "," +
           std::to_string(sweep.trials) + "," + format_double(sweep.rates[i]) + "\n";
  }
  return out;
}

std::string to_csv(const ExperimentReport& report) {
  std::string out = "group,trials,decided,correct,wrong,abstained,accuracy,wrong_rate,abstain_rate,mean_shd\n";
  auto row = [&](const GroupSummary& s) {
    out += s.group + "," + std::to_string(s.trials) + "," + std::to_string(s.decided) + "," +
           std::to_string(s.correct) + "," + std::to_string(s.wrong) + "," + std::to_string(s.abstained) + "," +
           format_double(s.accuracy) + "," + format_double(s.wrong_rate) + "," + format_double(s.abstain_rate) +
           "," + format_double(s.mean_shd) + "\n";
  };
  for (const auto& g : report.groups) row(g);
  row(report.overall);
  return out;
}

std::string ranking_to_csv(const Ranking& ranking) {
  std::string out = "rank,edges,loglik,penalty,total\n";
  std::size_t rank = 1;
  for (const auto& m : ranking.models) {
    std::string edges;
    for (auto [u, v] : m.score.dag.edges()) edges += (edges.empty() ? "" : " ") + std::to_string(u + 1) + ">" + std::to_string(v + 1);
    out += std::to_string(rank++) + "," + edges + "," + format_double(m.score.loglik) + "," +
           format_double(m.score.penalty) + "," + format_double(m.score.total) + "\n";
  }
  return out;
}

}  // namespace anm
