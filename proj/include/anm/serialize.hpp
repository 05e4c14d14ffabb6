#pragma once

#include <string>

#include <json.hpp>

#include "anm/graph.hpp"
#include "anm/harness.hpp"
#include "anm/score.hpp"
#include "anm/search.hpp"
#include "anm/simgen.hpp"

namespace anm {

using json = nlohmann::ordered_json;

json to_json(const Dag& dag);
Dag dag_from_json(const json& j);

json to_json(const ScoreConfig& config);
/// Array of {dag, loglik, penalty, total} in ranking order.
json to_json(const Ranking& ranking);
json to_json(const Decision& decision);

json to_json(const EdgeFunction& f);
/// Rebuilds from the stored ordinates; throws Error{parse_error} on bad input.
EdgeFunction edge_function_from_json(const json& j);

json to_json(const GridResult& grid);
json to_json(const SweepResult& sweep);
json to_json(const GroupSummary& summary);
json to_json(const ExperimentReport& report);

/// Rows `b,q,trials,false_rate`.
std::string to_csv(const GridResult& grid);
/// Rows `nonlinearity,functions,trials,false_rate`.
std::string to_csv(const SweepResult& sweep);
/// One aggregate row per group plus an `overall` row.
std::string to_csv(const ExperimentReport& report);
/// Rows `rank,edges,loglik,penalty,total`.
std::string ranking_to_csv(const Ranking& ranking);

std::string format_double(double v);
void write_text(const std::string& path, const std::string& content);

}  // namespace anm
