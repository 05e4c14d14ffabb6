#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace anm {

inline constexpr int kMaxNodes = 6;

using Edge = std::pair<int, int>;

/// Acyclic directed graph on at most six 0-indexed vertices.
///
/// Edges live in a d*d adjacency bitmask (bit u*d+v is the edge u->v), which
/// keeps the 3.8M graphs on six nodes cheap to enumerate and store. Instances
/// are immutable and always valid; construct through make_dag or from_mask.
class Dag {
 public:
  Dag() = default;

  /// Validates and builds. Throws Error{cycle|duplicate_edge|self_loop|...}.
  static Dag make(int d, std::span<const Edge> edges);
  /// Throws Error{cycle} when the mask is not acyclic or touches the diagonal.
  static Dag from_mask(int d, std::uint64_t mask);
  static Dag empty(int d) { return from_mask(d, 0); }

  int size() const noexcept { return d_; }
  std::uint64_t mask() const noexcept { return mask_; }
  bool has_edge(int u, int v) const noexcept { return (mask_ >> bit(u, v)) & 1U; }
  int edge_count() const noexcept;
  std::vector<Edge> edges() const;

  /// Bitmask over vertices: bit u set iff u -> v.
  std::uint32_t parent_mask(int v) const noexcept;
  std::vector<int> parents(int v) const;
  std::vector<int> topological_order() const;

  std::string to_string() const;

  friend bool operator==(const Dag&, const Dag&) = default;

 private:
  Dag(int d, std::uint64_t mask) : d_(d), mask_(mask) {}
  int bit(int u, int v) const noexcept { return u * d_ + v; }

  int d_ = 0;
  std::uint64_t mask_ = 0;
};

/// Convenience wrapper matching the textual construction form.
Dag make_dag(int d, std::span<const Edge> edges);
inline Dag make_dag(int d, std::initializer_list<Edge> edges) {
  return make_dag(d, std::span<const Edge>(edges.begin(), edges.size()));
}

bool is_acyclic(int d, std::uint64_t mask);

/// All labeled DAGs on d nodes, ordered by increasing adjacency bitmask.
/// Throws Error{dimension_too_large} for d > 6.
std::vector<Dag> enumerate_dags(int d);

/// Number of labeled DAGs on d nodes (Robinson's recurrence).
std::uint64_t dag_count(int d);

/// Position of a DAG inside enumerate_dags(dag.size()).
struct DagId {
  std::size_t index = 0;
};
DagId dag_id(const Dag& dag, std::span<const Dag> enumeration);

/// Structural Hamming distance: per unordered vertex pair, 0 if the pair agrees,
/// 1 otherwise (a reversal is one operation). Throws Error{dimension_mismatch}.
int shd(const Dag& a, const Dag& b);

/// All DAGs one edge addition, deletion, or reversal away, in a fixed order.
std::vector<Dag> neighbors(const Dag& dag);

}  // namespace anm
