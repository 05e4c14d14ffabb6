#include "anm/graph.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <sstream>

#include "anm/error.hpp"

namespace anm {

namespace {

void check_dimension(int d) {
  if (d > kMaxNodes) {
    throw Error(ErrorCode::dimension_too_large,
                "d=" + std::to_string(d) + " exceeds the limit of " + std::to_string(kMaxNodes));
  }
  if (d < 1) throw Error(ErrorCode::invalid_argument, "vertex count must be >= 1");
}

std::uint64_t diagonal_mask(int d) {
  std::uint64_t diag = 0;
  for (int v = 0; v < d; ++v) diag |= std::uint64_t{1} << (v * d + v);
  return diag;
}

}  // namespace

bool is_acyclic(int d, std::uint64_t mask) {
  // Kahn's algorithm on bitmasks.
  std::array<std::uint32_t, kMaxNodes> parents{};
  for (int u = 0; u < d; ++u)
    for (int v = 0; v < d; ++v)
      if ((mask >> (u * d + v)) & 1U) parents[v] |= 1U << u;
  std::uint32_t done = 0;
  const std::uint32_t all = (1U << d) - 1;
  bool progress = true;
  while (done != all && progress) {
    progress = false;
    for (int v = 0; v < d; ++v) {
      if (!((done >> v) & 1U) && (parents[v] & ~done) == 0) {
        done |= 1U << v;
        progress = true;
      }
    }
  }
  return done == all;
}

Dag Dag::make(int d, std::span<const Edge> edges) {
  check_dimension(d);
  std::uint64_t mask = 0;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= d || v >= d) {
      throw Error(ErrorCode::invalid_argument,
                  "edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    }
    if (u == v) throw Error(ErrorCode::self_loop, "self-loop on vertex " + std::to_string(u));
    const std::uint64_t b = std::uint64_t{1} << (u * d + v);
    if (mask & b) {
      throw Error(ErrorCode::duplicate_edge,
                  "edge (" + std::to_string(u) + "," + std::to_string(v) + ") repeated");
    }
    mask |= b;
  }
  if (!is_acyclic(d, mask)) throw Error(ErrorCode::cycle, "edge set contains a directed cycle");
  return Dag(d, mask);
}

Dag Dag::from_mask(int d, std::uint64_t mask) {
  check_dimension(d);
  const int bits = d * d;
  if ((bits < 64 && (mask >> bits) != 0) || (mask & diagonal_mask(d)))
    throw Error(ErrorCode::invalid_argument, "mask has bits outside the off-diagonal block");
  if (!is_acyclic(d, mask)) throw Error(ErrorCode::cycle, "mask contains a directed cycle");
  return Dag(d, mask);
}

Dag make_dag(int d, std::span<const Edge> edges) { return Dag::make(d, edges); }

int Dag::edge_count() const noexcept { return std::popcount(mask_); }

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  for (int u = 0; u < d_; ++u)
    for (int v = 0; v < d_; ++v)
      if (has_edge(u, v)) out.emplace_back(u, v);
  return out;
}

std::uint32_t Dag::parent_mask(int v) const noexcept {
  std::uint32_t m = 0;
  for (int u = 0; u < d_; ++u)
    if (has_edge(u, v)) m |= 1U << u;
  return m;
}

std::vector<int> Dag::parents(int v) const {
  std::vector<int> out;
  for (int u = 0; u < d_; ++u)
    if (has_edge(u, v)) out.push_back(u);
  return out;
}

std::vector<int> Dag::topological_order() const {
  std::vector<int> order;
  std::uint32_t done = 0;
  while (static_cast<int>(order.size()) < d_) {
    for (int v = 0; v < d_; ++v) {
      if (!((done >> v) & 1U) && (parent_mask(v) & ~done) == 0) {
        done |= 1U << v;
        order.push_back(v);
      }
    }
  }
  return order;
}

std::string Dag::to_string() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (auto [u, v] : edges()) {
    os << (first ? "" : ", ") << u + 1 << "->" << v + 1;
    first = false;
  }
  os << "}";
  return os.str();
}

namespace {

struct Enumerator {
  int d;
  std::vector<int> positions;  // off-diagonal bit indices, most significant first
  std::vector<Dag>* out;

  // reach[x]: vertices reachable from x through at least one edge.
  void recurse(std::size_t level, std::uint64_t mask, std::array<std::uint32_t, kMaxNodes> reach) {
    if (level == positions.size()) {
      out->push_back(Dag::from_mask(d, mask));
      return;
    }
    const int b = positions[level];
    recurse(level + 1, mask, reach);
    const int u = b / d;
    const int v = b % d;
    if ((reach[v] >> u) & 1U) return;  // v already reaches u: u->v closes a cycle
    const std::uint32_t gained = (1U << v) | reach[v];
    for (int x = 0; x < d; ++x)
      if (x == u || ((reach[x] >> u) & 1U)) reach[x] |= gained;
    recurse(level + 1, mask | (std::uint64_t{1} << b), reach);
  }
};

}  // namespace

std::vector<Dag> enumerate_dags(int d) {
  check_dimension(d);
  Enumerator e{d, {}, nullptr};
  for (int b = d * d - 1; b >= 0; --b)
    if (b / d != b % d) e.positions.push_back(b);
  std::vector<Dag> out;
  out.reserve(dag_count(d));
  e.out = &out;
  e.recurse(0, 0, {});
  return out;
}

std::uint64_t dag_count(int d) {
  // a(n) = sum_{k=1..n} (-1)^(k+1) C(n,k) 2^(k(n-k)) a(n-k)
  std::vector<std::int64_t> a(static_cast<std::size_t>(d) + 1, 0);
  a[0] = 1;
  for (int n = 1; n <= d; ++n) {
    std::int64_t sum = 0;
    std::int64_t binom = 1;
    for (int k = 1; k <= n; ++k) {
      binom = binom * (n - k + 1) / k;
      const std::int64_t term = binom * (std::int64_t{1} << (k * (n - k))) * a[n - k];
      sum += (k % 2 == 1) ? term : -term;
    }
    a[n] = sum;
  }
  return static_cast<std::uint64_t>(a[d]);
}

DagId dag_id(const Dag& dag, std::span<const Dag> enumeration) {
  auto it = std::lower_bound(enumeration.begin(), enumeration.end(), dag,
                             [](const Dag& a, const Dag& b) { return a.mask() < b.mask(); });
  if (it == enumeration.end() || !(*it == dag))
    throw Error(ErrorCode::invalid_argument, "graph not present in enumeration");
  return DagId{static_cast<std::size_t>(it - enumeration.begin())};
}

int shd(const Dag& a, const Dag& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " vertices");
  }
  int distance = 0;
  const int d = a.size();
  for (int u = 0; u < d; ++u) {
    for (int v = u + 1; v < d; ++v) {
      const bool same = a.has_edge(u, v) == b.has_edge(u, v) && a.has_edge(v, u) == b.has_edge(v, u);
      if (!same) ++distance;
    }
  }
  return distance;
}

std::vector<Dag> neighbors(const Dag& dag) {
  std::vector<Dag> out;
  const int d = dag.size();
  const std::uint64_t mask = dag.mask();
  for (int u = 0; u < d; ++u) {
    for (int v = 0; v < d; ++v) {
      if (u == v) continue;
      const std::uint64_t uv = std::uint64_t{1} << (u * d + v);
      const std::uint64_t vu = std::uint64_t{1} << (v * d + u);
      if (mask & uv) {
        out.push_back(Dag::from_mask(d, mask & ~uv));
        const std::uint64_t reversed = (mask & ~uv) | vu;
        if (is_acyclic(d, reversed)) out.push_back(Dag::from_mask(d, reversed));
      } else if (!(mask & vu) && is_acyclic(d, mask | uv)) {
        out.push_back(Dag::from_mask(d, mask | uv));
      }
    }
  }
  return out;
}

}  // namespace anm
