#pragma once

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "anm/anm.hpp"

namespace testutil {

// Runs f and returns the ErrorCode it raised, or nullopt if it returned normally.
template <class F>
std::optional<anm::ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const anm::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::vector<double> normals(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  anm::Rng rng(seed);
  std::normal_distribution<double> dist(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline std::vector<double> uniforms(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  anm::Rng rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double corr(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

// Random DAG on d nodes: a random vertex order plus independent edge coin flips.
inline anm::Dag random_dag(int d, anm::Rng& rng, double p = 0.5) {
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution coin(p);
  std::vector<anm::Edge> edges;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (coin(rng)) edges.emplace_back(order[i], order[j]);
  return anm::make_dag(d, edges);
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("anm_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p) << content;
    return p.string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
