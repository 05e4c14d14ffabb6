// Serial reference kernels against their OpenMP counterparts.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <vector>

#include <omp.h>

#include "anm/anm.hpp"

namespace {

template <class F>
double time_ms(F&& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-28s serial %9.2f ms  parallel %9.2f ms  speedup %5.2fx  %s\n", name, serial, parallel,
              serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const std::size_t n = quick ? 300 : 2000;
  const int reps = quick ? 1 : 3;
  const int threads = std::max(1, omp_get_num_procs());
  bool ok = true;

  anm::Rng rng(7);
  std::normal_distribution<double> normal;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = normal(rng);
    y[i] = std::sin(2.0 * x[i]) + 0.3 * normal(rng);
  }
  std::printf("n=%zu threads=%d\n", n, threads);

  {
    const anm::DensityModel model = anm::fit_density(y, {});
    std::vector<double> a, b;
    anm::set_jobs(threads);
    const double tp = time_ms([&] { b = model.log_density(y, true); }, reps);
    const double ts = time_ms([&] { a = model.log_density_serial(y, true); }, reps);
    ok &= a == b;
    report("kde log-density", ts, tp, a == b);
  }
  {
    const anm::LocalRegression loess(x, y, 0.75, 2);
    std::vector<double> a, b;
    const double tp = time_ms([&] { b = loess.evaluate(x); }, reps);
    const double ts = time_ms([&] { a = loess.evaluate_serial(x); }, reps);
    ok &= a == b;
    report("loess evaluate", ts, tp, a == b);
  }
  {
    const anm::Dataset data = anm::sample_anm(
        anm::random_anm_spec(anm::make_dag(3, {{0, 1}, {0, 2}, {1, 2}}), 0.3, 0.4, anm::NoiseSpec::gaussian(1.0), 11),
        quick ? 200 : 500, 12);
    anm::Ranking serial, parallel;
    anm::set_jobs(1);
    const double ts = time_ms([&] { serial = anm::exhaustive_search(data, {}); }, 1);
    anm::set_jobs(threads);
    const double tp = time_ms([&] { parallel = anm::exhaustive_search(data, {}); }, 1);
    bool same = serial.models.size() == parallel.models.size();
    for (std::size_t i = 0; same && i < serial.models.size(); ++i)
      same = serial.models[i].score.total == parallel.models[i].score.total &&
             serial.models[i].score.dag == parallel.models[i].score.dag;
    ok &= same;
    report("exhaustive search (d=3)", ts, tp, same);
  }
  return ok ? 0 : 1;
}
