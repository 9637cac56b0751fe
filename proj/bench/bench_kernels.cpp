// Times the OpenMP kernels against their serial reference paths and reports
// the speedup.  Build and run:
//   cmake --build build --target bench_kernels && ./build/bench_kernels

#include <chrono>
#include <cstdio>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pp/arith.hpp"
#include "pp/measure.hpp"
#include "pp/solver.hpp"

using namespace pp;

namespace {

Partition trivial(int m, int n) {
  std::vector<int> all(static_cast<std::size_t>(m + n));
  std::iota(all.begin(), all.end(), 1);
  return validate_partition(m, n, {all});
}

template <class F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-36s %10.1f ms %10.1f ms   x%.2f\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled; both columns run serially\n");
#endif
  std::printf("%-36s %13s %13s %7s\n", "kernel", "serial", "parallel", "speedup");

  {
    volatile std::int64_t sink = 0;
    const double s = time_ms([&] { sink = count_primitive_in_box(2, 4000, 1'000'000'000, Exec::serial); });
    const double p = time_ms([&] { sink = count_primitive_in_box(2, 4000, 1'000'000'000, Exec::parallel); });
    report("count_primitive_in_box d=2 Q=4000", s, p);
  }
  {
    const Partition t = trivial(2, 1);
    StripQuery f{{3, -2}, {0.1}, 0.15, StripVariant::Fq, {}};
    volatile double sink = 0;
    const double s = time_ms([&] { sink = mc_measure(f, t, 4'000'000, 1, Exec::serial).estimate; });
    const double p = time_ms([&] { sink = mc_measure(f, t, 4'000'000, 1, Exec::parallel).estimate; });
    report("mc_measure F 4e6 samples", s, p);
  }
  {
    const Partition t = trivial(2, 1);
    volatile double sink = 0;
    const double s = time_ms([&] {
      sink = eq_shell_moments(2, 1, t, make_power_psi(0.4, 1.0), {0.25}, {30}, 20'000, 1,
                              kDefaultBudget, Exec::serial)[0].mean_count;
    });
    const double p = time_ms([&] {
      sink = eq_shell_moments(2, 1, t, make_power_psi(0.4, 1.0), {0.25}, {30}, 20'000, 1,
                              kDefaultBudget, Exec::parallel)[0].mean_count;
    });
    report("eq_shell_moments Q=30 2e4 samples", s, p);
  }
  {
    ProblemInstance inst;
    inst.m = 1;
    inst.n = 2;
    inst.theta = Mat(2, 1, {0.31, -0.47});
    inst.y = {0.2, 0.1};
    inst.psi = make_power_psi(0.4, 1.0);
    inst.partition = trivial(1, 2);
    volatile std::int64_t sink = 0;
    EnumerateOptions ser{kDefaultBudget, Exec::serial};
    EnumerateOptions par{kDefaultBudget, Exec::parallel};
    const double s = time_ms([&] { sink = growth_curve(inst, {100'000}, true, ser).N[0]; });
    const double p = time_ms([&] { sink = growth_curve(inst, {100'000}, true, par).N[0]; });
    report("growth_curve m=1 Q=1e5", s, p);
  }
  return 0;
}
