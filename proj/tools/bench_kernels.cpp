// Timing comparison of the OpenMP kernels against their serial references,
// plus a bit-identity check (the parallel reductions are chunked so results
// must match the serial ones exactly, for any thread count).

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "stripheat/evolution.hpp"
#include "stripheat/operators.hpp"

using namespace stripheat;
using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& f, int reps) {
  f();  // warm up
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) f();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel timings: OpenMP vs serial reference"};
  int n1 = 2000, n2 = 40, reps = 50;
  app.add_option("--n1", n1, "longitudinal intervals");
  app.add_option("--n2", n2, "transverse intervals");
  app.add_option("--reps", reps, "repetitions per measurement");
  CLI11_PARSE(app, argc, argv);

  StripConfig config{1.0, Theta::Twisted};
  Discretization disc(config, Grid2D(30.0, config.a, n1, n2));
  SymmetricForm form = assemble_physical(disc);
  const int n = form.dim();

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> x(n), y_par(n), y_ser(n);
  for (double& v : x) v = uni(rng);

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("dofs %d, nnz %zu, threads %d, reps %d\n", n, form.A.nnz(), threads,
              reps);

  const double t_spmv_p = time_ms([&] { kern::spmv(form.A, x.data(), y_par.data()); }, reps);
  const double t_spmv_s =
      time_ms([&] { kern::spmv_serial(form.A, x.data(), y_ser.data()); }, reps);
  double max_diff = 0.0;
  for (int i = 0; i < n; ++i) max_diff = std::max(max_diff, std::abs(y_par[i] - y_ser[i]));

  volatile double sink = 0.0;
  const double t_dot_p = time_ms([&] { sink = kern::dot(x, y_ser); }, reps);
  const double d_par = kern::dot(x, y_ser);
  const double t_dot_s = time_ms([&] { sink = kern::dot_serial(x, y_ser); }, reps);
  const double d_ser = kern::dot_serial(x, y_ser);
  (void)sink;

  CnStepper stepper(form);
  Field u;
  u.disc = &disc;
  u.v = x;
  const double t_step = time_ms(
      [&] {
        u.v = x;
        u.t = 0.0;
        stepper.step(u, 1e-3);
      },
      std::max(1, reps / 5));

  std::printf("%-22s %10s %10s %9s\n", "kernel", "omp [ms]", "serial", "speedup");
  std::printf("%-22s %10.3f %10.3f %8.2fx\n", "spmv", t_spmv_p, t_spmv_s,
              t_spmv_s / t_spmv_p);
  std::printf("%-22s %10.3f %10.3f %8.2fx\n", "dot", t_dot_p, t_dot_s,
              t_dot_s / t_dot_p);
  std::printf("%-22s %10.3f %10s %9s\n", "cn-step (cached)", t_step, "-", "-");
  std::printf("spmv omp-vs-serial max |diff| %.3g (must be 0)\n", max_diff);
  std::printf("dot  omp-vs-serial diff      %.3g (must be 0)\n", d_par - d_ser);
  return (max_diff == 0.0 && d_par == d_ser) ? 0 : 1;
}
