// Times the OpenMP kernels against their serial reference implementations
// and checks that both produce identical results.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qcoord/classical.hpp"
#include "qcoord/constructions.hpp"
#include "qcoord/diagnostics.hpp"
#include "qcoord/fit.hpp"
#include "qcoord/quantum.hpp"

using namespace qcoord;

namespace {

struct Rand {
  std::mt19937_64 eng;
  explicit Rand(std::uint64_t seed) : eng(seed) {}
  double u01() { return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53; }
  double normal() {
    const double u1 = u01(), u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  std::vector<double> simplex(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double s = 0.0;
    for (double& x : v) {
      x = -std::log(u01());
      s += x;
    }
    for (double& x : v) x /= s;
    return v;
  }
};

double time_ms(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void row(const std::string& name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-44s %10.1f %10.1f %8.2fx %10s\n", name.c_str(), serial_ms, parallel_ms,
              serial_ms / parallel_ms, identical ? "yes" : "NO");
}

LatentModel random_latent(Rand& rng, const ProcessSpec& proc, int latent) {
  LatentModel m;
  m.latent_probs = rng.simplex(latent);
  m.tables.resize(static_cast<std::size_t>(proc.stages()));
  for (int k = 0; k < proc.stages(); ++k) {
    m.tables[k].resize(static_cast<std::size_t>(latent));
    for (int s = 0; s < latent; ++s) {
      for (int y = 0; y < proc.label_count(k); ++y) {
        m.tables[k][static_cast<std::size_t>(s)].push_back(rng.simplex(proc.alphabet_size(k)));
      }
    }
  }
  return m;
}

CMatrix random_density(Rand& rng, int dim) {
  CMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Cplx(rng.normal(), rng.normal());
  }
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

void bench_eval_latent() {
  Rand rng(1);
  const auto proc = ProcessSpec::oblivious(std::vector<int>(16, 2));
  const auto model = random_latent(rng, proc, 32);
  JointDistribution serial({1}, {1.0}), parallel({1}, {1.0});
  const double ts = time_ms([&] { serial = eval_latent_serial(model, proc); });
  const double tp = time_ms([&] { parallel = eval_latent(model, proc); });
  row("eval_latent (16 stages, |S|=32)", ts, tp, serial.probs() == parallel.probs());
}

void bench_born() {
  Rand rng(2);
  const auto proc = ProcessSpec::oblivious({2, 2, 2});
  QuantumModel q{{8, 8, 8}, DensityMatrix::trusted(random_density(rng, 512)), {}, {}};
  for (int k = 0; k < 3; ++k) {
    // dense projective measurement in a random eigenbasis
    const CMatrix basis = random_density(rng, 8);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(basis);
    CMatrix m0 = CMatrix::Zero(8, 8);
    for (int c = 0; c < 4; ++c) m0 += es.eigenvectors().col(c) * es.eigenvectors().col(c).adjoint();
    q.measurements.push_back({Povm::trusted({m0, CMatrix::Identity(8, 8) - m0})});
  }
  JointDistribution serial({1}, {1.0}), parallel({1}, {1.0});
  const int reps = 40;
  const double ts = time_ms([&] {
    for (int r = 0; r < reps; ++r) serial = born_joint_serial(q, proc);
  });
  const double tp = time_ms([&] {
    for (int r = 0; r < reps; ++r) parallel = born_joint(q, proc);
  });
  row("born_joint (dims 8x8x8, 40 reps)", ts, tp, serial.probs() == parallel.probs());
}

void bench_discord() {
  Rand rng(3);
  const DensityMatrix rho = DensityMatrix::trusted(random_density(rng, 4));
  DiscordResult serial, parallel;
  const double ts = time_ms(
      [&] { serial = discord_one_sided_serial(rho, 2, 2, MeasuredSide::B, 1024); });
  const double tp =
      time_ms([&] { parallel = discord_one_sided(rho, 2, 2, MeasuredSide::B, 1024); });
  const bool same = serial.discord == parallel.discord && serial.theta == parallel.theta &&
                    serial.phi == parallel.phi;
  row("discord grid scan (resolution 1024)", ts, tp, same);
}

void bench_fit() {
  const auto proc = ProcessSpec::oblivious({2, 2});
  const JointDistribution target({2, 2}, {0.0, 0.5, 0.5, 0.0});
  SearchParams params;
  params.restarts = 256;
  FitReport serial, parallel;
  const double ts = time_ms(
      [&] { serial = fit_local_model_serial(target, proc, Metric::TotalVariation, params); });
  const double tp =
      time_ms([&] { parallel = fit_local_model(target, proc, Metric::TotalVariation, params); });
  const bool same = serial.distance == parallel.distance &&
                    serial.best_model.tables == parallel.best_model.tables;
  row("fit_local_model (256 restarts)", ts, tp, same);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif
  std::printf("%-44s %10s %10s %9s %10s\n", "kernel", "serial/ms", "omp/ms", "speedup",
              "identical");
  bench_eval_latent();
  bench_born();
  bench_discord();
  bench_fit();
  return 0;
}
