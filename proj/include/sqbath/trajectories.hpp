#pragma once

// Monte Carlo wave-function unraveling with first-order jump/no-jump steps.
//
// Each step propagates psi with U = exp(-i H_eff dt),
//   H_eff = H - (i/2) sum_k r_k c_k^dag c_k.
// A jump happens with probability 1 - ||U psi||^2; channel k is then chosen
// with weight r_k ||c_k psi||^2 evaluated on the pre-step state. The state is
// renormalized after every step.
//
// Trajectory k draws from its own mt19937_64 stream seeded with
// splitmix64(seed + (k + 1) * 0x9E3779B97F4A7C15), so results depend only on
// (seed, n_traj, dt) and not on the number of worker threads.

#include <sqbath/error.hpp>
#include <sqbath/expm.hpp>
#include <sqbath/models.hpp>
#include <sqbath/operator.hpp>
#include <sqbath/parallel.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace sqbath {

struct TrajectoryConfig {
  std::size_t n_traj = 1000;
  double dt = 1e-3;
  std::uint64_t seed = 1;
};

struct TrajectoryResult {
  std::vector<double> times;
  std::vector<DensityMatrix> mean;
  /// Entrywise standard error of the mean density matrix.
  std::vector<Eigen::MatrixXd> stderr_rho;
  /// observable_mean[i][j]: mean of <psi|O_j|psi> at times[i]; same layout for errors.
  std::vector<std::vector<double>> observable_mean;
  std::vector<std::vector<double>> observable_stderr;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t trajectory_seed(std::uint64_t seed, std::size_t k) {
  return splitmix64(seed + (static_cast<std::uint64_t>(k) + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Largest dt allowed for a model: 0.01 over the largest eigenvalue of
/// sum_k r_k c_k^dag c_k.
inline double max_trajectory_step(const LindbladModel& model) {
  const auto d = model.space().dim();
  Matrix g = Matrix::Zero(d, d);
  for (const auto& ch : model.jumps()) {
    g += ch.rate * ch.op.matrix().adjoint() * ch.op.matrix();
  }
  const double top = Eigen::SelfAdjointEigenSolver<Matrix>(g, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff();
  return top > 0.0 ? 0.01 / top : std::numeric_limits<double>::infinity();
}

inline TrajectoryResult simulate(const LindbladModel& model, const Vector& psi0,
                                 const TrajectoryConfig& cfg, std::span<const double> sample_times,
                                 std::span<const Operator> observables = {},
                                 unsigned threads = 1) {
  const auto& sp = model.space();
  const auto d = sp.dim();
  if (psi0.size() != d) {
    throw SpaceMismatch("simulate: initial state size does not match space dim");
  }
  if (std::abs(psi0.norm() - 1.0) > 1e-10) {
    throw InvariantError("simulate: initial state must be normalized, norm = " +
                         std::to_string(psi0.norm()));
  }
  if (cfg.n_traj < 1) {
    throw InvariantError("simulate: n_traj must be >= 1");
  }
  if (!(cfg.dt > 0.0)) {
    throw InvariantError("simulate: dt must be > 0, got " + std::to_string(cfg.dt));
  }
  const double dt_max = max_trajectory_step(model);
  if (cfg.dt > dt_max * (1.0 + 1e-12)) {
    throw InvariantError("simulate: step invariant dt <= 0.01/max jump rate violated: dt = " +
                         std::to_string(cfg.dt) + " > " + std::to_string(dt_max));
  }
  for (const auto& o : observables) {
    require_same_space(sp, o.space(), "simulate observable");
  }

  std::vector<std::size_t> sample_steps;
  std::size_t prev = 0;
  for (double t : sample_times) {
    const double q = t / cfg.dt;
    const double r = std::round(q);
    if (!(t >= 0.0) || std::abs(q - r) > 1e-9 * std::max(1.0, q)) {
      throw InvariantError("simulate: sample time " + std::to_string(t) +
                           " is not a nonnegative multiple of dt");
    }
    const auto s = static_cast<std::size_t>(r);
    if (!sample_steps.empty() && s < prev) {
      throw InvariantError("simulate: sample times must be sorted");
    }
    sample_steps.push_back(s);
    prev = s;
  }
  const std::size_t n_samples = sample_steps.size();

  Matrix heff = model.hamiltonian().matrix();
  std::vector<Matrix> ops;
  std::vector<double> rates;
  for (const auto& ch : model.jumps()) {
    if (ch.rate == 0.0) {
      continue;
    }
    heff -= Complex(0.0, 0.5 * ch.rate) * (ch.op.matrix().adjoint() * ch.op.matrix());
    ops.push_back(ch.op.matrix());
    rates.push_back(ch.rate);
  }
  const Matrix u = expm(Complex(0.0, -cfg.dt) * heff);

  // states[k * n_samples + i]: trajectory k at sample i.
  std::vector<Vector> states(cfg.n_traj * n_samples);
  parallel_for(cfg.n_traj, threads, [&](std::size_t k) {
    std::mt19937_64 rng(trajectory_seed(cfg.seed, k));
    Vector psi = psi0;
    std::size_t step = 0;
    std::vector<double> w(ops.size());
    for (std::size_t i = 0; i < n_samples; ++i) {
      for (; step < sample_steps[i]; ++step) {
        Vector next = u * psi;
        const double keep = next.squaredNorm();
        const double x = uniform01(rng);
        if (x < 1.0 - keep) {
          double total = 0.0;
          for (std::size_t c = 0; c < ops.size(); ++c) {
            w[c] = rates[c] * (ops[c] * psi).squaredNorm();
            total += w[c];
          }
          if (!(total > 0.0)) {
            throw NumericalError("simulate: norm decayed without an available jump; reduce dt");
          }
          double y = uniform01(rng) * total;
          std::size_t c = 0;
          while (c + 1 < ops.size() && y >= w[c]) {
            y -= w[c];
            ++c;
          }
          next = ops[c] * psi;
        }
        const double n = next.norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
          throw NumericalError("simulate: state norm underflow; reduce dt");
        }
        psi = next / n;
      }
      states[k * n_samples + i] = psi;
    }
  });

  TrajectoryResult out;
  out.times.assign(sample_times.begin(), sample_times.end());
  const double nt = static_cast<double>(cfg.n_traj);
  for (std::size_t i = 0; i < n_samples; ++i) {
    Matrix sum = Matrix::Zero(d, d);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(d, d);
    std::vector<double> osum(observables.size(), 0.0);
    std::vector<double> osq(observables.size(), 0.0);
    for (std::size_t k = 0; k < cfg.n_traj; ++k) {
      const Vector& psi = states[k * n_samples + i];
      const Matrix r = psi * psi.adjoint();
      sum += r;
      sq += r.cwiseAbs2();
      for (std::size_t j = 0; j < observables.size(); ++j) {
        const double v = psi.dot(observables[j].matrix() * psi).real();
        osum[j] += v;
        osq[j] += v * v;
      }
    }
    const Matrix mean = sum / nt;
    Eigen::MatrixXd se(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        const double var = std::max(0.0, sq(a, b) / nt - std::norm(mean(a, b)));
        se(a, b) = cfg.n_traj > 1 ? std::sqrt(var * nt / (nt - 1.0) / nt) : 0.0;
      }
    }
    out.mean.emplace_back(sp, mean);
    out.stderr_rho.push_back(se);
    std::vector<double> om(observables.size());
    std::vector<double> oe(observables.size());
    for (std::size_t j = 0; j < observables.size(); ++j) {
      om[j] = osum[j] / nt;
      const double var = std::max(0.0, osq[j] / nt - om[j] * om[j]);
      oe[j] = cfg.n_traj > 1 ? std::sqrt(var / (nt - 1.0)) : 0.0;
    }
    out.observable_mean.push_back(std::move(om));
    out.observable_stderr.push_back(std::move(oe));
  }
  return out;
}

} // namespace sqbath
