#pragma once

// Superoperator form of Lindblad models.
//
// Vectorization is column stacking: vec(X)[i + j*d] = X(i, j). With it
//   vec(A X B) = (B^T kron A) vec(X),
// so the generator reads
//   L = -i (I kron H - H^T kron I)
//       + sum_k r_k (conj(c_k) kron c_k - 1/2 I kron c_k^dag c_k - 1/2 (c_k^dag c_k)^T kron I).

#include <sqbath/error.hpp>
#include <sqbath/expm.hpp>
#include <sqbath/models.hpp>
#include <sqbath/operator.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace sqbath {

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Vector vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

inline Matrix unvec(const Vector& v, Eigen::Index d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

/// Row vector t with t . vec(X) = Tr X.
inline Eigen::RowVectorXcd trace_functional(Eigen::Index d) {
  Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    t(i + i * d) = 1.0;
  }
  return t;
}

/// Row vector f with f . vec(X) = Tr(A X).
inline Eigen::RowVectorXcd trace_with(const Matrix& a) {
  // Tr(A X) = sum_{ij} A(j,i) X(i,j) = vec(A^T) . vec(X)
  const Matrix at = a.transpose();
  return Eigen::Map<const Eigen::RowVectorXcd>(at.data(), at.size());
}

class Liouvillian {
public:
  Liouvillian(HilbertSpace space, Matrix matrix) : space_(std::move(space)), m_(std::move(matrix)) {
    const auto d = space_.dim();
    if (m_.rows() != d * d || m_.cols() != d * d) {
      throw SpaceMismatch("Liouvillian: generator must be d^2 x d^2");
    }
  }

  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] const Matrix& matrix() const { return m_; }
  [[nodiscard]] Eigen::Index dim() const { return space_.dim(); }

  /// Largest entry magnitude, used as the numerical scale of the generator.
  [[nodiscard]] double scale() const { return m_.size() ? m_.cwiseAbs().maxCoeff() : 0.0; }

  /// unvec(L vec(rho)).
  [[nodiscard]] Matrix apply(const Matrix& rho) const { return unvec(m_ * vec(rho), dim()); }

private:
  HilbertSpace space_;
  Matrix m_;
};

inline Liouvillian build_liouvillian(const LindbladModel& model) {
  const auto d = model.space().dim();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix& h = model.hamiltonian().matrix();
  Matrix l = -kI * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& ch : model.jumps()) {
    if (ch.rate == 0.0) {
      continue;
    }
    const Matrix& c = ch.op.matrix();
    const Matrix cdc = c.adjoint() * c;
    l += ch.rate * (kron(c.conjugate(), c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id));
  }
  Liouvillian out(model.space(), std::move(l));
  const double leak = (trace_functional(d) * out.matrix()).cwiseAbs().maxCoeff();
  if (leak > 1e-10 * std::max(1.0, out.scale())) {
    throw NumericalError("build_liouvillian: trace preservation violated by " +
                         std::to_string(leak));
  }
  return out;
}

struct EigenMode {
  Complex eigenvalue;

  /// Line position (angular frequency).
  [[nodiscard]] double position() const { return eigenvalue.imag(); }
  /// Half width at half maximum of the associated Lorentzian.
  [[nodiscard]] double halfwidth() const { return -eigenvalue.real(); }
};

inline Eigen::VectorXcd liouvillian_eigenvalues(const Liouvillian& l) {
  Eigen::ComplexEigenSolver<Matrix> es(l.matrix(), false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigenvalue solver did not converge");
  }
  return es.eigenvalues();
}

/// All d^2 modes sorted by halfwidth (then by position).
inline std::vector<EigenMode> eigenmodes(const Liouvillian& l) {
  const Eigen::VectorXcd ev = liouvillian_eigenvalues(l);
  std::vector<EigenMode> modes;
  modes.reserve(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    modes.push_back({ev(i)});
  }
  std::sort(modes.begin(), modes.end(), [](const EigenMode& a, const EigenMode& b) {
    if (a.halfwidth() != b.halfwidth()) {
      return a.halfwidth() < b.halfwidth();
    }
    return a.position() < b.position();
  });
  return modes;
}

/// Unique stationary state. Inverse iteration on the eigenvector of smallest
/// |eigenvalue|, followed by Hermitization and trace normalization.
inline DensityMatrix steady_state(const Liouvillian& l) {
  const auto d = l.dim();
  const Eigen::VectorXcd ev = liouvillian_eigenvalues(l);
  std::vector<double> mags(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    mags[static_cast<std::size_t>(i)] = std::abs(ev(i));
  }
  std::sort(mags.begin(), mags.end());
  const double spectral_scale = mags.back();
  if (spectral_scale == 0.0 || mags[1] < 1e-10 * spectral_scale) {
    throw NumericalError("non-unique steady state: second smallest |eigenvalue| = " +
                         std::to_string(mags[1]) + " vs spectral scale " +
                         std::to_string(spectral_scale));
  }

  const double shift = 1e-6 * mags[1];
  const Matrix shifted = l.matrix() + shift * Matrix::Identity(d * d, d * d);
  const Eigen::FullPivLU<Matrix> lu(shifted);
  const Eigen::RowVectorXcd tr = trace_functional(d);
  const double lnorm = l.matrix().norm();

  Vector v = vec(Matrix::Identity(d, d) / static_cast<double>(d));
  double residual = 0.0;
  for (int it = 0; it < 30; ++it) {
    v = lu.solve(v);
    const Complex t = tr * v;
    if (std::abs(t) == 0.0 || !std::isfinite(std::abs(t))) {
      throw NumericalError("steady_state: inverse iteration produced a traceless iterate");
    }
    v /= t;
    residual = (l.matrix() * v).norm();
    if (residual <= 1e-13 * lnorm) {
      break;
    }
  }
  Matrix rho = unvec(v, d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace();
  residual = (l.matrix() * vec(rho)).norm();
  if (residual > 1e-10 * lnorm) {
    throw NumericalError("steady_state: residual " + std::to_string(residual) +
                         " exceeds 1e-10 * ||L||");
  }
  return {l.space(), std::move(rho)};
}

/// rho(t) = exp(L t) rho0 at each requested time.
inline std::vector<DensityMatrix> evolve(const Liouvillian& l, const DensityMatrix& rho0,
                                         std::span<const double> times) {
  require_same_space(l.space(), rho0.space(), "evolve");
  std::vector<DensityMatrix> out;
  out.reserve(times.size());
  double prev = 0.0;
  const Vector v0 = vec(rho0.matrix());
  for (double t : times) {
    if (!(t >= 0.0) || t < prev) {
      throw InvariantError("evolve: times must be sorted and nonnegative, got " +
                           std::to_string(t));
    }
    prev = t;
    if (t == 0.0) {
      out.push_back(rho0);
      continue;
    }
    const Matrix prop = expm(l.matrix() * t);
    try {
      out.emplace_back(l.space(), unvec(prop * v0, l.dim()));
    } catch (const InvariantError& e) {
      throw NumericalError(std::string("evolve: propagated state at t=") + std::to_string(t) +
                           " is not a density matrix: " + e.what());
    }
  }
  return out;
}

struct MollowTriplet {
  EigenMode center;
  EigenMode lower; ///< sideband near -Omega_D
  EigenMode upper; ///< sideband near +Omega_D
  /// Halfwidth of the narrowest mode outside the triplet and the stationary mode.
  double next_halfwidth = 0.0;
};

/// The three narrowest lines of a driven model: one near zero frequency and
/// one near each of +-omega_D (each within a window of half-width omega_D/2).
/// The stationary (zero) mode is excluded.
inline MollowTriplet mollow_modes(std::span<const EigenMode> modes, double omega_D) {
  if (!(omega_D > 0.0)) {
    throw InvariantError("mollow_modes: omega_D must be > 0, got " + std::to_string(omega_D));
  }
  if (modes.empty()) {
    throw NumericalError("triplet not resolved: no modes");
  }
  std::size_t zero = 0;
  for (std::size_t i = 1; i < modes.size(); ++i) {
    if (std::abs(modes[i].eigenvalue) < std::abs(modes[zero].eigenvalue)) {
      zero = i;
    }
  }
  const double window = 0.5 * omega_D;
  auto narrowest = [&](double target, std::size_t skip1, std::size_t skip2) {
    std::size_t best = modes.size();
    for (std::size_t i = 0; i < modes.size(); ++i) {
      if (i == zero || i == skip1 || i == skip2) {
        continue;
      }
      if (std::abs(modes[i].position() - target) >= window) {
        continue;
      }
      if (best == modes.size() || modes[i].halfwidth() < modes[best].halfwidth()) {
        best = i;
      }
    }
    return best;
  };
  const std::size_t none = modes.size();
  const std::size_t c = narrowest(0.0, none, none);
  const std::size_t up = narrowest(omega_D, c, none);
  const std::size_t lo = narrowest(-omega_D, c, up);
  if (c == none || up == none || lo == none) {
    throw NumericalError("triplet not resolved at omega_D = " + std::to_string(omega_D));
  }
  double next = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i == zero || i == c || i == up || i == lo) {
      continue;
    }
    next = std::min(next, modes[i].halfwidth());
  }
  return {modes[c], modes[lo], modes[up], next};
}

} // namespace sqbath
