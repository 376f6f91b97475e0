#pragma once

// Stationary two-time correlations by the quantum regression theorem and
// their one-sided spectra
//   S(omega) = 2 Re int_0^inf e^{i omega tau} (C(tau) - C(inf)) d tau.
// The constant C(inf) is the coherent part, reported separately.

#include <sqbath/error.hpp>
#include <sqbath/expm.hpp>
#include <sqbath/liouville.hpp>
#include <sqbath/models.hpp>
#include <sqbath/operator.hpp>
#include <sqbath/parallel.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace sqbath {

/// Operator ordering of a two-time correlation.
enum class Order {
  Forward,  ///< <A(tau) B(0)> = Tr[A e^{L tau}(B rho)]
  Reversed, ///< <B(0) A(tau)> = Tr[A e^{L tau}(rho B)]
};

struct CorrelationSeries {
  std::vector<double> taus;
  std::vector<Complex> values;
};

struct Spectrum {
  std::vector<double> omegas;
  std::vector<double> values;
  /// Weight of the delta peak at omega = 0, i.e. C(infinity).
  Complex coherent = 0.0;
};

namespace detail {

inline void require_stationary(const Liouvillian& l, const DensityMatrix& rho, const char* what) {
  require_same_space(l.space(), rho.space(), what);
  const double res = (l.matrix() * vec(rho.matrix())).norm();
  if (res > 1e-8 * std::max(1.0, l.matrix().norm())) {
    throw InvariantError(std::string(what) + ": rho is not stationary, ||L rho|| = " +
                         std::to_string(res));
  }
}

inline Matrix seed(const Operator& b, const DensityMatrix& rho, Order order) {
  return order == Order::Forward ? Matrix(b.matrix() * rho.matrix())
                                 : Matrix(rho.matrix() * b.matrix());
}

} // namespace detail

/// C(tau) for tau on a sorted nonnegative grid. Consecutive equal steps share
/// one propagator.
inline CorrelationSeries two_time_correlation(const Liouvillian& l, const Operator& a,
                                              const Operator& b, const DensityMatrix& rho_ss,
                                              std::span<const double> taus,
                                              Order order = Order::Forward) {
  detail::require_stationary(l, rho_ss, "two_time_correlation");
  require_same_space(l.space(), a.space(), "two_time_correlation");
  require_same_space(l.space(), b.space(), "two_time_correlation");
  const Eigen::RowVectorXcd fa = trace_with(a.matrix());
  Vector v = vec(detail::seed(b, rho_ss, order));
  CorrelationSeries out;
  out.taus.assign(taus.begin(), taus.end());
  out.values.reserve(taus.size());
  double prev = 0.0;
  double step = -1.0;
  Matrix prop;
  for (double t : taus) {
    if (!(t >= prev)) {
      throw InvariantError("two_time_correlation: taus must be sorted and nonnegative, got " +
                           std::to_string(t));
    }
    const double dt = t - prev;
    if (dt > 0.0) {
      if (std::abs(dt - step) > 1e-14 * std::max(1.0, t)) {
        step = dt;
        prop = expm(l.matrix() * dt);
      }
      v = prop * v;
    }
    prev = t;
    out.values.push_back(fa * v);
  }
  return out;
}

/// Spectrum of Tr[A e^{L tau} X] for an arbitrary seed X, by linear solves.
/// The component of X along the stationary state is removed first; it only
/// contributes the coherent part Tr[A rho_ss] Tr[X].
inline Spectrum spectrum_of_seed(const Liouvillian& l, const Operator& a, const Matrix& x,
                                 const DensityMatrix& rho_ss, std::span<const double> omegas,
                                 unsigned threads = 1) {
  detail::require_stationary(l, rho_ss, "spectrum");
  require_same_space(l.space(), a.space(), "spectrum");
  const auto d = l.dim();
  const Complex tx = x.trace();
  const Vector rs = vec(rho_ss.matrix());
  const Vector xp = vec(x) - rs * tx;
  const Eigen::RowVectorXcd fa = trace_with(a.matrix());
  // Rank-one deflation moves the stationary eigenvalue to -s without touching
  // the trace-free subspace that xp lives in.
  const double s = std::max(1.0, l.scale());
  const Matrix defl = l.matrix() - s * rs * trace_functional(d);

  Spectrum out;
  out.omegas.assign(omegas.begin(), omegas.end());
  out.values.assign(omegas.size(), 0.0);
  out.coherent = (fa * rs)(0) * tx;
  parallel_for(omegas.size(), threads, [&](std::size_t k) {
    const double w = omegas[k];
    if (!std::isfinite(w)) {
      throw InvariantError("spectrum: non-finite frequency");
    }
    Matrix m = -defl;
    m.diagonal().array() -= Complex(0.0, w);
    const Eigen::PartialPivLU<Matrix> lu(m);
    if (!(lu.rcond() > 1e-14)) {
      throw NumericalError("spectrum: singular resolvent at omega = " + std::to_string(w));
    }
    const Vector y = lu.solve(xp);
    out.values[k] = 2.0 * (fa * y)(0).real();
  });
  return out;
}

inline Spectrum spectrum_from_resolvent(const Liouvillian& l, const Operator& a, const Operator& b,
                                        const DensityMatrix& rho_ss,
                                        std::span<const double> omegas,
                                        Order order = Order::Forward, unsigned threads = 1) {
  require_same_space(l.space(), b.space(), "spectrum_from_resolvent");
  return spectrum_of_seed(l, a, detail::seed(b, rho_ss, order), rho_ss, omegas, threads);
}

/// Same spectrum by trapezoidal quadrature of the sampled correlation on
/// [0, tau_max] with step dtau. Used to cross-check the resolvent route.
inline Spectrum spectrum_of_seed_by_quadrature(const Liouvillian& l, const Operator& a,
                                               const Matrix& x, const DensityMatrix& rho_ss,
                                               std::span<const double> omegas, double tau_max,
                                               double dtau, unsigned threads = 1) {
  detail::require_stationary(l, rho_ss, "spectrum quadrature");
  if (!(dtau > 0.0) || !(tau_max > dtau)) {
    throw InvariantError("spectrum quadrature: need 0 < dtau < tau_max");
  }
  const auto steps = static_cast<std::size_t>(std::ceil(tau_max / dtau));
  const Vector rs = vec(rho_ss.matrix());
  const Complex tx = x.trace();
  const Eigen::RowVectorXcd fa = trace_with(a.matrix());
  const Complex coherent = (fa * rs)(0) * tx;
  const Matrix prop = expm(l.matrix() * dtau);
  std::vector<Complex> c(steps + 1);
  Vector v = vec(x);
  for (std::size_t k = 0; k <= steps; ++k) {
    c[k] = (fa * v)(0) - coherent;
    v = prop * v;
  }
  Spectrum out;
  out.omegas.assign(omegas.begin(), omegas.end());
  out.values.assign(omegas.size(), 0.0);
  out.coherent = coherent;
  parallel_for(omegas.size(), threads, [&](std::size_t j) {
    const Complex rot = std::polar(1.0, omegas[j] * dtau);
    Complex ph = 1.0;
    Complex acc = 0.5 * c[0];
    for (std::size_t k = 1; k < steps; ++k) {
      ph *= rot;
      acc += ph * c[k];
    }
    ph *= rot;
    acc += 0.5 * ph * c[steps];
    out.values[j] = 2.0 * (acc * dtau).real();
  });
  return out;
}

/// Dipole lowering operator of a model space: |g><e| on the two-level atom,
/// |g-><g+| on spaces carrying the two ground sublevels.
inline Operator dipole_lowering(const HilbertSpace& space) {
  if (space.contains("g") && space.contains("e")) {
    return basis_operator(space, "g", "e");
  }
  if (space.contains("g-") && space.contains("g+")) {
    return basis_operator(space, "g-", "g+");
  }
  throw LabelError("dipole_lowering: space has neither (g, e) nor (g-, g+) levels");
}

/// Resonance fluorescence, FT of <sigma^dag(0) sigma(tau)>.
inline Spectrum fluorescence_spectrum_two_level(const Liouvillian& l, const DensityMatrix& rho_ss,
                                                std::span<const double> omegas,
                                                unsigned threads = 1) {
  const Operator s = dipole_lowering(l.space());
  return spectrum_from_resolvent(l, s, s.adjoint(), rho_ss, omegas, Order::Reversed, threads);
}

/// X = eps_+ e^{-i phi_L} sigma + eps_- sigma^dag, the field quadrature
/// radiated on the linear transitions in terms of ground-state operators.
inline Operator quadrature_operator(const HilbertSpace& space, const FourLevelParams& p) {
  const Operator s = basis_operator(space, "g-", "g+");
  return std::polar(p.eps_plus, -p.phi_L) * s + p.eps_minus * s.adjoint();
}

/// Fluorescence of the four-level atom, FT of <X^dag(0) X(tau)>.
inline Spectrum fluorescence_spectrum_four_level(const Liouvillian& l, const FourLevelParams& p,
                                                 const DensityMatrix& rho_ss,
                                                 std::span<const double> omegas,
                                                 unsigned threads = 1) {
  const Operator x = quadrature_operator(l.space(), p);
  return spectrum_from_resolvent(l, x, x.adjoint(), rho_ss, omegas, Order::Reversed, threads);
}

/// Probe absorption, FT of <[sigma(tau), sigma^dag(0)]>. Positive values are
/// absorption, negative values gain.
inline Spectrum absorption_spectrum(const Liouvillian& l, const DensityMatrix& rho_ss,
                                    std::span<const double> omegas, unsigned threads = 1) {
  const Operator s = dipole_lowering(l.space());
  const Matrix sd = s.adjoint().matrix();
  const Matrix x = sd * rho_ss.matrix() - rho_ss.matrix() * sd;
  return spectrum_of_seed(l, s, x, rho_ss, omegas, threads);
}

/// Seeds of the three spectra above, for the quadrature cross-check.
inline Matrix fluorescence_seed(const Operator& a, const DensityMatrix& rho_ss) {
  return rho_ss.matrix() * a.adjoint().matrix();
}
inline Matrix absorption_seed(const Operator& s, const DensityMatrix& rho_ss) {
  const Matrix sd = s.adjoint().matrix();
  return sd * rho_ss.matrix() - rho_ss.matrix() * sd;
}

/// Uniform grid of n points on [-half_span, half_span].
inline std::vector<double> linear_grid(double half_span, std::size_t n) {
  if (n < 2 || !(half_span > 0.0)) {
    throw InvariantError("linear_grid: need n >= 2 and half_span > 0");
  }
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = -half_span + 2.0 * half_span * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

/// 2001 points over +-1.5 omega_D, or +-10 gamma without drive.
inline std::vector<double> default_omega_grid(double omega_D, double gamma) {
  return linear_grid(omega_D > 0.0 ? 1.5 * omega_D : 10.0 * gamma, 2001);
}

/// Half width at half maximum of the highest peak, by linear interpolation
/// between grid points.
inline double half_width_at_half_maximum(const Spectrum& s) {
  const auto& v = s.values;
  const auto& w = s.omegas;
  if (v.size() < 3) {
    throw InvariantError("half_width_at_half_maximum: spectrum too short");
  }
  const std::size_t k = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  const double half = 0.5 * v[k];
  std::size_t r = k;
  while (r + 1 < v.size() && v[r + 1] > half) {
    ++r;
  }
  std::size_t lft = k;
  while (lft > 0 && v[lft - 1] > half) {
    --lft;
  }
  if (r + 1 >= v.size() || lft == 0) {
    throw NumericalError("half_width_at_half_maximum: peak not contained in the grid");
  }
  auto cross = [&](std::size_t i, std::size_t j) {
    return w[i] + (half - v[i]) * (w[j] - w[i]) / (v[j] - v[i]);
  };
  return 0.5 * (cross(r, r + 1) - cross(lft, lft - 1));
}

struct LineFit {
  double halfwidth = 0.0;
  double amplitude = 0.0; ///< coefficient a of (a + b w)/(hw^2 + w^2)
  double rms_residual = 0.0;
};

/// Fits (a + b w)/(hw^2 + w^2) + c0 + c1 w + c2 w^2 to the samples with
/// |w| <= window. The coefficients are linear for fixed hw; hw is found by a
/// logarithmic scan followed by golden-section refinement.
inline LineFit fit_center_line(const Spectrum& s, double window) {
  std::vector<double> w;
  std::vector<double> y;
  for (std::size_t i = 0; i < s.omegas.size(); ++i) {
    if (std::abs(s.omegas[i]) <= window) {
      w.push_back(s.omegas[i]);
      y.push_back(s.values[i]);
    }
  }
  if (w.size() < 8) {
    throw NumericalError("fit_center_line: fewer than 8 samples in the window");
  }
  const auto n = static_cast<Eigen::Index>(w.size());
  Eigen::VectorXd yy = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  auto solve = [&](double hw, Eigen::VectorXd* coef) {
    Eigen::MatrixXd a(n, 5);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = w[static_cast<std::size_t>(i)];
      const double den = hw * hw + x * x;
      a(i, 0) = 1.0 / den;
      a(i, 1) = x / den;
      a(i, 2) = 1.0;
      a(i, 3) = x;
      a(i, 4) = x * x;
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(yy);
    if (coef) {
      *coef = c;
    }
    return (a * c - yy).squaredNorm();
  };
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < w.size(); ++i) {
    spacing = std::min(spacing, w[i] - w[i - 1]);
  }
  const double lo = 0.5 * spacing;
  const double hi = window;
  constexpr int kScan = 80;
  int best = 0;
  double best_r = std::numeric_limits<double>::infinity();
  auto at = [&](int i) { return lo * std::pow(hi / lo, static_cast<double>(i) / kScan); };
  for (int i = 0; i <= kScan; ++i) {
    const double r = solve(at(i), nullptr);
    if (r < best_r) {
      best_r = r;
      best = i;
    }
  }
  double a = std::log(at(std::max(0, best - 1)));
  double b = std::log(at(std::min(kScan, best + 1)));
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = solve(std::exp(c), nullptr);
  double fd = solve(std::exp(d), nullptr);
  for (int it = 0; it < 100 && b - a > 1e-10; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = solve(std::exp(c), nullptr);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = solve(std::exp(d), nullptr);
    }
  }
  const double hw = std::exp(0.5 * (a + b));
  Eigen::VectorXd coef;
  const double r = solve(hw, &coef);
  return {hw, coef(0), std::sqrt(r / static_cast<double>(n))};
}

} // namespace sqbath
