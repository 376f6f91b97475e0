#pragma once

// Closed-form results for the squeezed-bath two-level atom and its
// four-level mimic: Bloch decay rates, the driven Bloch equations, strong
// driving Mollow linewidths and the cross-decay rate of the two-manifold
// subsystem.
//
// Bloch vector conventions are those of bloch_vector() in operator.hpp.

#include <sqbath/error.hpp>
#include <sqbath/expm.hpp>
#include <sqbath/models.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sqbath {

struct BlochRates {
  double gamma_x = 0.0;
  double gamma_y = 0.0;
  double gamma_z = 0.0;
};

/// Decay constants of the undriven Bloch equations (phase phi = 0):
/// gamma_x = gamma(N + 1/2 - M), gamma_y = gamma(N + 1/2 + M), gamma_z = gamma(2N + 1).
inline BlochRates bloch_decay_rates(const SqueezedBathParams& p) {
  p.validate();
  return {p.gamma * (p.N + 0.5 - p.M), p.gamma * (p.N + 0.5 + p.M), p.gamma * (2.0 * p.N + 1.0)};
}

/// Transverse rates when only a fraction eps of the solid angle is squeezed.
inline std::pair<double, double> partial_solid_angle_rates(const SqueezedBathParams& p,
                                                           double eps) {
  p.validate();
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw InvariantError("partial_solid_angle_rates: fraction must lie in [0,1], got " +
                         std::to_string(eps));
  }
  const double vac = 0.5 * (1.0 - eps);
  return {p.gamma * (eps * (p.N + 0.5 - p.M) + vac), p.gamma * (eps * (p.N + 0.5 + p.M) + vac)};
}

struct BlochState {
  double S_x = 0.0;
  double S_y = 0.0;
  double S_z = 0.0;

  [[nodiscard]] Eigen::Vector3d vec() const { return {S_x, S_y, S_z}; }
  static BlochState from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
};

/// dS/dt = A S + b for the driven Bloch equations with cross-decay factor g_l
/// (g_l = 1 is the plain squeezed-bath case). The squeezing phase is p.phi;
/// the drive phase must be zero.
struct BlochSystem {
  Eigen::Matrix3d A;
  Eigen::Vector3d b;
};

inline BlochSystem bloch_coefficients(const SqueezedBathParams& p, const DriveParams& drive,
                                      double g_l = 1.0) {
  p.validate();
  if (drive.phi_D != 0.0) {
    throw InvariantError("bloch_coefficients: the Bloch form assumes drive phase 0, got phi_D=" +
                         std::to_string(drive.phi_D));
  }
  if (!(g_l >= 0.0 && g_l <= 1.0)) {
    throw InvariantError("bloch_coefficients: g_l must lie in [0,1], got " + std::to_string(g_l));
  }
  const double g2 = g_l * g_l;
  const double c = std::cos(p.phi);
  const double s = std::sin(p.phi);
  const double w = drive.omega_D;
  BlochSystem sys;
  sys.A << -p.gamma * (p.N + 0.5 - g2 * p.M * c), p.gamma * g2 * p.M * s, 0.0,
      p.gamma * g2 * p.M * s, -p.gamma * (p.N + 0.5 + g2 * p.M * c), w,
      0.0, -w, -p.gamma * g2 * (2.0 * p.N + 1.0);
  sys.b << 0.0, 0.0, -g2 * p.gamma;
  return sys;
}

/// Stationary point -A^{-1} b.
inline BlochState bloch_steady_state(const SqueezedBathParams& p, const DriveParams& drive,
                                     double g_l = 1.0) {
  const BlochSystem sys = bloch_coefficients(p, drive, g_l);
  return BlochState::from(-sys.A.fullPivLu().solve(sys.b));
}

/// Exact solution of the linear Bloch equations at the requested times,
/// computed with the exponential of the affine 4x4 generator.
inline std::vector<BlochState> bloch_evolve(const SqueezedBathParams& p, const DriveParams& drive,
                                            double g_l, const BlochState& s0,
                                            std::span<const double> times) {
  const BlochSystem sys = bloch_coefficients(p, drive, g_l);
  Eigen::Matrix4d gen = Eigen::Matrix4d::Zero();
  gen.topLeftCorner<3, 3>() = sys.A;
  gen.topRightCorner<3, 1>() = sys.b;
  Eigen::Vector4d x0;
  x0 << s0.S_x, s0.S_y, s0.S_z, 1.0;
  std::vector<BlochState> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!(t >= 0.0)) {
      throw InvariantError("bloch_evolve: times must be nonnegative, got " + std::to_string(t));
    }
    const Eigen::Vector4d x = expm(gen * t) * x0;
    out.push_back({x(0), x(1), x(2)});
  }
  return out;
}

struct MollowWidths {
  double center = 0.0;
  double sideband = 0.0;
};

/// Strong-driving halfwidths of the Mollow triplet at phi in {0, pi}:
///   phi = 0:  center gamma(N + 1/2 - g_l^2 M),
///             sidebands (gamma/4)(2N + 1 + 2 g_l^2 (2N + 1 + M))
///   phi = pi: M -> -M.
/// With g_l = 1 these are the plain squeezed-bath values; with maximal
/// squeezing M = sqrt(N(N+1)) they give the cross-decay table.
inline MollowWidths mollow_linewidths(const SqueezedBathParams& p, double phi, double g_l = 1.0) {
  p.validate();
  double sign = 0.0;
  if (std::abs(phi) <= 1e-12) {
    sign = 1.0;
  } else if (std::abs(phi - std::numbers::pi) <= 1e-12) {
    sign = -1.0;
  } else {
    throw InvariantError("mollow_linewidths: only phi = 0 or pi is supported, got " +
                         std::to_string(phi));
  }
  const double g2 = g_l * g_l;
  const double m = sign * p.M;
  const double n = p.N;
  return {p.gamma * (n + 0.5 - g2 * m),
          0.25 * p.gamma * (2.0 * n + 1.0 + 2.0 * g2 * (2.0 * n + 1.0 + m))};
}

/// Resolvent-corrected cross-pumping rate of the two-manifold subsystem:
///   prefactor * |gc_a^2 Gamma_a/(Delta_a - i Gamma_a/2) - gc_e^2 Gamma_e/(Delta_e - i Gamma_e/2)|^2.
/// Evaluated in the dimensionless form Gamma_j/Delta_j so that a common
/// rescaling of rates and detunings only enters through the prefactor.
inline double cross_decay_rate(const SubsystemParams& p) {
  p.validate();
  if (p.Delta_e == 0.0 || p.Delta_a == 0.0) {
    throw InvariantError("cross_decay_rate: detunings must be nonzero, got Delta_e=" +
                         std::to_string(p.Delta_e) + " Delta_a=" + std::to_string(p.Delta_a));
  }
  const double we = p.gc_e * p.gc_e * p.Gamma_e / p.Delta_e;
  const double wa = p.gc_a * p.gc_a * p.Gamma_a / p.Delta_a;
  const Complex ta = wa / Complex(1.0, -0.5 * p.Gamma_a / p.Delta_a);
  const Complex te = we / Complex(1.0, -0.5 * p.Gamma_e / p.Delta_e);
  return p.prefactor * std::norm(ta - te);
}

/// Second-order rate, prefactor * |gc_a^2 Gamma_a/Delta_a - gc_e^2 Gamma_e/Delta_e|^2.
inline double cross_decay_rate_second_order(const SubsystemParams& p) {
  p.validate();
  if (p.Delta_e == 0.0 || p.Delta_a == 0.0) {
    throw InvariantError("cross_decay_rate_second_order: detunings must be nonzero");
  }
  const double d = p.gc_a * p.gc_a * p.Gamma_a / p.Delta_a - p.gc_e * p.gc_e * p.Gamma_e / p.Delta_e;
  return p.prefactor * d * d;
}

/// Delta_e/Delta_a that cancels the second-order amplitude:
/// gc_e^2 Gamma_e / (gc_a^2 Gamma_a).
inline double optimal_detuning_ratio(const SubsystemParams& p) {
  p.validate();
  const double den = p.gc_a * p.gc_a * p.Gamma_a;
  if (!(den > 0.0)) {
    throw InvariantError("optimal_detuning_ratio: gc_a^2 Gamma_a must be > 0");
  }
  return p.gc_e * p.gc_e * p.Gamma_e / den;
}

} // namespace sqbath
