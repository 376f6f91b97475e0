#pragma once

// Lindblad models: two-level atom in a broadband squeezed bath, the driven
// four-level J=1/2 -> J=1/2 atom, its adiabatically eliminated ground-state
// model, and the two-manifold subsystem used to study interference of cross
// decay. Also the parameter mapping between the four-level laser settings and
// the effective squeezed-bath parameters.
//
// Lindblad normalization used everywhere:
//   d rho/dt = -i[H, rho] + sum_k r_k (c_k rho c_k^dag - 1/2 {c_k^dag c_k, rho}).
//
// Canonical basis orders:
//   two-level squeezed bath:  "g", "e"
//   four-level atom:          "g-", "g+", "e-", "e+"
//   effective ground model:   "g-", "g+"
//   cross-decay subsystem:    "g-", "g+", "e+", "a+"
// The effective two-level lowering operator is sigma = |g-><g+|, so |g+>
// plays the role of the excited level.

#include <sqbath/error.hpp>
#include <sqbath/operator.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace sqbath {

struct SqueezedBathParams {
  double gamma = 1.0; ///< vacuum decay rate
  double N = 0.0;     ///< effective photon number
  double M = 0.0;     ///< squeezing parameter, M^2 <= N(N+1)
  double phi = 0.0;   ///< squeezing phase

  /// Squeezing parameter at the bound M^2 = N(N+1).
  static double max_squeezing(double n) { return std::sqrt(n * (n + 1.0)); }

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw InvariantError("squeezed bath: gamma must be > 0, got " + std::to_string(gamma));
    }
    if (!(N >= 0.0) || !std::isfinite(N)) {
      throw InvariantError("squeezed bath: N must be >= 0, got " + std::to_string(N));
    }
    if (!(M >= 0.0) || !std::isfinite(M)) {
      throw InvariantError("squeezed bath: M must be >= 0, got " + std::to_string(M));
    }
    if (M * M > N * (N + 1.0) + 1e-12) {
      std::ostringstream os;
      os.precision(17);
      os << "squeezed bath: squeezing bound M^2 <= N(N+1) violated: M^2 = " << M * M
         << " > N(N+1) = " << N * (N + 1.0);
      throw InvariantError(os.str());
    }
  }
};

struct DriveParams {
  double omega_D = 0.0; ///< Rabi frequency of the (Raman) drive
  double phi_D = 0.0;   ///< drive phase
};

struct FourLevelParams {
  double Gamma = 1.0;     ///< upper-level decay rate
  double Omega = 0.0;     ///< pump strength scale
  double eps_plus = 1.0;  ///< eps_+^2 + eps_-^2 = 1
  double eps_minus = 0.0;
  double phi_L = 0.0;     ///< relative laser phase
  double g_l = 1.0;       ///< linear (interfering) decay amplitude
  double g_c = 0.0;       ///< circular (cross) decay amplitude, g_l^2 + g_c^2 = 1
  std::optional<DriveParams> drive;

  /// Upper bound on Omega/Gamma below which the adiabatic elimination holds.
  static constexpr double kValidityBound = 0.2;

  [[nodiscard]] double omega_over_gamma() const { return Omega / Gamma; }

  void validate() const {
    std::ostringstream os;
    os.precision(17);
    if (!(Gamma > 0.0) || !std::isfinite(Gamma)) {
      os << "four-level: Gamma must be > 0, got " << Gamma;
      throw InvariantError(os.str());
    }
    if (!(Omega >= 0.0) || !std::isfinite(Omega)) {
      os << "four-level: Omega must be >= 0, got " << Omega;
      throw InvariantError(os.str());
    }
    if (eps_plus < 0.0 || eps_minus < 0.0) {
      os << "four-level: field amplitudes must be >= 0, got eps_plus=" << eps_plus
         << " eps_minus=" << eps_minus;
      throw InvariantError(os.str());
    }
    const double en = eps_plus * eps_plus + eps_minus * eps_minus;
    if (std::abs(en - 1.0) > 1e-12) {
      os << "four-level: normalization invariant eps_plus^2 + eps_minus^2 = 1 violated: "
         << eps_plus << "^2 + " << eps_minus << "^2 = " << en;
      throw InvariantError(os.str());
    }
    if (g_l < 0.0 || g_c < 0.0) {
      os << "four-level: Clebsch-Gordan amplitudes must be >= 0, got g_l=" << g_l
         << " g_c=" << g_c;
      throw InvariantError(os.str());
    }
    const double gn = g_l * g_l + g_c * g_c;
    if (std::abs(gn - 1.0) > 1e-12) {
      os << "four-level: branching invariant g_l^2 + g_c^2 = 1 violated: " << g_l << "^2 + "
         << g_c << "^2 = " << gn;
      throw InvariantError(os.str());
    }
  }

  /// Sets g_c from g_l so that g_l^2 + g_c^2 = 1.
  FourLevelParams& with_g_l(double gl) {
    g_l = gl;
    g_c = std::sqrt(std::max(0.0, 1.0 - gl * gl));
    return *this;
  }
};

struct SubsystemParams {
  double Gamma_e = 1.0;
  double Gamma_a = 1.0;
  double Delta_e = 10.0; ///< omega_L - omega_eg
  double Delta_a = 10.0; ///< -(omega_L - omega_ag)
  double gc_e = 1.0;     ///< circular decay amplitude of the e manifold
  double gc_a = 1.0;     ///< circular decay amplitude of the a manifold
  double prefactor = 1.0;

  void validate() const {
    if (!(Gamma_e > 0.0) || !(Gamma_a > 0.0)) {
      throw InvariantError("subsystem: Gamma_e and Gamma_a must be > 0, got Gamma_e=" +
                           std::to_string(Gamma_e) + " Gamma_a=" + std::to_string(Gamma_a));
    }
    if (gc_e < 0.0 || gc_e > 1.0 || gc_a < 0.0 || gc_a > 1.0) {
      throw InvariantError("subsystem: circular amplitudes must lie in [0,1], got gc_e=" +
                           std::to_string(gc_e) + " gc_a=" + std::to_string(gc_a));
    }
    if (!(prefactor >= 0.0)) {
      throw InvariantError("subsystem: prefactor must be >= 0, got " + std::to_string(prefactor));
    }
  }
};

struct Channel {
  double rate = 0.0;
  Operator op;
};

class LindbladModel {
public:
  LindbladModel(HilbertSpace space, Operator hamiltonian, std::vector<Channel> jumps,
                std::vector<std::string> warnings = {})
      : space_(std::move(space)), h_(std::move(hamiltonian)), jumps_(std::move(jumps)),
        warnings_(std::move(warnings)) {
    require_same_space(space_, h_.space(), "LindbladModel hamiltonian");
    if (!h_.is_hermitian(1e-12)) {
      throw InvariantError("LindbladModel: Hamiltonian is not Hermitian to 1e-12");
    }
    for (const auto& ch : jumps_) {
      require_same_space(space_, ch.op.space(), "LindbladModel jump operator");
      if (!(ch.rate >= 0.0) || !std::isfinite(ch.rate)) {
        throw InvariantError("LindbladModel: jump rate must be >= 0, got " +
                             std::to_string(ch.rate));
      }
    }
  }

  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] const Operator& hamiltonian() const { return h_; }
  [[nodiscard]] const std::vector<Channel>& jumps() const { return jumps_; }
  /// Non-fatal notes, e.g. parameters outside the adiabatic-elimination regime.
  [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }

private:
  HilbertSpace space_;
  Operator h_;
  std::vector<Channel> jumps_;
  std::vector<std::string> warnings_;
};

inline HilbertSpace two_level_space() { return HilbertSpace{"g", "e"}; }
inline HilbertSpace four_level_space() { return HilbertSpace{"g-", "g+", "e-", "e+"}; }
inline HilbertSpace ground_space() { return HilbertSpace{"g-", "g+"}; }
inline HilbertSpace subsystem_space() { return HilbertSpace{"g-", "g+", "e+", "a+"}; }

/// (Omega_D/2)(e^{-i phi_D} sigma^dag + e^{i phi_D} sigma).
inline Operator drive_hamiltonian(const Operator& sigma, const DriveParams& d) {
  const Complex ph = std::polar(1.0, d.phi_D);
  return (0.5 * d.omega_D) * (std::conj(ph) * sigma.adjoint() + ph * sigma);
}

/// N1 with N1(N1+1) = M^2.
inline double squeezed_photon_number(double m) {
  return 0.5 * (std::sqrt(1.0 + 4.0 * m * m) - 1.0);
}

/// Two-level atom in a broadband squeezed vacuum, written with the three
/// channels {(gamma, Sigma), (gamma N2, sigma), (gamma N2, sigma^dag)},
/// Sigma = sqrt(N1+1) sigma + e^{i phi} sqrt(N1) sigma^dag, N1(N1+1) = M^2,
/// N2 = N - N1.
inline LindbladModel squeezed_bath_master(const SqueezedBathParams& p,
                                          std::optional<DriveParams> drive = std::nullopt) {
  p.validate();
  const HilbertSpace sp = two_level_space();
  const Operator sigma = basis_operator(sp, "g", "e");
  const double n1 = squeezed_photon_number(p.M);
  // N2 can come out as -1e-16 at the bound.
  const double n2 = std::max(0.0, p.N - n1);
  const Operator big_sigma =
      std::sqrt(n1 + 1.0) * sigma + std::polar(std::sqrt(n1), p.phi) * sigma.adjoint();

  std::vector<Channel> jumps{{p.gamma, big_sigma},
                             {p.gamma * n2, sigma},
                             {p.gamma * n2, sigma.adjoint()}};
  Operator h = drive ? drive_hamiltonian(sigma, *drive) : Operator::zero(sp);
  return {sp, std::move(h), std::move(jumps)};
}

namespace detail {
inline std::vector<std::string> validity_warnings(const FourLevelParams& p) {
  std::vector<std::string> w;
  if (p.omega_over_gamma() > FourLevelParams::kValidityBound) {
    std::ostringstream os;
    os << "Omega/Gamma = " << p.omega_over_gamma()
       << " exceeds the adiabatic-elimination validity bound 0.2";
    w.push_back(os.str());
  }
  return w;
}
} // namespace detail

/// Full four-level master equation. The -i Gamma/2 P_e part of the effective
/// Hamiltonian is carried by the jump channels
///   {(g_l^2 Gamma, sigma_1 + sigma_2), (g_c^2 Gamma, sigma_-), (g_c^2 Gamma, sigma_+)}.
inline LindbladModel four_level_master(const FourLevelParams& p) {
  p.validate();
  const HilbertSpace sp = four_level_space();
  const Operator s1 = basis_operator(sp, "g-", "e-");
  const Operator s2 = basis_operator(sp, "g+", "e+");
  const Operator sp_ = basis_operator(sp, "g+", "e-"); // sigma_+
  const Operator sm = basis_operator(sp, "g-", "e+");  // sigma_-
  const Complex ph = std::polar(1.0, p.phi_L);

  Operator h = (0.5 * p.eps_minus * p.Omega) * (sm.adjoint() + sm) +
               (0.5 * p.eps_plus * p.Omega) * (std::conj(ph) * sp_.adjoint() + ph * sp_);
  if (p.drive) {
    h = h + drive_hamiltonian(basis_operator(sp, "g-", "g+"), *p.drive);
  }
  const double gl2 = p.g_l * p.g_l;
  const double gc2 = p.g_c * p.g_c;
  std::vector<Channel> jumps{{gl2 * p.Gamma, s1 + s2}, {gc2 * p.Gamma, sm}, {gc2 * p.Gamma, sp_}};
  return {sp, std::move(h), std::move(jumps), detail::validity_warnings(p)};
}

/// Ground-state master equation after adiabatic elimination of the upper
/// levels: channels {(g_l^2 Omega^2/Gamma, tilde Sigma), (g_c^2 Omega^2/(4 Gamma), sigma_z)}
/// with tilde Sigma = eps_+ sigma + e^{i phi_L} eps_- sigma^dag, sigma_z = P_+ - P_-.
inline LindbladModel effective_ground_master(const FourLevelParams& p) {
  p.validate();
  const HilbertSpace sp = ground_space();
  const Operator sigma = basis_operator(sp, "g-", "g+");
  const Operator sz = projector(sp, "g+") - projector(sp, "g-");
  const Operator tilde =
      p.eps_plus * sigma + std::polar(p.eps_minus, p.phi_L) * sigma.adjoint();
  const double pump = p.Omega * p.Omega / p.Gamma;
  std::vector<Channel> jumps{{p.g_l * p.g_l * pump, tilde},
                             {p.g_c * p.g_c * pump / 4.0, sz}};
  Operator h = p.drive ? drive_hamiltonian(sigma, *p.drive) : Operator::zero(sp);
  return {sp, std::move(h), std::move(jumps), detail::validity_warnings(p)};
}

/// Squeezed-bath parameters mimicked by the four-level settings:
///   gamma = (eps_+^2 - eps_-^2) Omega^2/Gamma, N = eps_-^2/(eps_+^2 - eps_-^2),
///   M = eps_- eps_+/(eps_+^2 - eps_-^2), phi = phi_L.
inline SqueezedBathParams map_parameters(const FourLevelParams& p) {
  p.validate();
  if (!(p.eps_plus > p.eps_minus)) {
    throw InvariantError("mapping singular: eps_plus must exceed eps_minus (eps_plus=" +
                         std::to_string(p.eps_plus) + ", eps_minus=" +
                         std::to_string(p.eps_minus) + ")");
  }
  const double ep2 = p.eps_plus * p.eps_plus;
  const double em2 = p.eps_minus * p.eps_minus;
  const double diff = ep2 - em2;
  SqueezedBathParams out;
  out.gamma = diff * p.Omega * p.Omega / p.Gamma;
  out.N = em2 / diff;
  out.M = p.eps_minus * p.eps_plus / diff;
  out.phi = p.phi_L;
  return out;
}

struct InverseMapResult {
  double eps_plus = 1.0;
  double eps_minus = 0.0;
  double Omega = 0.0;
};

/// Four-level laser settings reproducing a target (N, gamma) at fixed Gamma.
inline InverseMapResult inverse_map(double n, double gamma, double Gamma = 1.0) {
  if (!(n >= 0.0)) {
    throw InvariantError("inverse_map: N must be >= 0, got " + std::to_string(n));
  }
  if (!(gamma > 0.0)) {
    throw InvariantError("inverse_map: gamma must be > 0, got " + std::to_string(gamma));
  }
  if (!(Gamma > 0.0)) {
    throw InvariantError("inverse_map: Gamma must be > 0, got " + std::to_string(Gamma));
  }
  const double denom = 2.0 * n + 1.0;
  return {std::sqrt((n + 1.0) / denom), std::sqrt(n / denom), std::sqrt(gamma * Gamma * denom)};
}

/// Rabi frequencies of the laser on the g- -> e+ and g- -> a+ transitions.
struct SubsystemCouplings {
  double rabi_e = 0.0;
  double rabi_a = 0.0;

  /// Couplings fixed by the field strength: the laser drives the same
  /// circular transition that carries the cross decay, so
  /// Omega_j = 2 sqrt(prefactor * gc_j^2 Gamma_j). With this choice the
  /// second-order cross-pumping amplitude carries the weights gc_j^2 Gamma_j.
  static SubsystemCouplings from_field(const SubsystemParams& p) {
    return {2.0 * std::sqrt(p.prefactor * p.gc_e * p.gc_e * p.Gamma_e),
            2.0 * std::sqrt(p.prefactor * p.gc_a * p.gc_a * p.Gamma_a)};
  }
};

/// Subsystem with ground levels g-, g+ and upper levels e+ (energy -Delta_e
/// in the laser frame) and a+ (energy +Delta_a). The laser couples g- to both
/// upper levels. Each upper level decays to g- by emitting a circular photon
/// (amplitude gc_j) and to g+ by emitting a linear photon (amplitude
/// gl_j = sqrt(1 - gc_j^2)). Photons of equal polarization from the two
/// manifolds are indistinguishable, so each polarization is one collective
/// channel of unit rate:
///   jumps[0] = sqrt(gc_e^2 Gamma_e) |g-><e+| + sqrt(gc_a^2 Gamma_a) |g-><a+|   (circular)
///   jumps[1] = sqrt(gl_e^2 Gamma_e) |g+><e+| + sqrt(gl_a^2 Gamma_a) |g+><a+|   (linear)
inline LindbladModel interference_subsystem_model(const SubsystemParams& p,
                                                  std::optional<SubsystemCouplings> couplings =
                                                      std::nullopt) {
  p.validate();
  const SubsystemCouplings c = couplings.value_or(SubsystemCouplings::from_field(p));
  const HilbertSpace sp = subsystem_space();
  const Operator to_e = basis_operator(sp, "e+", "g-");
  const Operator to_a = basis_operator(sp, "a+", "g-");
  Operator h = (-p.Delta_e) * projector(sp, "e+") + p.Delta_a * projector(sp, "a+") +
               (0.5 * c.rabi_e) * (to_e + to_e.adjoint()) +
               (0.5 * c.rabi_a) * (to_a + to_a.adjoint());

  const double ce = std::sqrt(p.gc_e * p.gc_e * p.Gamma_e);
  const double ca = std::sqrt(p.gc_a * p.gc_a * p.Gamma_a);
  const double le = std::sqrt((1.0 - p.gc_e * p.gc_e) * p.Gamma_e);
  const double la = std::sqrt((1.0 - p.gc_a * p.gc_a) * p.Gamma_a);
  const Operator circ = ce * basis_operator(sp, "g-", "e+") + ca * basis_operator(sp, "g-", "a+");
  const Operator lin = le * basis_operator(sp, "g+", "e+") + la * basis_operator(sp, "g+", "a+");
  return {sp, std::move(h), {{1.0, circ}, {1.0, lin}}};
}

} // namespace sqbath
