#include <sqbath/analytics.hpp>
#include <sqbath/liouville.hpp>
#include <sqbath/models.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

using namespace sqbath;

TEST(BlochRates, ReferenceValues) {
  BlochRates r = bloch_decay_rates({1.0, 0.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(r.gamma_x, 0.5);
  EXPECT_DOUBLE_EQ(r.gamma_y, 0.5);
  EXPECT_DOUBLE_EQ(r.gamma_z, 1.0);
  r = bloch_decay_rates({1.0, 1.0, std::sqrt(2.0), 0.0});
  EXPECT_NEAR(r.gamma_x, 1.5 - std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.gamma_y, 1.5 + std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.gamma_z, 3.0, 1e-15);
}

TEST(BlochRates, LargePhotonNumberAsymptote) {
  const double n = 100.0;
  const BlochRates r = bloch_decay_rates({1.0, n, SqueezedBathParams::max_squeezing(n), 0.0});
  EXPECT_NEAR(r.gamma_x / (1.0 / (8.0 * n)), 1.0, 0.005);
  EXPECT_NEAR(r.gamma_y / (2.0 * n + 0.5), 1.0, 0.005);
}

TEST(BlochRates, UncertaintyBoundAndSumRule) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double g = 0.1 + u(rng);
    const double n = 5.0 * u(rng);
    const double m = u(rng) * SqueezedBathParams::max_squeezing(n);
    const BlochRates r = bloch_decay_rates({g, n, m, 0.0});
    EXPECT_GE(r.gamma_x * r.gamma_y, 0.25 * g * g * (1.0 - 1e-12));
    EXPECT_NEAR(r.gamma_x + r.gamma_y, r.gamma_z, 1e-12);
  }
  const double n = 0.7;
  const BlochRates r = bloch_decay_rates({1.0, n, SqueezedBathParams::max_squeezing(n), 0.0});
  EXPECT_NEAR(r.gamma_x * r.gamma_y, 0.25, 1e-12);
}

TEST(PartialSolidAngle, Limits) {
  const SqueezedBathParams p{1.0, 1.0, std::sqrt(2.0), 0.0};
  const auto full = partial_solid_angle_rates(p, 1.0);
  const BlochRates r = bloch_decay_rates(p);
  EXPECT_NEAR(full.first, r.gamma_x, 1e-15);
  EXPECT_NEAR(full.second, r.gamma_y, 1e-15);
  const auto none = partial_solid_angle_rates(p, 0.0);
  EXPECT_DOUBLE_EQ(none.first, 0.5);
  EXPECT_DOUBLE_EQ(none.second, 0.5);
  EXPECT_NEAR(partial_solid_angle_rates(p, 0.5).first, 0.292893, 1e-6);
  EXPECT_THROW(partial_solid_angle_rates(p, 1.5), InvariantError);
}

TEST(BlochEquations, UndrivenRelaxation) {
  const SqueezedBathParams p{0.8, 0.6, 0.5, 0.0};
  const BlochRates r = bloch_decay_rates(p);
  const BlochState s0{0.6, 0.0, 0.8};
  const std::vector<double> t{0.0, 0.3, 1.7};
  const auto out = bloch_evolve(p, {}, 1.0, s0, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double zinf = -p.gamma / r.gamma_z;
    EXPECT_NEAR(out[i].S_x, s0.S_x * std::exp(-r.gamma_x * t[i]), 1e-14);
    EXPECT_NEAR(out[i].S_y, 0.0, 1e-14);
    EXPECT_NEAR(out[i].S_z, zinf + (s0.S_z - zinf) * std::exp(-r.gamma_z * t[i]), 1e-14);
  }
  const BlochState s1{0.0, 1.0, 0.0};
  EXPECT_NEAR(bloch_evolve(p, {}, 1.0, s1, t)[2].S_y, std::exp(-r.gamma_y * t[2]), 1e-14);
}

TEST(BlochEquations, SteadyStateMatchesMasterEquation) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    const double n = 3.0 * u(rng);
    const SqueezedBathParams p{0.5 + u(rng), n, u(rng) * SqueezedBathParams::max_squeezing(n),
                               2.0 * std::numbers::pi * u(rng)};
    const DriveParams d{5.0 * u(rng), 0.0};
    const BlochState a = bloch_steady_state(p, d);
    const BlochVector b = bloch_vector(steady_state(build_liouvillian(squeezed_bath_master(p, d))), "g", "e");
    EXPECT_NEAR(a.S_x, b.x, 1e-8);
    EXPECT_NEAR(a.S_y, b.y, 1e-8);
    EXPECT_NEAR(a.S_z, b.z, 1e-8);
  }
}

TEST(BlochEquations, CrossDecayMatchesEliminatedModel) {
  // Bloch form with g_l < 1 against the ground-state master equation with
  // the dephasing channel.
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 30; ++k) {
    FourLevelParams f;
    f.Omega = 0.02;
    f.eps_minus = 0.65 * u(rng);
    f.eps_plus = std::sqrt(1.0 - f.eps_minus * f.eps_minus);
    f.phi_L = 2.0 * std::numbers::pi * u(rng);
    f.with_g_l(0.5 + 0.5 * u(rng));
    const SqueezedBathParams q = map_parameters(f);
    f.drive = DriveParams{5.0 * q.gamma * u(rng), 0.0};
    const BlochState a = bloch_steady_state(q, *f.drive, f.g_l);
    const BlochVector b =
        bloch_vector(steady_state(build_liouvillian(effective_ground_master(f))), "g-", "g+");
    EXPECT_NEAR(a.S_x, b.x, 1e-8);
    EXPECT_NEAR(a.S_y, b.y, 1e-8);
    EXPECT_NEAR(a.S_z, b.z, 1e-8);
  }
}

TEST(BlochEquations, EigenvaluesAreNonzeroLiouvillianModes) {
  const SqueezedBathParams p{1.0, 0.4, 0.5, 0.7};
  const DriveParams d{2.5, 0.0};
  const Eigen::Vector3cd a = bloch_coefficients(p, d).A.eigenvalues();
  const auto modes = eigenmodes(build_liouvillian(squeezed_bath_master(p, d)));
  for (Eigen::Index i = 0; i < 3; ++i) {
    double best = 1e300;
    for (std::size_t k = 1; k < modes.size(); ++k) {
      best = std::min(best, std::abs(modes[k].eigenvalue - a(i)));
    }
    EXPECT_LT(best, 1e-10);
  }
}

TEST(BlochEquations, TimeEvolutionMatchesMasterEquation) {
  const SqueezedBathParams p{1.0, 0.5, 0.6, 0.7};
  const DriveParams d{3.0, 0.0};
  const Liouvillian l = build_liouvillian(squeezed_bath_master(p, d));
  const std::vector<double> t{0.1, 0.5, 2.0};
  const auto me = evolve(l, DensityMatrix::basis_state(l.space(), "g"), t);
  const auto bl = bloch_evolve(p, d, 1.0, {0.0, 0.0, -1.0}, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const BlochVector b = bloch_vector(me[i], "g", "e");
    EXPECT_NEAR(bl[i].S_x, b.x, 1e-10);
    EXPECT_NEAR(bl[i].S_y, b.y, 1e-10);
    EXPECT_NEAR(bl[i].S_z, b.z, 1e-10);
  }
}

TEST(BlochEquations, RejectsUnsupportedInputs) {
  EXPECT_THROW(bloch_coefficients({1.0}, {1.0, 0.3}), InvariantError);
  EXPECT_THROW(bloch_coefficients({1.0}, {1.0, 0.0}, 1.2), InvariantError);
  const std::vector<double> t{-1.0};
  EXPECT_THROW(bloch_evolve({1.0}, {}, 1.0, {}, t), InvariantError);
}

TEST(MollowWidths, MaximalSqueezingAtBothPhases) {
  const SqueezedBathParams p{1.0, 1.0, std::sqrt(2.0), 0.0};
  const MollowWidths a = mollow_linewidths(p, 0.0);
  EXPECT_NEAR(a.center, 0.085786, 1e-6);
  EXPECT_NEAR(a.sideband, 2.957107, 1e-6);
  const MollowWidths b = mollow_linewidths(p, std::numbers::pi);
  EXPECT_NEAR(b.center, 2.914214, 1e-6);
  EXPECT_NEAR(b.sideband, 1.542893, 1e-6);
}

TEST(MollowWidths, CrossDecayReducesNarrowing) {
  const SqueezedBathParams p{1.0, 1.0, std::sqrt(2.0), 0.0};
  const MollowWidths w = mollow_linewidths(p, 0.0, std::sqrt(2.0 / 3.0));
  EXPECT_NEAR(w.center, 0.557191, 1e-6);
  EXPECT_NEAR(w.sideband, 2.221405, 1e-6);
}

TEST(MollowWidths, MatchEigenmodesAtStrongDrive) {
  for (double phi : {0.0, std::numbers::pi}) {
    const SqueezedBathParams p{1.0, 1.0, std::sqrt(2.0), phi};
    const double wd = 400.0;
    const auto modes = eigenmodes(build_liouvillian(squeezed_bath_master(p, DriveParams{wd, 0.0})));
    const MollowTriplet t = mollow_modes(modes, wd);
    const MollowWidths w = mollow_linewidths(p, phi);
    EXPECT_NEAR(t.center.halfwidth(), w.center, 1e-3 * w.center) << "phi " << phi;
    EXPECT_NEAR(t.upper.halfwidth(), w.sideband, 1e-3 * w.sideband) << "phi " << phi;
  }
}

TEST(MollowWidths, OnlyPrincipalPhases) {
  EXPECT_THROW(mollow_linewidths({1.0, 1.0, 1.0, 0.0}, 1.0), InvariantError);
}

namespace {
SubsystemParams generic_subsystem() {
  SubsystemParams p;
  p.gc_e = std::sqrt(2.0 / 3.0);
  p.gc_a = std::sqrt(1.0 / 3.0);
  p.Delta_e = 20.0;
  p.Delta_a = 40.0;
  p.prefactor = 1.0;
  return p;
}
} // namespace

TEST(CrossDecay, IdenticalManifoldsCancelExactly) {
  SubsystemParams p;
  p.gc_e = p.gc_a = 0.7;
  p.Delta_e = p.Delta_a = 13.0;
  EXPECT_EQ(cross_decay_rate(p), 0.0);
  EXPECT_EQ(cross_decay_rate_second_order(p), 0.0);
}

TEST(CrossDecay, InvariantUnderCommonRescaling) {
  SubsystemParams p = generic_subsystem();
  SubsystemParams q = p;
  q.Gamma_e *= 7.0;
  q.Gamma_a *= 7.0;
  q.Delta_e *= 7.0;
  q.Delta_a *= 7.0;
  EXPECT_NEAR(cross_decay_rate(q) / cross_decay_rate(p), 1.0, 1e-13);
}

TEST(CrossDecay, SecondOrderLimit) {
  for (double x : {0.1, 0.01, 0.001}) {
    SubsystemParams p = generic_subsystem();
    p.Delta_e = 1.0 / x;
    p.Delta_a = 3.0 / x;
    const double full = cross_decay_rate(p);
    const double second = cross_decay_rate_second_order(p);
    EXPECT_LT(std::abs(full / second - 1.0), x * x) << x;
  }
}

TEST(CrossDecay, OptimalRatio) {
  SubsystemParams p;
  EXPECT_DOUBLE_EQ(optimal_detuning_ratio(p), 1.0);
  EXPECT_NEAR(optimal_detuning_ratio(generic_subsystem()), 2.0, 1e-15);
  p.gc_a = 0.0;
  EXPECT_THROW(optimal_detuning_ratio(p), InvariantError);
}

TEST(CrossDecay, OptimumIsScanMinimumAndSuppressionScalesQuadratically) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (double x : {0.1, 0.05, 0.025}) {
    SubsystemParams p = generic_subsystem();
    p.Delta_a = p.Gamma_a / x;
    p.Delta_e = optimal_detuning_ratio(p) * p.Delta_a;
    const double opt = cross_decay_rate(p);
    EXPECT_NEAR(cross_decay_rate_second_order(p), 0.0, 1e-18);
    for (int j = -50; j <= 50; ++j) {
      SubsystemParams q = p;
      q.Delta_e = p.Delta_e * (1.0 + 0.01 * j);
      EXPECT_GE(cross_decay_rate(q), opt);
    }
    SubsystemParams b = p;
    b.Delta_e = b.Delta_a;
    lx.push_back(std::log(x));
    ly.push_back(std::log(opt / cross_decay_rate(b)));
  }
  const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
  EXPECT_NEAR(slope, 2.0, 0.1);
}
