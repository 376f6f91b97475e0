#include <sqbath/experiments.hpp>

#include <gtest/gtest.h>

using namespace sqbath;

namespace {

Params with(const std::string& name, const std::vector<std::pair<std::string, std::string>>& kv) {
  Params p = default_params(find_experiment(name));
  for (const auto& [k, v] : kv) {
    p.set(k, v);
  }
  return p;
}

ExperimentResult run(const std::string& name,
                     const std::vector<std::pair<std::string, std::string>>& kv,
                     unsigned threads = 1) {
  const Experiment& e = find_experiment(name);
  const Params p = with(name, kv);
  validate_experiment(e, p);
  return run_experiment(e, p, RunContext{threads});
}

} // namespace

TEST(Params, NumberSyntax) {
  EXPECT_DOUBLE_EQ(parse_number("1.9e-5"), 1.9e-5);
  EXPECT_DOUBLE_EQ(parse_number(" +2 "), 2.0);
  EXPECT_DOUBLE_EQ(parse_number("pi"), std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_number("-pi"), -std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_number("3*pi/4"), 0.75 * std::numbers::pi);
  EXPECT_THROW(parse_number("1,5"), ConfigError);
  EXPECT_THROW(parse_number("0x10"), ConfigError);
  EXPECT_THROW(parse_number("pi/0"), ConfigError);
  EXPECT_EQ(parse_list("0, pi/2,1"), (std::vector<double>{0.0, std::numbers::pi / 2, 1.0}));
}

TEST(Params, UnknownKeysAndFlags) {
  Params p = default_params(find_experiment("absorption"));
  EXPECT_THROW(p.set("bogus", "1"), ConfigError);
  p.set("check_ft", "maybe");
  EXPECT_THROW((void)p.flag("check_ft"), ConfigError);
}

TEST(Catalog, SixExperiments) {
  std::vector<std::string> names;
  for (const auto& e : experiment_catalog()) {
    names.push_back(e.name);
  }
  EXPECT_EQ(names, (std::vector<std::string>{"steady-sweep", "absorption", "fluorescence",
                                             "eigenscan", "crossdecay", "bloch-demo"}));
  EXPECT_THROW(find_experiment("nope"), ConfigError);
}

TEST(Catalog, DefaultParameters) {
  const Params s = default_params(find_experiment("steady-sweep"));
  EXPECT_EQ(s.text("N"), "2.1");
  EXPECT_DOUBLE_EQ(s.number("gamma_over_Gamma"), 1.9e-5);
  EXPECT_DOUBLE_EQ(s.number("omega_D_over_gamma"), 5.1);
  const Params a = default_params(find_experiment("absorption"));
  EXPECT_NEAR(a.number("gamma_over_Gamma"), 1.0 / 30000.0, 1e-20);
  const auto gl = a.numbers("g_l");
  ASSERT_EQ(gl.size(), 4U);
  EXPECT_NEAR(gl[2], std::sqrt(2.0 / 3.0), 1e-14);
  EXPECT_NEAR(gl[3], std::sqrt(1.0 / 3.0), 1e-14);
  const Params f = default_params(find_experiment("fluorescence"));
  EXPECT_DOUBLE_EQ(f.number("gamma_over_Gamma"), 7.1e-5);
  EXPECT_DOUBLE_EQ(f.number("N"), 0.2);
}

TEST(FourLevelInputs, AlternativeKeysAreExclusive) {
  const Experiment& e = find_experiment("fluorescence");
  Params p = with("fluorescence", {{"N", "0.3"}, {"eps_plus", "0.9"}});
  EXPECT_THROW(validate_experiment(e, p), ConfigError);
  p = with("fluorescence", {{"eps_plus", "0.9"}});
  EXPECT_THROW(validate_experiment(e, p), ConfigError);
  p = with("fluorescence", {{"eps_plus", "0.9"}, {"eps_minus", "0.3"}, {"Omega", "0.01"}});
  try {
    validate_experiment(e, p);
    FAIL();
  } catch (const InvariantError& x) {
    EXPECT_NE(std::string(x.what()).find("normalization invariant"), std::string::npos);
  }
}

TEST(FourLevelInputs, LaserKeysReproduceBathKeys) {
  const InverseMapResult m = inverse_map(0.2, 7.1e-5, 1.0);
  const auto a = run("fluorescence", {{"g_l", "1"}, {"phi", "0"}, {"points", "41"}});
  char buf[3][40];
  std::snprintf(buf[0], 40, "%.17g", m.eps_plus);
  std::snprintf(buf[1], 40, "%.17g", m.eps_minus);
  std::snprintf(buf[2], 40, "%.17g", m.Omega);
  const auto b = run("fluorescence", {{"g_l", "1"}, {"phi", "0"}, {"points", "41"},
                                      {"eps_plus", buf[0]}, {"eps_minus", buf[1]}, {"Omega", buf[2]}});
  ASSERT_EQ(a.table.rows.size(), b.table.rows.size());
  for (std::size_t i = 0; i < a.table.rows.size(); ++i) {
    EXPECT_NEAR(a.table.rows[i][3], b.table.rows[i][3], 1e-9 * std::max(1.0, std::abs(a.table.rows[i][3])));
  }
}

TEST(SteadySweep, ContrastShrinksWithCrossDecay) {
  const auto r = run("steady-sweep", {{"phi_points", "25"}});
  const auto& c = r.summary["phase_contrast"];
  ASSERT_EQ(c.size(), 4U);
  EXPECT_GT(c[0]["S_x_contrast"].get<double>(), 0.1);
  for (std::size_t i = 1; i < c.size(); ++i) {
    EXPECT_LT(c[i]["S_x_contrast"].get<double>(), c[i - 1]["S_x_contrast"].get<double>());
  }
  // full model vs Bloch equations: corrections of order Omega/Gamma
  EXPECT_LT(r.summary["max_deviation_from_bloch_equations"].get<double>(), 1e-3);
  EXPECT_EQ(r.table.rows.size(), 4U * 25U);
}

TEST(SteadySweep, EffectiveModelAgreesWithBlochEquations) {
  const auto r = run("steady-sweep", {{"phi_points", "13"}, {"model", "effective"}});
  EXPECT_LT(r.summary["max_deviation_from_bloch_equations"].get<double>(), 1e-8);
}

TEST(SteadySweep, ThreadCountDoesNotChangeTable) {
  const auto a = run("steady-sweep", {{"phi_points", "9"}, {"g_l", "1,0.9"}}, 1);
  const auto b = run("steady-sweep", {{"phi_points", "9"}, {"g_l", "1,0.9"}}, 3);
  EXPECT_EQ(a.table.rows, b.table.rows);
  EXPECT_EQ(a.summary.dump(), b.summary.dump());
}

TEST(Fluorescence, CenterWidthMatchesStrongDriveFormula) {
  const auto r = run("fluorescence", {{"g_l", "1"}, {"phi", "0"}, {"omega_D_over_gamma", "50"},
                                      {"points", "101"}});
  const auto& line = r.summary["lines"][0];
  const double expected = line["strong_drive_center_halfwidth"].get<double>();
  EXPECT_NEAR(expected, 0.2 + 0.5 - std::sqrt(0.24), 1e-12);
  EXPECT_NEAR(line["center_halfwidth"].get<double>(), expected, 0.01 * expected);
  EXPECT_EQ(r.table.columns, (std::vector<std::string>{"g_l", "phi", "omega", "intensity"}));
}

TEST(Fluorescence, PhaseZeroCenterNarrower) {
  const auto r = run("fluorescence", {{"g_l", "1"}, {"points", "101"}});
  const auto& l = r.summary["lines"];
  EXPECT_LT(l[0]["center_halfwidth"].get<double>(), l[1]["center_halfwidth"].get<double>());
}

TEST(Fluorescence, FourierCheckRequiresEffectiveModel) {
  const Experiment& e = find_experiment("fluorescence");
  EXPECT_THROW(validate_experiment(e, with("fluorescence", {{"check_ft", "true"}, {"model", "full"}})),
               ConfigError);
}

TEST(Absorption, SignsAndFittedWidth) {
  const auto r = run("absorption", {{"g_l", "1"}});
  const auto& l = r.summary["lines"];
  EXPECT_GT(l[0]["center_value"].get<double>(), 0.0);
  EXPECT_LT(l[0]["min_between_center_and_sidebands"].get<double>(), 0.0);
  EXPECT_NEAR(l[0]["fitted_center_halfwidth"].get<double>(), l[0]["center_halfwidth"].get<double>(),
              0.02 * l[0]["center_halfwidth"].get<double>());
  EXPECT_LT(l[1]["center_value"].get<double>(), 0.0);
}

TEST(Absorption, FourierCheckOnSmallGrid) {
  const auto r = run("absorption", {{"g_l", "1"}, {"phi", "0"}, {"points", "101"}, {"check_ft", "true"}});
  EXPECT_LT(r.summary["ft_max_relative_deviation"].get<double>(), 0.01);
  // 101 points across the full span leave too few inside the center window
  EXPECT_TRUE(r.summary["lines"][0]["fitted_center_halfwidth"].is_null());
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Eigenscan, AgreementBelowValidityBound) {
  const auto r = run("eigenscan", {{"omega_min", "0.01"}, {"omega_max", "0.05"}, {"points", "3"}});
  EXPECT_LT(r.summary["max_relative_deviation_below_bound"].get<double>(), 0.02);
  EXPECT_TRUE(r.warnings.empty());
  for (const auto& row : r.table.rows) {
    EXPECT_GT(row[4], 10.0 * row[2]); // other lines are much broader
  }
}

TEST(Eigenscan, FullSystemNarrowerAtStrongPumping) {
  const auto r = run("eigenscan", {{"omega_min", "0.5"}, {"omega_max", "0.5"}, {"points", "1"}});
  const auto& row = r.table.rows[0];
  EXPECT_LT(row[1], row[5]);
  EXPECT_LT(row[2], row[6]);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Crossdecay, SuppressionAndSlope) {
  const auto r = run("crossdecay", {});
  EXPECT_NEAR(r.summary["optimal_detuning_ratio"].get<double>(), 2.0, 1e-12);
  EXPECT_NEAR(r.summary["suppression_slope"].get<double>(), 2.0, 0.1);
  for (const auto& pt : r.summary["points"]) {
    EXPECT_TRUE(pt["optimal_is_scan_minimum"].get<bool>());
    const double x = pt["gamma_over_delta"].get<double>();
    EXPECT_LT(pt["me_baseline_relative_deviation"].get<double>(), 2.0 * x * x);
    EXPECT_LT(pt["me_optimal_deviation_over_baseline"].get<double>(), 2.0 * x * x);
  }
  EXPECT_GE(r.table.rows[1][4], 100.0);
}

TEST(Crossdecay, ExtractionCanBeSkipped) {
  const auto r = run("crossdecay", {{"extract", "false"}, {"gamma_over_delta", "0.1"}});
  EXPECT_TRUE(std::isnan(r.table.rows[0][6]));
  EXPECT_TRUE(std::isnan(r.summary["suppression_slope"].get<double>()) ||
              r.summary["suppression_slope"].is_null());
}

TEST(BlochDemo, TrajectoriesTrackMasterEquation) {
  const auto r = run("bloch-demo", {{"n_traj", "400"}, {"samples", "5"}, {"t_max", "2"}});
  EXPECT_LT(r.summary["max_deviation_bloch_vs_master"].get<double>(), 1e-10);
  EXPECT_GE(r.summary["fraction_within_3_standard_errors"].get<double>(), 0.8);
  EXPECT_EQ(r.table.rows.size(), 5U);
}

TEST(BlochDemo, SeedDeterminesOutput) {
  const std::vector<std::pair<std::string, std::string>> kv{{"n_traj", "50"}, {"samples", "2"}, {"t_max", "0.5"}};
  const auto a = run("bloch-demo", kv, 1);
  const auto b = run("bloch-demo", kv, 2);
  EXPECT_EQ(a.table.rows, b.table.rows);
  auto kv2 = kv;
  kv2.emplace_back("seed", "7");
  const auto c = run("bloch-demo", kv2, 1);
  EXPECT_NE(a.table.rows.back()[7], c.table.rows.back()[7]);
}

TEST(BlochDemo, RejectsBadInputs) {
  const Experiment& e = find_experiment("bloch-demo");
  EXPECT_THROW(validate_experiment(e, with("bloch-demo", {{"S0.x", "0.5"}})), InvariantError);
  EXPECT_THROW(validate_experiment(e, with("bloch-demo", {{"dt", "0.01"}})), InvariantError);
  EXPECT_THROW(validate_experiment(e, with("bloch-demo", {{"bath.M", "2"}})), InvariantError);
}

TEST(Errors, CarryExperimentName) {
  const Experiment& e = find_experiment("steady-sweep");
  try {
    validate_experiment(e, with("steady-sweep", {{"g_l", "1.2"}}));
    FAIL();
  } catch (const InvariantError& x) {
    EXPECT_EQ(std::string(x.what()).rfind("experiment steady-sweep: ", 0), 0U);
  }
}
