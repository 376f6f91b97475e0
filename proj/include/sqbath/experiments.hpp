#pragma once

// Canned parameter studies. Each experiment turns a Params set into a data
// table and a JSON summary. Four-level experiments work in units Gamma = 1
// and report frequencies and widths in units of the effective rate gamma.

#include <sqbath/analytics.hpp>
#include <sqbath/correlations.hpp>
#include <sqbath/cross_decay.hpp>
#include <sqbath/error.hpp>
#include <sqbath/liouville.hpp>
#include <sqbath/models.hpp>
#include <sqbath/operator.hpp>
#include <sqbath/params.hpp>
#include <sqbath/trajectories.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace sqbath {

inline constexpr const char* kVersion = "0.1.0";

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
  Table table;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;
};

struct RunContext {
  unsigned threads = 1;
};

struct Experiment {
  std::string name;
  std::string description;
  std::vector<ParamDef> params;
  /// Checks every invariant without computing anything.
  std::function<void(const Params&)> validate;
  std::function<ExperimentResult(const Params&, const RunContext&)> run;
};

namespace detail {

inline std::vector<ParamDef> four_level_defs(const std::string& n, const std::string& g) {
  return {
      {"N", n, "effective photon number of the mimicked bath", 1},
      {"gamma_over_Gamma", g, "effective decay rate gamma in units of Gamma", 1},
      {"eps_plus", "", "field amplitude on g+ <-> e- (alternative to N, gamma_over_Gamma)", 2},
      {"eps_minus", "", "field amplitude on g- <-> e+", 2},
      {"Omega", "", "pump strength in units of Gamma", 2},
  };
}

struct FourLevelSetup {
  FourLevelParams base; ///< g_l = 1, phi_L = 0, no drive
  double N = 0.0;
  double M = 0.0;
  double gamma = 0.0;
};

inline FourLevelSetup four_level_setup(const Params& p) {
  const bool laser = p.is_set("eps_plus") || p.is_set("eps_minus") || p.is_set("Omega");
  const bool bath = p.is_explicit("N") || p.is_explicit("gamma_over_Gamma");
  if (laser && bath) {
    throw ConfigError("specify either (N, gamma_over_Gamma) or (eps_plus, eps_minus, Omega), "
                      "not both");
  }
  FourLevelSetup s;
  s.base.Gamma = 1.0;
  if (laser) {
    if (!(p.is_set("eps_plus") && p.is_set("eps_minus") && p.is_set("Omega"))) {
      throw ConfigError("eps_plus, eps_minus and Omega must be given together");
    }
    s.base.eps_plus = p.number("eps_plus");
    s.base.eps_minus = p.number("eps_minus");
    s.base.Omega = p.number("Omega");
  } else {
    const InverseMapResult m = inverse_map(p.number("N"), p.number("gamma_over_Gamma"), 1.0);
    s.base.eps_plus = m.eps_plus;
    s.base.eps_minus = m.eps_minus;
    s.base.Omega = m.Omega;
  }
  s.base.validate();
  const SqueezedBathParams sb = map_parameters(s.base);
  s.N = sb.N;
  s.M = sb.M;
  s.gamma = sb.gamma;
  return s;
}

inline std::vector<double> g_l_values(const Params& p) {
  auto v = p.numbers("g_l");
  for (double g : v) {
    if (!(g > 0.0 && g <= 1.0)) {
      throw InvariantError("g_l must lie in (0, 1], got " + std::to_string(g));
    }
  }
  return v;
}

inline FourLevelParams four_level_point(const FourLevelSetup& s, double g_l, double phi,
                                        double omega_D) {
  FourLevelParams f = s.base;
  f.with_g_l(g_l);
  f.phi_L = phi;
  f.drive = DriveParams{omega_D, 0.0};
  f.validate();
  return f;
}

inline LindbladModel four_level_model(const std::string& kind, const FourLevelParams& f) {
  if (kind == "full") {
    return four_level_master(f);
  }
  if (kind == "effective") {
    return effective_ground_master(f);
  }
  throw ConfigError("model must be 'full' or 'effective', got '" + kind + "'");
}

inline double positive(const Params& p, const std::string& key) {
  const double v = p.number(key);
  if (!(v > 0.0)) {
    throw InvariantError(key + " must be > 0, got " + std::to_string(v));
  }
  return v;
}

inline long positive_int(const Params& p, const std::string& key) {
  const long v = p.integer(key);
  if (v < 1) {
    throw InvariantError(key + " must be >= 1, got " + std::to_string(v));
  }
  return v;
}

inline void add_warnings(ExperimentResult& r, const LindbladModel& m) {
  for (const auto& w : m.warnings()) {
    if (std::find(r.warnings.begin(), r.warnings.end(), w) == r.warnings.end()) {
      r.warnings.push_back(w);
    }
  }
}

/// Smallest nonzero halfwidth and largest oscillation frequency of a generator.
inline std::pair<double, double> mode_scales(const Liouvillian& l) {
  const auto modes = eigenmodes(l);
  double min_hw = std::numeric_limits<double>::infinity();
  double max_pos = 0.0;
  const double tiny = 1e-10 * std::max(1.0, std::abs(modes.back().eigenvalue));
  for (const auto& m : modes) {
    if (std::abs(m.eigenvalue) > tiny) {
      min_hw = std::min(min_hw, m.halfwidth());
    }
    max_pos = std::max(max_pos, std::abs(m.position()));
  }
  return {min_hw, max_pos};
}

/// Largest pointwise |resolvent - quadrature| over max |resolvent|, with the
/// quadrature on [0, 30/min-halfwidth] and step 0.05/(max|omega| + max line position).
inline double ft_deviation(const Liouvillian& l, const Operator& a, const Matrix& seed,
                           const DensityMatrix& rho, const Spectrum& s, unsigned threads) {
  const auto [min_hw, max_pos] = mode_scales(l);
  double wmax = 0.0;
  double smax = 0.0;
  for (std::size_t i = 0; i < s.omegas.size(); ++i) {
    wmax = std::max(wmax, std::abs(s.omegas[i]));
    smax = std::max(smax, std::abs(s.values[i]));
  }
  const double tau_max = 30.0 / min_hw;
  const double dtau = 0.05 / (wmax + max_pos);
  const Spectrum q =
      spectrum_of_seed_by_quadrature(l, a, seed, rho, s.omegas, tau_max, dtau, threads);
  double dev = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    dev = std::max(dev, std::abs(s.values[i] - q.values[i]));
  }
  return smax > 0.0 ? dev / smax : dev;
}

inline bool phase_is(double phi, double target) { return std::abs(phi - target) <= 1e-12; }

// ---------------------------------------------------------------- steady-sweep

inline Experiment steady_sweep_experiment() {
  Experiment e;
  e.name = "steady-sweep";
  e.description = "steady-state Bloch vector of the Raman-driven ground states versus laser phase";
  e.params = four_level_defs("2.1", "1.9e-5");
  e.params.push_back({"omega_D_over_gamma", "5.1", "Raman Rabi frequency in units of gamma"});
  e.params.push_back({"g_l", "1,0.99,0.95,0.9", "linear decay amplitudes (list)"});
  e.params.push_back({"phi_points", "73", "number of laser phases on [0, 2pi]"});
  e.params.push_back({"model", "full", "full | effective"});

  auto parse = [](const Params& p) {
    const FourLevelSetup s = four_level_setup(p);
    const double wd = positive(p, "omega_D_over_gamma");
    const auto gls = g_l_values(p);
    const long np = p.integer("phi_points");
    if (np < 2) {
      throw InvariantError("phi_points must be >= 2, got " + std::to_string(np));
    }
    four_level_model(p.text("model"), four_level_point(s, gls.front(), 0.0, wd * s.gamma));
    return std::make_tuple(s, wd, gls, np);
  };
  e.validate = [parse](const Params& p) { parse(p); };
  e.run = [parse](const Params& p, const RunContext& ctx) {
    const auto [s, wd, gls, np] = parse(p);
    const std::string kind = p.text("model");
    const double omega_D = wd * s.gamma;
    ExperimentResult r;
    r.table.columns = {"g_l", "phi", "S_x", "S_y", "S_z", "S_x_bloch", "S_y_bloch", "S_z_bloch"};
    const std::size_t n_phi = static_cast<std::size_t>(np);
    r.table.rows.resize(gls.size() * n_phi);
    std::vector<std::vector<std::string>> warn(gls.size() * n_phi);
    parallel_for(r.table.rows.size(), ctx.threads, [&](std::size_t k) {
      const double gl = gls[k / n_phi];
      const double phi =
          2.0 * std::numbers::pi * static_cast<double>(k % n_phi) / static_cast<double>(n_phi - 1);
      const FourLevelParams f = four_level_point(s, gl, phi, omega_D);
      const LindbladModel m = four_level_model(kind, f);
      warn[k] = m.warnings();
      const DensityMatrix rho = steady_state(build_liouvillian(m));
      const BlochVector b = bloch_vector(rho, "g-", "g+");
      const BlochState a =
          bloch_steady_state({s.gamma, s.N, s.M, phi}, DriveParams{omega_D, 0.0}, gl);
      r.table.rows[k] = {gl, phi, b.x, b.y, b.z, a.S_x, a.S_y, a.S_z};
    });
    for (const auto& w : warn) {
      for (const auto& x : w) {
        if (std::find(r.warnings.begin(), r.warnings.end(), x) == r.warnings.end()) {
          r.warnings.push_back(x);
        }
      }
    }
    auto contrasts = nlohmann::ordered_json::array();
    double max_dev = 0.0;
    for (std::size_t i = 0; i < gls.size(); ++i) {
      double lo = 1e300;
      double hi = -1e300;
      for (std::size_t j = 0; j < n_phi; ++j) {
        const auto& row = r.table.rows[i * n_phi + j];
        lo = std::min(lo, row[2]);
        hi = std::max(hi, row[2]);
        for (int c = 0; c < 3; ++c) {
          max_dev = std::max(max_dev, std::abs(row[2 + c] - row[5 + c]));
        }
      }
      contrasts.push_back({{"g_l", gls[i]}, {"S_x_contrast", hi - lo}});
    }
    r.summary["N"] = s.N;
    r.summary["M"] = s.M;
    r.summary["gamma_over_Gamma"] = s.gamma;
    r.summary["Omega_over_Gamma"] = s.base.Omega;
    r.summary["phase_contrast"] = contrasts;
    r.summary["max_deviation_from_bloch_equations"] = max_dev;
    return r;
  };
  return e;
}

// ------------------------------------------------------- absorption / fluorescence

enum class SpectrumKind { Absorption, Fluorescence };

inline Experiment spectrum_experiment(SpectrumKind kind) {
  const bool abs = kind == SpectrumKind::Absorption;
  Experiment e;
  e.name = abs ? "absorption" : "fluorescence";
  e.description = abs ? "probe absorption spectrum of the Raman transition"
                      : "quadrature fluorescence spectrum of the four-level atom";
  e.params = abs ? four_level_defs("1", "3.3333333333333333e-5")
                 : four_level_defs("0.2", "7.1e-5");
  e.params.push_back({"omega_D_over_gamma", "7.1", "Raman Rabi frequency in units of gamma"});
  e.params.push_back({"g_l", "1,0.9,0.816496580927726,0.577350269189626",
                      "linear decay amplitudes (list)"});
  e.params.push_back({"phi", "0,pi", "laser phases (list)"});
  e.params.push_back({"points", "2001", "frequency grid size"});
  e.params.push_back({"omega_span", "", "grid half-span in units of gamma (default 1.5 omega_D)"});
  e.params.push_back({"model", "effective", "effective | full"});
  e.params.push_back({"check_ft", "false", "also compare with a direct Fourier transform"});

  auto parse = [](const Params& p) {
    const FourLevelSetup s = four_level_setup(p);
    const double wd = p.number("omega_D_over_gamma");
    if (!(wd >= 0.0)) {
      throw InvariantError("omega_D_over_gamma must be >= 0, got " + std::to_string(wd));
    }
    const auto gls = g_l_values(p);
    const auto phis = p.numbers("phi");
    const long n = p.integer("points");
    if (n < 3) {
      throw InvariantError("points must be >= 3, got " + std::to_string(n));
    }
    const double span = p.is_set("omega_span") ? positive(p, "omega_span")
                                               : (wd > 0.0 ? 1.5 * wd : 10.0);
    const bool ft = p.flag("check_ft");
    if (ft && p.text("model") != "effective") {
      throw ConfigError("check_ft requires model=effective");
    }
    four_level_model(p.text("model"), four_level_point(s, gls.front(), phis.front(), wd * s.gamma));
    return std::make_tuple(s, wd, gls, phis, n, span, ft);
  };
  e.validate = [parse](const Params& p) { parse(p); };
  e.run = [parse, abs](const Params& p, const RunContext& ctx) {
    const auto [s, wd, gls, phis, n, span, ft] = parse(p);
    const std::string model_kind = p.text("model");
    const double omega_D = wd * s.gamma;
    const std::vector<double> grid_g = linear_grid(span, static_cast<std::size_t>(n));
    std::vector<double> grid(grid_g.size());
    std::transform(grid_g.begin(), grid_g.end(), grid.begin(),
                   [&](double w) { return w * s.gamma; });

    ExperimentResult r;
    r.table.columns = {"g_l", "phi", "omega", abs ? "absorption" : "intensity"};
    auto lines = nlohmann::ordered_json::array();
    double ft_worst = 0.0;
    for (double gl : gls) {
      for (double phi : phis) {
        const FourLevelParams f = four_level_point(s, gl, phi, omega_D);
        const LindbladModel m = four_level_model(model_kind, f);
        add_warnings(r, m);
        const Liouvillian l = build_liouvillian(m);
        const DensityMatrix rho = steady_state(l);
        const Operator sig = dipole_lowering(l.space());
        const Operator a = abs ? sig : quadrature_operator(l.space(), f);
        const Matrix seed = abs ? absorption_seed(sig, rho) : fluorescence_seed(a, rho);
        const Spectrum sp = spectrum_of_seed(l, a, seed, rho, grid, ctx.threads);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          r.table.rows.push_back({gl, phi, grid_g[i], sp.values[i] * s.gamma});
        }
        nlohmann::ordered_json line;
        line["g_l"] = gl;
        line["phi"] = phi;
        if (omega_D > 0.0) {
          const auto modes = eigenmodes(l);
          try {
            const MollowTriplet t = mollow_modes(modes, omega_D);
            line["center_halfwidth"] = t.center.halfwidth() / s.gamma;
            line["sideband_halfwidth"] = t.upper.halfwidth() / s.gamma;
            line["sideband_position"] = t.upper.position() / s.gamma;
          } catch (const NumericalError&) {
            line["center_halfwidth"] = nullptr;
          }
          if (phase_is(phi, 0.0) || phase_is(phi, std::numbers::pi)) {
            const MollowWidths w = mollow_linewidths({1.0, s.N, s.M, 0.0}, phi, gl);
            line["strong_drive_center_halfwidth"] = w.center;
            line["strong_drive_sideband_halfwidth"] = w.sideband;
          }
        }
        const std::size_t mid = grid.size() / 2;
        line["center_value"] = sp.values[mid] * s.gamma;
        if (abs) {
          if (omega_D > 0.0) {
            const double window = 0.1 * omega_D;
            line["fitted_center_halfwidth"] = nullptr;
            try {
              const LineFit fit = fit_center_line(sp, window);
              // pinned at the window edge: no narrow line there, only a broad dip
              if (fit.halfwidth < 0.99 * window) {
                line["fitted_center_halfwidth"] = fit.halfwidth / s.gamma;
              }
            } catch (const NumericalError&) {
              r.warnings.push_back("grid too coarse to fit the center line");
            }
            double gain = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
              const double w = std::abs(grid[i]);
              if (w > 0.1 * omega_D && w < 0.9 * omega_D) {
                gain = std::min(gain, sp.values[i] * s.gamma);
              }
            }
            line["min_between_center_and_sidebands"] = gain;
          }
        } else {
          line["coherent_weight"] = sp.coherent.real();
        }
        if (ft) {
          const double dev = ft_deviation(l, a, seed, rho, sp, ctx.threads);
          line["ft_relative_deviation"] = dev;
          ft_worst = std::max(ft_worst, dev);
        }
        lines.push_back(line);
      }
    }
    r.summary["N"] = s.N;
    r.summary["M"] = s.M;
    r.summary["gamma_over_Gamma"] = s.gamma;
    r.summary["Omega_over_Gamma"] = s.base.Omega;
    r.summary["lines"] = lines;
    if (ft) {
      r.summary["ft_max_relative_deviation"] = ft_worst;
    }
    return r;
  };
  return e;
}

// ------------------------------------------------------------------ eigenscan

inline Experiment eigenscan_experiment() {
  Experiment e;
  e.name = "eigenscan";
  e.description = "Mollow triplet widths of the full four-level model versus the eliminated model";
  e.params = {
      {"N", "0.2", "effective photon number"},
      {"omega_D_over_gamma", "7.1", "Raman Rabi frequency in units of gamma"},
      {"g_l", "1", "linear decay amplitude"},
      {"phi", "0", "laser phase"},
      {"omega_min", "0.01", "smallest Omega/Gamma"},
      {"omega_max", "1", "largest Omega/Gamma"},
      {"points", "25", "number of log-spaced Omega/Gamma values"},
  };
  auto parse = [](const Params& p) {
    const double n = p.number("N");
    if (!(n >= 0.0)) {
      throw InvariantError("N must be >= 0, got " + std::to_string(n));
    }
    const double wd = positive(p, "omega_D_over_gamma");
    const double gl = p.number("g_l");
    if (!(gl > 0.0 && gl <= 1.0)) {
      throw InvariantError("g_l must lie in (0, 1], got " + std::to_string(gl));
    }
    const double lo = positive(p, "omega_min");
    const double hi = positive(p, "omega_max");
    if (hi < lo) {
      throw InvariantError("omega_max must be >= omega_min");
    }
    const long pts = positive_int(p, "points");
    if (pts < 2 && hi != lo) {
      throw InvariantError("points must be >= 2 for a range");
    }
    return std::make_tuple(n, wd, gl, p.number("phi"), lo, hi, pts);
  };
  e.validate = [parse](const Params& p) { parse(p); };
  e.run = [parse](const Params& p, const RunContext& ctx) {
    const auto [n, wd, gl, phi, lo, hi, pts] = parse(p);
    const InverseMapResult im = inverse_map(n, 1.0, 1.0);
    ExperimentResult r;
    r.table.columns = {"Omega_over_Gamma", "full_center_hw",  "full_sideband_hw",
                       "full_sideband_pos", "full_next_hw",   "eff_center_hw",
                       "eff_sideband_hw",   "eff_sideband_pos"};
    r.table.rows.resize(static_cast<std::size_t>(pts));
    parallel_for(r.table.rows.size(), ctx.threads, [&](std::size_t k) {
      const double x = pts > 1 ? static_cast<double>(k) / static_cast<double>(pts - 1) : 0.0;
      const double om = lo * std::pow(hi / lo, x);
      FourLevelParams f;
      f.Gamma = 1.0;
      f.Omega = om;
      f.eps_plus = im.eps_plus;
      f.eps_minus = im.eps_minus;
      f.phi_L = phi;
      f.with_g_l(gl);
      const double gamma = map_parameters(f).gamma;
      f.drive = DriveParams{wd * gamma, 0.0};
      const auto full_modes = eigenmodes(build_liouvillian(four_level_master(f)));
      const auto eff_modes = eigenmodes(build_liouvillian(effective_ground_master(f)));
      const MollowTriplet tf = mollow_modes(full_modes, wd * gamma);
      const MollowTriplet te = mollow_modes(eff_modes, wd * gamma);
      r.table.rows[k] = {om,
                         tf.center.halfwidth() / gamma,
                         tf.upper.halfwidth() / gamma,
                         tf.upper.position() / gamma,
                         tf.next_halfwidth / gamma,
                         te.center.halfwidth() / gamma,
                         te.upper.halfwidth() / gamma,
                         te.upper.position() / gamma};
    });
    double worst_valid = 0.0;
    for (const auto& row : r.table.rows) {
      if (row[0] > FourLevelParams::kValidityBound) {
        r.warnings.push_back("Omega/Gamma = " + std::to_string(row[0]) +
                             " exceeds the adiabatic-elimination validity bound 0.2");
        continue;
      }
      worst_valid = std::max({worst_valid, std::abs(row[1] / row[5] - 1.0),
                              std::abs(row[2] / row[6] - 1.0), std::abs(row[3] / row[7] - 1.0)});
    }
    r.summary["max_relative_deviation_below_bound"] = worst_valid;
    return r;
  };
  return e;
}

// ----------------------------------------------------------------- crossdecay

inline Experiment crossdecay_experiment() {
  Experiment e;
  e.name = "crossdecay";
  e.description = "suppression of cross decay by destructive interference of two manifolds";
  e.params = {
      {"Gamma_e", "1", "decay rate of the e manifold"},
      {"Gamma_a", "1", "decay rate of the a manifold"},
      {"gc_e", "0.816496580927726", "circular decay amplitude of e"},
      {"gc_a", "0.577350269189626", "circular decay amplitude of a"},
      {"prefactor", "1e-6", "overall rate scale (sets the probe Rabi frequencies)"},
      {"gamma_over_delta", "0.1,0.05,0.025", "Gamma_a/Delta_a values (list)"},
      {"scan_percent", "50", "half-width of the detuning-ratio scan in percent"},
      {"extract", "true", "also extract the rate from the subsystem master equation"},
  };
  auto parse = [](const Params& p) {
    SubsystemParams s;
    s.Gamma_e = p.number("Gamma_e");
    s.Gamma_a = p.number("Gamma_a");
    s.gc_e = p.number("gc_e");
    s.gc_a = p.number("gc_a");
    s.prefactor = p.number("prefactor");
    s.validate();
    optimal_detuning_ratio(s);
    const auto gs = p.numbers("gamma_over_delta");
    for (double g : gs) {
      if (!(g > 0.0)) {
        throw InvariantError("gamma_over_delta must be > 0, got " + std::to_string(g));
      }
    }
    const long scan = p.integer("scan_percent");
    if (scan < 1 || scan > 99) {
      throw InvariantError("scan_percent must lie in [1, 99], got " + std::to_string(scan));
    }
    return std::make_tuple(s, gs, scan, p.flag("extract"));
  };
  e.validate = [parse](const Params& p) { parse(p); };
  e.run = [parse](const Params& p, const RunContext& ctx) {
    const auto [s0, gs, scan, extract] = parse(p);
    const double ratio = optimal_detuning_ratio(s0);
    ExperimentResult r;
    r.table.columns = {"gamma_over_delta", "detuning_ratio",   "rate_optimal",
                       "rate_baseline",    "suppression",      "rate_second_order_optimal",
                       "me_rate_optimal",  "me_rate_baseline", "scan_minimum"};
    r.table.rows.resize(gs.size());
    parallel_for(gs.size(), ctx.threads, [&](std::size_t k) {
      SubsystemParams s = s0;
      s.Delta_a = s.Gamma_a / gs[k];
      s.Delta_e = ratio * s.Delta_a;
      SubsystemParams b = s;
      b.Delta_e = b.Delta_a;
      const double opt = cross_decay_rate(s);
      const double base = cross_decay_rate(b);
      bool minimum = true;
      for (long j = -scan; j <= scan; ++j) {
        if (j == 0) {
          continue;
        }
        SubsystemParams q = s;
        q.Delta_e = ratio * (1.0 + 0.01 * static_cast<double>(j)) * s.Delta_a;
        minimum = minimum && cross_decay_rate(q) >= opt;
      }
      const double me_opt = extract ? extract_cross_pumping_rate(s) : std::nan("");
      const double me_base = extract ? extract_cross_pumping_rate(b) : std::nan("");
      r.table.rows[k] = {gs[k], ratio, opt, base, base / opt, cross_decay_rate_second_order(s),
                         me_opt, me_base, minimum ? 1.0 : 0.0};
    });
    // least-squares slope of log(rate_optimal/rate_baseline) against log(Gamma/Delta)
    double slope = std::nan("");
    if (gs.size() >= 2) {
      double sx = 0.0;
      double sy = 0.0;
      double sxx = 0.0;
      double sxy = 0.0;
      for (const auto& row : r.table.rows) {
        const double x = std::log(row[0]);
        const double y = std::log(row[2] / row[3]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double n = static_cast<double>(gs.size());
      slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    r.summary["optimal_detuning_ratio"] = ratio;
    r.summary["suppression_slope"] = slope;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.table.rows) {
      nlohmann::ordered_json j;
      j["gamma_over_delta"] = row[0];
      j["suppression"] = row[4];
      j["optimal_is_scan_minimum"] = row[8] == 1.0;
      if (extract) {
        j["me_baseline_relative_deviation"] = std::abs(row[7] / row[3] - 1.0);
        j["me_optimal_deviation_over_baseline"] = std::abs(row[6] - row[2]) / row[3];
      }
      rows.push_back(j);
    }
    r.summary["points"] = rows;
    return r;
  };
  return e;
}

// ----------------------------------------------------------------- bloch-demo

/// Pure state with the given unit Bloch vector on the (g, e) atom.
inline Vector pure_state_from_bloch(double x, double y, double z) {
  const HilbertSpace sp = two_level_space();
  // rho = (I + x X + y Y - z Z)/2 in the (g, e) basis
  Matrix rho(2, 2);
  rho << 0.5 * (1.0 + z), 0.5 * Complex(x, -y), 0.5 * Complex(x, y), 0.5 * (1.0 - z);
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  return es.eigenvectors().col(1);
}

inline Experiment bloch_demo_experiment() {
  Experiment e;
  e.name = "bloch-demo";
  e.description = "squeezed-bath Bloch dynamics: master equation, Bloch equations and trajectories";
  e.params = {
      {"bath.gamma", "1", "vacuum decay rate"},
      {"bath.N", "1", "photon number"},
      {"bath.M", "1.4142135623730951", "squeezing parameter"},
      {"bath.phi", "0", "squeezing phase"},
      {"drive.omega_D", "0", "Rabi frequency"},
      {"drive.phi_D", "0", "drive phase"},
      {"S0.x", "1", "initial Bloch vector (unit length)"},
      {"S0.y", "0", ""},
      {"S0.z", "0", ""},
      {"t_max", "5", "final time"},
      {"samples", "20", "number of sample times"},
      {"n_traj", "2000", "number of trajectories"},
      {"dt", "0.0025", "trajectory step"},
      {"seed", "12345", "random seed"},
  };
  struct Spec {
    SqueezedBathParams bath;
    DriveParams drive;
    BlochState s0;
    double t_max;
    long samples;
    TrajectoryConfig cfg;
  };
  auto parse = [](const Params& p) {
    Spec s;
    s.bath = {p.number("bath.gamma"), p.number("bath.N"), p.number("bath.M"), p.number("bath.phi")};
    s.bath.validate();
    s.drive = {p.number("drive.omega_D"), p.number("drive.phi_D")};
    s.s0 = {p.number("S0.x"), p.number("S0.y"), p.number("S0.z")};
    const double n2 = s.s0.vec().squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-9) {
      throw InvariantError("S0 must be a unit Bloch vector (pure initial state), |S0|^2 = " +
                           std::to_string(n2));
    }
    s.t_max = positive(p, "t_max");
    s.samples = positive_int(p, "samples");
    s.cfg.n_traj = static_cast<std::size_t>(positive_int(p, "n_traj"));
    s.cfg.dt = positive(p, "dt");
    const long seed = p.integer("seed");
    if (seed < 0) {
      throw InvariantError("seed must be >= 0");
    }
    s.cfg.seed = static_cast<std::uint64_t>(seed);
    const double step = s.t_max / static_cast<double>(s.samples);
    const double q = step / s.cfg.dt;
    if (std::abs(q - std::round(q)) > 1e-9 * q) {
      throw InvariantError("t_max/samples must be a multiple of dt");
    }
    const LindbladModel m = squeezed_bath_master(s.bath, s.drive);
    if (s.cfg.dt > max_trajectory_step(m)) {
      throw InvariantError("step invariant dt <= 0.01/max jump rate violated: dt = " +
                           std::to_string(s.cfg.dt) + " > " +
                           std::to_string(max_trajectory_step(m)));
    }
    return s;
  };
  e.validate = [parse](const Params& p) { parse(p); };
  e.run = [parse](const Params& p, const RunContext& ctx) {
    const Spec s = parse(p);
    const LindbladModel m = squeezed_bath_master(s.bath, s.drive);
    const Liouvillian l = build_liouvillian(m);
    const HilbertSpace& sp = m.space();
    const Vector psi0 = pure_state_from_bloch(s.s0.S_x, s.s0.S_y, s.s0.S_z);
    std::vector<double> times;
    for (long k = 1; k <= s.samples; ++k) {
      times.push_back(s.t_max * static_cast<double>(k) / static_cast<double>(s.samples));
    }
    const auto me = evolve(l, DensityMatrix::pure(sp, psi0), times);
    const Operator sig = basis_operator(sp, "g", "e");
    const std::vector<Operator> obs{sig + sig.adjoint(), kI * (sig.adjoint() - sig),
                                    projector(sp, "e") - projector(sp, "g")};
    const TrajectoryResult mc = simulate(m, psi0, s.cfg, times, obs, ctx.threads);
    std::vector<BlochState> bl;
    const bool bloch_ok = s.drive.phi_D == 0.0;
    if (bloch_ok) {
      bl = bloch_evolve(s.bath, s.drive, 1.0, s.s0, times);
    }
    ExperimentResult r;
    r.table.columns = {"t",         "S_x",       "S_y",  "S_z",  "S_x_bloch", "S_y_bloch",
                       "S_z_bloch", "S_x_mc",    "S_y_mc", "S_z_mc", "S_x_se", "S_y_se",
                       "S_z_se"};
    double max_z = 0.0;
    double max_bloch = 0.0;
    std::size_t within = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const BlochVector b = bloch_vector(me[i], "g", "e");
      const double nan = std::nan("");
      const BlochState a = bloch_ok ? bl[i] : BlochState{nan, nan, nan};
      const auto& om = mc.observable_mean[i];
      const auto& oe = mc.observable_stderr[i];
      r.table.rows.push_back(
          {times[i], b.x, b.y, b.z, a.S_x, a.S_y, a.S_z, om[0], om[1], om[2], oe[0], oe[1], oe[2]});
      const double ref[3] = {b.x, b.y, b.z};
      const double ana[3] = {a.S_x, a.S_y, a.S_z};
      for (int c = 0; c < 3; ++c) {
        const double z = oe[c] > 0.0 ? std::abs(om[c] - ref[c]) / oe[c] : 0.0;
        max_z = std::max(max_z, z);
        within += z <= 3.0 ? 1 : 0;
        if (bloch_ok) {
          max_bloch = std::max(max_bloch, std::abs(ana[c] - ref[c]));
        }
      }
    }
    r.summary["max_standard_scores"] = max_z;
    r.summary["fraction_within_3_standard_errors"] =
        static_cast<double>(within) / static_cast<double>(3 * times.size());
    if (bloch_ok) {
      r.summary["max_deviation_bloch_vs_master"] = max_bloch;
    }
    const BlochRates rates = bloch_decay_rates(s.bath);
    r.summary["gamma_x"] = rates.gamma_x;
    r.summary["gamma_y"] = rates.gamma_y;
    r.summary["gamma_z"] = rates.gamma_z;
    return r;
  };
  return e;
}

} // namespace detail

inline const std::vector<Experiment>& experiment_catalog() {
  static const std::vector<Experiment> cat{
      detail::steady_sweep_experiment(),
      detail::spectrum_experiment(detail::SpectrumKind::Absorption),
      detail::spectrum_experiment(detail::SpectrumKind::Fluorescence),
      detail::eigenscan_experiment(),
      detail::crossdecay_experiment(),
      detail::bloch_demo_experiment(),
  };
  return cat;
}

inline const Experiment& find_experiment(const std::string& name) {
  for (const auto& e : experiment_catalog()) {
    if (e.name == name) {
      return e;
    }
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

inline Params default_params(const Experiment& e) { return Params(e.params); }

/// Runs an experiment; library errors are rethrown with the experiment name attached.
inline ExperimentResult run_experiment(const Experiment& e, const Params& p,
                                       const RunContext& ctx = {}) {
  const std::string where = "experiment " + e.name + ": ";
  try {
    return e.run(p, ctx);
  } catch (const ConfigError& x) {
    throw ConfigError(where + x.what());
  } catch (const InvariantError& x) {
    throw InvariantError(where + x.what());
  } catch (const NumericalError& x) {
    throw NumericalError(where + x.what());
  } catch (const LabelError& x) {
    throw LabelError(where + x.what());
  } catch (const SpaceMismatch& x) {
    throw SpaceMismatch(where + x.what());
  }
}

inline void validate_experiment(const Experiment& e, const Params& p) {
  const std::string where = "experiment " + e.name + ": ";
  try {
    e.validate(p);
  } catch (const ConfigError& x) {
    throw ConfigError(where + x.what());
  } catch (const InvariantError& x) {
    throw InvariantError(where + x.what());
  }
}

} // namespace sqbath
