#pragma once

// Command-line front end:
//   sqbath list
//   sqbath run <config-file | experiment> [--set key=value]... [--out dir]
//              [--format csv|json-lines] [--threads n] [--seed s]
//   sqbath validate <config-file>
// Exit codes: 0 success, 2 configuration or invariant error, 3 numerical failure.

#include <sqbath/error.hpp>
#include <sqbath/experiments.hpp>
#include <sqbath/params.hpp>
#include <sqbath/parallel.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace sqbath {

struct ConfigFile {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> entries;
};

inline ConfigFile parse_config(std::istream& in, const std::string& origin = "config") {
  ConfigFile cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string_view body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value, got '" +
                        std::string(body) + "'");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (key == "experiment") {
      cfg.experiment = value;
    } else {
      cfg.entries.emplace_back(key, value);
    }
  }
  if (cfg.experiment.empty()) {
    throw ConfigError(origin + ": missing 'experiment=' line");
  }
  return cfg;
}

inline ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  return parse_config(in, path);
}

inline std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const std::string& name, const Table& t) {
  os << "# experiment=" << name << " version=" << kVersion << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    os << (i ? "," : "") << t.columns[i];
  }
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << format_number(row[i]);
    }
    os << "\n";
  }
}

inline void write_json_lines(std::ostream& os, const std::string& name, const Table& t) {
  nlohmann::ordered_json meta;
  meta["experiment"] = name;
  meta["version"] = kVersion;
  os << meta.dump() << "\n";
  for (const auto& row : t.rows) {
    nlohmann::ordered_json j;
    for (std::size_t i = 0; i < row.size(); ++i) {
      j[t.columns[i]] = row[i];
    }
    os << j.dump() << "\n";
  }
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string config_text(const std::string& name, const Params& p) {
  std::ostringstream os;
  os << "experiment=" << name << "\n";
  for (const auto& k : p.resolved_keys()) {
    os << k << "=" << p.text(k) << "\n";
  }
  return os.str();
}

inline nlohmann::ordered_json summary_json(const std::string& name, const Params& p,
                                           const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["experiment"] = name;
  j["version"] = kVersion;
  nlohmann::ordered_json spec = nlohmann::ordered_json::object();
  for (const auto& k : p.resolved_keys()) {
    spec[k] = p.text(k);
  }
  j["spec"] = spec;
  j["results"] = r.summary;
  j["warnings"] = r.warnings;
  j["generated_at"] = utc_timestamp();
  return j;
}

namespace detail {

inline void print_catalog(std::ostream& out) {
  for (const auto& e : experiment_catalog()) {
    out << e.name << "  " << e.description << "\n";
    for (const auto& d : e.params) {
      out << "    " << d.key << " = " << (d.default_value.empty() ? "(unset)" : d.default_value);
      if (!d.help.empty()) {
        out << "    # " << d.help;
      }
      out << "\n";
    }
  }
}

struct Resolved {
  const Experiment* exp = nullptr;
  Params params;
};

inline Resolved resolve(const std::string& target, const std::vector<std::string>& sets,
                        const std::string& seed, std::ostream& err) {
  Resolved r;
  std::vector<std::pair<std::string, std::string>> entries;
  if (std::filesystem::is_regular_file(target)) {
    ConfigFile cfg = load_config(target);
    r.exp = &find_experiment(cfg.experiment);
    entries = std::move(cfg.entries);
  } else {
    r.exp = &find_experiment(target);
  }
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + s + "'");
    }
    entries.emplace_back(std::string(trim(std::string_view(s).substr(0, eq))),
                         std::string(trim(std::string_view(s).substr(eq + 1))));
  }
  r.params = default_params(*r.exp);
  for (const auto& [k, v] : entries) {
    if (!r.params.has(k)) {
      throw ConfigError("experiment " + r.exp->name + ": unknown key '" + k + "'");
    }
    r.params.set(k, v);
  }
  if (!seed.empty()) {
    if (r.params.has("seed")) {
      r.params.set("seed", seed);
    } else {
      err << "note: experiment " << r.exp->name << " does not use a seed\n";
    }
  }
  return r;
}

} // namespace detail

/// Entry point of the command-line tool; args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Squeezed-bath and four-level atom simulator", "sqbath"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CLI::App* list = app.add_subcommand("list", "print the experiment catalog with defaults");

  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file or by name");
  std::string target;
  std::vector<std::string> sets;
  std::string outdir = ".";
  std::string format = "csv";
  int threads = 0;
  std::string seed;
  run->add_option("target", target, "config file or experiment name")->required();
  run->add_option("--set", sets, "parameter override key=value (repeatable)");
  run->add_option("--out", outdir, "output directory");
  run->add_option("--format", format, "csv or json-lines")
      ->check(CLI::IsMember({"csv", "json-lines"}));
  run->add_option("--threads", threads, "worker threads (default SQBATH_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "random seed for stochastic experiments");

  CLI::App* validate = app.add_subcommand("validate", "check a config file without computing");
  std::string vpath;
  validate->add_option("config", vpath, "config file")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      detail::print_catalog(out);
      return 0;
    }
    if (validate->parsed()) {
      const ConfigFile cfg = load_config(vpath);
      const Experiment& e = find_experiment(cfg.experiment);
      Params p = default_params(e);
      for (const auto& [k, v] : cfg.entries) {
        if (!p.has(k)) {
          throw ConfigError("experiment " + e.name + ": unknown key '" + k + "'");
        }
        p.set(k, v);
      }
      validate_experiment(e, p);
      out << "ok: " << e.name << "\n";
      return 0;
    }
    if (run->parsed()) {
      if (!seed.empty()) {
        parse_number(seed, "--seed");
      }
      const detail::Resolved r = detail::resolve(target, sets, seed, err);
      RunContext ctx;
      ctx.threads = resolve_threads(threads);
      validate_experiment(*r.exp, r.params);
      const ExperimentResult res = run_experiment(*r.exp, r.params, ctx);

      std::filesystem::create_directories(outdir);
      const std::filesystem::path base = std::filesystem::path(outdir) / r.exp->name;
      const std::string table_path =
          base.string() + (format == "csv" ? ".csv" : ".jsonl");
      {
        std::ofstream f(table_path);
        if (format == "csv") {
          write_csv(f, r.exp->name, res.table);
        } else {
          write_json_lines(f, r.exp->name, res.table);
        }
        if (!f) {
          throw ConfigError("cannot write '" + table_path + "'");
        }
      }
      const std::string summary_path = base.string() + ".summary.json";
      {
        std::ofstream f(summary_path);
        f << summary_json(r.exp->name, r.params, res).dump(2) << "\n";
        if (!f) {
          throw ConfigError("cannot write '" + summary_path + "'");
        }
      }
      const std::string config_path = base.string() + ".config";
      {
        std::ofstream f(config_path);
        f << config_text(r.exp->name, r.params);
      }
      for (const auto& w : res.warnings) {
        err << "warning: " << w << "\n";
      }
      out << "wrote " << table_path << "\n"
          << "wrote " << summary_path << "\n"
          << "wrote " << config_path << "\n";
      return 0;
    }
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

} // namespace sqbath
