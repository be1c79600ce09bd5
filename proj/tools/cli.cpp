#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "flowstep/analysis.hpp"
#include "flowstep/design.hpp"
#include "flowstep/experiments.hpp"
#include "flowstep/io.hpp"

namespace flowstep::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) parts.push_back(item.substr(b, e - b + 1));
  }
  return parts;
}

std::vector<double> parse_grid(const std::string& s, const char* what) {
  std::vector<double> values;
  for (const auto& part : split(s)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size()) throw UsageError(std::string("bad number '") + part + "' in " + what);
    values.push_back(v);
  }
  if (values.empty()) throw UsageError(std::string(what) + " is empty");
  return values;
}

std::string config_token(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) {
      if (!joined.empty()) joined += ',';
      joined += config_token(item);
    }
    return joined;
  }
  throw UsageError("unsupported config value " + v.dump());
}

// Pulls --config out of args and splices the file's entries in right after
// the subcommand, so explicit flags (which come later) take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return rest;

  Json cfg;
  try {
    cfg = read_json_file(*path);
  } catch (const std::ios_base::failure& e) {
    throw IoError(std::string("cannot read config: ") + e.what());
  } catch (const Error& e) {
    throw UsageError(std::string("malformed config: ") + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");

  std::vector<std::string> tokens;
  std::optional<std::string> command;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") {
      if (!value.is_string()) throw UsageError("config 'command' must be a string");
      command = value.get<std::string>();
      continue;
    }
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back("--" + key);
      continue;
    }
    tokens.push_back("--" + key);
    tokens.push_back(config_token(value));
  }

  std::vector<std::string> out;
  auto it = rest.begin();
  if (it != rest.end() && it->rfind("-", 0) != 0) {
    out.push_back(*it++);
  } else if (command) {
    out.push_back(*command);
  }
  out.insert(out.end(), tokens.begin(), tokens.end());
  out.insert(out.end(), it, rest.end());
  return out;
}

Json root_json(const Root<double>& r) {
  return Json{{"re", r.value.real()}, {"im", r.value.imag()}, {"modulus", std::abs(r.value)},
              {"multiplicity", r.multiplicity}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << content;
  f.flush();
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

// -- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
  std::string builtin;
  std::string method_file;
  std::optional<double> mu, L, h;
  std::string format = "json";
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  if (a.builtin.empty() == a.method_file.empty()) throw UsageError("give exactly one of --builtin or --method");
  if (a.mu.has_value() != a.L.has_value()) throw UsageError("--mu and --L go together");

  std::optional<MultistepMethod> m;
  if (!a.method_file.empty()) {
    Json j;
    try {
      j = read_json_file(a.method_file);
    } catch (const std::ios_base::failure& e) {
      throw IoError(e.what());
    }
    m = method_from_json(j);
  } else if (a.builtin == "euler" && !a.mu) {
    if (!a.h) throw UsageError("--builtin euler needs --h or an interval --mu/--L");
    m = MultistepMethod::euler(*a.h);
  } else {
    if (!a.mu) throw UsageError("--builtin " + a.builtin + " needs --mu and --L");
    m = builtin_method(a.builtin, *a.mu, *a.L);
  }
  if (a.h) m = m->with_step(*a.h);

  const StabilityReport report = analyze(*m);
  Json j;
  j["method"] = to_json(*m);
  j["steps"] = m->steps();
  j["explicit"] = m->is_explicit();
  j["consistent"] = report.consistent;
  j["rho_at_one"] = report.rho_at_one;
  j["derivative_gap"] = report.derivative_gap;
  j["zero_stable"] = report.zero_stable;
  j["rho_roots"] = Json::array();
  for (const auto& r : report.rho_roots.roots) j["rho_roots"].push_back(root_json(r));
  j["offending_roots"] = Json::array();
  for (const auto& r : report.offending_roots) j["offending_roots"].push_back(root_json(r));
  if (a.mu) {
    const RatePrediction rate = rate_prediction(*m, *a.mu, *a.L);
    j["rate"] = Json{{"mu", *a.mu},
                     {"L", *a.L},
                     {"r_max", rate.r_max},
                     {"multiplicity", rate.multiplicity},
                     {"argmax_lambda", rate.argmax_lambda},
                     {"absolutely_stable", absolutely_stable_on(*m, *a.mu, *a.L)}};
  }

  if (a.format == "json") {
    out << j.dump(2) << '\n';
    return kSuccess;
  }
  out << "method         " << j["method"].dump() << '\n';
  out << "consistent     " << (report.consistent ? "yes" : "no") << "  (|rho(1)| = " << report.rho_at_one
      << ", |rho'(1) - sigma(1)| = " << report.derivative_gap << ")\n";
  out << "zero-stable    " << (report.zero_stable ? "yes" : "no") << '\n';
  for (const auto& r : report.rho_roots.roots)
    out << "  root " << r.value << "  |.| = " << std::abs(r.value) << "  mult " << r.multiplicity << '\n';
  for (const auto& r : report.offending_roots) out << "  offending " << r.value << "  mult " << r.multiplicity << '\n';
  if (a.mu) {
    const Json& r = j["rate"];
    out << "rate on [" << *a.mu << ", " << *a.L << "]  r_max = " << r["r_max"].get<double>() << " at lambda = "
        << r["argmax_lambda"].get<double>() << " (mult " << r["multiplicity"].get<int>() << ")  "
        << (r["absolutely_stable"].get<bool>() ? "stable" : "unstable") << '\n';
  }
  return kSuccess;
}

// -- design -----------------------------------------------------------------

int cmd_design(double mu, double L, std::optional<double> h_hat, std::ostream& out) {
  if (!(mu > 0.0) || !(mu <= L)) throw UsageError("require 0 < mu <= L");
  TwoStepDesign d;
  try {
    d = h_hat ? optimal_two_step(*h_hat, mu, L) : design_of(method_m2(mu, L), mu, L);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InfeasibleHhat) throw UsageError(e.what());
    throw;
  }
  const MultistepMethod m = h_hat ? d.method() : method_m2(mu, L);
  Json j{{"method", to_json(m)},
         {"h_hat", d.h_hat},
         {"c_mu", d.c_mu},
         {"c_L", d.c_L},
         {"predicted_rate", rate_prediction(m, mu, L).r_max},
         {"beta", beta(mu, L)},
         {"h_hat_upper_bound", h_hat_upper_bound(mu, L)}};
  out << j.dump(2) << '\n';
  return kSuccess;
}

// -- figure1 ----------------------------------------------------------------

std::string panel_csv(const std::vector<PanelRun>& runs, const SmoothProblem& p, const Json& methods,
                      std::uint64_t seed, bool reproducible) {
  std::ostringstream os;
  write_csv_header(os, CsvHeader{methods, seed, reproducible}, p.dimension, true);
  for (const auto& r : runs) write_trajectory_rows(os, r.trajectory, p, &r.method);
  return os.str();
}

int cmd_figure1(const FlowTrackingConfig& cfg, const std::string& out_dir, bool reproducible, std::ostream& out) {
  const FlowTrackingResult res = flow_tracking(cfg);
  const SmoothProblem& p = res.problem;

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
  const std::filesystem::path dir(out_dir);

  Json own_methods{{"euler", to_json(euler_optimal(cfg.mu, cfg.L).method)},
                   {"nesterov", to_json(method_m1(cfg.mu, cfg.L))},
                   {"polyak", to_json(method_m2(cfg.mu, cfg.L))}};
  Json common_methods = Json::object();
  for (const auto& r : res.common_step) common_methods[r.method] = to_json(builtin_method(
      r.method == "euler" ? "euler" : (r.method == "nesterov" ? "m1" : "m2"), cfg.mu, cfg.L).with_step(r.h));

  write_file(dir / "left.csv", panel_csv(res.own_step, p, own_methods, cfg.seed, reproducible));
  write_file(dir / "right.csv", panel_csv(res.common_step, p, common_methods, cfg.seed, reproducible));
  {
    std::ostringstream os;
    write_trajectory_csv(os, res.flow, p, CsvHeader{Json{{"exact_flow", {{"samples", cfg.flow_samples}}}}, cfg.seed,
                                                    reproducible});
    write_file(dir / "flow.csv", os.str());
  }

  Json summary;
  summary["problem_seed"] = cfg.seed;
  summary["mu"] = cfg.mu;
  summary["L"] = cfg.L;
  summary["dimension"] = cfg.dimension;
  summary["t_max"] = cfg.t_max;
  summary["accuracy"] = cfg.accuracy;
  for (const auto& r : res.own_step)
    summary["left"][r.method] = Json{{"h", r.h}, {"iterations_to_accuracy", r.iterations_to_accuracy}};
  for (const auto& r : res.common_step)
    summary["right"][r.method] = Json{{"h", r.h},
                                      {"deviation", r.deviation},
                                      {"deviation_half_step", r.deviation_half_step},
                                      {"ratio", r.deviation / r.deviation_half_step}};
  summary["files"] = {(dir / "left.csv").string(), (dir / "right.csv").string(), (dir / "flow.csv").string()};
  out << summary.dump(2) << '\n';
  return kSuccess;
}

// -- compare ----------------------------------------------------------------

int cmd_compare(const CompareConfig& cfg, std::ostream& out) {
  bool known = false;
  for (const auto& p : compare_pairs()) known = known || p == cfg.pair;
  if (!known) throw UsageError("unsupported pair '" + cfg.pair + "'");
  const CompareResult r = compare(cfg);
  Json j{{"pair", r.pair},
         {"optimizer", r.optimizer},
         {"integrator", r.integrator},
         {"max_relative_deviation", r.max_relative_deviation},
         {"threshold", r.threshold},
         {"pass", r.pass}};
  out << j.dump(2) << '\n';
  return r.pass ? kSuccess : kCompareFailure;
}

// -- sweep ------------------------------------------------------------------

int cmd_sweep(const SweepConfig& cfg, const std::string& out_file, bool reproducible, std::ostream& out) {
  const std::vector<SweepCell> cells = sweep(cfg);
  std::ostringstream os;
  os << "# seed: " << cfg.seed << '\n';
  if (!reproducible) os << "# generated: " << utc_timestamp() << '\n';
  os << "method,parameter,value,mu,L,h,predicted_rate,fitted_rate,r_squared,status\n";
  for (const auto& c : cells) {
    const bool fitted = c.status == "ok";
    os << c.method << ',' << c.parameter << ',' << format_number(c.value) << ',' << format_number(c.mu) << ','
       << format_number(c.L) << ',' << format_number(c.h) << ',' << format_number(c.predicted_rate) << ','
       << (fitted ? format_number(c.fitted_rate) : "") << ',' << (fitted ? format_number(c.r_squared) : "") << ",\""
       << c.status << "\"\n";
  }
  if (out_file.empty() || out_file == "-") {
    out << os.str();
  } else {
    write_file(out_file, os.str());
  }
  return kSuccess;
}

std::string default_output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? std::string(env) : std::string("flowstep-out");
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient flows, linear multi-step methods and the optimisers they hide."};
  app.name("flowstep");
  app.set_help_flag("--help", "Print this help message and exit");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.add_option("--config", "JSON file of flag values; explicit flags win");

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Consistency, zero-stability and rate of a method");
  analyze_cmd->add_option("--builtin", an.builtin, "euler | m1 | m2 | polyak | nesterov");
  analyze_cmd->add_option("--method", an.method_file, "method JSON file {rho, sigma, h}");
  analyze_cmd->add_option("--mu", an.mu, "strong convexity");
  analyze_cmd->add_option("--L", an.L, "smoothness");
  analyze_cmd->add_option("--h", an.h, "override the step size");
  analyze_cmd->add_option("--format", an.format, "json | pretty")->check(CLI::IsMember({"json", "pretty"}));

  double d_mu = 0.0, d_L = 0.0;
  std::optional<double> d_h_hat;
  auto* design_cmd = app.add_subcommand("design", "Optimal two-step method for [mu, L]");
  design_cmd->add_option("--mu", d_mu)->required();
  design_cmd->add_option("--L", d_L)->required();
  design_cmd->add_option("--h-hat", d_h_hat, "normalised step; omitted gives the fastest member");

  FlowTrackingConfig fig;
  std::string fig_out;
  bool fig_repro = false;
  auto* figure_cmd = app.add_subcommand("figure1", "Euler, Nesterov and Polyak against the gradient flow");
  figure_cmd->add_option("--mu", fig.mu);
  figure_cmd->add_option("--L", fig.L);
  figure_cmd->add_option("--dim", fig.dimension);
  figure_cmd->add_option("--seed", fig.seed);
  figure_cmd->add_option("--t-max", fig.t_max);
  figure_cmd->add_option("--accuracy", fig.accuracy);
  figure_cmd->add_option("--flow-samples", fig.flow_samples);
  figure_cmd->add_option("--out", fig_out, std::string("output directory (default $") + kOutputDirEnv + ")");
  figure_cmd->add_flag("--reproducible", fig_repro, "omit the timestamp header line");

  CompareConfig cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Optimiser against its integrator twin");
  compare_cmd->add_option("--pair", cmp.pair)->required();
  compare_cmd->add_option("--geometry", cmp.geometry)->check(CLI::IsMember({"entropy", "euclidean"}));
  compare_cmd->add_option("--mu", cmp.mu);
  compare_cmd->add_option("--L", cmp.L);
  compare_cmd->add_option("--dim", cmp.dimension);
  compare_cmd->add_option("--n", cmp.iterations);
  compare_cmd->add_option("--seed", cmp.seed);
  compare_cmd->add_option("--threshold", cmp.threshold);

  SweepConfig sw;
  std::string sw_methods = "euler,m1,m2", sw_kappa, sw_h, sw_out;
  bool sw_repro = false, sw_serial = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Predicted and fitted rates over a grid");
  sweep_cmd->add_option("--methods", sw_methods, "comma list of builtin methods");
  sweep_cmd->add_option("--mu", sw.mu);
  sweep_cmd->add_option("--L", sw.L);
  sweep_cmd->add_option("--kappa-grid", sw_kappa, "comma list; L = kappa mu");
  sweep_cmd->add_option("--h-grid", sw_h, "comma list of step sizes");
  sweep_cmd->add_option("--dim", sw.dimension);
  sweep_cmd->add_option("--seed", sw.seed);
  sweep_cmd->add_option("--out", sw_out, "CSV file (default stdout)");
  sweep_cmd->add_flag("--reproducible", sw_repro, "omit the timestamp header line");
  sweep_cmd->add_flag("--serial", sw_serial, "evaluate cells one at a time");

  try {
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }

  try {
    int code = kSuccess;
    if (analyze_cmd->parsed()) {
      code = cmd_analyze(an, out);
    } else if (design_cmd->parsed()) {
      code = cmd_design(d_mu, d_L, d_h_hat, out);
    } else if (figure_cmd->parsed()) {
      code = cmd_figure1(fig, fig_out.empty() ? default_output_dir() : fig_out, fig_repro, out);
    } else if (compare_cmd->parsed()) {
      code = cmd_compare(cmp, out);
    } else if (sweep_cmd->parsed()) {
      sw.methods = split(sw_methods);
      if (!sw_kappa.empty()) sw.kappa_grid = parse_grid(sw_kappa, "--kappa-grid");
      if (!sw_h.empty()) sw.h_grid = parse_grid(sw_h, "--h-grid");
      sw.parallel = !sw_serial;
      code = cmd_sweep(sw, sw_out, sw_repro, out);
    }
    out.flush();
    if (!out) {
      err << "error: writing output failed\n";
      return kIoError;
    }
    return code;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
}

}  // namespace flowstep::cli
