#include "ifock/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ifock/interacting_fock.h"
#include "ifock/noise_algebra.h"

namespace ifock::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) fail(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(where + ": unknown field \"" + key + "\"");
  }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) fail(where + ": missing field \"" + key + "\"");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::vector<double> number_list(const json& v, const std::string& where) {
  std::vector<double> out;
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) fail(where + ": expected a number or an array of numbers");
  for (const auto& x : v) {
    if (!x.is_number()) fail(where + ": expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Dispersion parse_dispersion(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    fail("dispersion: missing \"type\"");
  }
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "constant") {
      check_keys(j, {"type", "omega0"}, "dispersion");
      return Dispersion::constant(get_number(j, "omega0", "dispersion"));
    }
    if (type == "quadratic") {
      check_keys(j, {"type", "omega0", "mu"}, "dispersion");
      return Dispersion::quadratic(get_number(j, "omega0", "dispersion"),
                                   get_number(j, "mu", "dispersion"));
    }
    if (type == "linear") {
      check_keys(j, {"type", "c"}, "dispersion");
      return Dispersion::linear(get_number(j, "c", "dispersion"));
    }
  } catch (const std::invalid_argument& e) {
    fail(std::string("dispersion: ") + e.what());
  }
  fail("dispersion: unknown type \"" + type + "\"");
}

FormFactor parse_form_factor(const json& j, const std::string& where) {
  check_keys(j, {"type", "re_amp", "im_amp", "center", "width"}, where);
  if (!j.contains("type") || j.at("type") != "gaussian") fail(where + ": type must be \"gaussian\"");
  if (!j.contains("center")) fail(where + ": missing field \"center\"");
  const auto center = number_list(j.at("center"), where + ".center");
  try {
    return FormFactor::gaussian(
        {get_number(j, "re_amp", where), get_number(j, "im_amp", where)}, center,
        get_number(j, "width", where));
  } catch (const std::invalid_argument& e) {
    fail(where + ": " + e.what());
  }
}

EpsilonSeq parse_epsilon(const json& j) {
  try {
    if (j.is_string()) return EpsilonSeq::parse(j.get<std::string>());
    if (j.is_array()) {
      std::vector<int> bits;
      for (const auto& b : j) {
        if (!b.is_number_integer()) fail("epsilon: expected 0/1 entries");
        bits.push_back(b.get<int>());
      }
      return EpsilonSeq::from_bits(bits);
    }
  } catch (const std::invalid_argument& e) {
    fail(std::string("epsilon: ") + e.what());
  }
  fail("epsilon: expected a string \"1,0\" or an array of 0/1");
}

std::vector<double> parse_probe(const json& j) {
  if (j.is_object()) {
    check_keys(j, {"start", "stop", "count"}, "probe_p");
    const double a = get_number(j, "start", "probe_p");
    const double b = get_number(j, "stop", "probe_p");
    if (!j.contains("count") || !j.at("count").is_number_integer() || j.at("count").get<long>() < 1) {
      fail("probe_p.count: expected a positive integer");
    }
    const auto n = j.at("count").get<std::size_t>();
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return out;
  }
  return number_list(j, "probe_p");
}

std::string route_name(Route r) {
  switch (r) {
    case Route::Theorem1:
      return "theorem1";
    case Route::Fock:
      return "fock";
    case Route::Noise:
      return "noise";
    case Route::All:
      return "all";
  }
  return "?";
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"schema", "phys", "dispersion", "form_factors", "factors", "epsilon", "times",
              "probe_p", "lambda_list", "omega_probe", "route", "output"},
             "config");
  if (!j.contains("schema") || !j.at("schema").is_number_integer() || j.at("schema") != 1) {
    fail("config: \"schema\" must be 1");
  }
  RunConfig cfg;
  if (j.contains("phys")) {
    const json& p = j.at("phys");
    check_keys(p, {"hbar", "mass", "dim", "root_tol", "quad_tol"}, "phys");
    if (p.contains("hbar")) cfg.phys.hbar = get_number(p, "hbar", "phys");
    if (p.contains("mass")) cfg.phys.mass = get_number(p, "mass", "phys");
    if (p.contains("dim")) {
      if (!p.at("dim").is_number_integer()) fail("phys.dim: expected an integer");
      cfg.phys.dim = p.at("dim").get<int>();
    }
    if (p.contains("root_tol")) cfg.phys.root_tol = get_number(p, "root_tol", "phys");
    if (p.contains("quad_tol")) cfg.phys.quad_tol = get_number(p, "quad_tol", "phys");
  }
  try {
    cfg.phys.validate();
  } catch (const std::invalid_argument& e) {
    fail(std::string("phys: ") + e.what());
  }
  if (j.contains("dispersion")) cfg.dispersion = parse_dispersion(j.at("dispersion"));
  if (j.contains("form_factors")) {
    const json& list = j.at("form_factors");
    if (!list.is_array()) fail("form_factors: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.form_factors.push_back(parse_form_factor(list[i], "form_factors[" + std::to_string(i) + "]"));
    }
  }
  for (const auto& f : cfg.form_factors) {
    if (static_cast<int>(f.dim()) != cfg.phys.dim) fail("form_factors: center dimension != phys.dim");
  }
  if (j.contains("factors")) {
    const json& list = j.at("factors");
    if (!list.is_array()) fail("factors: expected an array of indices");
    for (const auto& x : list) {
      if (!x.is_number_unsigned()) fail("factors: expected non-negative integers");
      const auto idx = x.get<std::size_t>();
      if (idx >= cfg.form_factors.size()) fail("factors: index out of range");
      cfg.factor_of.push_back(idx);
    }
  }
  if (j.contains("epsilon")) cfg.epsilon = parse_epsilon(j.at("epsilon"));
  if (j.contains("times")) cfg.times = number_list(j.at("times"), "times");
  for (double t : cfg.times) {
    if (!(t >= 0.0) || !std::isfinite(t)) fail("times: must be finite and non-negative");
  }
  if (j.contains("probe_p")) cfg.probe_p = parse_probe(j.at("probe_p"));
  if (j.contains("lambda_list")) cfg.lambda_list = number_list(j.at("lambda_list"), "lambda_list");
  for (double l : cfg.lambda_list) {
    if (!(l > 0.0)) fail("lambda_list: entries must be positive");
  }
  if (j.contains("omega_probe")) cfg.omega_probe = get_number(j, "omega_probe", "config");
  if (j.contains("route")) {
    if (!j.at("route").is_string()) fail("route: expected a string");
    const std::string r = j.at("route").get<std::string>();
    if (r == "theorem1") {
      cfg.route = Route::Theorem1;
    } else if (r == "fock") {
      cfg.route = Route::Fock;
    } else if (r == "noise") {
      cfg.route = Route::Noise;
    } else if (r == "all") {
      cfg.route = Route::All;
    } else {
      fail("route: expected theorem1, fock, noise or all");
    }
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) fail("output: expected a path string");
    cfg.output = j.at("output").get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

CorrelatorSpec RunConfig::correlator(double p) const {
  if (!epsilon) fail("epsilon is required for this command");
  const std::size_t len = epsilon->size();
  CorrelatorSpec spec;
  spec.eps = *epsilon;
  spec.probe_p = p;
  if (times.size() == 1) {
    spec.times.assign(len, times[0]);
  } else if (times.size() == len) {
    spec.times = times;
  } else {
    fail("times: expected one value or one per epsilon position");
  }
  if (form_factors.empty()) fail("form_factors: at least one form factor is required");
  if (factor_of.empty()) {
    if (form_factors.size() == 1) {
      spec.factors.assign(len, form_factors[0]);
    } else if (form_factors.size() == len) {
      spec.factors = form_factors;
    } else {
      fail("factors: required when form_factors does not have one entry per position");
    }
  } else {
    if (factor_of.size() != len) fail("factors: expected one index per epsilon position");
    for (std::size_t i : factor_of) spec.factors.push_back(form_factors[i]);
  }
  return spec;
}

std::string CsvWriter::quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string CsvWriter::number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote(fields[i]);
  }
  out_ << "\r\n";
}

namespace {

struct Routes {
  std::optional<cplx> theorem1, fock, noise;
};

std::vector<ModuleVector> module_vectors(const CorrelatorSpec& spec) {
  std::vector<ModuleVector> out;
  for (std::size_t j = 0; j < spec.eps.size(); ++j) {
    out.emplace_back(TimeFactor::indicator(spec.times[j]), spec.factors[j]);
  }
  return out;
}

NoiseWord noise_word(const CorrelatorSpec& spec) {
  NoiseWord w;
  for (std::size_t j = 1; j <= spec.eps.size(); ++j) {
    w.symbols.push_back(
        {spec.eps.at(j), TimeFactor::indicator(spec.times[j - 1]), spec.factors[j - 1]});
  }
  return w;
}

Routes evaluate_routes(const RunConfig& cfg, double p, bool theorem1, bool fock, bool noise) {
  const CorrelatorSpec spec = cfg.correlator(p);
  Routes r;
  if (theorem1) r.theorem1 = limit_moment(spec, cfg.phys, cfg.dispersion).value;
  if (fock) {
    const auto ctx = make_context(cfg.phys, cfg.dispersion);
    r.fock = vacuum_moment(ctx, spec.eps, module_vectors(spec))(p);
  }
  if (noise) {
    const NoiseWord w = noise_word(spec);
    const auto plan = reduce_word(w, cfg.phys);
    r.noise = plan ? evaluate_plan(*plan, w, cfg.phys, cfg.dispersion, p) : cplx(0.0);
  }
  return r;
}

double rel_dev(cplx a, cplx b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

int cmd_partition(const EpsilonSeq& eps, CsvWriter& csv) {
  csv.row({"epsilon", "status", "wigner_pairing", "pairing_count"});
  const bool nontrivial = is_nontrivial(eps);
  const auto w = wigner_pairing(eps);
  const auto count = enumerate_pairings(eps).size();
  csv.row({eps.to_string(), nontrivial ? "nontrivial" : "trivial", w ? w->to_string() : "",
           std::to_string(count)});
  return exit_code::ok;
}

int cmd_moment(const RunConfig& cfg, CsvWriter& csv, double& current_p) {
  if (cfg.probe_p.empty()) fail("probe_p is required");
  csv.row({"p", "re", "im", "route"});
  const bool all = cfg.route == Route::All;
  for (double p : cfg.probe_p) {
    current_p = p;
    const Routes r = evaluate_routes(cfg, p, all || cfg.route == Route::Theorem1,
                                     all || cfg.route == Route::Fock,
                                     all || cfg.route == Route::Noise);
    auto emit = [&](const std::optional<cplx>& v, Route route) {
      if (v) csv.row({CsvWriter::number(p), CsvWriter::number(v->real()),
                      CsvWriter::number(v->imag()), route_name(route)});
    };
    emit(r.theorem1, Route::Theorem1);
    emit(r.fock, Route::Fock);
    emit(r.noise, Route::Noise);
  }
  return exit_code::ok;
}

int cmd_bose(const RunConfig& cfg, CsvWriter& csv) {
  if (!cfg.omega_probe) fail("omega_probe is required for bose-moment");
  const CorrelatorSpec spec = cfg.correlator(cfg.probe_p.empty() ? 0.0 : cfg.probe_p.front());
  BoseResult r;
  try {
    r = bose_moment(spec, *cfg.omega_probe, cfg.phys, cfg.dispersion);
  } catch (const std::invalid_argument& e) {
    fail(std::string("bose-moment: ") + e.what());
  }
  csv.row({"omega_probe", "re", "im", "pairing_count"});
  csv.row({CsvWriter::number(*cfg.omega_probe), CsvWriter::number(r.value.real()),
           CsvWriter::number(r.value.imag()), std::to_string(r.pairing_count)});
  return exit_code::ok;
}

int cmd_prelimit(const RunConfig& cfg, CsvWriter& csv, double& current_p) {
  if (cfg.probe_p.size() != 1) fail("prelimit: expected exactly one probe_p value");
  if (cfg.lambda_list.empty()) fail("prelimit: lambda_list is required");
  const CorrelatorSpec spec = cfg.correlator(cfg.probe_p.front());
  current_p = spec.probe_p;
  if (spec.eps.order() > 2) fail("prelimit: supports n <= 2 only");
  if (spec.eps.order() == 2 && cfg.dispersion.is_linear()) {
    fail("prelimit: n = 2 needs a constant or quadratic dispersion");
  }
  csv.row({"lambda", "pairing_id", "re", "im", "crossing_flag"});
  for (double lambda : cfg.lambda_list) {
    const PrelimitResult r = prelimit_moment(spec, cfg.phys, cfg.dispersion, lambda);
    for (const auto& c : r.per_pairing) {
      csv.row({CsvWriter::number(lambda), c.pairing.to_string(), CsvWriter::number(c.value.real()),
               CsvWriter::number(c.value.imag()), c.crossing ? "1" : "0"});
    }
    csv.row({CsvWriter::number(lambda), "total", CsvWriter::number(r.total.real()),
             CsvWriter::number(r.total.imag()), ""});
  }
  return exit_code::ok;
}

int cmd_crosscheck(const RunConfig& cfg, CsvWriter& csv, std::ostream& err, double& current_p) {
  if (cfg.probe_p.empty()) fail("probe_p is required");
  csv.row({"p", "theorem1_re", "theorem1_im", "fock_re", "fock_im", "noise_re", "noise_im",
           "max_rel_dev"});
  double worst = 0.0;
  for (double p : cfg.probe_p) {
    current_p = p;
    const Routes r = evaluate_routes(cfg, p, true, true, true);
    const double dev = std::max({rel_dev(*r.theorem1, *r.fock), rel_dev(*r.theorem1, *r.noise),
                                 rel_dev(*r.fock, *r.noise)});
    worst = std::max(worst, dev);
    csv.row({CsvWriter::number(p), CsvWriter::number(r.theorem1->real()),
             CsvWriter::number(r.theorem1->imag()), CsvWriter::number(r.fock->real()),
             CsvWriter::number(r.fock->imag()), CsvWriter::number(r.noise->real()),
             CsvWriter::number(r.noise->imag()), CsvWriter::number(dev)});
  }
  if (worst > 1e-4) {
    err << "crosscheck: max relative deviation " << CsvWriter::number(worst) << " exceeds 1e-4\n";
    return exit_code::failure;
  }
  return exit_code::ok;
}

int cmd_kernel_scan(const RunConfig& cfg, CsvWriter& csv) {
  if (cfg.probe_p.empty()) fail("probe_p is required");
  if (cfg.form_factors.empty()) fail("form_factors: at least one form factor is required");
  const FormFactor& f = cfg.form_factors.front();
  const FormFactor& g = cfg.form_factors.size() > 1 ? cfg.form_factors[1] : f;
  csv.row({"p", "re", "im", "status"});
  for (double p : cfg.probe_p) {
    try {
      const cplx v = pairing_kernel(cfg.phys, cfg.dispersion, f, g, p);
      csv.row({CsvWriter::number(p), CsvWriter::number(v.real()), CsvWriter::number(v.imag()), "ok"});
    } catch (const DegenerateShell&) {
      csv.row({CsvWriter::number(p), "", "", "degenerate"});
    }
  }
  return exit_code::ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vacuum correlators of interacting-free quantum noise", "ifock"};
  app.require_subcommand(1);
  std::string config_path, epsilon_text, out_path;
  const std::vector<std::string> names = {"partition", "moment",     "bose-moment",
                                          "prelimit",  "crosscheck", "kernel-scan"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--epsilon", epsilon_text, "comma list e1,e2,... (1 = creator)");
    sub->add_option("--out", out_path, "CSV output path (default stdout)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_code::config;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  double current_p = std::nan("");
  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (command != "partition") {
      fail("--config is required for " + command);
    }
    if (!epsilon_text.empty()) {
      try {
        cfg.epsilon = EpsilonSeq::parse(epsilon_text);
      } catch (const std::invalid_argument& e) {
        fail(std::string("--epsilon: ") + e.what());
      }
    }
    if (!out_path.empty()) cfg.output = out_path;

    std::ofstream file;
    std::ostream* sink = &out;
    if (cfg.output) {
      file.open(*cfg.output, std::ios::binary);
      if (!file) fail("cannot open output file " + *cfg.output);
      sink = &file;
    }
    CsvWriter csv(*sink);
    if (command == "partition") {
      if (!cfg.epsilon) fail("partition: epsilon is required");
      return cmd_partition(*cfg.epsilon, csv);
    }
    if (command == "moment") return cmd_moment(cfg, csv, current_p);
    if (command == "bose-moment") return cmd_bose(cfg, csv);
    if (command == "prelimit") return cmd_prelimit(cfg, csv, current_p);
    if (command == "crosscheck") return cmd_crosscheck(cfg, csv, err, current_p);
    return cmd_kernel_scan(cfg, csv);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const DegenerateShell& e) {
    err << "degenerate shell: momentum l=" << CsvWriter::number(e.momentum())
        << " root k=" << CsvWriter::number(e.root())
        << " jacobian=" << CsvWriter::number(e.jacobian());
    if (!std::isnan(current_p)) err << " (p=" << CsvWriter::number(current_p) << ")";
    err << '\n';
    return exit_code::degenerate;
  } catch (const QuadratureFailure& e) {
    err << "quadrature failure: " << e.what() << '\n';
    return exit_code::quadrature;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return exit_code::config;
  }
}

}  // namespace ifock::cli
