// Command-line front end: scheme validation, state building, string orders, MBQC runs,
// oracle comparison, splitting error, Lie dimension, contextuality witness, figure data.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbqc/mbqc.hpp"
#include "mbqc/oracle.hpp"
#include "mbqc/scheme_io.hpp"
#include "mbqc/state.hpp"
#include "mbqc/string_order.hpp"
#include "mbqc/witness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mbqc;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- formatting

/// Rounds to 12 significant digits so JSON output is stable across platforms.
json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep))
    if (!part.empty()) out.push_back(part);
  return out;
}

/// "a:b:n" gives n evenly spaced points from a to b; otherwise a comma list.
std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  std::vector<double> out;
  try {
    if (parts.size() == 3) {
      const double a = parse_angle(parts[0]), b = parse_angle(parts[1]);
      const int n = std::stoi(parts[2]);
      for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    } else {
      for (const auto& p : split(text, ',')) out.push_back(parse_angle(p));
    }
  } catch (const std::logic_error&) {
    throw UsageError("bad grid '" + text + "'");
  }
  if (out.empty()) throw UsageError("empty grid '" + text + "'");
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (const auto& p : split(text, ',')) out.push_back(std::stoi(p));
  return out;
}

std::vector<int> parse_sector(const std::string& text) {
  std::vector<int> out;
  for (char c : text) {
    if (c == ',' || c == ' ') continue;
    if (c != '0' && c != '1') throw UsageError("sector entries must be 0 or 1");
    out.push_back(c - '0');
  }
  return out;
}

/// Built-in name, file path, or a file name whose stem is a built-in name.
SchemeTemplate load_scheme(const std::string& name) {
  if (fs::exists(name)) return load_scheme_template(name);
  const std::string stem = fs::path(name).stem().string();
  for (const auto& n : builtin_scheme_names())
    if (n == name || n == stem) return builtin_scheme(n);
  throw UsageError("unknown scheme '" + name + "'");
}

ValidatedScheme instantiate(const SchemeTemplate& t, int n_sites) {
  if (n_sites <= 0) {
    if (!t.default_sites) throw UsageError("scheme '" + t.name + "' needs --N");
    n_sites = *t.default_sites;
  }
  return validate_or_throw(t.instantiate_sites(n_sites));
}

json labels(const ValidatedScheme& vs, const std::vector<GroupElement>& gs) {
  json out = json::array();
  for (GroupElement g : gs) out.push_back(vs.label(g));
  return out;
}

// ---------------------------------------------------------------- shared options

struct Common {
  std::optional<std::uint64_t> seed;
  bool reproducible = false;
  int threads = 1;
  std::string out;

  std::uint64_t resolve_seed() const {
    if (seed) return *seed;
    if (reproducible) return 1;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
};

struct StateArgs {
  std::string family;
  std::string circuit;
  std::string state_file;
  std::string scheme;
  int n_sites = 0;
  int tau = 2;
  std::string alpha = "0";
  std::string phi = "-0.15pi";
  double log_g = 0.0;
  double coupling = 1.0;
  std::string frame = "rotated";
  std::string end = "x";
  std::string sector;
  int delta = 0;
  std::string cache;
  int dense_max = 8;
  int max_matvecs = 5000;
};

void add_state_options(CLI::App* sub, StateArgs& a) {
  sub->add_option("--family", a.family, "Hamiltonian family: cluster, qca, ising, kitaev (or full names)");
  sub->add_option("--circuit", a.circuit, "Exact circuit state: cluster or qca");
  sub->add_option("--state-file", a.state_file, "Binary state dump written by build-state");
  sub->add_option("--scheme", a.scheme, "Scheme name or file (default follows the state)");
  sub->add_option("--N", a.n_sites, "Number of sites")->check(CLI::NonNegativeNumber);
  sub->add_option("--tau", a.tau, "QCA circuit depth")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--alpha", a.alpha, "Field angle (e.g. pi/8, 0.3)")->capture_default_str();
  sub->add_option("--phi", a.phi, "Kitaev-Gamma angle")->capture_default_str();
  sub->add_option("--log-g", a.log_g, "Kitaev-Gamma log(g_y/g_x)")->capture_default_str();
  sub->add_option("--coupling", a.coupling, "Ising overall scale")->capture_default_str();
  sub->add_option("--frame", a.frame, "Kitaev-Gamma frame")
      ->check(CLI::IsMember({"rotated", "unrotated"}))
      ->capture_default_str();
  sub->add_option("--end", a.end, "Kitaev-Gamma end bond")->check(CLI::IsMember({"x", "y"}))->capture_default_str();
  sub->add_option("--sector", a.sector, "Symmetry sector bits for degenerate ground spaces, e.g. 01");
  sub->add_option("--delta", a.delta, "Entanglement range override (blocks)")->check(CLI::NonNegativeNumber);
  sub->add_option("--cache", a.cache, "Ground-state cache directory");
  sub->add_option("--dense-max", a.dense_max, "Largest N for dense diagonalization")
      ->check(CLI::Range(1, 12))
      ->capture_default_str();
  sub->add_option("--max-matvecs", a.max_matvecs, "Lanczos matvec cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_common_options(CLI::App* sub, Common& c, bool random) {
  if (random) {
    sub->add_option("--seed", c.seed, "Run seed");
    sub->add_flag("--reproducible", c.reproducible, "Fix the seed to 1 when --seed is absent");
  }
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--out", c.out, "Output directory for reports and the effective config");
}

Family family_of(const std::string& s) {
  if (s == "cluster") return Family::ClusterField;
  if (s == "qca") return Family::QcaField;
  if (s == "ising") return Family::IsingTransverse;
  if (s == "kitaev" || s == "kg") return Family::KitaevGamma;
  try {
    return parse_family(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

HamiltonianSpec hamiltonian_spec(const StateArgs& a) {
  HamiltonianSpec h;
  h.family = family_of(a.family);
  h.n_sites = a.n_sites;
  h.alpha = parse_angle(a.alpha);
  h.coupling = a.coupling;
  h.phi = parse_angle(a.phi);
  h.g_ratio = std::exp(a.log_g);
  h.frame = a.frame == "unrotated" ? Frame::Unrotated : Frame::Rotated;
  h.end = a.end == "y" ? ChainEnd::YEnd : ChainEnd::XEnd;
  if (!a.sector.empty()) h.sector = parse_sector(a.sector);
  if (a.delta > 0) h.delta = a.delta;
  return h;
}

SolverOptions solver_options(const StateArgs& a) {
  SolverOptions o;
  o.dense_max_sites = a.dense_max;
  o.max_matvecs = a.max_matvecs;
  return o;
}

struct Built {
  ResourceState state;
  std::optional<ValidatedScheme> vs;
  std::string scheme;
  std::optional<HamiltonianSpec> hamiltonian;
  std::optional<CircuitSpec> circuit;
  SymmetryCertificate cert;
};

std::string default_scheme(const StateArgs& a) {
  if (!a.scheme.empty()) return a.scheme;
  if (!a.family.empty()) return default_scheme_for(family_of(a.family));
  if (a.circuit == "cluster") return "cluster_site_local";
  if (a.circuit == "qca") return "qca_site_local";
  throw UsageError("--scheme is required for states loaded from file");
}

/// Builds or loads the state, instantiates the scheme on it and certifies symmetry.
/// With `require_symmetric` a failed certificate is an error.
Built build(const StateArgs& a, bool require_symmetric = true) {
  const int sources = !a.family.empty() + !a.circuit.empty() + !a.state_file.empty();
  if (sources != 1) throw UsageError("give exactly one of --family, --circuit, --state-file");
  Built b;
  if (!a.state_file.empty()) {
    b.state = load_state(a.state_file);
  } else if (!a.circuit.empty()) {
    if (a.n_sites <= 0) throw UsageError("--N is required");
    if (a.circuit == "cluster")
      b.circuit = CircuitSpec::cluster_from_plus(a.n_sites);
    else if (a.circuit == "qca")
      b.circuit = CircuitSpec::qca(a.n_sites, a.tau);
    else
      throw UsageError("unknown circuit '" + a.circuit + "'");
    b.state = build_circuit_state(*b.circuit);
  } else {
    if (a.n_sites <= 0) throw UsageError("--N is required");
    b.hamiltonian = hamiltonian_spec(a);
    b.hamiltonian->check();
    b.state = a.cache.empty() ? ground_state(*b.hamiltonian, solver_options(a))
                              : cached_ground_state(*b.hamiltonian, a.cache, solver_options(a));
  }
  b.scheme = default_scheme(a);
  b.vs = validate_or_throw(load_scheme(b.scheme).instantiate_sites(b.state.n_sites));
  const double tol = b.hamiltonian ? 1e-7 : 1e-8;
  b.cert = certify_symmetry(b.state.amplitudes, *b.vs, tol);
  if (b.cert.symmetric) {
    b.state.chi = b.cert.chi;
  } else if (require_symmetric) {
    throw std::runtime_error("state is not symmetric under scheme '" + b.scheme + "'");
  }
  if (b.circuit) {
    b.state.delta = entanglement_range(*b.circuit, b.vs->scheme().partition);
    b.state.delta_exact = true;
  }
  if (a.delta > 0) b.state.delta = a.delta;
  if (b.state.delta < 1) b.state.delta = 1;  // state files carry no range
  return b;
}

json state_summary(const Built& b) {
  json j;
  j["provenance"] = b.state.provenance;
  j["N"] = b.state.n_sites;
  j["scheme"] = b.scheme;
  j["delta"] = b.state.delta;
  j["delta_exact"] = b.state.delta_exact;
  if (b.hamiltonian) {
    j["energy"] = num(b.state.energy);
    j["ground_degeneracy"] = b.state.ground_degeneracy;
  }
  if (b.state.chi) j["chi"] = *b.state.chi;
  return j;
}

void round_floats(json& j) {
  if (j.is_number_float()) {
    j = num(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& v : j) round_floats(v);
  }
}

/// Effective settings of the subcommand that ran, as a TOML file accepted by --config.
/// Unset options are left out.
std::string effective_config(const CLI::App& app) {
  const auto used = app.get_subcommands();
  const std::string prefix = used.empty() ? "" : used.front()->get_name() + ".";
  std::istringstream all(app.config_to_str(true, false));
  std::string line, out;
  while (std::getline(all, line))
    if (line.rfind(prefix, 0) == 0 && !line.ends_with("=\"\"")) out += line + "\n";
  return out;
}

void echo_config(const Common& c, const CLI::App& app) {
  if (!c.out.empty()) write_file(fs::path(c.out) / "config.toml", effective_config(app));
}

/// Prints the report and stores it (plus the effective config) under --out.
void emit(json report, const Common& c, const std::string& name, const CLI::App& app) {
  round_floats(report);
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (c.out.empty()) return;
  write_file(fs::path(c.out) / (name + ".json"), text);
  echo_config(c, app);
}

// ---------------------------------------------------------------- subcommands

int cmd_validate(const std::string& scheme, int n_sites) {
  const SchemeTemplate t = load_scheme(scheme);
  int n = n_sites > 0 ? n_sites : t.default_sites.value_or(0);
  if (n <= 0) throw UsageError("scheme '" + t.name + "' needs --N");
  const SymmetryScheme s = t.instantiate_sites(n);
  const ValidationResult r = validate(s);
  json j;
  j["scheme"] = s.name;
  j["N"] = n;
  j["m"] = s.m();
  j["generators"] = s.generators;
  j["n_bulk"] = s.n_bulk();
  if (!r.ok()) {
    j["ok"] = false;
    json v = json::array();
    for (const Violation& x : r.violations)
      v.push_back({{"relation", x.relation},
                   {"block", x.block},
                   {"g", s.label(x.g)},
                   {"gp", s.label(x.gp)},
                   {"lhs", x.lhs},
                   {"rhs", x.rhs},
                   {"message", x.message}});
    j["violations"] = v;
    std::cout << j.dump(2) << "\n";
    return 1;
  }
  const ValidatedScheme& vs = *r.scheme;
  const AlgebraReport alg = check_algebra(vs);
  j["ok"] = alg.ok();
  j["H"] = labels(vs, vs.H().elements);
  j["Hprime"] = labels(vs, vs.Hprime().elements);
  json g = json::array();
  for (int k = 1; k <= vs.n_bulk(); ++k) g.push_back({{"block", k}, {"elements", labels(vs, vs.G(k).elements)}});
  j["G"] = g;
  j["kappa"] = vs.kappa_matrix();
  j["algebra_checks"] = alg.checks;
  json fails = json::array();
  for (const Violation& x : alg.failures) fails.push_back(format_violation(s, x));
  j["algebra_failures"] = fails;
  std::cout << j.dump(2) << "\n";
  return alg.ok() ? 0 : 1;
}

int cmd_build_state(const StateArgs& a, const std::string& state_out, const Common& c, const CLI::App& app) {
  const Built b = build(a, false);
  json j = state_summary(b);
  j["symmetric"] = b.cert.symmetric;
  json res = json::array();
  for (double r : b.cert.residual) res.push_back(num(r));
  j["residual"] = res;
  j["failing_generators"] = b.cert.failing;
  j["norm"] = num(b.state.amplitudes.norm());
  if (b.hamiltonian) j["cache_key"] = cache_key(*b.hamiltonian);
  std::string path = state_out;
  if (path.empty() && !c.out.empty()) path = (fs::path(c.out) / "state.bin").string();
  if (!path.empty()) {
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    save_state(path, b.state);
    j["state_file"] = path;
  }
  emit(j, c, "build_state", app);
  return b.cert.symmetric ? 0 : 1;
}

struct StringOrderArgs {
  std::string grid;
  std::string param;
  int anchor = 0;
  std::string elements;
  std::string fit;
  std::string rot_alpha = "pi/2";
};

int cmd_string_order(const StateArgs& a, const StringOrderArgs& so, const Common& c, const CLI::App& app) {
  std::string csv;
  if (!so.grid.empty()) {
    if (a.family.empty()) throw UsageError("--grid sweeps need --family");
    if (a.n_sites <= 0) throw UsageError("--N is required");
    SweepSpec spec;
    spec.base = hamiltonian_spec(a);
    const bool kg = spec.base.family == Family::KitaevGamma;
    const std::string param = so.param.empty() ? (kg ? "log-g" : "alpha") : so.param;
    if (param != "alpha" && param != "log-g") throw UsageError("--param must be alpha or log-g");
    spec.param = param == "alpha" ? SweepParam::Alpha : SweepParam::LogG;
    spec.grid = parse_grid(so.grid);
    spec.scheme = a.scheme;
    if (so.anchor > 0) spec.anchor = so.anchor;
    spec.solver = solver_options(a);
    spec.threads = c.threads;
    if (!so.elements.empty()) {
      const std::string name = a.scheme.empty() ? default_scheme_for(spec.base.family) : a.scheme;
      const SymmetryScheme s = load_scheme(name).instantiate_sites(a.n_sites);
      for (const auto& l : split(so.elements, ',')) spec.elements.push_back(s.parse_element(l));
    }
    const SweepResult r = sweep(spec);
    csv = r.csv();
    int failed = 0;
    for (const auto& p : r.points)
      if (!p.error.empty()) {
        std::cerr << "point " << p.param << ": " << p.error << "\n";
        ++failed;
      }
    std::cout << csv;
    if (!c.out.empty()) {
      write_file(fs::path(c.out) / "string_order.csv", csv);
      echo_config(c, app);
    }
    return failed ? 1 : 0;
  }

  Built b = build(a);
  const ValidatedScheme& vs = *b.vs;
  std::vector<int> blocks;
  if (so.anchor > 0) blocks.push_back(so.anchor);
  const StringOrderTable table = string_order_table(b.state, vs, blocks);
  if (!so.fit.empty()) {
    const GroupElement g = vs.scheme().parse_element(so.fit);
    const DecayFit f = decay_fit(string_order_table(b.state, vs), vs, g, parse_angle(so.rot_alpha), b.state.delta);
    json j = state_summary(b);
    j["element"] = vs.label(g);
    j["fitted"] = f.fitted;
    j["decaying"] = f.decaying;
    j["status"] = f.status;
    j["xi"] = num(f.xi);
    j["intercept"] = num(f.intercept);
    j["D"] = num(f.D);
    j["r2"] = num(f.r2);
    j["points"] = f.points;
    j["n_split"] = f.n_split;
    j["bound"] = num(f.bound);
    emit(j, c, "decay_fit", app);
    return f.fitted ? 0 : 1;
  }
  std::ostringstream os;
  os << "family,N,param,k,g,sigma\n" << std::setprecision(12);
  const std::string family = b.hamiltonian     ? family_name(b.hamiltonian->family)
                             : b.circuit       ? "circuit_" + a.circuit
                                               : std::string("state_file");
  const double param = b.hamiltonian ? (b.hamiltonian->family == Family::KitaevGamma ? a.log_g : b.hamiltonian->alpha)
                                     : 0.0;
  for (const auto& e : table.entries)
    os << family << ',' << b.state.n_sites << ',' << param << ',' << e.block << ',' << e.label << ',' << e.value
       << '\n';
  csv = os.str();
  std::cout << csv;
  if (!c.out.empty()) {
    write_file(fs::path(c.out) / "string_order.csv", csv);
    echo_config(c, app);
  }
  return 0;
}

struct RunArgs {
  std::string pattern;
  std::size_t shots = 10000;
  int records = 0;
  int verify = 0;
  std::string log;
  std::size_t cache_amplitudes = std::size_t{1} << 23;
  double z_max = -1;
  double abs_tol = -1;
};

struct Loaded {
  Built built;
  MeasurementPattern pattern;
};

Loaded load_run(StateArgs a, const RunArgs& r) {
  if (r.pattern.empty()) throw UsageError("--pattern is required");
  const std::string text = read_file(r.pattern);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("pattern file: ") + e.what());
  }
  if (a.scheme.empty() && doc.contains("scheme")) a.scheme = doc.at("scheme").get<std::string>();
  if (a.n_sites <= 0 && doc.contains("n_sites")) a.n_sites = doc.at("n_sites").get<int>();
  Loaded l{build(a), {}};
  const ValidatedScheme& vs = *l.built.vs;
  l.pattern = parse_pattern(text, vs);
  if (l.pattern.n_sites != vs.n_sites())
    throw std::invalid_argument("pattern is for " + std::to_string(l.pattern.n_sites) + " sites, state has " +
                                std::to_string(vs.n_sites()));
  check_pattern(vs, l.pattern, l.built.state.delta);
  return l;
}

json estimates_json(const ValidatedScheme& vs, const EstimateResult& est) {
  json out = json::array();
  for (const TEstimate& t : est.values)
    out.push_back({{"h", vs.label(t.h)}, {"mean", num(t.mean)}, {"std_error", num(t.std_error)}, {"shots", t.shots}});
  return out;
}

int cmd_run_mbqc(const StateArgs& a, const RunArgs& r, const Common& c, const CLI::App& app) {
  const Loaded l = load_run(a, r);
  const ValidatedScheme& vs = *l.built.vs;
  const std::uint64_t seed = c.resolve_seed();
  SamplerOptions opts;
  opts.cache_amplitudes = r.cache_amplitudes;
  const EstimateResult est = estimate_T(l.built.state, vs, l.pattern, r.shots, seed, c.threads, opts);
  json j = state_summary(l.built);
  j["pattern"] = json::parse(pattern_to_json(l.pattern, vs));
  j["seed"] = seed;
  j["shots"] = r.shots;
  j["values"] = estimates_json(vs, est);
  j["null_branches"] = est.null_branches;
  j["outside_assumptions"] = est.outside_assumptions;

  int status = 0;
  const int keep = std::max(r.records, r.verify);
  if (keep > 0 || !r.log.empty()) {
    const ShotSampler sampler(l.built.state, vs, l.pattern, opts);
    const std::size_t logged = r.log.empty() ? static_cast<std::size_t>(keep) : r.shots;
    std::ostringstream csv;
    const auto readout = readout_elements(vs, l.pattern);
    csv << "shot";
    for (int i = 0; i <= vs.n_bulk(); ++i) csv << ",s" << i;
    csv << ",s_right";
    for (GroupElement h : readout) csv << ",o_" << vs.label(h);
    csv << '\n';
    json recs = json::array();
    json recursion = {{"checked", 0}, {"consistent", true}, {"max_residual", 0.0}, {"messages", json::array()}};
    double max_res = 0.0;
    for (std::size_t s = 0; s < std::min<std::size_t>(logged, r.shots); ++s) {
      const OutcomeRecord rec = sampler.shot(seed, s);
      csv << s;
      for (auto m : rec.s) csv << ',' << m;
      csv << ',' << rec.s_right;
      for (int o : rec.o) csv << ',' << o;
      csv << '\n';
      if (static_cast<int>(s) < r.records) {
        json o;
        for (std::size_t e = 0; e < rec.readout.size(); ++e) o[vs.label(rec.readout[e])] = rec.o[e];
        recs.push_back({{"shot", s}, {"s", rec.s}, {"s_right", rec.s_right}, {"q", rec.q}, {"o", o}});
      }
      if (static_cast<int>(s) < r.verify) {
        const RecursionReport rep = verify_recursion(l.built.state, vs, l.pattern, rec);
        recursion["checked"] = recursion["checked"].get<int>() + 1;
        max_res = std::max(max_res, rep.max_residual);
        if (!rep.consistent) {
          recursion["consistent"] = false;
          for (const auto& m : rep.messages) recursion["messages"].push_back("shot " + std::to_string(s) + ": " + m);
          status = 1;
        }
      }
    }
    recursion["max_residual"] = num(max_res);
    if (r.records > 0) j["records"] = recs;
    if (r.verify > 0) j["recursion"] = recursion;
    if (!r.log.empty()) write_file(r.log, csv.str());
  }
  emit(j, c, "run_mbqc", app);
  return status;
}

int cmd_compare(const StateArgs& a, const RunArgs& r, const Common& c, const CLI::App& app) {
  const Loaded l = load_run(a, r);
  const ValidatedScheme& vs = *l.built.vs;
  const bool exact = l.built.state.delta_exact;
  const double z_max = r.z_max >= 0 ? r.z_max : (exact ? 3.0 : 5.0);
  const double abs_tol = r.abs_tol >= 0 ? r.abs_tol : (exact ? 0.0 : 0.05);
  const std::uint64_t seed = c.resolve_seed();
  SamplerOptions opts;
  opts.cache_amplitudes = r.cache_amplitudes;
  const EstimateResult est = estimate_T(l.built.state, vs, l.pattern, r.shots, seed, c.threads, opts);
  std::map<int, double> sig;
  json sig_json = json::array();
  for (int k : l.pattern.rotation_blocks()) {
    sig[k] = sigma(l.built.state, vs, k, l.pattern.at(k).axis);
    sig_json.push_back({{"block", k}, {"g", vs.label(l.pattern.at(k).axis)}, {"sigma", num(sig[k])}});
  }
  const LogicalModel model(vs);
  const Prediction pr = predict(model, *l.built.state.chi, l.pattern, sig);

  json j = state_summary(l.built);
  j["pattern"] = json::parse(pattern_to_json(l.pattern, vs));
  j["seed"] = seed;
  j["shots"] = r.shots;
  j["sigma"] = sig_json;
  j["z_max"] = num(z_max);
  j["abs_tol"] = num(abs_tol);
  j["null_branches"] = est.null_branches;
  j["outside_assumptions"] = est.outside_assumptions;
  json rows = json::array();
  bool ok = true;
  for (std::size_t e = 0; e < pr.readout.size(); ++e) {
    const TEstimate& t = est.values[e];
    const double diff = std::abs(t.mean - pr.value[e]);
    const bool pass = diff <= z_max * t.std_error + abs_tol + 1e-12;
    ok = ok && pass;
    const double z = t.std_error > 0 ? diff / t.std_error
                                     : (diff > 1e-9 ? std::numeric_limits<double>::infinity() : 0.0);
    rows.push_back({{"h", vs.label(t.h)},
                    {"mbqc_mean", num(t.mean)},
                    {"std_error", num(t.std_error)},
                    {"oracle", num(pr.value[e])},
                    {"oracle_tvec", num(pr.value_tvec[e])},
                    {"z", num(z)},
                    {"pass", pass}});
  }
  j["values"] = rows;
  j["pass"] = ok;
  emit(j, c, "compare_oracle", app);
  return ok ? 0 : 1;
}

struct SplitArgs {
  std::string scheme = "cluster_site_local";
  int n_sites = 0;
  std::string axis;
  std::string alphas = "pi/8,pi/4,pi/2";
  std::string sigmas = "0.25,0.5,0.9";
  std::string n_splits = "5,10,20,40,80";
};

int cmd_split(const SplitArgs& s, const Common& c, const CLI::App& app) {
  const ValidatedScheme vs = instantiate(load_scheme(s.scheme), s.n_sites);
  const LogicalModel model(vs);
  GroupElement axis = 0;
  if (!s.axis.empty()) {
    axis = vs.scheme().parse_element(s.axis);
  } else {
    for (int k = 1; k <= vs.n_bulk() && axis == 0; ++k)
      for (GroupElement g : vs.G(k).elements)
        if (g != 0 && (axis == 0 || g < axis)) axis = g;
  }
  if (axis == 0) throw std::invalid_argument("scheme has no rotation axis");
  json rows = json::array();
  bool ok = true;
  for (const auto& at : split(s.alphas, ','))
    for (const auto& st : split(s.sigmas, ',')) {
      const double alpha = parse_angle(at), sig = parse_angle(st);
      double prev = 0.0;
      int prev_n = 0;
      for (int n : parse_ints(s.n_splits)) {
        const SplitResult r = split_rotation(model, axis, alpha, sig, n);
        ok = ok && r.within_bound;
        json row = {{"alpha", num(alpha)},
                    {"sigma", num(sig)},
                    {"n_split", n},
                    {"lower", num(r.lower)},
                    {"upper", num(r.upper)},
                    {"bound", num(r.bound)},
                    {"choi_min_eig", num(r.choi_min_eig)},
                    {"within_bound", r.within_bound}};
        if (prev_n > 0 && r.lower > 0) row["ratio_to_previous"] = num(prev / r.lower);
        rows.push_back(row);
        prev = r.lower;
        prev_n = n;
      }
    }
  json j = {{"scheme", vs.scheme().name}, {"axis", vs.label(axis)}, {"dim", model.dim()}, {"rows", rows},
            {"pass", ok}};
  emit(j, c, "split_error", app);
  return ok ? 0 : 1;
}

int cmd_lie(const std::vector<std::string>& schemes, int n_sites, const Common& c, const CLI::App& app) {
  json rows = json::array();
  for (const auto& name : schemes.empty() ? builtin_scheme_names() : schemes) {
    const ValidatedScheme vs = instantiate(load_scheme(name), n_sites);
    const LogicalModel model(vs);
    const LieReport r = lie_closure(model);
    const int full = model.dim() * model.dim() - 1;
    rows.push_back({{"scheme", vs.scheme().name},
                    {"logical_dim", model.dim()},
                    {"dimension", r.dimension},
                    {"su_dimension", full},
                    {"universal", r.dimension == full},
                    {"generators", labels(vs, r.generators)},
                    {"rounds", r.rounds}});
  }
  emit({{"schemes", rows}}, c, "lie_dim", app);
  return 0;
}

struct WitnessArgs {
  std::size_t shots = 100000;
  std::string n_split = "auto";
  double target = 0.25;
};

int cmd_contextuality(const StateArgs& a, const WitnessArgs& w, const Common& c, const CLI::App& app) {
  const Built b = build(a);
  WitnessOptions opts;
  opts.shots = w.shots;
  opts.seed = c.resolve_seed();
  opts.target_bound = w.target;
  opts.delta = std::max(1, b.state.delta);
  opts.threads = c.threads;
  if (w.n_split != "auto") {
    try {
      opts.n_split = std::stoi(w.n_split);
    } catch (const std::exception&) {
      throw UsageError("--nsplit must be an integer or auto");
    }
    if (*opts.n_split < 1) throw UsageError("--nsplit must be positive");
  }
  const WitnessReport r = run_witness(b.state, *b.vs, opts);
  json j = state_summary(b);
  j["seed"] = opts.seed;
  j["shots"] = opts.shots;
  json ins = json::array();
  for (const WitnessInput& in : r.inputs)
    ins.push_back({{"a", in.a},
                   {"b", in.b},
                   {"target", in.target},
                   {"success", num(in.success)},
                   {"std_error", num(in.std_error)},
                   {"predicted", num(in.predicted)}});
  j["inputs"] = ins;
  j["truth_table"] = r.truth_table;
  j["negated"] = r.negated;
  j["nonlinear"] = r.nonlinear;
  j["worst"] = num(r.worst);
  j["worst_std_error"] = num(r.worst_std_error);
  j["contextual"] = r.contextual;
  j["n_split"] = r.n_split;
  j["sigma_hat"] = num(r.sigma_hat);
  j["total_bound"] = num(r.total_bound);
  j["blocks_consumed"] = r.blocks_consumed;
  j["last_block"] = r.last_block;
  if (!r.note.empty()) j["note"] = r.note;
  emit(j, c, "contextuality", app);
  return 0;
}

struct FigureArgs {
  int cluster_n = 13;
  int qca_n = 10;
  int kg_n = 12;
  int points = 21;
};

std::vector<GroupElement> elements_of(const std::string& scheme, int n_sites, const std::vector<std::string>& names) {
  const SymmetryScheme s = load_scheme(scheme).instantiate_sites(n_sites);
  std::vector<GroupElement> out;
  for (const auto& n : names) out.push_back(s.parse_element(n));
  return out;
}

int cmd_regen(const FigureArgs& f, const Common& c, const CLI::App& app) {
  const fs::path dir = c.out.empty() ? fs::path("figures") : fs::path(c.out);
  json files = json::array();
  int failed = 0;
  auto run = [&](SweepSpec spec, const std::string& file) {
    spec.threads = c.threads;
    const SweepResult r = sweep(spec);
    for (const auto& p : r.points)
      if (!p.error.empty()) {
        std::cerr << file << " point " << p.param << ": " << p.error << "\n";
        ++failed;
      }
    write_file(dir / file, r.csv());
    files.push_back({{"file", file}, {"family", r.family}, {"N", r.n_sites}, {"points", r.points.size()}});
  };
  std::vector<double> alpha_grid;
  for (int i = 0; i < f.points; ++i) alpha_grid.push_back(f.points == 1 ? 0.0 : 0.5 * kPi * i / (f.points - 1));

  SweepSpec cl;
  cl.base.family = Family::ClusterField;
  cl.base.n_sites = f.cluster_n;
  cl.grid = alpha_grid;
  cl.scheme = "cluster_block2";
  cl.elements = elements_of(cl.scheme, f.cluster_n, {"g01", "g10"});
  run(cl, "cluster_sigma.csv");

  SweepSpec q;
  q.base.family = Family::QcaField;
  q.base.n_sites = f.qca_n;
  q.grid = alpha_grid;
  q.scheme = "qca_block6";
  q.elements = elements_of(q.scheme, f.qca_n, {"g1", "g2", "g3", "g4", "g1*g3", "g2*g4"});
  run(q, "qca_sigma.csv");

  for (const auto& [end, file] : {std::pair{ChainEnd::XEnd, "kg_x_end.csv"}, std::pair{ChainEnd::YEnd, "kg_y_end.csv"}}) {
    SweepSpec k;
    k.base.family = Family::KitaevGamma;
    k.base.n_sites = f.kg_n;
    k.base.phi = -0.15 * kPi;
    k.base.end = end;
    k.param = SweepParam::LogG;
    k.grid = parse_grid("-0.6:0.6:13");
    run(k, file);
  }
  json j = {{"directory", dir.string()}, {"files", files}, {"failed_points", failed}};
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  write_file(dir / "figures.json", text);
  write_file(dir / "config.toml", effective_config(app));
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MBQC simulator and verification suite for symmetric spin chains"};
  app.set_config("--config", "", "TOML config file; flags take precedence");
  app.require_subcommand(1);

  Common common;
  StateArgs state;

  std::string v_scheme;
  int v_n = 0;
  auto* validate_cmd = app.add_subcommand("validate", "Validate a scheme and print H, H', admissible axes and kappa");
  validate_cmd->add_option("--scheme", v_scheme, "Scheme name or file")->required();
  validate_cmd->add_option("--N", v_n, "Number of sites (default from the scheme)");

  std::string state_out;
  auto* build_cmd = app.add_subcommand("build-state", "Build a resource state, certify it and store it");
  add_state_options(build_cmd, state);
  add_common_options(build_cmd, common, false);
  build_cmd->add_option("--state-out", state_out, "Binary state file");

  StringOrderArgs so;
  auto* so_cmd = app.add_subcommand("string-order", "String order table of a state, or a parameter sweep");
  add_state_options(so_cmd, state);
  add_common_options(so_cmd, common, false);
  so_cmd->add_option("--grid", so.grid, "Sweep grid a:b:n or a comma list");
  so_cmd->add_option("--param", so.param, "Swept parameter: alpha or log-g");
  so_cmd->add_option("--anchor", so.anchor, "Bulk block of the strings")->check(CLI::PositiveNumber);
  so_cmd->add_option("--elements", so.elements, "Comma-separated group elements (sweeps)");
  so_cmd->add_option("--fit", so.fit, "Fit the decay of this element along the chain");
  so_cmd->add_option("--rot-alpha", so.rot_alpha, "Rotation angle used in the fitted bound")->capture_default_str();

  RunArgs run;
  auto add_run = [&](CLI::App* sub) {
    add_state_options(sub, state);
    add_common_options(sub, common, true);
    sub->add_option("--pattern", run.pattern, "Measurement pattern file (JSON)")->required();
    sub->add_option("--shots", run.shots, "Shots")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--cache-amplitudes", run.cache_amplitudes, "Sampler memo budget in amplitudes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };
  auto* run_cmd = app.add_subcommand("run-mbqc", "Sample a measurement pattern");
  add_run(run_cmd);
  run_cmd->add_option("--records", run.records, "Include the first K outcome records")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--verify", run.verify, "Replay the first K shots through the logical recursion")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--log", run.log, "Full outcome log as CSV");
  auto* cmp_cmd = app.add_subcommand("compare-oracle", "Compare sampled readouts with the logical-channel prediction");
  add_run(cmp_cmd);
  cmp_cmd->add_option("--z-max", run.z_max, "Allowed standard errors (default 3 exact, 5 ground states)");
  cmp_cmd->add_option("--abs-tol", run.abs_tol, "Extra absolute tolerance (default 0 exact, 0.05 ground states)");

  SplitArgs sp;
  auto* split_cmd = app.add_subcommand("split-error", "Choi bounds on split rotations against the analytic bound");
  add_common_options(split_cmd, common, false);
  split_cmd->add_option("--scheme", sp.scheme, "Scheme name or file")->capture_default_str();
  split_cmd->add_option("--N", sp.n_sites, "Number of sites (default from the scheme)");
  split_cmd->add_option("--axis", sp.axis, "Rotation axis label (default smallest admissible)");
  split_cmd->add_option("--alpha", sp.alphas, "Target angles")->capture_default_str();
  split_cmd->add_option("--sigma", sp.sigmas, "String order values")->capture_default_str();
  split_cmd->add_option("--nsplit", sp.n_splits, "Split counts")->capture_default_str();

  std::vector<std::string> lie_schemes;
  int lie_n = 0;
  auto* lie_cmd = app.add_subcommand("lie-dim", "Dimension of the Lie algebra of implementable rotations");
  add_common_options(lie_cmd, common, false);
  lie_cmd->add_option("--scheme", lie_schemes, "Scheme names or files (default all built-in)");
  lie_cmd->add_option("--N", lie_n, "Number of sites (default from the scheme)");

  WitnessArgs wa;
  auto* ctx_cmd = app.add_subcommand("contextuality", "OR-gate contextuality witness");
  add_state_options(ctx_cmd, state);
  add_common_options(ctx_cmd, common, true);
  ctx_cmd->add_option("--shots", wa.shots, "Shots per input")->check(CLI::PositiveNumber)->capture_default_str();
  ctx_cmd->add_option("--nsplit", wa.n_split, "Split count or auto")->capture_default_str();
  ctx_cmd->add_option("--target-bound", wa.target, "Target total splitting bound for auto")->capture_default_str();

  FigureArgs fa;
  auto* fig_cmd = app.add_subcommand("regen-figures", "Regenerate the figure CSV bundle");
  add_common_options(fig_cmd, common, false);
  fig_cmd->add_option("--cluster-N", fa.cluster_n, "Cluster chain length")->capture_default_str();
  fig_cmd->add_option("--qca-N", fa.qca_n, "QCA chain length")->capture_default_str();
  fig_cmd->add_option("--kg-N", fa.kg_n, "Kitaev-Gamma chain length")->capture_default_str();
  fig_cmd->add_option("--points", fa.points, "Alpha grid points")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*validate_cmd) return cmd_validate(v_scheme, v_n);
    if (*build_cmd) return cmd_build_state(state, state_out, common, app);
    if (*so_cmd) return cmd_string_order(state, so, common, app);
    if (*run_cmd) return cmd_run_mbqc(state, run, common, app);
    if (*cmp_cmd) return cmd_compare(state, run, common, app);
    if (*split_cmd) return cmd_split(sp, common, app);
    if (*lie_cmd) return cmd_lie(lie_schemes, lie_n, common, app);
    if (*ctx_cmd) return cmd_contextuality(state, wa, common, app);
    if (*fig_cmd) return cmd_regen(fa, common, app);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cout << json{{"status", "error"}, {"message", e.what()}}.dump(2) << "\n";
    return 1;
  }
  return 2;
}
