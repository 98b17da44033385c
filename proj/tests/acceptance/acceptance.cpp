// Acceptance run: one PASS/FAIL line per criterion at fixed tolerances and seeds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mbqc/mbqc.hpp"
#include "mbqc/oracle.hpp"
#include "mbqc/scheme_io.hpp"
#include "mbqc/string_order.hpp"
#include "mbqc/witness.hpp"

using namespace mbqc;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kSeed = 20240601;

int threads() { return std::max(1U, std::thread::hardware_concurrency()); }

ValidatedScheme make(const std::string& name, int n) { return validate_or_throw(builtin_scheme(name).instantiate_sites(n)); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::set<std::string> labels_of(const ValidatedScheme& vs, const Subgroup& s) {
  std::set<std::string> out;
  for (GroupElement g : s.elements) out.insert(vs.label(g));
  return out;
}

std::vector<std::string> vR_row(const ValidatedScheme& vs, int k) {
  std::vector<std::string> out;
  const auto all = derive_vR(vs.scheme());
  for (const PauliOperator& p : all[static_cast<std::size_t>(k - 1)]) out.push_back(p.str());
  return out;
}

const std::vector<std::pair<std::string, int>> kMainSchemes = {
    {"cluster_block2", 13}, {"cluster_site_local", 11}, {"kitaev_gamma", 12}, {"qca_block6", 16}, {"qca_site_local", 16}};

ResourceState ground(HamiltonianSpec h, const ValidatedScheme& vs) {
  ResourceState st = ground_state(h);
  certify_in_place(st, vs, 1e-7);
  return st;
}

ResourceState exact(const CircuitSpec& spec, const ValidatedScheme& vs) {
  ResourceState st = build_circuit_state(spec);
  certify_in_place(st, vs);
  st.delta = entanglement_range(spec, vs.scheme().partition);
  st.delta_exact = true;
  return st;
}

// ---------------------------------------------------------------- 1

void scheme_values(Outcome& o) {
  for (const auto& [name, n] : kMainSchemes) o.require(validate(builtin_scheme(name).instantiate_sites(n)).ok(), name);

  const ValidatedScheme cb = make("cluster_block2", 13);
  for (int k = 1; k <= cb.n_bulk(); ++k) {
    o.require(vR_row(cb, k) == std::vector<std::string>{"ZX", "IZ"}, "cluster block-2 vR");
    o.require(cb.G(k).order() == 4, "cluster block-2 axes");
  }
  o.require(labels_of(cb, cb.H()) == std::set<std::string>{"e", "g10"}, "cluster block-2 H");

  const ValidatedScheme cs = make("cluster_site_local", 11);
  for (int k = 1; k <= cs.n_bulk(); ++k) {
    const bool odd = k % 2 == 1;
    o.require(vR_row(cs, k) == (odd ? std::vector<std::string>{"X", "Z"} : std::vector<std::string>{"Z", "X"}),
              "cluster site-local vR");
    o.require(labels_of(cs, cs.G(k)) == std::set<std::string>{"e", odd ? "g10" : "g01"}, "cluster site-local axes");
  }
  o.require(labels_of(cs, cs.H()) == std::set<std::string>{"e", "g10"}, "cluster site-local H");

  const ValidatedScheme kg = make("kitaev_gamma", 12);
  for (int k = 1; k <= kg.n_bulk(); ++k) o.require(vR_row(kg, k) == std::vector<std::string>{"IX", "IZ"}, "KG vR");
  o.require(labels_of(kg, kg.H()) == std::set<std::string>{"e", "Rx"}, "KG H");

  const ValidatedScheme qb = make("qca_block6", 16);
  for (int k = 1; k <= qb.n_bulk(); ++k) {
    o.require(vR_row(qb, k) == std::vector<std::string>{"IIIIIZ", "IIIIZX", "IIIZXI", "IIZXII"}, "QCA block-6 vR");
    o.require(qb.G(k).order() == 16, "QCA block-6 axes");
  }
  o.require(labels_of(qb, qb.H()) == std::set<std::string>{"e", "g1", "g3", "g1*g3"}, "QCA block-6 H");

  const ValidatedScheme qs = make("qca_site_local", 16);
  const std::vector<std::vector<std::string>> vR = {{"X", "Z", "I", "I"}, {"Z", "I", "I", "X"}, {"I", "I", "X", "Z"},
                                                    {"I", "X", "Z", "X"}, {"X", "Z", "X", "I"}, {"Z", "X", "I", "I"}};
  const std::vector<std::string> axis = {"g2*g4", "g1*g3", "g4", "g3", "g2", "g1"};
  for (int k = 1; k <= qs.n_bulk(); ++k) {
    const auto r = static_cast<std::size_t>((k - 1) % 6);
    o.require(vR_row(qs, k) == vR[r], "QCA site-local vR");
    o.require(labels_of(qs, qs.G(k)) == std::set<std::string>{"e", axis[r]}, "QCA site-local axes");
  }
  o.require(labels_of(qs, qs.H()) == std::set<std::string>{"e", "g1", "g3", "g1*g3"}, "QCA site-local H");
  o.detail << "5 schemes validated, right images, H and axis groups compared";
}

// ---------------------------------------------------------------- 2

void algebra(Outcome& o) {
  std::size_t checks = 0;
  for (const auto& [name, n] : kMainSchemes) {
    const ValidatedScheme vs = make(name, n);
    const AlgebraReport r = check_algebra(vs);
    checks += r.checks;
    o.require(r.ok(), name + " relations");
    for (GroupElement g = 0; g < vs.group_size(); ++g)
      for (GroupElement h = 0; h < vs.group_size(); ++h) {
        ++checks;
        o.require(vs.U(g) * vs.U(h) == vs.U(g ^ h), name + " U linearity");
      }
  }
  o.detail << checks << " relations checked";
}

// ---------------------------------------------------------------- 3

/// First alpha where the series drops below 0.5, linearly interpolated.
double crossing(const std::vector<double>& grid, const std::vector<double>& s) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i - 1] >= 0.5 && s[i] < 0.5) return grid[i - 1] + (s[i - 1] - 0.5) / (s[i - 1] - s[i]) * (grid[i] - grid[i - 1]);
  return NAN;
}

void string_anchors(Outcome& o) {
  const int n = 13;
  const ValidatedScheme vs = make("cluster_block2", n);
  const ResourceState cl = exact(CircuitSpec::cluster_from_plus(n), vs);
  double worst_one = 0;
  for (const auto& e : string_order_table(cl, vs).entries) worst_one = std::max(worst_one, std::abs(e.value - 1));
  o.require(worst_one < 1e-10, "cluster state sigma = 1");

  HamiltonianSpec h;
  h.family = Family::ClusterField;
  h.n_sites = n;
  h.alpha = kPi / 2;
  double worst_zero = 0;
  for (const auto& e : string_order_table(ground(h, vs), vs).entries) worst_zero = std::max(worst_zero, std::abs(e.value));
  o.require(worst_zero < 1e-10, "trivial point sigma = 0");

  SweepSpec s;
  s.base = h;
  s.scheme = "cluster_block2";
  s.threads = threads();
  for (int i = 0; i <= 20; ++i) s.grid.push_back(kPi / 2 * i / 20);
  const SweepResult r = sweep(s);
  o.detail << "|sigma-1| " << worst_one << ", |sigma| at pi/2 " << worst_zero;
  for (const char* label : {"g01", "g10", "g11"}) {
    const auto v = r.series(label);
    if (v.empty() || std::isnan(v.front())) continue;
    bool monotone = true;
    for (std::size_t i = 1; i < v.size(); ++i) monotone = monotone && v[i] <= v[i - 1] + 0.02;
    const double c = crossing(s.grid, v);
    o.detail << ", " << label << " crosses 0.5 at " << c / kPi << " pi";
    o.require(monotone, std::string(label) + " nonincreasing");
    o.require(c > 0.15 * kPi && c < 0.35 * kPi, std::string(label) + " crossing inside (0.15pi, 0.35pi)");
  }
}

// ---------------------------------------------------------------- 4

void kitaev_gamma_trend(Outcome& o) {
  for (ChainEnd end : {ChainEnd::XEnd, ChainEnd::YEnd}) {
    SweepSpec s;
    s.base.family = Family::KitaevGamma;
    s.base.n_sites = 12;
    s.base.phi = -0.15 * kPi;
    s.base.end = end;
    s.param = SweepParam::LogG;
    s.grid = {-0.4, 0.4};
    s.threads = threads();
    const SweepResult r = sweep(s);
    const bool x = end == ChainEnd::XEnd;
    const std::string tag = x ? "x-end" : "y-end";
    for (const char* label : {"Ox", "Oz"}) {
      const auto v = r.series(label);
      // ordered side: log g = -0.4 for the x end, +0.4 for the y end
      const double strong = std::abs(x ? v[0] : v[1]), weak = std::abs(x ? v[1] : v[0]);
      o.detail << tag << " |" << label << "| " << strong << " -> " << weak << "; ";
      o.require(strong > 0.1 && weak < strong / 2, tag + " " + label);
    }
  }
}

// ---------------------------------------------------------------- 5

MeasurementPattern random_pattern(const ValidatedScheme& vs, int delta, std::mt19937_64& rng) {
  MeasurementPattern p = MeasurementPattern::wire(vs);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(2 * delta));
  while (k <= vs.n_bulk()) {
    std::vector<GroupElement> axes;
    for (GroupElement g : vs.G(k).elements)
      if (g != 0) axes.push_back(g);
    if (!axes.empty() && rng() % 3 != 0) {
      p.at(k).axis = axes[rng() % axes.size()];
      p.at(k).angle = angle(rng);
      k += 2 * delta + static_cast<int>(rng() % 2);
    } else {
      ++k;
    }
  }
  return p;
}

void oracle_equivalence(Outcome& o) {
  struct Case {
    const char* scheme;
    int n;
    CircuitSpec circuit;
  };
  const std::vector<Case> cases = {{"cluster_site_local", 11, CircuitSpec::cluster_from_plus(11)},
                                   {"cluster_block2", 13, CircuitSpec::cluster_from_plus(13)},
                                   {"qca_site_local", 16, CircuitSpec::qca(16, 2)},
                                   {"qca_block6", 16, CircuitSpec::qca(16, 2)}};
  std::mt19937_64 rng(kSeed);
  for (const Case& c : cases) {
    const ValidatedScheme vs = make(c.scheme, c.n);
    const ResourceState st = exact(c.circuit, vs);
    const LogicalModel model(vs);
    double max_z = 0, max_path = 0;
    std::size_t estimates = 0;
    for (int t = 0; t < 20; ++t) {
      const MeasurementPattern p = random_pattern(vs, st.delta, rng);
      o.require(pattern_problems(vs, p, st.delta).empty(), "pattern spacing");
      std::map<int, double> sig;
      for (int k : p.rotation_blocks()) sig[k] = sigma(st, vs, k, p.at(k).axis);
      const Prediction pr = predict(model, *st.chi, p, sig);
      const EstimateResult est = estimate_T(st, vs, p, 10000, kSeed + static_cast<std::uint64_t>(t), threads());
      for (std::size_t i = 0; i < pr.readout.size(); ++i) {
        max_path = std::max(max_path, std::abs(pr.value[i] - pr.value_tvec[i]));
        const TEstimate& e = est.values[i];
        const double diff = std::abs(e.mean - pr.value[i]);
        if (e.std_error > 0) max_z = std::max(max_z, diff / e.std_error);
        o.require(diff <= 3 * e.std_error + 1e-9, std::string(c.scheme) + " estimate within 3 standard errors");
        ++estimates;
      }
    }
    o.require(max_path < 1e-12, std::string(c.scheme) + " transfer matrix vs density matrix");
    o.detail << c.scheme << " N=" << c.n << ": " << estimates << " estimates, max z " << max_z << ", path diff "
             << max_path << "; ";
  }
}

// ---------------------------------------------------------------- 6

void lie_and_splitting(Outcome& o) {
  const std::map<std::string, int> want = {{"cluster_block2", 3}, {"cluster_site_local", 3}, {"kitaev_gamma", 3},
                                           {"qca_block6", 15},    {"qca_site_local", 15},     {"ising", 1}};
  for (const auto& [name, dim] : want) {
    const SchemeTemplate& t = builtin_scheme(name);
    const ValidatedScheme vs = validate_or_throw(t.instantiate_sites(*t.default_sites));
    const int got = lie_closure(LogicalModel(vs)).dimension;
    o.require(got == dim, name + " Lie dimension " + std::to_string(got));
  }
  o.detail << "Lie dimensions checked; ";

  const ValidatedScheme vs = make("cluster_site_local", 11);
  const LogicalModel model(vs);
  double lo = 1e9, hi = 0;
  std::string worst;
  for (double alpha : {kPi / 8, kPi / 4, kPi / 2})
    for (double sig : {0.25, 0.5, 0.9}) {
      double prev = 0;
      for (int n : {5, 10, 20, 40, 80}) {
        const SplitResult r = split_rotation(model, 0b01, alpha, sig, n);
        o.require(r.within_bound, "Choi lower bound exceeds the analytic bound");
        if (n >= 20) {
          const double ratio = prev / r.lower;
          if (ratio < lo) {
            std::ostringstream w;
            w << "alpha " << alpha / kPi << "pi sigma " << sig << " N " << n / 2 << "->" << n;
            worst = w.str();
          }
          lo = std::min(lo, ratio);
          hi = std::max(hi, ratio);
          o.require(ratio >= 1.6 && ratio <= 2.4, "ratio " + std::to_string(ratio) + " outside [1.6, 2.4]");
        }
        prev = r.lower;
      }
    }
  o.detail << "error ratios in [" << lo << ", " << hi << "], smallest at " << worst;
}

// ---------------------------------------------------------------- 7

void ising_nullity(Outcome& o) {
  const int n = 9;
  const ValidatedScheme vs = make("ising", n);
  for (int k = 1; k <= vs.n_bulk(); ++k)
    for (GroupElement g : vs.G(k).elements)
      for (int j = 0; j < vs.m(); ++j)
        for (int q = 0; q < 2; ++q) {
          const CMat a = measured_observable(vs, k, j, q, {g, 0.0}).to_dense();
          const CMat b = measured_observable(vs, k, j, q, {g, 1.3}).to_dense();
          o.require((a - b).norm() < 1e-12, "measured observable depends on the angle");
        }
  o.require(lie_closure(LogicalModel(vs)).dimension == 1, "Lie dimension");

  HamiltonianSpec h;
  h.family = Family::IsingTransverse;
  h.n_sites = n;
  h.alpha = 0.2;
  const ResourceState st = ground(h, vs);
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  double worst = 0;
  for (int t = 0; t < 5; ++t) {
    MeasurementPattern p = MeasurementPattern::wire(vs);
    for (int k = 1; k <= vs.n_bulk(); ++k) p.at(k) = {vs.G(k).elements.back(), angle(rng)};
    p.spacing_override = true;
    for (const TEstimate& e : estimate_T(st, vs, p, 200, kSeed + static_cast<std::uint64_t>(t)).values)
      worst = std::max(worst, e.std_error + (1 - std::abs(e.mean)));
  }
  o.require(worst < 1e-12, "readout is not deterministic");
  o.detail << "angle-independent observables, Lie dimension 1, readout deviation " << worst;
}

// ---------------------------------------------------------------- 8

void contextuality(Outcome& o) {
  {
    const ValidatedScheme vs = make("cluster_site_local", 11);
    const ResourceState st = exact(CircuitSpec::cluster_from_plus(11), vs);
    WitnessOptions w;
    w.shots = 10000;
    w.seed = kSeed;
    w.delta = std::max(1, st.delta);
    w.threads = threads();
    const WitnessReport r = run_witness(st, vs, w);
    double lowest = 1;
    for (const WitnessInput& in : r.inputs) lowest = std::min(lowest, in.success);
    o.require(lowest == 1.0, "exact state success below 1");
    o.require(r.nonlinear, "exact state table is affine");
    o.detail << "exact N=11 lowest success " << lowest << "; ";
  }
  const int n = 13;
  const ValidatedScheme vs = make("cluster_site_local", n);
  HamiltonianSpec h;
  h.family = Family::ClusterField;
  h.n_sites = n;
  h.alpha = 0.1 * kPi;
  const ResourceState st = ground(h, vs);
  WitnessOptions w;
  w.shots = 100000;
  w.seed = kSeed;
  w.delta = 1;
  w.threads = threads();
  const WitnessReport r = run_witness(st, vs, w);
  o.require(r.contextual, "worst success minus 3 standard errors not above 3/4");
  o.detail << "alpha 0.1pi N=13 worst " << r.worst << " +- " << r.worst_std_error << " (n_split " << r.n_split
           << ", sigma " << r.sigma_hat << ")";
  if (!r.note.empty()) o.detail << ", " << r.note;
}

// ---------------------------------------------------------------- 9

void trivial_decay(Outcome& o) {
  std::map<std::string, std::vector<double>> bounds;
  for (int n : {13, 17}) {
    const ValidatedScheme vs = make("cluster_block2", n);
    HamiltonianSpec h;
    h.family = Family::ClusterField;
    h.n_sites = n;
    h.alpha = 0.35 * kPi;
    const ResourceState st = ground(h, vs);
    const StringOrderTable t = string_order_table(st, vs);
    for (const char* label : {"g01", "g10"}) {
      const DecayFit f = decay_fit(t, vs, vs.scheme().parse_element(label), kPi / 2, 1);
      o.require(f.fitted && std::isfinite(f.xi) && f.xi > 0, std::string(label) + " fit");
      bounds[label].push_back(f.bound);
      o.detail << label << " N=" << n << " xi " << f.xi << " bound " << f.bound << "; ";
    }
  }
  for (const auto& [label, b] : bounds) o.require(b[1] < b[0], label + " bound does not decrease");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"scheme values", scheme_values},
      {"algebra relations", algebra},
      {"string order anchors", string_anchors},
      {"Kitaev-Gamma trend", kitaev_gamma_trend},
      {"oracle equivalence", oracle_equivalence},
      {"Lie closure and splitting", lie_and_splitting},
      {"Ising nullity", ising_nullity},
      {"contextuality witness", contextuality},
      {"trivial-regime decay", trivial_decay},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu %s: %s (%.1f s) %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
