#include "mbqc/string_order.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mbqc/scheme_io.hpp"

namespace mbqc {

const StringOrderEntry* StringOrderTable::find(int block, GroupElement g) const {
  for (const auto& e : entries)
    if (e.block == block && e.g == g) return &e;
  return nullptr;
}

cplx sigma_raw(const CVec& state, const ValidatedScheme& vs, int k, GroupElement g) {
  return vs.R(k, g).expectation(state);
}

double sigma(const ResourceState& state, const ValidatedScheme& vs, int k, GroupElement g) {
  if (!state.chi) throw std::invalid_argument("state has no symmetry certificate");
  if (state.n_sites != vs.n_sites()) throw std::invalid_argument("state and scheme sizes differ");
  if (k < 1 || k > vs.n_bulk()) throw std::out_of_range("string order block out of range");
  if (!vs.G(k).contains(g)) throw std::invalid_argument(vs.label(g) + " is not an admissible axis on this block");
  return sigma_raw(state.amplitudes, vs, k, g).real();
}

StringOrderTable string_order_table(const ResourceState& state, const ValidatedScheme& vs,
                                    const std::vector<int>& blocks) {
  if (!state.chi) throw std::invalid_argument("state has no symmetry certificate");
  StringOrderTable t;
  t.scheme = vs.scheme().name;
  t.provenance = state.provenance;
  std::vector<int> ks = blocks;
  if (ks.empty())
    for (int k = 1; k <= vs.n_bulk(); ++k) ks.push_back(k);
  for (int k : ks) {
    for (GroupElement g : vs.G(k).elements) {
      if (g == 0) continue;
      const PauliOperator r = vs.R(k, g);
      const cplx v = r.expectation(state.amplitudes);
      t.entries.push_back({k, g, vs.label(g), v.real(), v.imag(), r.str()});
    }
  }
  return t;
}

int anchor_block(const ValidatedScheme& vs) { return std::max(1, vs.n_bulk() / 4); }

double pauli_string_order(const CVec& state, int n_sites, char axis, int first, int last) {
  if (first < 0 || last >= n_sites || first > last) throw std::out_of_range("string range");
  PauliOperator p(n_sites);
  for (int s = first; s <= last; ++s) p = p * PauliOperator::single(n_sites, s, axis);
  return p.expectation(state).real();
}

// ---------------------------------------------------------------- sweeps

std::string SweepResult::csv() const {
  std::ostringstream os;
  os << "family,N,param,k,g,sigma\n" << std::setprecision(12);
  for (const auto& p : points)
    for (const auto& e : p.values) os << family << ',' << n_sites << ',' << p.param << ',' << e.block << ',' << e.label << ',' << e.value << '\n';
  return os.str();
}

std::vector<double> SweepResult::series(const std::string& label) const {
  std::vector<double> out;
  for (const auto& p : points) {
    double v = std::numeric_limits<double>::quiet_NaN();
    for (const auto& e : p.values)
      if (e.label == label) v = e.value;
    out.push_back(v);
  }
  return out;
}

SweepResult sweep(const SweepSpec& spec) {
  SweepResult res;
  res.family = family_name(spec.base.family);
  res.n_sites = spec.base.n_sites;
  const std::string scheme_name = spec.scheme.empty() ? default_scheme_for(spec.base.family) : spec.scheme;
  const ValidatedScheme vs = validate_or_throw(resolve_scheme(scheme_name).instantiate_sites(spec.base.n_sites));
  const int k = spec.anchor.value_or(anchor_block(vs));
  std::vector<GroupElement> elems = spec.elements;
  if (elems.empty())
    for (GroupElement g : vs.G(k).elements)
      if (g != 0) elems.push_back(g);

  auto solve = [&](double x) {
    SweepPoint pt;
    pt.param = x;
    HamiltonianSpec h = spec.base;
    if (spec.param == SweepParam::Alpha)
      h.alpha = x;
    else
      h.g_ratio = std::exp(x);
    try {
      ResourceState st = ground_state(h, spec.solver);
      const bool kg = h.family == Family::KitaevGamma;
      if (kg) {
        const int n = h.n_sites;
        for (char a : {'X', 'Y', 'Z'})
          pt.values.push_back({n / 2 + 1, 0, std::string("O") + static_cast<char>(a - 'A' + 'a'),
                               pauli_string_order(st.amplitudes, n, a, n / 2, n - 1), 0.0, ""});
      }
      if (!kg || h.frame == Frame::Rotated) {
        certify_in_place(st, vs, 1e-7);
        for (GroupElement g : elems) {
          const PauliOperator r = vs.R(k, g);
          const cplx v = r.expectation(st.amplitudes);
          pt.values.push_back({k, g, vs.label(g), v.real(), v.imag(), r.str()});
        }
      }
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    return pt;
  };

  res.points.resize(spec.grid.size());
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(spec.threads, 1)), 1,
                                                      std::max<std::size_t>(spec.grid.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < spec.grid.size(); ++i) res.points[i] = solve(spec.grid[i]);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < spec.grid.size(); i += workers) res.points[i] = solve(spec.grid[i]);
      });
    for (auto& t : pool) t.join();
  }
  return res;
}

// ---------------------------------------------------------------- decay

DecayFit decay_fit(const std::vector<double>& distance, const std::vector<double>& value, double alpha, int n_split,
                   int delta) {
  if (distance.size() != value.size()) throw std::invalid_argument("distance and value lengths differ");
  DecayFit f;
  f.n_split = n_split;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (std::abs(value[i]) > 1e-13) {
      xs.push_back(distance[i]);
      ys.push_back(std::log(std::abs(value[i])));
    }
  }
  f.points = static_cast<int>(xs.size());
  if (xs.empty()) {
    f.status = "below floor";
    return f;
  }
  if (xs.size() < 2) {
    f.status = "too few points above floor";
    return f;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0) {
    f.status = "no distance variation";
    return f;
  }
  const double slope = sxy / sxx;
  f.intercept = my - slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.D = *std::min_element(xs.begin(), xs.end());
  f.fitted = true;
  if (slope >= 0) {
    f.xi = std::numeric_limits<double>::infinity();
    f.status = "no decay";
    return f;
  }
  f.xi = -1.0 / slope;
  const double span = *std::max_element(xs.begin(), xs.end());
  f.decaying = f.xi < span;
  f.status = f.decaying ? "ok" : "correlation length exceeds chain";
  if (n_split > 0 && delta > 0)
    f.bound = (1.0 / n_split) * std::abs(alpha) * std::exp(f.intercept - f.D / f.xi) /
              (1.0 - std::exp(-2.0 * delta / f.xi));
  return f;
}

DecayFit decay_fit(const StringOrderTable& table, const ValidatedScheme& vs, GroupElement g, double alpha, int delta,
                   std::optional<int> n_split) {
  if (delta < 1) throw std::invalid_argument("entanglement range must be at least one block");
  std::vector<double> d, v;
  // Strings whose left end sits in the left half feel the left boundary; keep the right half.
  const int first = (vs.n_bulk() + 2) / 2;
  for (const auto& e : table.entries) {
    if (e.g != g || e.block < first) continue;
    d.push_back(static_cast<double>(vs.n_bulk() + 1 - e.block));
    v.push_back(e.value);
  }
  const int slots = n_split.value_or((vs.n_bulk() + 2 * delta - 1) / (2 * delta));
  return decay_fit(d, v, alpha, slots, delta);
}

}  // namespace mbqc
