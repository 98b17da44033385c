#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "mbqc/scheme_io.hpp"
#include "mbqc/state.hpp"

namespace mbqc {

namespace {

// Pauli string from (site, letter) pairs on n sites.
PauliOperator letters(int n, std::initializer_list<std::pair<int, char>> ps) {
  PauliOperator p(n);
  for (const auto& [s, c] : ps) p = p * PauliOperator::single(n, s, c);
  return p;
}

char axis_letter(int a) { return "XYZ"[a]; }

// Kitaev-Gamma bond b (1-based, global numbering along the x-first pattern).
// Unrotated frame: x-bonds on odd b, y-bonds on even b.
// Rotated frame: Kitaev axis cycles x, z, y with period three.
void add_kg_bond(PauliSum& h, int n, int i, int b, const HamiltonianSpec& s) {
  const double K = std::sin(s.phi), G = std::cos(s.phi);
  const double g = (b % 2 == 1) ? 1.0 : s.g_ratio;
  const double quarter = 0.25 * g;
  const int j = i + 1;
  if (s.frame == Frame::Rotated) {
    static constexpr std::array<int, 3> cycle{0, 2, 1};
    const int gamma = cycle[static_cast<std::size_t>((b - 1) % 3)];
    for (int a = 0; a < 3; ++a) {
      const char c = axis_letter(a);
      h.add(letters(n, {{i, c}, {j, c}}), a == gamma ? -K * quarter : -G * quarter);
    }
    return;
  }
  // right-handed (gamma, alpha, beta)
  const int gamma = (b % 2 == 1) ? 0 : 1;
  const int alpha = (gamma + 1) % 3, beta = (gamma + 2) % 3;
  const char cg = axis_letter(gamma), ca = axis_letter(alpha), cb = axis_letter(beta);
  h.add(letters(n, {{i, cg}, {j, cg}}), K * quarter);
  h.add(letters(n, {{i, ca}, {j, cb}}), G * quarter);
  h.add(letters(n, {{i, cb}, {j, ca}}), G * quarter);
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::ClusterField: return "cluster_field";
    case Family::QcaField: return "qca_field";
    case Family::IsingTransverse: return "ising_transverse";
    case Family::KitaevGamma: return "kitaev_gamma";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  for (Family f : {Family::ClusterField, Family::QcaField, Family::IsingTransverse, Family::KitaevGamma})
    if (family_name(f) == s) return f;
  throw std::invalid_argument("unknown Hamiltonian family '" + s + "'");
}

std::string default_scheme_for(Family f) {
  switch (f) {
    case Family::ClusterField: return "cluster_block2";
    case Family::QcaField: return "qca_site_local";
    case Family::IsingTransverse: return "ising";
    case Family::KitaevGamma: return "kitaev_gamma";
  }
  return "";
}

void HamiltonianSpec::check() const {
  const int n = n_sites;
  switch (family) {
    case Family::ClusterField:
      if (n < 5 || n % 2 == 0) throw std::invalid_argument("cluster_field needs odd N >= 5");
      break;
    case Family::QcaField:
      if (n < 10 || n % 6 != 4) throw std::invalid_argument("qca_field needs N = 4 mod 6, N >= 10");
      break;
    case Family::IsingTransverse:
      if (n < 3) throw std::invalid_argument("ising_transverse needs N >= 3");
      break;
    case Family::KitaevGamma:
      if (n < 4 || n % 2 != 0) throw std::invalid_argument("kitaev_gamma needs even N >= 4");
      if (!(g_ratio > 0)) throw std::invalid_argument("kitaev_gamma needs g > 0");
      break;
  }
  if (n > kMaxSymbolicSites) throw std::invalid_argument("chain too long");
  if (sector)
    for (int c : *sector)
      if (c != 0 && c != 1) throw std::invalid_argument("sector entries must be 0 or 1");
}

std::string HamiltonianSpec::describe() const {
  std::ostringstream os;
  os << std::setprecision(17) << family_name(family) << " N=" << n_sites;
  switch (family) {
    case Family::ClusterField:
    case Family::QcaField: os << " alpha=" << alpha; break;
    case Family::IsingTransverse: os << " g=" << coupling << " alpha=" << alpha; break;
    case Family::KitaevGamma:
      os << " phi=" << phi << " g=" << g_ratio << " frame=" << (frame == Frame::Rotated ? "rotated" : "unrotated")
         << " end=" << (end == ChainEnd::XEnd ? "x" : "y");
      break;
  }
  if (sector) {
    os << " sector=";
    for (int c : *sector) os << c;
  }
  return os.str();
}

PauliSum hamiltonian(const HamiltonianSpec& s) {
  s.check();
  const int n = s.n_sites;
  PauliSum h(n);
  const double c = std::cos(s.alpha), sn = std::sin(s.alpha);
  switch (s.family) {
    case Family::ClusterField:
      h.add(letters(n, {{0, 'X'}, {1, 'Z'}}), -c);
      h.add(letters(n, {{n - 2, 'Z'}, {n - 1, 'X'}}), -c);
      for (int i = 1; i + 1 < n; ++i) {
        h.add(letters(n, {{i - 1, 'Z'}, {i, 'X'}, {i + 1, 'Z'}}), -c);
        h.add(PauliOperator::single(n, i, 'X'), -sn);
      }
      break;
    case Family::QcaField:
      h.add(letters(n, {{1, 'X'}, {2, 'Z'}}), -c);
      h.add(letters(n, {{0, 'X'}, {1, 'Z'}, {2, 'X'}, {3, 'Z'}}), -c);
      for (int i = 2; i + 2 < n; ++i) {
        h.add(letters(n, {{i - 2, 'Z'}, {i - 1, 'X'}, {i, 'Z'}, {i + 1, 'X'}, {i + 2, 'Z'}}), -c);
        h.add(PauliOperator::single(n, i, 'X'), -sn);
      }
      h.add(letters(n, {{n - 4, 'Z'}, {n - 3, 'X'}, {n - 2, 'Z'}, {n - 1, 'X'}}), -c);
      h.add(letters(n, {{n - 3, 'Z'}, {n - 2, 'X'}}), -c);
      break;
    case Family::IsingTransverse:
      for (int i = 0; i + 1 < n; ++i) h.add(letters(n, {{i, 'Z'}, {i + 1, 'Z'}}), -s.coupling * c);
      for (int i = 0; i < n; ++i) h.add(PauliOperator::single(n, i, 'X'), -s.coupling * sn);
      break;
    case Family::KitaevGamma: {
      const int offset = s.end == ChainEnd::XEnd ? 0 : 1;
      for (int i = 0; i + 1 < n; ++i) add_kg_bond(h, n, i, i + 1 + offset, s);
      break;
    }
  }
  h.prune();
  return h;
}

std::vector<PauliOperator> symmetry_generators(const HamiltonianSpec& s) {
  s.check();
  if (s.family == Family::KitaevGamma && s.frame == Frame::Unrotated) {
    // Pull the rotated-frame generators back through the six-site rotation.
    HamiltonianSpec rot = s;
    rot.frame = Frame::Rotated;
    std::vector<PauliOperator> out;
    const int offset = s.end == ChainEnd::XEnd ? 0 : 1;
    for (const auto& u : symmetry_generators(rot)) {
      const PauliSum back = apply_u6(PauliSum(u), Direction::Inverse, offset);
      if (back.n_terms() != 1) throw std::logic_error("frame change of a symmetry generator is not a Pauli string");
      const auto& [key, coeff] = *back.terms().begin();
      const int phase = std::abs(coeff - cplx(1, 0)) < 1e-9 ? 0 : 2;
      out.emplace_back(s.n_sites, key.first, key.second, phase);
    }
    return out;
  }
  const ValidatedScheme vs = validate_or_throw(builtin_scheme(default_scheme_for(s.family)).instantiate_sites(s.n_sites));
  std::vector<PauliOperator> gens;
  for (int j = 0; j < vs.m(); ++j) gens.push_back(vs.U(GroupElement{1} << j));
  return gens;
}

}  // namespace mbqc
