#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mbqc/state.hpp"

namespace mbqc {

namespace {

Eigen::Index bit_of(int site, int n) { return Eigen::Index{1} << (n - 1 - site); }

void check_gate(const Gate& g, int n) {
  auto in_range = [n](int s) { return s >= 0 && s < n; };
  if (!in_range(g.a)) throw std::invalid_argument("gate site out of range");
  if (g.kind == Gate::Kind::CZ && (!in_range(g.b) || g.b == g.a))
    throw std::invalid_argument("CZ needs two distinct sites");
}

void apply_single(CVec& v, int site, int n, const Eigen::Matrix2cd& m) {
  const Eigen::Index mask = bit_of(site, n);
  for (Eigen::Index b = 0; b < v.size(); ++b) {
    if (b & mask) continue;
    const cplx a0 = v[b], a1 = v[b | mask];
    v[b] = m(0, 0) * a0 + m(0, 1) * a1;
    v[b | mask] = m(1, 0) * a0 + m(1, 1) * a1;
  }
}

Eigen::Matrix2cd gate_matrix(const Gate& g) {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i(0, 1);
  Eigen::Matrix2cd m;
  switch (g.kind) {
    case Gate::Kind::H: m << r, r, r, -r; break;
    case Gate::Kind::X: m << 0, 1, 1, 0; break;
    case Gate::Kind::Z: m << 1, 0, 0, -1; break;
    case Gate::Kind::S: m << 1, 0, 0, i; break;
    case Gate::Kind::RZ: m << std::exp(-i * (g.angle / 2)), 0, 0, std::exp(i * (g.angle / 2)); break;
    case Gate::Kind::RX: {
      const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
      m << c, -i * s, -i * s, c;
      break;
    }
    case Gate::Kind::CZ: throw std::logic_error("CZ is not a single-site gate");
  }
  return m;
}

void apply_gate(CVec& v, const Gate& g, int n) {
  check_gate(g, n);
  if (g.kind == Gate::Kind::CZ) {
    const Eigen::Index both = bit_of(g.a, n) | bit_of(g.b, n);
    for (Eigen::Index b = 0; b < v.size(); ++b)
      if ((b & both) == both) v[b] = -v[b];
    return;
  }
  apply_single(v, g.a, n, gate_matrix(g));
}

// Image of a single-site letter under G^dagger (.) G, as a full-chain operator.
PauliOperator letter_image(const Gate& g, char letter, int site, int n) {
  auto one = [n](int s, char p) { return PauliOperator::single(n, s, p); };
  const PauliOperator self = one(site, letter);
  switch (g.kind) {
    case Gate::Kind::H:
      if (letter == 'X') return one(site, 'Z');
      if (letter == 'Z') return one(site, 'X');
      return -self;
    case Gate::Kind::X: return letter == 'X' ? self : -self;
    case Gate::Kind::Z: return letter == 'Z' ? self : -self;
    case Gate::Kind::S:
      if (letter == 'X') return -one(site, 'Y');
      if (letter == 'Y') return one(site, 'X');
      return self;
    case Gate::Kind::CZ: {
      if (letter == 'Z') return self;
      const int other = site == g.a ? g.b : g.a;
      return self * one(other, 'Z');
    }
    default: throw std::invalid_argument("gate is not Clifford");
  }
}

PauliOperator conjugate_gate(const Gate& g, const PauliOperator& p) {
  const int n = p.size();
  check_gate(g, n);
  std::vector<int> sites{g.a};
  if (g.kind == Gate::Kind::CZ) sites.push_back(g.b);
  std::uint64_t touched = 0;
  for (int s : sites) touched |= std::uint64_t{1} << s;
  PauliOperator out(n, p.x_mask() & ~touched, p.z_mask() & ~touched, p.phase());
  for (int s : sites) {
    const char c = p.at(s);
    if (c != 'I') out = out * letter_image(g, c, s, n);
  }
  return out;
}

}  // namespace

bool Gate::clifford() const { return kind != Kind::RZ && kind != Kind::RX; }

CircuitSpec CircuitSpec::qca(int n_sites, int tau) {
  if (n_sites < 1 || tau < 0) throw std::invalid_argument("bad QCA parameters");
  CircuitSpec c;
  c.n_sites = n_sites;
  c.reference = Reference::Zero;
  c.label = "qca(tau=" + std::to_string(tau) + ") on |0...0>";
  for (int r = 0; r < tau; ++r) {
    std::vector<Gate> hs, czs;
    for (int s = 0; s < n_sites; ++s) hs.push_back({Gate::Kind::H, s});
    for (int s = 0; s + 1 < n_sites; ++s) czs.push_back({Gate::Kind::CZ, s, s + 1});
    c.layers.push_back(std::move(hs));
    if (!czs.empty()) c.layers.push_back(std::move(czs));
  }
  return c;
}

CircuitSpec CircuitSpec::cluster_from_plus(int n_sites) {
  CircuitSpec c;
  c.n_sites = n_sites;
  c.reference = Reference::Plus;
  c.label = "CZ chain on |+...+>";
  std::vector<Gate> czs;
  for (int s = 0; s + 1 < n_sites; ++s) czs.push_back({Gate::Kind::CZ, s, s + 1});
  if (!czs.empty()) c.layers.push_back(std::move(czs));
  return c;
}

std::size_t CircuitSpec::gate_count() const {
  std::size_t k = 0;
  for (const auto& l : layers) k += l.size();
  return k;
}

CVec apply_circuit(const CircuitSpec& spec, const CVec& in) {
  if (in.size() != (Eigen::Index{1} << spec.n_sites)) throw std::invalid_argument("vector size mismatch");
  CVec v = in;
  for (const auto& layer : spec.layers)
    for (const auto& g : layer) apply_gate(v, g, spec.n_sites);
  return v;
}

ResourceState build_circuit_state(const CircuitSpec& spec) {
  if (spec.n_sites < 1) throw std::invalid_argument("circuit needs at least one site");
  if (spec.n_sites > dense_cap()) throw std::runtime_error("circuit exceeds dense cap");
  const Eigen::Index dim = Eigen::Index{1} << spec.n_sites;
  CVec ref = CVec::Zero(dim);
  if (spec.reference == CircuitSpec::Reference::Zero) {
    ref[0] = 1.0;
  } else {
    ref.setConstant(cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
  }
  ResourceState s;
  s.n_sites = spec.n_sites;
  s.amplitudes = apply_circuit(spec, ref);
  s.provenance = "circuit: " + (spec.label.empty() ? std::string("custom") : spec.label) +
                 (spec.reference == CircuitSpec::Reference::Plus ? " [reference |+>]" : " [reference |0>]");
  bool clifford = true;
  for (const auto& l : spec.layers)
    for (const auto& g : l) clifford = clifford && g.clifford();
  s.delta = entanglement_range(spec, std::nullopt, clifford);
  s.delta_exact = clifford;
  return s;
}

PauliOperator conjugate_through(const CircuitSpec& spec, const PauliOperator& p) {
  if (p.size() != spec.n_sites) throw std::invalid_argument("operator size mismatch");
  PauliOperator out = p;
  for (auto l = spec.layers.rbegin(); l != spec.layers.rend(); ++l)
    for (auto g = l->rbegin(); g != l->rend(); ++g) {
      if (!g->clifford()) throw std::invalid_argument("non-Clifford gate in exact range analysis");
      out = conjugate_gate(*g, out);
    }
  return out;
}

int entanglement_range(const CircuitSpec& spec, const std::optional<SitePartition>& blocks, bool exact) {
  const int n = spec.n_sites;
  SitePartition part = blocks ? *blocks : SitePartition(std::vector<int>(static_cast<std::size_t>(n), 1));
  if (part.n_sites() != n) throw std::invalid_argument("partition does not cover the circuit");
  if (!exact) {
    int reach = 0;
    for (const auto& l : spec.layers) {
      int r = 0;
      for (const auto& g : l) {
        check_gate(g, n);
        if (g.kind == Gate::Kind::CZ) r = std::max(r, std::abs(g.a - g.b));
      }
      reach += r;
    }
    int smallest = n;
    for (int b = 0; b < part.n_blocks(); ++b) smallest = std::min(smallest, part.block(b).size);
    return (reach + smallest - 1) / smallest;
  }
  int delta = 0;
  for (int site = 0; site < n; ++site) {
    const int home = part.block_of_site(site);
    for (char c : {'X', 'Z'}) {
      const PauliOperator img = conjugate_through(spec, PauliOperator::single(n, site, c));
      for (int s : img.support()) {
        const int b = part.block_of_site(s);
        delta = std::max(delta, std::abs(b - home));
      }
    }
  }
  return delta;
}

}  // namespace mbqc
