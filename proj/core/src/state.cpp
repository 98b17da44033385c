#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mbqc/state.hpp"

namespace mbqc {

namespace {

constexpr double kPi = 3.14159265358979323846;

CMat rotation(std::array<double, 3> axis, double angle) {
  const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  CMat ns = CMat::Zero(2, 2);
  const char names[3] = {'X', 'Y', 'Z'};
  for (int a = 0; a < 3; ++a) ns += (axis[static_cast<std::size_t>(a)] / norm) * pauli_matrix(names[a]);
  return std::cos(angle / 2) * CMat::Identity(2, 2) - cplx(0, 1) * std::sin(angle / 2) * ns;
}

void check_u6_length(int n) {
  if (n <= 0 || n % 6 != 0) throw std::invalid_argument("six-site rotation needs N to be a multiple of 6");
}

// Real 3x3 matrix M with U s_a U^dagger = sum_b M(b, a) s_b.
Eigen::Matrix3d adjoint_action(const CMat& u) {
  const char names[3] = {'X', 'Y', 'Z'};
  Eigen::Matrix3d m;
  for (int a = 0; a < 3; ++a) {
    const CMat img = u * pauli_matrix(names[a]) * u.adjoint();
    for (int b = 0; b < 3; ++b) m(b, a) = 0.5 * (pauli_matrix(names[b]) * img).trace().real();
  }
  return m;
}

double vector_norm(const CVec& v) { return v.norm(); }

}  // namespace

// ---------------------------------------------------------------- U6

CMat u6_site_rotation(int site) {
  switch (((site % 6) + 6) % 6) {
    case 0: return CMat::Identity(2, 2);
    case 1: return rotation({0, 1, -1}, kPi);
    case 2: return rotation({1, 1, 1}, 2 * kPi / 3);
    case 3: return rotation({-1, 1, 0}, kPi);
    case 4: return rotation({1, 1, 1}, -2 * kPi / 3);
    default: return rotation({1, 0, -1}, kPi);
  }
}

CVec apply_u6(const CVec& state, int n_sites, Direction dir, int site_offset) {
  check_u6_length(n_sites);
  if (state.size() != (Eigen::Index{1} << n_sites)) throw std::invalid_argument("vector size mismatch");
  CVec v = state;
  for (int s = 0; s < n_sites; ++s) {
    CMat u = u6_site_rotation(s + site_offset);
    if (dir == Direction::Inverse) u = u.adjoint().eval();
    const Eigen::Index mask = Eigen::Index{1} << (n_sites - 1 - s);
    for (Eigen::Index b = 0; b < v.size(); ++b) {
      if (b & mask) continue;
      const cplx a0 = v[b], a1 = v[b | mask];
      v[b] = u(0, 0) * a0 + u(0, 1) * a1;
      v[b | mask] = u(1, 0) * a0 + u(1, 1) * a1;
    }
  }
  return v;
}

PauliSum apply_u6(const PauliSum& h, Direction dir, int site_offset) {
  const int n = h.size();
  check_u6_length(n);
  std::vector<Eigen::Matrix3d> action;
  for (int s = 0; s < n; ++s) {
    CMat u = u6_site_rotation(s + site_offset);
    if (dir == Direction::Inverse) u = u.adjoint().eval();
    action.push_back(adjoint_action(u));
  }
  const char names[3] = {'X', 'Y', 'Z'};
  PauliSum out(n);
  for (const auto& [key, coeff] : h.terms()) {
    const PauliOperator term(n, key.first, key.second, 0);
    PauliSum acc = PauliSum::identity(n) * coeff;
    for (int s : term.support()) {
      const char c = term.at(s);
      const int a = c == 'X' ? 0 : (c == 'Y' ? 1 : 2);
      PauliSum img(n);
      for (int b = 0; b < 3; ++b) {
        const double w = action[static_cast<std::size_t>(s)](b, a);
        if (std::abs(w) > 1e-14) img.add(PauliOperator::single(n, s, names[b]), w);
      }
      acc = acc * img;
    }
    out += acc;
  }
  out.prune(1e-13);
  return out;
}

// ---------------------------------------------------------------- symmetry

SymmetryCertificate certify_symmetry(const CVec& state, const std::vector<PauliOperator>& generators, double tol) {
  SymmetryCertificate cert;
  cert.symmetric = true;
  for (std::size_t j = 0; j < generators.size(); ++j) {
    const CVec img = generators[j].apply(state);
    const double plus = vector_norm(img - state), minus = vector_norm(img + state);
    const int bit = plus <= minus ? 0 : 1;
    const double r = std::min(plus, minus);
    cert.chi.push_back(bit);
    cert.residual.push_back(r);
    if (!(r < tol)) {
      cert.symmetric = false;
      cert.failing.push_back(static_cast<int>(j));
    }
  }
  return cert;
}

SymmetryCertificate certify_symmetry(const CVec& state, const ValidatedScheme& vs, double tol) {
  if (state.size() != (Eigen::Index{1} << vs.n_sites())) throw std::invalid_argument("state and scheme sizes differ");
  std::vector<PauliOperator> gens;
  for (int j = 0; j < vs.m(); ++j) gens.push_back(vs.U(GroupElement{1} << j));
  return certify_symmetry(state, gens, tol);
}

void certify_in_place(ResourceState& state, const ValidatedScheme& vs, double tol) {
  const SymmetryCertificate c = certify_symmetry(state.amplitudes, vs, tol);
  if (!c.symmetric) {
    std::ostringstream os;
    os << "state is not symmetric under";
    for (int j : c.failing) os << ' ' << vs.scheme().generators[static_cast<std::size_t>(j)];
    throw std::runtime_error(os.str());
  }
  state.chi = c.chi;
}

void fix_global_phase(CVec& v) {
  if (v.size() == 0) return;
  double best = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) best = std::max(best, std::abs(v[i]));
  if (best == 0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= best - 1e-12) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      v[i] = cplx(v[i].real(), 0.0);
      return;
    }
  }
}

// ---------------------------------------------------------------- ground states

namespace {

int default_delta(Family f) { return f == Family::QcaField ? 2 : 1; }

CVec project_sector(const CVec& v, const std::vector<PauliOperator>& sym, const std::vector<int>& sector) {
  CVec w = v;
  for (std::size_t j = 0; j < sym.size(); ++j) {
    const CVec u = sym[j].apply(w);
    w = sector[j] ? CVec(0.5 * (w - u)) : CVec(0.5 * (w + u));
  }
  return w;
}

std::vector<int> sector_bits(std::uint32_t s, std::size_t m) {
  std::vector<int> bits(m);
  for (std::size_t j = 0; j < m; ++j) bits[j] = static_cast<int>((s >> j) & 1U);
  return bits;
}

}  // namespace

ResourceState ground_state(const HamiltonianSpec& spec, const SolverOptions& opts) {
  spec.check();
  const int n = spec.n_sites;
  const PauliSum h = hamiltonian(spec);
  const std::vector<PauliOperator> sym = symmetry_generators(spec);
  const std::vector<int> wanted = spec.sector.value_or(std::vector<int>(sym.size(), 0));
  if (wanted.size() != sym.size()) throw std::invalid_argument("sector length does not match the symmetry generators");

  ResourceState out;
  out.n_sites = n;
  out.provenance = "hamiltonian: " + spec.describe();
  out.delta = spec.delta.value_or(default_delta(spec.family));
  out.delta_exact = false;

  const int dense_limit = std::min({opts.dense_max_sites, 12, dense_cap()});
  const int iter_limit = std::min({opts.iterative_max_sites, 20, dense_cap()});
  if (n <= dense_limit) {
    const CMat hd = h.to_dense();
    Eigen::SelfAdjointEigenSolver<CMat> es(hd);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double e0 = ev[0];
    Eigen::Index deg = 1;
    while (deg < ev.size() && ev[deg] < e0 + opts.degeneracy_tol) ++deg;
    out.ground_degeneracy = static_cast<int>(deg);
    CVec psi;
    if (deg == 1) {
      psi = es.eigenvectors().col(0);
    } else {
      const CMat w = es.eigenvectors().leftCols(deg);
      CMat pw(w.rows(), deg);
      for (Eigen::Index c = 0; c < deg; ++c) pw.col(c) = project_sector(w.col(c), sym, wanted);
      const CMat m = w.adjoint() * pw;
      Eigen::SelfAdjointEigenSolver<CMat> ms(0.5 * (m + m.adjoint()));
      const Eigen::Index top = deg - 1;
      if (ms.eigenvalues()[top] < 0.5) throw std::runtime_error("requested symmetry sector empty in ground manifold");
      psi = pw * ms.eigenvectors().col(top);
      psi.normalize();
    }
    out.energy = e0;
    out.amplitudes = psi;
  } else if (n <= iter_limit) {
    const std::uint32_t n_sectors = std::uint32_t{1} << sym.size();
    // Screen every sector at a loose residual; the energy error is quadratic in it.
    std::vector<EigenResult> results;
    double e0 = std::numeric_limits<double>::infinity();
    SolverOptions loose = opts;
    loose.residual_tol = std::max(opts.screening_tol, opts.residual_tol);
    for (std::uint32_t s = 0; s < n_sectors; ++s) {
      loose.seed = opts.seed + s;
      results.push_back(lanczos_ground(h, sym, sector_bits(s, sym.size()), loose));
      const EigenResult& r = results.back();
      if (r.vector.size() == 0) continue;
      if (!r.converged) throw std::runtime_error("iterative eigensolver did not converge");
      e0 = std::min(e0, r.energy);
    }
    const double margin = 1e-6 + 10 * opts.degeneracy_tol;
    const double e_screen = e0;
    e0 = std::numeric_limits<double>::infinity();
    for (std::uint32_t s = 0; s < n_sectors; ++s) {
      EigenResult& r = results[s];
      if (r.vector.size() == 0 || r.energy > e_screen + margin) continue;
      r = lanczos_ground(h, sym, sector_bits(s, sym.size()), opts, &r.vector);
      if (!r.converged) throw std::runtime_error("iterative eigensolver did not converge");
      e0 = std::min(e0, r.energy);
    }
    std::vector<std::uint32_t> lowest;
    for (std::uint32_t s = 0; s < n_sectors; ++s)
      if (results[s].vector.size() != 0 && results[s].converged && results[s].residual <= opts.residual_tol &&
          results[s].energy < e0 + opts.degeneracy_tol)
        lowest.push_back(s);
    out.ground_degeneracy = static_cast<int>(lowest.size());
    std::uint32_t pick = lowest.front();
    if (lowest.size() > 1) {
      std::uint32_t w = 0;
      for (std::size_t j = 0; j < wanted.size(); ++j) w |= static_cast<std::uint32_t>(wanted[j]) << j;
      if (std::find(lowest.begin(), lowest.end(), w) == lowest.end())
        throw std::runtime_error("requested symmetry sector empty in ground manifold");
      pick = w;
    }
    out.energy = results[pick].energy;
    out.amplitudes = results[pick].vector;
  } else {
    throw std::runtime_error("chain of " + std::to_string(n) + " sites exceeds the solver caps");
  }
  out.amplitudes.normalize();
  fix_global_phase(out.amplitudes);
  const SymmetryCertificate cert = certify_symmetry(out.amplitudes, sym, 1e-7);
  if (cert.symmetric) out.chi = cert.chi;
  return out;
}

}  // namespace mbqc
