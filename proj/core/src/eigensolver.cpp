#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mbqc/state.hpp"

namespace mbqc {

namespace {

// Matrix-free Pauli-sum action, one pass over the amplitudes per term.
class PauliMatvec {
 public:
  explicit PauliMatvec(const PauliSum& h) : n_(h.size()) {
    for (const auto& [key, c] : h.terms()) {
      Term t;
      for (int s = 0; s < n_; ++s) {
        const std::uint64_t bit = std::uint64_t{1} << (n_ - 1 - s);
        if ((key.first >> s) & 1U) t.xi |= bit;
        if ((key.second >> s) & 1U) t.zi |= bit;
      }
      t.coeff = c * y_phase(key.first & key.second);
      terms_.push_back(t);
    }
  }

  void operator()(const CVec& in, CVec& out) const {
    out.setZero(in.size());
    const std::uint64_t dim = static_cast<std::uint64_t>(in.size());
    for (const Term& t : terms_) {
      const double re = t.coeff.real(), im = t.coeff.imag();
      for (std::uint64_t b = 0; b < dim; ++b) {
        const double sign = 1.0 - 2.0 * static_cast<double>(std::popcount(b & t.zi) & 1);
        const cplx a = in[static_cast<Eigen::Index>(b)];
        out[static_cast<Eigen::Index>(b ^ t.xi)] +=
            cplx(sign * (re * a.real() - im * a.imag()), sign * (re * a.imag() + im * a.real()));
      }
    }
  }

 private:
  struct Term {
    std::uint64_t xi = 0, zi = 0;
    cplx coeff;
  };
  static cplx y_phase(std::uint64_t y) {
    static const cplx pow_i[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return pow_i[std::popcount(y) % 4];
  }
  int n_;
  std::vector<Term> terms_;
};

}  // namespace

EigenResult lanczos_ground(const PauliSum& h, const std::vector<PauliOperator>& sym, const std::vector<int>& sector,
                           const SolverOptions& opts, const CVec* start) {
  const int n = h.size();
  if (n > dense_cap()) throw std::runtime_error("Hamiltonian exceeds dense cap");
  if (sym.size() != sector.size()) throw std::invalid_argument("sector length mismatch");
  const Eigen::Index dim = Eigen::Index{1} << n;
  const PauliMatvec matvec(h);

  auto project = [&](CVec& v) {
    for (std::size_t j = 0; j < sym.size(); ++j) {
      const CVec u = sym[j].apply(v);
      v = sector[j] ? CVec(0.5 * (v - u)) : CVec(0.5 * (v + u));
    }
  };

  EigenResult res;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  CVec x(dim);
  if (start != nullptr && start->size() == dim) {
    x = *start;
  } else {
    for (Eigen::Index i = 0; i < dim; ++i) x[i] = cplx(gauss(rng), gauss(rng));
  }
  project(x);
  if (x.norm() < 1e-10) return res;  // empty sector
  x.normalize();

  const int m_max = static_cast<int>(std::min<Eigen::Index>(std::max(2, opts.krylov_dim), dim));
  CVec w(dim), hx(dim);
  while (res.matvecs < opts.max_matvecs) {
    CMat V(dim, m_max);
    std::vector<double> alpha, beta;
    V.col(0) = x;
    int k = 0;
    for (; k < m_max; ++k) {
      matvec(V.col(k), w);
      ++res.matvecs;
      project(w);
      const double a = V.col(k).dot(w).real();
      alpha.push_back(a);
      // full reorthogonalization against the whole Krylov basis
      w -= V.leftCols(k + 1) * (V.leftCols(k + 1).adjoint() * w);
      const double b = w.norm();
      if (k + 1 == m_max || b < 1e-12) {
        ++k;
        break;
      }
      beta.push_back(b);
      V.col(k + 1) = w / b;
      // Ritz residual estimate beta_k |y_k|; stop the cycle once it is well below tolerance
      if (k >= 4) {
        Eigen::MatrixXd Tk = Eigen::MatrixXd::Zero(k + 1, k + 1);
        for (int i = 0; i <= k; ++i) {
          Tk(i, i) = alpha[static_cast<std::size_t>(i)];
          if (i < k) Tk(i, i + 1) = Tk(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tk);
        if (b * std::abs(es.eigenvectors()(k, 0)) < 0.1 * opts.residual_tol) {
          ++k;
          break;
        }
      }
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ts(T);
    const Eigen::VectorXd y = ts.eigenvectors().col(0);
    x = V.leftCols(k) * y.cast<cplx>();
    project(x);
    x.normalize();
    matvec(x, hx);
    ++res.matvecs;
    res.energy = x.dot(hx).real();
    res.residual = (hx - res.energy * x).norm();
    if (res.residual < opts.residual_tol) {
      res.converged = true;
      break;
    }
  }
  res.vector = x;
  return res;
}

}  // namespace mbqc
