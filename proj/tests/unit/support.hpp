#pragma once

// Dense reference helpers for tests. Built from 2x2 matrices and explicit Kronecker
// products so they do not share code paths with the library's bit-mask arithmetic.

#include <complex>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace ref {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat letter(char p) {
  Mat m(2, 2);
  switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("bad letter");
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Literal such as "-iXZY"; the leftmost letter is the most significant factor.
inline Mat dense(const std::string& literal) {
  std::size_t pos = 0;
  cplx pre = 1;
  if (pos < literal.size() && (literal[pos] == '+' || literal[pos] == '-')) {
    if (literal[pos] == '-') pre = -pre;
    ++pos;
  }
  if (pos < literal.size() && literal[pos] == 'i') {
    pre *= cplx(0, 1);
    ++pos;
  }
  Mat m = Mat::Identity(1, 1);
  for (; pos < literal.size(); ++pos) m = kron(m, letter(literal[pos]));
  return pre * m;
}

inline std::string random_letters(std::mt19937_64& rng, int n) {
  static const char kLetters[] = "IXYZ";
  std::string s;
  for (int i = 0; i < n; ++i) s += kLetters[rng() % 4];
  return s;
}

inline Vec random_state(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss;
  Vec v(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(gauss(rng), gauss(rng));
  return v / v.norm();
}

/// exp(i theta A) for Hermitian A via its eigendecomposition.
inline Mat expi(const Mat& a, double theta) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  Vec d(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = std::exp(cplx(0, theta * es.eigenvalues()[i]));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace ref
