#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mbqc {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr int kMaxSymbolicSites = 64;

/// Process-wide cap on the number of sites realized as dense vectors or matrices.
int dense_cap();
void set_dense_cap(int sites);

/// Phased Pauli string i^k * P_0 (x) P_1 (x) ... with P_j in {I,X,Y,Z}.
/// Site j lives in bit j of the masks; Y is stored as x=z=1 and is Hermitian,
/// so the phase exponent k is the full deviation from a Hermitian string.
class PauliOperator {
 public:
  PauliOperator() = default;
  explicit PauliOperator(int n_sites);
  PauliOperator(int n_sites, std::uint64_t x, std::uint64_t z, int phase = 0);

  /// Literal "±[i]P0P1..." e.g. "ZXIXZ", "-iXY".
  static PauliOperator parse(std::string_view literal);
  static PauliOperator single(int n_sites, int site, char p);

  int size() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  /// Exponent k of the prefactor i^k, in 0..3.
  int phase() const { return k_; }
  char at(int site) const;
  std::uint64_t support_mask() const { return x_ | z_; }
  std::vector<int> support() const;
  bool is_identity() const { return (x_ | z_) == 0; }
  bool is_hermitian() const { return (k_ & 1) == 0; }
  cplx phase_value() const;

  /// Same string with prefactor dropped.
  PauliOperator unsigned_string() const { return {n_, x_, z_, 0}; }
  bool same_string(const PauliOperator& o) const { return n_ == o.n_ && x_ == o.x_ && z_ == o.z_; }

  PauliOperator operator*(const PauliOperator& rhs) const;
  PauliOperator operator-() const { return {n_, x_, z_, k_ + 2}; }
  PauliOperator times_i(int power) const { return {n_, x_, z_, k_ + power}; }
  bool operator==(const PauliOperator& o) const { return same_string(o) && k_ == o.k_; }
  bool operator!=(const PauliOperator& o) const { return !(*this == o); }

  /// Copy restricted to sites [first, first+count), re-indexed from 0.
  PauliOperator slice(int first, int count) const;
  /// Place this operator on sites [offset, offset+size()) of an n_total chain.
  PauliOperator embed(int n_total, int offset) const;
  /// Tensor product this (x) rhs, with this on the left.
  PauliOperator tensor(const PauliOperator& rhs) const;

  std::string str() const;

  /// out = P |in>, with site 0 as the most significant tensor factor.
  void apply(const CVec& in, CVec& out) const;
  CVec apply(const CVec& in) const;
  cplx expectation(const CVec& psi) const;

 private:
  int n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  int k_ = 0;
};

PauliOperator multiply(const PauliOperator& a, const PauliOperator& b);
/// 0 if ab = ba, 1 if ab = -ba.
int commutation_sign(const PauliOperator& a, const PauliOperator& b);
inline bool commutes(const PauliOperator& a, const PauliOperator& b) { return commutation_sign(a, b) == 0; }
/// Multiplies anti-Hermitian strings by -i; Hermitian strings are returned unchanged.
PauliOperator hermitian_gauge(const PauliOperator& p);
CMat to_dense(const PauliOperator& p);
/// Dense matrix of a single-site Pauli letter.
CMat pauli_matrix(char p);

/// Ordered, contiguous, disjoint site ranges covering 0..N-1.
struct Block {
  int first = 0;
  int size = 0;
  int last() const { return first + size - 1; }
};

class SitePartition {
 public:
  SitePartition() = default;
  explicit SitePartition(const std::vector<int>& sizes);
  int n_sites() const { return n_sites_; }
  int n_blocks() const { return static_cast<int>(blocks_.size()); }
  const Block& block(int i) const { return blocks_.at(static_cast<std::size_t>(i)); }
  std::uint64_t mask(int i) const;
  /// Sites of blocks [0, i].
  std::uint64_t prefix_mask(int i) const;
  int block_of_site(int site) const;

 private:
  std::vector<Block> blocks_;
  int n_sites_ = 0;
};

/// Complex linear combination of unphased Pauli strings.
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(int n_sites) : n_(n_sites) {}
  PauliSum(const PauliOperator& p);  // NOLINT: implicit lift is convenient
  static PauliSum identity(int n_sites);

  int size() const { return n_; }
  std::size_t n_terms() const { return terms_.size(); }
  const std::map<std::pair<std::uint64_t, std::uint64_t>, cplx>& terms() const { return terms_; }

  void add(const PauliOperator& p, cplx coeff = 1.0);
  PauliSum& operator+=(const PauliSum& rhs);
  PauliSum operator+(const PauliSum& rhs) const;
  PauliSum operator-(const PauliSum& rhs) const;
  PauliSum operator*(const PauliSum& rhs) const;
  PauliSum operator*(cplx s) const;
  PauliSum adjoint() const;
  void prune(double tol = 1e-14);
  double distance(const PauliSum& other) const;

  void apply(const CVec& in, CVec& out) const;
  CVec apply(const CVec& in) const;
  cplx expectation(const CVec& psi) const;
  CMat to_dense() const;
  std::string str() const;

 private:
  int n_ = 0;
  std::map<std::pair<std::uint64_t, std::uint64_t>, cplx> terms_;
};

/// exp(i * theta * A) for an involutory Hermitian A (A^2 = I).
PauliSum exp_involution(const PauliSum& a, double theta);

}  // namespace mbqc
