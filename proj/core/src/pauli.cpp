#include "mbqc/pauli.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace mbqc {

namespace {

std::atomic<int> g_dense_cap{20};

int mod4(int k) { return ((k % 4) + 4) % 4; }

const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

// Exponent g with sigma(x1,z1) sigma(x2,z2) = i^g sigma(x1^x2, z1^z2), Hermitian letters.
int site_product_exponent(int x1, int z1, int x2, int z2) {
  if (x1 == 0 && z1 == 0) return 0;
  if (x1 == 1 && z1 == 1) return z2 - x2;
  if (x1 == 1) return z2 * (2 * x2 - 1);
  return x2 * (1 - 2 * z2);
}

// Mask over vector-index bits: site j <-> bit (n-1-j).
std::uint64_t index_mask(std::uint64_t site_mask, int n) {
  std::uint64_t out = 0;
  while (site_mask) {
    const int j = std::countr_zero(site_mask);
    site_mask &= site_mask - 1;
    out |= std::uint64_t{1} << (n - 1 - j);
  }
  return out;
}

void check_dense(int n) {
  if (n > dense_cap()) throw std::runtime_error("dense realization cap exceeded: " + std::to_string(n) + " sites");
}

}  // namespace

int dense_cap() { return g_dense_cap.load(); }

void set_dense_cap(int sites) {
  if (sites < 1 || sites > 30) throw std::invalid_argument("dense cap must be in [1, 30]");
  g_dense_cap.store(sites);
}

PauliOperator::PauliOperator(int n_sites) : PauliOperator(n_sites, 0, 0, 0) {}

PauliOperator::PauliOperator(int n_sites, std::uint64_t x, std::uint64_t z, int phase)
    : n_(n_sites), x_(x), z_(z), k_(mod4(phase)) {
  if (n_sites < 0 || n_sites > kMaxSymbolicSites) throw std::invalid_argument("site count out of range");
  const std::uint64_t full = n_sites == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n_sites) - 1);
  if ((x & ~full) || (z & ~full)) throw std::invalid_argument("mask exceeds site count");
}

PauliOperator PauliOperator::parse(std::string_view s) {
  int k = 0;
  std::size_t pos = 0;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    if (s[pos] == '-') k += 2;
    ++pos;
  }
  if (pos < s.size() && s[pos] == 'i') {
    k += 1;
    ++pos;
  }
  const auto body = s.substr(pos);
  if (body.empty()) throw std::invalid_argument("empty Pauli literal");
  if (body.size() > kMaxSymbolicSites) throw std::invalid_argument("Pauli literal too long");
  std::uint64_t x = 0, z = 0;
  for (std::size_t j = 0; j < body.size(); ++j) {
    const std::uint64_t bit = std::uint64_t{1} << j;
    switch (body[j]) {
      case 'I': break;
      case 'X': x |= bit; break;
      case 'Z': z |= bit; break;
      case 'Y': x |= bit; z |= bit; break;
      default: throw std::invalid_argument("bad Pauli letter in '" + std::string(s) + "'");
    }
  }
  return {static_cast<int>(body.size()), x, z, k};
}

PauliOperator PauliOperator::single(int n_sites, int site, char p) {
  if (site < 0 || site >= n_sites) throw std::out_of_range("site out of range");
  const std::uint64_t bit = std::uint64_t{1} << site;
  switch (p) {
    case 'I': return PauliOperator(n_sites);
    case 'X': return {n_sites, bit, 0};
    case 'Z': return {n_sites, 0, bit};
    case 'Y': return {n_sites, bit, bit};
    default: throw std::invalid_argument("bad Pauli letter");
  }
}

char PauliOperator::at(int site) const {
  const int xb = (x_ >> site) & 1, zb = (z_ >> site) & 1;
  if (xb && zb) return 'Y';
  if (xb) return 'X';
  if (zb) return 'Z';
  return 'I';
}

std::vector<int> PauliOperator::support() const {
  std::vector<int> out;
  for (int j = 0; j < n_; ++j)
    if ((support_mask() >> j) & 1) out.push_back(j);
  return out;
}

cplx PauliOperator::phase_value() const { return kIPow[k_]; }

PauliOperator PauliOperator::operator*(const PauliOperator& rhs) const { return multiply(*this, rhs); }

PauliOperator PauliOperator::slice(int first, int count) const {
  if (first < 0 || count < 0 || first + count > n_) throw std::out_of_range("slice out of range");
  const std::uint64_t m = count == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << count) - 1);
  return {count, (x_ >> first) & m, (z_ >> first) & m, k_};
}

PauliOperator PauliOperator::embed(int n_total, int offset) const {
  if (offset < 0 || offset + n_ > n_total) throw std::out_of_range("embed out of range");
  return {n_total, x_ << offset, z_ << offset, k_};
}

PauliOperator PauliOperator::tensor(const PauliOperator& rhs) const {
  const int n = n_ + rhs.n_;
  return {n, x_ | (rhs.x_ << n_), z_ | (rhs.z_ << n_), k_ + rhs.k_};
}

std::string PauliOperator::str() const {
  std::string out;
  if (k_ == 2 || k_ == 3) out += '-';
  if (k_ & 1) out += 'i';
  for (int j = 0; j < n_; ++j) out += at(j);
  return out;
}

void PauliOperator::apply(const CVec& in, CVec& out) const {
  check_dense(n_);
  const std::uint64_t dim = std::uint64_t{1} << n_;
  if (static_cast<std::uint64_t>(in.size()) != dim) throw std::invalid_argument("vector size mismatch");
  out.resize(in.size());
  const std::uint64_t xi = index_mask(x_, n_), zi = index_mask(z_, n_);
  const cplx base = kIPow[mod4(k_ + std::popcount(x_ & z_))];
  for (std::uint64_t b = 0; b < dim; ++b) {
    const cplx c = (std::popcount(b & zi) & 1) ? -base : base;
    out[static_cast<Eigen::Index>(b ^ xi)] = c * in[static_cast<Eigen::Index>(b)];
  }
}

CVec PauliOperator::apply(const CVec& in) const {
  CVec out;
  apply(in, out);
  return out;
}

cplx PauliOperator::expectation(const CVec& psi) const {
  check_dense(n_);
  const std::uint64_t dim = std::uint64_t{1} << n_;
  if (static_cast<std::uint64_t>(psi.size()) != dim) throw std::invalid_argument("vector size mismatch");
  const std::uint64_t xi = index_mask(x_, n_), zi = index_mask(z_, n_);
  cplx acc = 0;
  for (std::uint64_t b = 0; b < dim; ++b) {
    const cplx t = std::conj(psi[static_cast<Eigen::Index>(b ^ xi)]) * psi[static_cast<Eigen::Index>(b)];
    acc += (std::popcount(b & zi) & 1) ? -t : t;
  }
  return acc * kIPow[mod4(k_ + std::popcount(x_ & z_))];
}

PauliOperator multiply(const PauliOperator& a, const PauliOperator& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Pauli size mismatch");
  int g = 0;
  std::uint64_t s = a.support_mask();
  while (s) {
    const int j = std::countr_zero(s);
    s &= s - 1;
    g += site_product_exponent((a.x_mask() >> j) & 1, (a.z_mask() >> j) & 1, (b.x_mask() >> j) & 1,
                               (b.z_mask() >> j) & 1);
  }
  return {a.size(), a.x_mask() ^ b.x_mask(), a.z_mask() ^ b.z_mask(), a.phase() + b.phase() + g};
}

int commutation_sign(const PauliOperator& a, const PauliOperator& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Pauli size mismatch");
  return std::popcount((a.x_mask() & b.z_mask()) ^ (a.z_mask() & b.x_mask())) & 1;
}

PauliOperator hermitian_gauge(const PauliOperator& p) { return p.is_hermitian() ? p : p.times_i(3); }

CMat pauli_matrix(char p) {
  CMat m(2, 2);
  switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("bad Pauli letter");
  }
  return m;
}

CMat to_dense(const PauliOperator& p) {
  check_dense(p.size());
  const Eigen::Index dim = Eigen::Index{1} << p.size();
  CMat m = CMat::Zero(dim, dim);
  CVec e = CVec::Zero(dim), col;
  for (Eigen::Index c = 0; c < dim; ++c) {
    e.setZero();
    e[c] = 1;
    p.apply(e, col);
    m.col(c) = col;
  }
  return m;
}

SitePartition::SitePartition(const std::vector<int>& sizes) {
  int first = 0;
  for (int s : sizes) {
    if (s <= 0) throw std::invalid_argument("block sizes must be positive");
    blocks_.push_back({first, s});
    first += s;
  }
  if (first > kMaxSymbolicSites) throw std::invalid_argument("too many sites");
  n_sites_ = first;
}

std::uint64_t SitePartition::mask(int i) const {
  const Block& b = block(i);
  return ((b.size == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << b.size) - 1)) << b.first;
}

std::uint64_t SitePartition::prefix_mask(int i) const {
  std::uint64_t m = 0;
  for (int j = 0; j <= i; ++j) m |= mask(j);
  return m;
}

int SitePartition::block_of_site(int site) const {
  for (int i = 0; i < n_blocks(); ++i)
    if (site >= blocks_[static_cast<std::size_t>(i)].first && site <= blocks_[static_cast<std::size_t>(i)].last())
      return i;
  throw std::out_of_range("site outside partition");
}

PauliSum::PauliSum(const PauliOperator& p) : n_(p.size()) { add(p); }

PauliSum PauliSum::identity(int n_sites) { return PauliSum(PauliOperator(n_sites)); }

void PauliSum::add(const PauliOperator& p, cplx coeff) {
  if (n_ == 0 && terms_.empty()) n_ = p.size();
  if (p.size() != n_) throw std::invalid_argument("PauliSum size mismatch");
  terms_[{p.x_mask(), p.z_mask()}] += coeff * p.phase_value();
}

PauliSum& PauliSum::operator+=(const PauliSum& rhs) {
  if (terms_.empty() && n_ == 0) n_ = rhs.n_;
  if (rhs.n_ != n_) throw std::invalid_argument("PauliSum size mismatch");
  for (const auto& [key, c] : rhs.terms_) terms_[key] += c;
  return *this;
}

PauliSum PauliSum::operator+(const PauliSum& rhs) const {
  PauliSum out = *this;
  out += rhs;
  return out;
}

PauliSum PauliSum::operator-(const PauliSum& rhs) const { return *this + rhs * cplx(-1.0); }

PauliSum PauliSum::operator*(const PauliSum& rhs) const {
  if (rhs.n_ != n_) throw std::invalid_argument("PauliSum size mismatch");
  PauliSum out(n_);
  for (const auto& [ka, ca] : terms_) {
    const PauliOperator a(n_, ka.first, ka.second);
    for (const auto& [kb, cb] : rhs.terms_) out.add(multiply(a, PauliOperator(n_, kb.first, kb.second)), ca * cb);
  }
  out.prune();
  return out;
}

PauliSum PauliSum::operator*(cplx s) const {
  PauliSum out = *this;
  for (auto& [key, c] : out.terms_) c *= s;
  return out;
}

PauliSum PauliSum::adjoint() const {
  PauliSum out = *this;
  for (auto& [key, c] : out.terms_) c = std::conj(c);
  return out;
}

void PauliSum::prune(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= tol)
      it = terms_.erase(it);
    else
      ++it;
  }
}

double PauliSum::distance(const PauliSum& other) const {
  const PauliSum d = *this - other;
  double acc = 0;
  for (const auto& [key, c] : d.terms_) acc += std::norm(c);
  return std::sqrt(acc);
}

void PauliSum::apply(const CVec& in, CVec& out) const {
  out = CVec::Zero(in.size());
  CVec tmp;
  for (const auto& [key, c] : terms_) {
    PauliOperator(n_, key.first, key.second).apply(in, tmp);
    out += c * tmp;
  }
}

CVec PauliSum::apply(const CVec& in) const {
  CVec out;
  apply(in, out);
  return out;
}

cplx PauliSum::expectation(const CVec& psi) const {
  cplx acc = 0;
  for (const auto& [key, c] : terms_) acc += c * PauliOperator(n_, key.first, key.second).expectation(psi);
  return acc;
}

CMat PauliSum::to_dense() const {
  check_dense(n_);
  const Eigen::Index dim = Eigen::Index{1} << n_;
  CMat m = CMat::Zero(dim, dim);
  for (const auto& [key, c] : terms_) m += c * mbqc::to_dense(PauliOperator(n_, key.first, key.second));
  return m;
}

std::string PauliSum::str() const {
  std::string out;
  for (const auto& [key, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += "(" + std::to_string(c.real()) + (c.imag() < 0 ? "" : "+") + std::to_string(c.imag()) + "i)" +
           PauliOperator(n_, key.first, key.second).str();
  }
  return out.empty() ? "0" : out;
}

PauliSum exp_involution(const PauliSum& a, double theta) {
  return PauliSum::identity(a.size()) * cplx(std::cos(theta)) + a * cplx(0, std::sin(theta));
}

}  // namespace mbqc
