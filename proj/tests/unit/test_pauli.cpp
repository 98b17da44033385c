#include <doctest.h>

#include <random>

#include "mbqc/pauli.hpp"
#include "support.hpp"

using namespace mbqc;

namespace {

std::string random_literal(std::mt19937_64& rng, int n) {
  static const char* kPre[] = {"", "-", "i", "-i"};
  return std::string(kPre[rng() % 4]) + ref::random_letters(rng, n);
}

}  // namespace

TEST_CASE("parse and str round trip") {
  CHECK(PauliOperator::parse("ZXIXZ").str() == "ZXIXZ");
  CHECK(PauliOperator::parse("-iXY").str() == "-iXY");
  CHECK(PauliOperator::parse("+XI").str() == "XI");
  CHECK_THROWS(PauliOperator::parse("XQ"));
  CHECK_THROWS(PauliOperator::parse("-"));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const std::string lit = random_literal(rng, 1 + static_cast<int>(rng() % 6));
    CHECK(PauliOperator::parse(lit) == PauliOperator::parse(PauliOperator::parse(lit).str()));
  }
}

TEST_CASE("dense form matches Kronecker reference") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const std::string lit = random_literal(rng, 1 + static_cast<int>(rng() % 4));
    CHECK((to_dense(PauliOperator::parse(lit)) - ref::dense(lit)).norm() < 1e-14);
  }
}

TEST_CASE("product, commutation and phase agree with dense matrices") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 300; ++t) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const std::string a = random_literal(rng, n), b = random_literal(rng, n);
    const PauliOperator pa = PauliOperator::parse(a), pb = PauliOperator::parse(b);
    const ref::Mat da = ref::dense(a), db = ref::dense(b);
    const ref::Mat prod = da * db;
    CHECK((to_dense(pa * pb) - prod).norm() < 1e-12);
    const bool anti = (da * db + db * da).norm() < 1e-12;
    CHECK(commutation_sign(pa, pb) == (anti ? 1 : 0));
    CHECK(commutes(pa, pb) == ((da * db - db * da).norm() < 1e-12));
  }
}

TEST_CASE("apply and expectation agree with dense matrix-vector products") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 60; ++t) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const std::string lit = random_literal(rng, n);
    const ref::Vec psi = ref::random_state(rng, n);
    const PauliOperator p = PauliOperator::parse(lit);
    const ref::Vec want = ref::dense(lit) * psi;
    CHECK((p.apply(psi) - want).norm() < 1e-12);
    CHECK(std::abs(p.expectation(psi) - psi.dot(want)) < 1e-12);
  }
}

TEST_CASE("hermitian gauge yields a Hermitian multiple of the same string") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const PauliOperator p = PauliOperator::parse(random_literal(rng, 3));
    const PauliOperator h = hermitian_gauge(p);
    CHECK(h.is_hermitian());
    CHECK(h.same_string(p));
    const CMat d = to_dense(h);
    CHECK((d - d.adjoint()).norm() < 1e-14);
  }
  CHECK(hermitian_gauge(PauliOperator::parse("iXZ")).str() == "XZ");
  CHECK(hermitian_gauge(PauliOperator::parse("-iXZ")).str() == "-XZ");
}

TEST_CASE("slice, embed and tensor follow site order") {
  const PauliOperator a = PauliOperator::parse("XY"), b = PauliOperator::parse("ZIZ");
  CHECK(a.tensor(b).str() == "XYZIZ");
  CHECK((to_dense(a.tensor(b)) - ref::kron(ref::dense("XY"), ref::dense("ZIZ"))).norm() < 1e-14);
  CHECK(a.embed(5, 2).str() == "IIXYI");
  CHECK(PauliOperator::parse("XYZIZ").slice(1, 3).str() == "YZI");
  CHECK(PauliOperator::single(4, 2, 'Y').str() == "IIYI");
  CHECK(PauliOperator::parse("IXIZ").support() == std::vector<int>{1, 3});
}

TEST_CASE("site partition masks") {
  const SitePartition p({2, 1, 3});
  CHECK(p.n_sites() == 6);
  CHECK(p.n_blocks() == 3);
  CHECK(p.mask(0) == 0b11);
  CHECK(p.mask(2) == 0b111000);
  CHECK(p.prefix_mask(1) == 0b111);
  CHECK(p.block_of_site(4) == 2);
  CHECK(p.block(2).last() == 5);
}

TEST_CASE("Pauli sums match dense algebra") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 30; ++t) {
    const int n = 3;
    PauliSum a(n), b(n);
    ref::Mat da = ref::Mat::Zero(8, 8), db = ref::Mat::Zero(8, 8);
    for (int i = 0; i < 3; ++i) {
      const std::string la = ref::random_letters(rng, n), lb = ref::random_letters(rng, n);
      const cplx ca(static_cast<double>(rng() % 7) - 3, static_cast<double>(rng() % 5) - 2);
      const cplx cb(static_cast<double>(rng() % 5) - 2, 0.5);
      a.add(PauliOperator::parse(la), ca);
      b.add(PauliOperator::parse(lb), cb);
      da += ca * ref::dense(la);
      db += cb * ref::dense(lb);
    }
    CHECK((a.to_dense() - da).norm() < 1e-12);
    CHECK(((a * b).to_dense() - da * db).norm() < 1e-12);
    CHECK(((a + b).to_dense() - (da + db)).norm() < 1e-12);
    CHECK(((a - b).to_dense() - (da - db)).norm() < 1e-12);
    CHECK((a.adjoint().to_dense() - da.adjoint()).norm() < 1e-12);
    const ref::Vec psi = ref::random_state(rng, n);
    CHECK((a.apply(psi) - da * psi).norm() < 1e-12);
    CHECK(std::abs(a.expectation(psi) - psi.dot(da * psi)) < 1e-12);
  }
}

TEST_CASE("exp of an involution matches the spectral exponential") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const std::string lit = ref::random_letters(rng, 3);
    if (lit == "III") continue;
    const double theta = 0.1 + 0.3 * t;
    const PauliSum e = exp_involution(PauliSum(PauliOperator::parse(lit)), theta);
    CHECK((e.to_dense() - ref::expi(ref::dense(lit), theta)).norm() < 1e-12);
  }
}

TEST_CASE("dense cap guards large dense realizations") {
  const int saved = dense_cap();
  set_dense_cap(4);
  CHECK_THROWS(to_dense(PauliOperator::parse("XXXXX")));
  set_dense_cap(saved);
  CHECK_THROWS(set_dense_cap(0));
}
