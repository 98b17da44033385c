#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "mbqc/oracle.hpp"
#include "mbqc/scheme_io.hpp"
#include "support.hpp"

using namespace mbqc;

namespace {

constexpr double kPi = 3.14159265358979323846;

ValidatedScheme make(const std::string& name, int n = 0) {
  const SchemeTemplate& t = builtin_scheme(name);
  return validate_or_throw(t.instantiate_sites(n > 0 ? n : *t.default_sites));
}

ref::Mat rotation(const ref::Mat& t, double angle) { return ref::expi(t, -angle / 2); }

/// Mixed-unitary step applied to a matrix, written directly from its Kraus form.
ref::Mat step(const ref::Mat& v, double sigma, const ref::Mat& m) {
  return 0.5 * (1 + sigma) * v * m * v.adjoint() + 0.5 * (1 - sigma) * v.adjoint() * m * v;
}

/// (1/d) sum_ij |i><j| (x) Phi(|i><j|) for Phi given as a function on matrices.
template <class F>
ref::Mat choi(int d, F&& phi) {
  ref::Mat j = ref::Mat::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      ref::Mat e = ref::Mat::Zero(d, d);
      e(a, b) = 1;
      j.block(a * d, b * d, d, d) = phi(e);
    }
  return j / d;
}

double nuclear_norm(const ref::Mat& h) {
  Eigen::SelfAdjointEigenSolver<ref::Mat> es(h);
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

TEST_CASE("logical operators reproduce the group product up to phases") {
  for (const auto& name : builtin_scheme_names()) {
    const ValidatedScheme vs = make(name);
    const LogicalModel m(vs);
    for (GroupElement g = 0; g < m.group_size(); ++g) {
      const CMat& a = m.op(g);
      CHECK((a * a - CMat::Identity(m.dim(), m.dim())).norm() < 1e-12);
      for (GroupElement h = 0; h < m.group_size(); ++h) {
        CHECK((a * m.op(h) - m.phase(g, h) * m.op(g ^ h)).norm() < 1e-12);
        CHECK(m.anticommute(g, h) == ((a * m.op(h) + m.op(h) * a).norm() < 1e-12));
      }
    }
  }
}

TEST_CASE("initial logical states are density matrices consistent with their T vector") {
  for (const auto& name : builtin_scheme_names()) {
    const ValidatedScheme vs = make(name);
    const LogicalModel m(vs);
    for (int c = 0; c < (1 << vs.m()); ++c) {
      std::vector<int> chi;
      for (int j = 0; j < vs.m(); ++j) chi.push_back((c >> j) & 1);
      const LogicalState ls = init_logical(m, chi);
      CHECK(std::abs(ls.rho.trace() - 1.0) < 1e-12);
      CHECK((ls.rho - ls.rho.adjoint()).norm() < 1e-12);
      CHECK(min_eigenvalue(ls.rho) > -1e-12);
      const auto t = tvec_of(m, ls.rho);
      for (std::size_t g = 0; g < t.size(); ++g) CHECK(std::abs(t[g] - ls.tvec[g]) < 1e-12);
      for (GroupElement h : vs.H().elements) CHECK(std::abs(std::abs(ls.tvec[h]) - 1) < 1e-12);
    }
  }
}

TEST_CASE("transfer-matrix path equals the density-matrix path") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const char* name : {"cluster_block2", "qca_block6", "qca_site_local", "kitaev_gamma"}) {
    const ValidatedScheme vs = make(name);
    const LogicalModel m(vs);
    LogicalState ls = init_logical(m, std::vector<int>(static_cast<std::size_t>(vs.m()), 0));
    std::vector<double> t = ls.tvec;
    for (int i = 0; i < 12; ++i) {
      const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(vs.n_bulk()));
      const GroupElement axis = vs.G(k).elements[rng() % vs.G(k).elements.size()];
      const LogicalChannel ch{axis, kPi * u(rng), u(rng)};
      ls = apply_channel(m, ls, ch);
      t = evolve_tvec(m, t, ch);
    }
    for (std::size_t g = 0; g < t.size(); ++g) CHECK(std::abs(t[g] - ls.tvec[g]) < 1e-12);
  }
}

TEST_CASE("logical channels are completely positive and trace preserving") {
  const ValidatedScheme vs = make("qca_block6");
  const LogicalModel m(vs);
  for (double sigma : {1.0, 0.6, 0.0, -0.4}) {
    const LogicalChannel ch{vs.G(1).elements.back(), 0.9, sigma};
    const CMat j = choi_state(channel_superop(m, ch), m.dim());
    CHECK(std::abs(j.trace() - 1.0) < 1e-12);
    CHECK(min_eigenvalue(j) > -1e-12);
    // partial trace over the output is the maximally mixed input
    const int d = m.dim();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        CHECK(std::abs(j.block(a * d, b * d, d, d).trace() - (a == b ? 1.0 / d : 0.0)) < 1e-12);
    const ref::Mat v = rotation(m.op(ch.axis), ch.angle);
    const ref::Mat want = choi(d, [&](const ref::Mat& e) { return step(v, sigma, e); });
    CHECK((j - want).norm() < 1e-12);
  }
}

TEST_CASE("unit string order gives the unitary") {
  const ValidatedScheme vs = make("cluster_site_local");
  const LogicalModel m(vs);
  const LogicalChannel ch{0b01, 0.8, 1.0};
  const CMat u = rotation(m.op(0b01), 0.8);
  CHECK((channel_superop(m, ch) - unitary_superop(u)).norm() < 1e-12);
}

TEST_CASE("split rotation error against an independent Choi computation") {
  const ValidatedScheme vs = make("cluster_site_local");
  const LogicalModel m(vs);
  const GroupElement axis = 0b01;
  for (double alpha : {kPi / 8, kPi / 2})
    for (double sigma : {0.25, 0.5, 0.9})
      for (int n : {5, 20}) {
        const SplitResult r = split_rotation(m, axis, alpha, sigma, n);
        const ref::Mat t = m.op(axis);
        const ref::Mat v = rotation(t, alpha / (sigma * n)), target = rotation(t, alpha);
        const ref::Mat jn = choi(2, [&](ref::Mat e) {
          for (int i = 0; i < n; ++i) e = step(v, sigma, e);
          return e;
        });
        const ref::Mat ju = choi(2, [&](const ref::Mat& e) { return ref::Mat(target * e * target.adjoint()); });
        CHECK(r.lower == doctest::Approx(nuclear_norm(jn - ju)).epsilon(1e-10));
        CHECK(r.bound == doctest::Approx(alpha * alpha / n * (1 - sigma * sigma) / (sigma * sigma)));
        CHECK(r.lower <= r.bound);
        CHECK(r.choi_min_eig > -1e-12);
      }
  const SplitResult ex = split_rotation(m, axis, kPi / 2, 0.5, 20);
  CHECK(ex.bound == doctest::Approx(0.37011).epsilon(1e-4));
  CHECK_THROWS(split_rotation(m, axis, 1.0, 0.0, 5));
}

TEST_CASE("Lie closure dimensions") {
  const std::map<std::string, int> want = {{"cluster_block2", 3}, {"cluster_site_local", 3}, {"ising", 1},
                                           {"kitaev_gamma", 3},   {"qca_block6", 15},         {"qca_site_local", 15}};
  for (const auto& [name, dim] : want) {
    const ValidatedScheme vs = make(name);
    CHECK_MESSAGE(lie_closure(LogicalModel(vs)).dimension == dim, name);
  }
  // a single generator spans a line
  const ValidatedScheme vs = make("qca_block6");
  CHECK(lie_closure(LogicalModel(vs), {0b0001}).dimension == 1);
}

TEST_CASE("prediction of a pattern applies one channel per rotated block") {
  const ValidatedScheme vs = make("cluster_site_local", 11);
  const LogicalModel m(vs);
  MeasurementPattern p = MeasurementPattern::wire(vs);
  p.at(2) = {0b01, 0.6};
  p.at(6) = {0b01, -1.1};
  const auto chans = pattern_channels(p, {{2, 0.8}, {6, 0.5}});
  REQUIRE(chans.size() == 2);
  CHECK(chans[0].sigma == 0.8);
  const Prediction pr = predict(m, {0, 0}, p, {{2, 1.0}, {6, 1.0}});
  const Prediction wire = predict(m, {0, 0}, MeasurementPattern::wire(vs), {});
  for (std::size_t i = 0; i < pr.readout.size(); ++i) {
    CHECK(std::abs(pr.value[i] - pr.value_tvec[i]) < 1e-12);
    if (pr.readout[i] == 0b10) CHECK(pr.value[i] == doctest::Approx(wire.value[i] * std::cos(0.6 - 1.1)));
  }
}
