#include <doctest.h>

#include <cmath>
#include <random>

#include "mbqc/mbqc.hpp"
#include "mbqc/scheme_io.hpp"

using namespace mbqc;

namespace {

constexpr double kPi = 3.14159265358979323846;

ValidatedScheme make(const std::string& name, int n) { return validate_or_throw(builtin_scheme(name).instantiate_sites(n)); }

ResourceState circuit_state(const CircuitSpec& spec, const ValidatedScheme& vs) {
  ResourceState st = build_circuit_state(spec);
  certify_in_place(st, vs);
  st.delta = entanglement_range(spec, vs.scheme().partition);
  return st;
}

/// Random nonzero angles on blocks at least 2 delta apart, each about a random admissible axis.
MeasurementPattern random_pattern(const ValidatedScheme& vs, int delta, std::mt19937_64& rng) {
  MeasurementPattern p = MeasurementPattern::wire(vs);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(2 * delta));
  while (k <= vs.n_bulk()) {
    std::vector<GroupElement> axes;
    for (GroupElement g : vs.G(k).elements)
      if (g != 0) axes.push_back(g);
    if (!axes.empty() && rng() % 4 != 0) {
      p.at(k).axis = axes[rng() % axes.size()];
      p.at(k).angle = angle(rng);
      k += 2 * delta + static_cast<int>(rng() % 2);
    } else {
      ++k;
    }
  }
  return p;
}

}  // namespace

TEST_CASE("angle parsing") {
  CHECK(parse_angle("0.25") == doctest::Approx(0.25));
  CHECK(parse_angle("pi/4") == doctest::Approx(kPi / 4));
  CHECK(parse_angle("-0.5pi") == doctest::Approx(-kPi / 2));
  CHECK(parse_angle("3*pi/8") == doctest::Approx(3 * kPi / 8));
  CHECK(parse_angle("pi") == doctest::Approx(kPi));
  CHECK_THROWS(parse_angle("quarter"));
  CHECK_THROWS(parse_angle(""));
}

TEST_CASE("pattern JSON round trip") {
  const ValidatedScheme vs = make("cluster_block2", 13);
  std::mt19937_64 rng(31);
  for (int t = 0; t < 10; ++t) {
    const MeasurementPattern p = random_pattern(vs, 1, rng);
    const std::string j = pattern_to_json(p, vs);
    CHECK(pattern_to_json(parse_pattern(j, vs), vs) == j);
    CHECK(pattern_problems(vs, p, 1).empty());
  }
}

TEST_CASE("pattern problems") {
  const ValidatedScheme vs = make("cluster_site_local", 11);
  MeasurementPattern p = MeasurementPattern::wire(vs);
  CHECK(pattern_problems(vs, p, 1).empty());
  p.at(2) = {0b01, 0.3};
  p.at(3) = {0b10, 0.3};
  CHECK(p.rotation_blocks() == std::vector<int>{2, 3});
  CHECK_FALSE(pattern_problems(vs, p, 1).empty());
  CHECK_THROWS(check_pattern(vs, p, 1));
  p.spacing_override = true;
  CHECK(pattern_problems(vs, p, 1).empty());
  // g10 is not an admissible axis on even blocks
  MeasurementPattern q = MeasurementPattern::wire(vs);
  q.at(2) = {0b10, 0.3};
  CHECK_FALSE(pattern_problems(vs, q, 1).empty());
}

TEST_CASE("wire readout on the exact cluster state is deterministic") {
  const ValidatedScheme vs = make("cluster_site_local", 11);
  const ResourceState st = circuit_state(CircuitSpec::cluster_from_plus(11), vs);
  const EstimateResult r = estimate_T(st, vs, MeasurementPattern::wire(vs), 500, 7);
  REQUIRE_FALSE(r.values.empty());
  for (const TEstimate& t : r.values) {
    CHECK(std::abs(std::abs(t.mean) - 1) < 1e-12);
    CHECK(t.std_error < 1e-12);
  }
}

TEST_CASE("rotations on the exact cluster state follow the cosine law") {
  const ValidatedScheme vs = make("cluster_site_local", 11);
  const ResourceState st = circuit_state(CircuitSpec::cluster_from_plus(11), vs);
  const GroupElement x = 0b10, z = 0b01;
  const EstimateResult wire = estimate_T(st, vs, MeasurementPattern::wire(vs), 10, 3);
  double sign = 0;
  for (const TEstimate& t : wire.values)
    if (t.h == x) sign = t.mean;
  REQUIRE(std::abs(sign) == doctest::Approx(1.0));

  // g01 anticommutes with the readout element, so <T(g10)> picks up cos of the total angle
  MeasurementPattern p = MeasurementPattern::wire(vs);
  const double a1 = 0.6, a2 = -1.1;
  p.at(2) = {z, a1};
  p.at(6) = {z, a2};
  const EstimateResult r = estimate_T(st, vs, p, 20000, 11, 2);
  for (const TEstimate& t : r.values) {
    if (t.h != x) continue;
    const double want = sign * std::cos(a1 + a2);
    CHECK(std::abs(t.mean - want) <= 4 * t.std_error + 1e-12);
  }
}

TEST_CASE("recorded shots satisfy the recursion and the side-processing relations") {
  struct Case {
    const char* scheme;
    int n;
    CircuitSpec circuit;
  };
  std::mt19937_64 rng(41);
  for (const Case& c : {Case{"cluster_block2", 9, CircuitSpec::cluster_from_plus(9)},
                        Case{"cluster_site_local", 9, CircuitSpec::cluster_from_plus(9)},
                        Case{"qca_site_local", 10, CircuitSpec::qca(10, 2)}}) {
    const ValidatedScheme vs = make(c.scheme, c.n);
    const ResourceState st = circuit_state(c.circuit, vs);
    for (int t = 0; t < 4; ++t) {
      const MeasurementPattern p = random_pattern(vs, st.delta, rng);
      REQUIRE(pattern_problems(vs, p, st.delta).empty());
      for (std::uint64_t shot = 0; shot < 3; ++shot) {
        const OutcomeRecord rec = run_shot(st, vs, p, 5, shot);
        CHECK(side_processing_problems(rec, vs, p).empty());
        const RecursionReport rep = verify_recursion(st, vs, p, rec);
        CHECK_MESSAGE(rep.consistent, c.scheme);
      }
    }
  }
}

TEST_CASE("estimates do not depend on the thread count") {
  const ValidatedScheme vs = make("cluster_block2", 9);
  HamiltonianSpec h;
  h.family = Family::ClusterField;
  h.n_sites = 9;
  h.alpha = 0.2 * kPi;
  ResourceState st = ground_state(h);
  certify_in_place(st, vs, 1e-7);
  std::mt19937_64 rng(51);
  const MeasurementPattern p = random_pattern(vs, 1, rng);
  const EstimateResult a = estimate_T(st, vs, p, 3000, 9, 1);
  const EstimateResult b = estimate_T(st, vs, p, 3000, 9, 3);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    CHECK(a.values[i].mean == b.values[i].mean);
    CHECK(a.values[i].std_error == b.values[i].std_error);
  }
  // the shared sampler reproduces run_shot
  ShotSampler sampler(st, vs, p);
  for (std::uint64_t s = 0; s < 5; ++s) CHECK(sampler.shot(9, s).o == run_shot(st, vs, p, 9, s).o);
}

TEST_CASE("measured observables are block-local involutions") {
  const ValidatedScheme vs = make("qca_block6", 16);
  const BlockSetting set{vs.G(1).elements.back(), 0.7};
  for (int j = 0; j < vs.m(); ++j)
    for (int q = 0; q < 2; ++q) {
      const PauliSum o = measured_observable(vs, 1, j, q, set);
      const CMat d = o.to_dense();
      CHECK((d * d - CMat::Identity(d.rows(), d.cols())).norm() < 1e-10);
      CHECK((d - d.adjoint()).norm() < 1e-12);
    }
}
