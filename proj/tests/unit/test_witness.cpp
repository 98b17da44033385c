#include <doctest.h>

#include <cmath>

#include "mbqc/scheme_io.hpp"
#include "mbqc/witness.hpp"

using namespace mbqc;

namespace {

constexpr double kPi = 3.14159265358979323846;

ValidatedScheme make(const std::string& name, int n) { return validate_or_throw(builtin_scheme(name).instantiate_sites(n)); }

}  // namespace

TEST_CASE("nonlinearity matches odd Hamming weight") {
  // affine Boolean functions of two bits have even weight, and every even-weight table is affine
  for (int t = 0; t < 16; ++t) {
    const std::array<int, 4> table = {t & 1, (t >> 1) & 1, (t >> 2) & 1, (t >> 3) & 1};
    const int weight = table[0] + table[1] + table[2] + table[3];
    CHECK(is_nonlinear(table) == (weight % 2 == 1));
  }
}

TEST_CASE("compiled OR circuits") {
  const ValidatedScheme vs = make("cluster_site_local", 11);
  const WitnessAxes ax = witness_axes(vs);
  const auto slots = rotation_slots(vs, ax.z, 1);
  REQUIRE(slots.size() >= 4);
  for (std::size_t i = 1; i < slots.size(); ++i) CHECK(slots[i] - slots[i - 1] >= 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const MeasurementPattern p = compile_or_pattern(vs, a, b, 1, 1.0, 1);
      CHECK(pattern_problems(vs, p, 1).empty());
      CHECK(p.rotation_blocks().size() == 4);
      double total = 0;
      for (int k : p.rotation_blocks()) {
        CHECK(p.at(k).axis == ax.z);
        total += p.at(k).angle;
      }
      // the four signed pi/8 phases cancel unless a = b = 0
      CHECK(std::abs(total) == doctest::Approx(a == 0 && b == 0 ? kPi : 0.0));
    }
  // rescaling by the string order stretches every piece
  const MeasurementPattern p = compile_or_pattern(vs, 0, 0, 1, 0.5, 1);
  for (int k : p.rotation_blocks()) CHECK(std::abs(p.at(k).angle) == doctest::Approx(kPi / 2));
  CHECK(witness_bound(1.0, 1) == doctest::Approx(0.0));
  CHECK(witness_bound(0.5, 2) > witness_bound(0.5, 4));
}

TEST_CASE("exact cluster state computes OR deterministically") {
  const ValidatedScheme vs = make("cluster_site_local", 11);
  ResourceState st = build_circuit_state(CircuitSpec::cluster_from_plus(11));
  certify_in_place(st, vs);
  WitnessOptions o;
  o.shots = 2000;
  o.n_split = 1;
  const WitnessReport r = run_witness(st, vs, o);
  REQUIRE(r.inputs.size() == 4);
  for (const WitnessInput& in : r.inputs) {
    CHECK(in.target == (in.a | in.b));
    CHECK(in.success == doctest::Approx(1.0));
    CHECK(in.predicted == doctest::Approx(1.0));
  }
  // (0,0) is the odd one out
  CHECK(r.truth_table[1] == r.truth_table[2]);
  CHECK(r.truth_table[2] == r.truth_table[3]);
  CHECK(r.truth_table[0] != r.truth_table[1]);
  CHECK(r.nonlinear);
  CHECK(r.contextual);
  CHECK(r.worst == doctest::Approx(1.0));
  CHECK(r.n_split == 1);
}

TEST_CASE("short chains are rejected") {
  const ValidatedScheme vs = make("cluster_site_local", 7);
  CHECK_THROWS(compile_or_pattern(vs, 0, 0, 1, 1.0, 1));
  ResourceState st = build_circuit_state(CircuitSpec::cluster_from_plus(7));
  certify_in_place(st, vs);
  WitnessOptions o;
  o.shots = 10;
  o.n_split = 1;
  CHECK_THROWS(run_witness(st, vs, o));
}

TEST_CASE("the witness needs a certified state") {
  const ValidatedScheme vs = make("cluster_site_local", 11);
  const ResourceState st = build_circuit_state(CircuitSpec::cluster_from_plus(11));
  CHECK_THROWS(run_witness(st, vs, WitnessOptions{}));
}
