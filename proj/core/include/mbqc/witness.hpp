#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mbqc/mbqc.hpp"
#include "mbqc/oracle.hpp"

namespace mbqc {

/// Logical elements used by the OR circuit: rotations about z, readout of x.
struct WitnessAxes {
  GroupElement z = 0;
  GroupElement x = 0;
};
WitnessAxes witness_axes(const ValidatedScheme& vs);

/// Bulk blocks admitting the z axis, greedily spaced at least 2 delta apart.
std::vector<int> rotation_slots(const ValidatedScheme& vs, GroupElement axis, int delta);

/// Four z rotations exp(i s pi/8 Z) with signs 1, (-1)^a, (-1)^b, (-1)^{a+b}, each split
/// into n_split pieces rescaled by 1/sigma_hat, then x readout.
MeasurementPattern compile_or_pattern(const ValidatedScheme& vs, int a, int b, int n_split, double sigma_hat,
                                      int delta);

/// Summed splitting bound of the four rotations.
double witness_bound(double sigma_hat, int n_split);

struct WitnessOptions {
  std::size_t shots = 100000;
  std::uint64_t seed = 1;
  std::optional<int> n_split;  // auto: smallest count with witness_bound < target_bound
  double target_bound = 0.25;
  int delta = 1;
  int threads = 1;
};

struct WitnessInput {
  int a = 0;
  int b = 0;
  int target = 0;  // OR(a, b)
  double success = 0.0;
  double std_error = 0.0;
  double predicted = 0.0;  // logical-channel success probability
};

struct WitnessReport {
  std::vector<WitnessInput> inputs;
  std::array<int, 4> truth_table{};  // ideal output bit o for (a,b) = 00, 01, 10, 11
  bool negated = false;              // output relabeled o -> 1 - o
  bool nonlinear = false;
  double worst = 0.0;
  double worst_std_error = 0.0;
  bool contextual = false;
  int n_split = 0;
  double sigma_hat = 0.0;
  double total_bound = 0.0;
  int blocks_consumed = 0;
  int last_block = 0;
  std::string note;  // why the target bound or the compilation was not reached
};

/// Ideal output bits of the compiled circuits with unit string order and the state's chi.
std::array<int, 4> ideal_truth_table(const ValidatedScheme& vs, const std::vector<int>& chi, int delta);
/// True when the table matches no affine function c0 + c1 a + c2 b over Z2.
bool is_nonlinear(const std::array<int, 4>& table);

WitnessReport run_witness(const ResourceState& state, const ValidatedScheme& vs, const WitnessOptions& opts);

}  // namespace mbqc
