#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mbqc/scheme.hpp"
#include "mbqc/state.hpp"

namespace mbqc {

/// Parses "0.25", "pi/4", "-0.5pi", "3*pi/8".
double parse_angle(std::string_view text);

struct BlockSetting {
  GroupElement axis = 0;
  double angle = 0.0;  // logical rotation exp(-i angle/2 T(axis))
};

struct MeasurementPattern {
  std::string scheme;
  int n_sites = 0;
  std::vector<BlockSetting> blocks;         // blocks[k-1] for bulk block k
  std::vector<GroupElement> hprime_basis;   // empty: the scheme's readout subgroup
  bool spacing_override = false;

  /// All angles zero.
  static MeasurementPattern wire(const ValidatedScheme& vs);
  BlockSetting& at(int k) { return blocks.at(static_cast<std::size_t>(k - 1)); }
  const BlockSetting& at(int k) const { return blocks.at(static_cast<std::size_t>(k - 1)); }
  /// Bulk blocks carrying a nonzero angle, ascending.
  std::vector<int> rotation_blocks() const;
};

/// Readout basis actually used: the pattern's, else the scheme's H'.
std::vector<GroupElement> readout_basis(const ValidatedScheme& vs, const MeasurementPattern& p);
/// Every element of the readout subgroup, ascending.
std::vector<GroupElement> readout_elements(const ValidatedScheme& vs, const MeasurementPattern& p);

/// Problems with the pattern; the spacing rule needs nonzero angles at least
/// 2 delta blocks apart unless overridden.
std::vector<std::string> pattern_problems(const ValidatedScheme& vs, const MeasurementPattern& p, int delta);
void check_pattern(const ValidatedScheme& vs, const MeasurementPattern& p, int delta);

/// Pattern files are JSON:
/// {"scheme": "...", "n_sites": 13, "hprime": ["g10"], "spacing_override": false,
///  "blocks": [{"block": 2, "axis": "g01", "angle": "pi/4"}, ...]}
/// Blocks not listed have angle zero.
MeasurementPattern parse_pattern(const std::string& json_text, const ValidatedScheme& vs);
std::string pattern_to_json(const MeasurementPattern& p, const ValidatedScheme& vs);

/// Observable measured for generator j on bulk block k with adjustment bit q,
/// as a block-local Pauli sum.
PauliSum measured_observable(const ValidatedScheme& vs, int k, int j, int q, const BlockSetting& setting);

struct OutcomeRecord {
  std::vector<std::uint32_t> s;       // s[i] bit j: outcome of generator j on block i, i = 0..n
  std::uint32_t s_right = 0;          // bit b: outcome of readout basis element b on block n+1
  std::vector<int> q;                 // q[k] for k = 1..n, q[0] = 0
  std::vector<GroupElement> readout;  // readout subgroup elements
  std::vector<int> o;                 // o[r] for readout[r]
  int null_branches = 0;

  /// s_i(g), extended linearly over generator bits; blocks 0..n.
  int s_of(int block, GroupElement g) const;
  /// (-1)^{sum_{j<=k} s_j(g)}.
  int lambda(int k, GroupElement g) const;
  int o_of(GroupElement h) const;
};

/// Checks q and o against the side-processing relations; empty when consistent.
std::vector<std::string> side_processing_problems(const OutcomeRecord& r, const ValidatedScheme& vs,
                                                  const MeasurementPattern& p);

struct SamplerOptions {
  std::size_t cache_amplitudes = std::size_t{1} << 23;  // memoized branch states, in amplitudes
  double null_probability = 1e-14;
};

/// Shot sampler. Branch states are memoized in an outcome tree shared across shots,
/// and blocks left in a product state after measurement are traced out.
class ShotSampler {
 public:
  ShotSampler(const ResourceState& state, const ValidatedScheme& vs, const MeasurementPattern& pattern,
              SamplerOptions opts = {});
  ~ShotSampler();
  ShotSampler(const ShotSampler&) = delete;
  ShotSampler& operator=(const ShotSampler&) = delete;

  /// Outcome record of shot `shot` under run seed `seed`. Thread-safe.
  OutcomeRecord shot(std::uint64_t seed, std::uint64_t shot) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

OutcomeRecord run_shot(const ResourceState& state, const ValidatedScheme& vs, const MeasurementPattern& pattern,
                       std::uint64_t seed, std::uint64_t shot = 0);

struct TEstimate {
  GroupElement h = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t shots = 0;
};

struct EstimateResult {
  std::vector<TEstimate> values;  // one per readout element
  int null_branches = 0;
  bool outside_assumptions = false;  // spacing rule overridden
};

/// Monte-Carlo estimate of <T_n(h)> for every readout element h.
EstimateResult estimate_T(const ResourceState& state, const ValidatedScheme& vs, const MeasurementPattern& pattern,
                          std::size_t shots, std::uint64_t seed, int threads = 1, SamplerOptions opts = {});

struct RecursionReport {
  bool consistent = true;
  int first_mismatch = -1;  // block index, n+1 for the final readout
  double max_residual = 0.0;
  std::vector<std::string> messages;
};

/// Replays a shot's projections on the dense state and checks, after every block k,
/// that T^{(<=k)}(g) built from the recursion has eigenvalue lambda^{(<=k)}(g) for all g.
RecursionReport verify_recursion(const ResourceState& state, const ValidatedScheme& vs,
                                 const MeasurementPattern& pattern, const OutcomeRecord& record, double tol = 1e-8);

}  // namespace mbqc
