#include "mbqc/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mbqc/string_order.hpp"

namespace mbqc {

namespace {

constexpr double kPi = 3.14159265358979323846;

int bit_or(int a, int b) { return a | b; }

}  // namespace

WitnessAxes witness_axes(const ValidatedScheme& vs) {
  const auto& basis = vs.Hprime().basis;
  if (basis.size() != 1) throw std::invalid_argument("witness needs a single readout element");
  WitnessAxes ax;
  ax.x = basis.front();
  const int right = vs.n_bulk() + 1;
  for (GroupElement g = 1; g < vs.group_size() && ax.z == 0; ++g) {
    if (commutes(vs.vL(right, g), vs.vL(right, ax.x))) continue;
    for (int k = 1; k <= vs.n_bulk(); ++k)
      if (vs.G(k).contains(g)) {
        ax.z = g;
        break;
      }
  }
  if (ax.z == 0) throw std::invalid_argument("no admissible axis anticommutes with the readout");
  return ax;
}

std::vector<int> rotation_slots(const ValidatedScheme& vs, GroupElement axis, int delta) {
  std::vector<int> out;
  for (int k = 1; k <= vs.n_bulk(); ++k) {
    if (!vs.G(k).contains(axis)) continue;
    if (!out.empty() && k - out.back() < 2 * delta) continue;
    out.push_back(k);
  }
  return out;
}

double witness_bound(double sigma_hat, int n_split) { return 4 * split_bound(kPi / 4, sigma_hat, n_split); }

MeasurementPattern compile_or_pattern(const ValidatedScheme& vs, int a, int b, int n_split, double sigma_hat,
                                      int delta) {
  if (n_split < 1) throw std::invalid_argument("split count must be positive");
  if (!(sigma_hat > 0)) throw std::invalid_argument("string order must be positive");
  const WitnessAxes ax = witness_axes(vs);
  const auto slots = rotation_slots(vs, ax.z, delta);
  if (static_cast<int>(slots.size()) < 4 * n_split)
    throw std::invalid_argument("chain too short: " + std::to_string(slots.size()) + " rotation slots, need " +
                                std::to_string(4 * n_split));
  MeasurementPattern p = MeasurementPattern::wire(vs);
  p.hprime_basis = {ax.x};
  const int signs[4] = {1, a ? -1 : 1, b ? -1 : 1, (a ^ b) ? -1 : 1};
  // exp(i s pi/8 Z) = exp(-i angle/2 Z) with angle = -s pi/4
  const double piece = kPi / 4 / (sigma_hat * n_split);
  if (piece > kPi + 1e-12) throw std::invalid_argument("rescaled angle exceeds pi");
  for (int r = 0; r < 4; ++r)
    for (int i = 0; i < n_split; ++i) {
      BlockSetting& s = p.at(slots[static_cast<std::size_t>(r * n_split + i)]);
      s.axis = ax.z;
      s.angle = -signs[r] * piece;
    }
  return p;
}

std::array<int, 4> ideal_truth_table(const ValidatedScheme& vs, const std::vector<int>& chi, int delta) {
  const LogicalModel model(vs);
  const WitnessAxes ax = witness_axes(vs);
  std::array<int, 4> table{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const MeasurementPattern p = compile_or_pattern(vs, a, b, 1, 1.0, delta);
      std::map<int, double> sigma;
      for (int k : p.rotation_blocks()) sigma[k] = 1.0;
      const Prediction pr = predict(model, chi, p, sigma);
      const auto it = std::find(pr.readout.begin(), pr.readout.end(), ax.x);
      const double v = pr.value[static_cast<std::size_t>(it - pr.readout.begin())];
      if (std::abs(std::abs(v) - 1) > 1e-9) throw std::logic_error("ideal witness circuit is not deterministic");
      table[static_cast<std::size_t>(2 * a + b)] = v < 0 ? 1 : 0;
    }
  return table;
}

bool is_nonlinear(const std::array<int, 4>& table) {
  for (int c = 0; c < 8; ++c) {
    bool match = true;
    for (int a = 0; a < 2 && match; ++a)
      for (int b = 0; b < 2 && match; ++b)
        match = table[static_cast<std::size_t>(2 * a + b)] == (((c & 1) ^ ((c >> 1) & a) ^ ((c >> 2) & b)) & 1);
    if (match) return false;
  }
  return true;
}

WitnessReport run_witness(const ResourceState& state, const ValidatedScheme& vs, const WitnessOptions& opts) {
  if (!state.chi) throw std::invalid_argument("state has no symmetry certificate");
  const WitnessAxes ax = witness_axes(vs);
  const auto slots = rotation_slots(vs, ax.z, opts.delta);
  auto sigma_hat_for = [&](int n_split) {
    double s = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4 * n_split; ++i) s = std::min(s, sigma(state, vs, slots[static_cast<std::size_t>(i)], ax.z));
    return s;
  };

  WitnessReport rep;
  if (opts.n_split) {
    rep.n_split = *opts.n_split;
    if (static_cast<int>(slots.size()) < 4 * rep.n_split) throw std::invalid_argument("chain too short");
    rep.sigma_hat = sigma_hat_for(rep.n_split);
  } else {
    const int most = static_cast<int>(slots.size()) / 4;
    if (most < 1) throw std::invalid_argument("chain too short for four rotations");
    for (int n = 1; n <= most && rep.n_split == 0; ++n) {
      const double s = sigma_hat_for(n);
      if (s > 0 && witness_bound(s, n) < opts.target_bound) {
        rep.n_split = n;
        rep.sigma_hat = s;
      }
    }
    if (rep.n_split == 0) {
      rep.n_split = most;
      rep.sigma_hat = sigma_hat_for(most);
      rep.note = "target splitting bound not reachable on this chain";
    }
  }
  rep.blocks_consumed = 4 * rep.n_split;
  rep.last_block = slots[static_cast<std::size_t>(rep.blocks_consumed - 1)];
  if (!(rep.sigma_hat * rep.n_split >= 0.25)) {
    // the rescaled angle would exceed pi: nothing to sample
    rep.note = "string order too small for the rescaled angle";
    rep.total_bound = rep.sigma_hat > 0 ? witness_bound(rep.sigma_hat, rep.n_split)
                                        : std::numeric_limits<double>::infinity();
    rep.worst = 0.0;
    return rep;
  }
  rep.total_bound = witness_bound(rep.sigma_hat, rep.n_split);

  rep.truth_table = ideal_truth_table(vs, *state.chi, opts.delta);
  rep.nonlinear = is_nonlinear(rep.truth_table);
  bool is_or = true, is_nor = true;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int t = rep.truth_table[static_cast<std::size_t>(2 * a + b)];
      is_or = is_or && t == bit_or(a, b);
      is_nor = is_nor && t != bit_or(a, b);
    }
  if (!is_or && !is_nor) throw std::logic_error("compiled circuits do not compute OR up to relabeling");
  rep.negated = !is_or;

  const LogicalModel model(vs);
  rep.worst = 1.0;
  double worst_lcb = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const MeasurementPattern p = compile_or_pattern(vs, a, b, rep.n_split, rep.sigma_hat, opts.delta);
      check_pattern(vs, p, opts.delta);
      const EstimateResult est =
          estimate_T(state, vs, p, opts.shots, opts.seed + static_cast<std::uint64_t>(2 * a + b), opts.threads);
      std::map<int, double> sig;
      for (int k : p.rotation_blocks()) sig[k] = sigma(state, vs, k, ax.z);
      const Prediction pr = predict(model, *state.chi, p, sig);
      WitnessInput in;
      in.a = a;
      in.b = b;
      in.target = bit_or(a, b);
      const int raw = in.target ^ (rep.negated ? 1 : 0);  // expected o before relabeling
      const double sign = raw ? -1.0 : 1.0;
      for (const TEstimate& t : est.values)
        if (t.h == ax.x) {
          in.success = 0.5 * (1 + sign * t.mean);
          in.std_error = 0.5 * t.std_error;
        }
      for (std::size_t e = 0; e < pr.readout.size(); ++e)
        if (pr.readout[e] == ax.x) in.predicted = 0.5 * (1 + sign * pr.value[e]);
      rep.inputs.push_back(in);
      if (in.success - 3 * in.std_error < worst_lcb) {
        worst_lcb = in.success - 3 * in.std_error;
        rep.worst = in.success;
        rep.worst_std_error = in.std_error;
      }
    }
  rep.contextual = rep.nonlinear && worst_lcb > 0.75;
  return rep;
}

}  // namespace mbqc
