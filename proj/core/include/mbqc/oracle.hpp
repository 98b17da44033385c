#pragma once

#include <map>
#include <string>
#include <vector>

#include "mbqc/mbqc.hpp"
#include "mbqc/scheme.hpp"

namespace mbqc {

/// Logical operators T(g) realized on the right boundary block, with their product table.
class LogicalModel {
 public:
  explicit LogicalModel(const ValidatedScheme& vs);

  const ValidatedScheme& scheme() const { return *vs_; }
  int dim() const { return dim_; }
  GroupElement group_size() const { return gs_; }
  const CMat& op(GroupElement g) const { return ops_.at(g); }
  /// T(g) T(h) = phase(g, h) T(g + h), with phase in {1, i, -1, -i}.
  cplx phase(GroupElement g, GroupElement h) const { return phase_[g][h]; }
  bool anticommute(GroupElement g, GroupElement h) const { return anti_[g][h]; }

 private:
  const ValidatedScheme* vs_;
  int dim_ = 0;
  GroupElement gs_ = 0;
  std::vector<CMat> ops_;
  std::vector<std::vector<cplx>> phase_;
  std::vector<std::vector<char>> anti_;
};

struct LogicalState {
  CMat rho;
  std::vector<double> tvec;  // <T(g)> indexed by g
};

struct LogicalChannel {
  GroupElement axis = 0;
  double angle = 0.0;
  double sigma = 1.0;
};

/// rho = (1/d) sum_{h in H} <T(h)> T(h), <T(h)> = c(h) (-1)^{chi(h)} with T(h) = c(h) U(h).
LogicalState init_logical(const LogicalModel& model, const std::vector<int>& chi);
/// <T(g)> read off a density matrix.
std::vector<double> tvec_of(const LogicalModel& model, const CMat& rho);

/// (1+sigma)/2 [V] + (1-sigma)/2 [V^dagger], V = exp(-i angle/2 T(axis)).
LogicalState apply_channel(const LogicalModel& model, const LogicalState& ls, const LogicalChannel& ch);
/// |G| x |G| matrix acting on tvec.
Eigen::MatrixXd transfer_matrix(const LogicalModel& model, const LogicalChannel& ch);
std::vector<double> evolve_tvec(const LogicalModel& model, const std::vector<double>& tvec, const LogicalChannel& ch);

struct Prediction {
  std::vector<GroupElement> readout;
  std::vector<double> value;       // density-matrix path
  std::vector<double> value_tvec;  // transfer-matrix path
  LogicalState final_state;
};

/// Channel sequence of a pattern; sigma maps bulk block to the string order value.
std::vector<LogicalChannel> pattern_channels(const MeasurementPattern& p, const std::map<int, double>& sigma);
Prediction predict(const LogicalModel& model, const std::vector<int>& chi, const MeasurementPattern& p,
                   const std::map<int, double>& sigma);

// ---------------------------------------------------------------- superoperators

/// Column-major vectorized superoperator: vec(Phi(rho)) = S vec(rho).
CMat channel_superop(const LogicalModel& model, const LogicalChannel& ch);
CMat unitary_superop(const CMat& u);
/// Normalized Choi state (1/d) sum_ij |i><j| (x) Phi(|i><j|).
CMat choi_state(const CMat& superop, int dim);
double trace_norm(const CMat& hermitian);
double min_eigenvalue(const CMat& hermitian);

struct SplitResult {
  double lower = 0.0;    // Choi-state trace distance, lower bound on the diamond distance
  double upper = 0.0;    // d times the lower bound
  double bound = 0.0;    // (alpha^2 / N)(1 - sigma^2) / sigma^2
  double choi_min_eig = 0.0;
  bool within_bound = false;
};

/// V(alpha / (sigma N))^N against exp(-i alpha/2 T(axis)).
SplitResult split_rotation(const LogicalModel& model, GroupElement axis, double alpha, double sigma, int n_split);
double split_bound(double alpha, double sigma, int n_split);

struct LieReport {
  int dimension = 0;
  std::vector<GroupElement> generators;
  int rounds = 0;
};

/// Real dimension of the Lie algebra generated by i T(g), g in the union of the
/// admissible axis groups (or the given generators).
LieReport lie_closure(const LogicalModel& model, std::vector<GroupElement> generators = {});

}  // namespace mbqc
