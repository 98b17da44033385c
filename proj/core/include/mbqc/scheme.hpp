#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbqc/pauli.hpp"

namespace mbqc {

/// Element of (Z2)^m; bit j is the exponent of generator j.
using GroupElement = std::uint32_t;

inline constexpr int kMaxGenerators = 6;

struct Subgroup {
  std::vector<GroupElement> basis;
  std::vector<GroupElement> elements;  // sorted, contains 0

  static Subgroup span(const std::vector<GroupElement>& generators);
  bool contains(GroupElement g) const;
  std::size_t order() const { return elements.size(); }
  bool operator==(const Subgroup& o) const { return elements == o.elements; }
};

/// Images of the generators on one bulk block, each a block-local Pauli string.
struct BulkImages {
  std::vector<PauliOperator> u;
  std::vector<PauliOperator> vL;
};

struct SymmetryScheme {
  std::string name;
  std::vector<std::string> generators;
  SitePartition partition;
  std::vector<PauliOperator> u0;
  std::vector<PauliOperator> vR0;
  std::vector<BulkImages> bulk;  // bulk[i-1] belongs to block i
  std::vector<PauliOperator> vL_right;
  std::optional<std::vector<GroupElement>> H;       // declared basis
  std::optional<std::vector<GroupElement>> Hprime;  // declared basis
  std::optional<std::vector<int>> chi;              // expected character on generators

  int m() const { return static_cast<int>(generators.size()); }
  int n_bulk() const { return static_cast<int>(bulk.size()); }
  int right_block() const { return n_bulk() + 1; }
  int n_sites() const { return partition.n_sites(); }
  GroupElement group_size() const { return GroupElement{1} << m(); }
  std::string label(GroupElement g) const;
  GroupElement parse_element(const std::string& label) const;
};

struct Violation {
  std::string relation;  // tag such as "left_kappa", "init_subgroup", "u_abelian"
  int block = -1;
  GroupElement g = 0;
  GroupElement gp = 0;
  std::string lhs;
  std::string rhs;
  std::string message;
};

std::string format_violation(const SymmetryScheme& s, const Violation& v);

enum class OperatorKind { U, T, L, R };

class ValidatedScheme {
 public:
  const SymmetryScheme& scheme() const { return scheme_; }
  int m() const { return scheme_.m(); }
  int n_bulk() const { return scheme_.n_bulk(); }
  int n_sites() const { return scheme_.n_sites(); }
  GroupElement group_size() const { return scheme_.group_size(); }
  std::string label(GroupElement g) const { return scheme_.label(g); }

  /// kappa(g, g') in {0,1}, bilinear over generator bits.
  int kappa(GroupElement g, GroupElement gp) const;
  const std::vector<std::vector<int>>& kappa_matrix() const { return kappa_; }
  const Subgroup& H() const { return H_; }
  const Subgroup& Hprime() const { return Hprime_; }
  const std::vector<Subgroup>& H_candidates() const { return H_candidates_; }
  /// Admissible rotation axes on bulk block i (1..n).
  const Subgroup& G(int i) const;

  /// Block-local images of arbitrary group elements.
  PauliOperator u(int block, GroupElement g) const;   // blocks 0..n
  PauliOperator vL(int block, GroupElement g) const;  // blocks 1..n+1
  PauliOperator vR(int block, GroupElement g) const;  // blocks 0..n

  /// Global Hermitian operators on the whole chain.
  PauliOperator U(GroupElement g) const;
  PauliOperator T(GroupElement g) const;
  PauliOperator L(int k, GroupElement g) const;
  PauliOperator R(int k, GroupElement g) const;
  PauliOperator assemble(OperatorKind kind, GroupElement g, int k = 0) const;
  /// Product u_0(g) ... u_k(g) on blocks 0..k, identity elsewhere.
  PauliOperator u_prefix(int k, GroupElement g) const;
  /// Place a block-local operator on the chain.
  PauliOperator embed(int block, const PauliOperator& local) const;

  /// Sign c(h) in T(h) = c(h) U(h) for h in H (+1 or -1).
  int init_sign(GroupElement h) const;

 private:
  friend struct Validator;
  SymmetryScheme scheme_;
  std::vector<std::vector<int>> kappa_;
  Subgroup H_;
  Subgroup Hprime_;
  std::vector<Subgroup> H_candidates_;
  std::vector<Subgroup> G_;
  std::vector<PauliOperator> U_gen_;
};

struct ValidationResult {
  std::optional<ValidatedScheme> scheme;
  std::vector<Violation> violations;
  bool ok() const { return scheme.has_value(); }
};

/// v_R(i, g) = v_L(i, g) u(i, g), gauge-fixed, for every bulk block and generator.
std::vector<std::vector<PauliOperator>> derive_vR(const SymmetryScheme& scheme);
ValidationResult validate(const SymmetryScheme& scheme);
ValidatedScheme validate_or_throw(const SymmetryScheme& scheme);
/// Maximal subset of G obeying the bulk commutation constraints on block i.
Subgroup compute_Gi(const ValidatedScheme& vs, int i);
/// Same constraints evaluated by scanning elements in the given order.
Subgroup compute_Gi_ordered(const ValidatedScheme& vs, int i, const std::vector<GroupElement>& order);

struct AlgebraReport {
  std::size_t checks = 0;
  std::vector<Violation> failures;
  bool ok() const { return failures.empty(); }
};

/// Exhaustive check of the commutation relations among U, T, L_k, R_k,
/// the +-1 projective commutation of all block images, and linearity of U.
AlgebraReport check_algebra(const ValidatedScheme& vs);

/// Enumerates every subgroup of (Z2)^m.
std::vector<Subgroup> all_subgroups(int m);

}  // namespace mbqc
