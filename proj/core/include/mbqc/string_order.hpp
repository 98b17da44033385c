#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbqc/scheme.hpp"
#include "mbqc/state.hpp"

namespace mbqc {

struct StringOrderEntry {
  int block = 0;
  GroupElement g = 0;
  std::string label;
  double value = 0.0;
  double imag = 0.0;  // residue, expected below 1e-10
  std::string op;
};

struct StringOrderTable {
  std::string scheme;
  std::string provenance;
  std::vector<StringOrderEntry> entries;

  const StringOrderEntry* find(int block, GroupElement g) const;
};

/// <Phi| R_k(g) |Phi>. Requires a certified state and g in G_k.
double sigma(const ResourceState& state, const ValidatedScheme& vs, int k, GroupElement g);
/// Same without the certificate check, returning the complex expectation.
cplx sigma_raw(const CVec& state, const ValidatedScheme& vs, int k, GroupElement g);

/// Every (k, g) with g in G_k, g != e, for k in `blocks` (all bulk blocks when empty).
StringOrderTable string_order_table(const ResourceState& state, const ValidatedScheme& vs,
                                    const std::vector<int>& blocks = {});

/// Bulk block roughly a quarter into the chain, at least 1.
int anchor_block(const ValidatedScheme& vs);

/// <prod_{s=first}^{last} P_s> for P in {X, Y, Z}, 0-based inclusive sites.
double pauli_string_order(const CVec& state, int n_sites, char axis, int first, int last);

// ---------------------------------------------------------------- sweeps

enum class SweepParam { Alpha, LogG };

struct SweepSpec {
  HamiltonianSpec base;
  SweepParam param = SweepParam::Alpha;
  std::vector<double> grid;
  std::string scheme;                 // default: family scheme
  std::optional<int> anchor;          // bulk block; default anchor_block
  std::vector<GroupElement> elements; // default: every non-identity element of G_anchor
  SolverOptions solver;
  int threads = 1;  // grid points solved concurrently
};

struct SweepPoint {
  double param = 0.0;
  std::vector<StringOrderEntry> values;
  std::string error;  // solver or certification failure at this point
};

struct SweepResult {
  std::string family;
  int n_sites = 0;
  std::vector<SweepPoint> points;

  /// Columns: family,N,param,k,g,sigma
  std::string csv() const;
  /// Value series for one label; NaN where the point failed.
  std::vector<double> series(const std::string& label) const;
};

/// String orders at each grid point. Kitaev-Gamma points report O^x, O^y, O^z on
/// sites N/2+1..N (1-based) under labels "Ox", "Oy", "Oz".
SweepResult sweep(const SweepSpec& spec);

// ---------------------------------------------------------------- decay

struct DecayFit {
  bool fitted = false;
  bool decaying = false;  // xi shorter than the bulk length
  std::string status;
  double xi = 0.0;         // blocks
  double intercept = 0.0;  // log|sigma| at distance 0
  double D = 0.0;          // first distance of the fitted region
  double r2 = 0.0;
  double bound = 0.0;
  int points = 0;
  int n_split = 0;
};

/// Least-squares fit of log|sigma| against distance. The bound is the geometric sum of
/// split-rotation slots in the decaying region: (1/n_split) alpha e^{a - D/xi} / (1 - e^{-2 delta/xi}).
DecayFit decay_fit(const std::vector<double>& distance, const std::vector<double>& value, double alpha, int n_split,
                   int delta);
/// Fit along the chain for element g, distance d = n + 1 - k to the right boundary,
/// over blocks k >= (n + 2) / 2 where the left boundary does not enhance the string.
/// n_split defaults to ceil(n / (2 delta)), the number of spacing-compliant slots.
DecayFit decay_fit(const StringOrderTable& table, const ValidatedScheme& vs, GroupElement g, double alpha, int delta,
                   std::optional<int> n_split = std::nullopt);

}  // namespace mbqc
