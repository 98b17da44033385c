#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbqc/pauli.hpp"
#include "mbqc/scheme.hpp"

namespace mbqc {

// ---------------------------------------------------------------- circuits

struct Gate {
  enum class Kind { H, CZ, X, Z, S, RZ, RX };
  Kind kind = Kind::H;
  int a = 0;
  int b = -1;
  double angle = 0.0;  // RZ/RX: exp(-i angle/2 P)
  bool clifford() const;
};

struct CircuitSpec {
  enum class Reference { Zero, Plus };
  int n_sites = 0;
  Reference reference = Reference::Zero;
  std::vector<std::vector<Gate>> layers;
  std::string label;

  /// tau rounds of (CZ chain)(H on every site) applied to |0...0>; tau=1 is the cluster state.
  static CircuitSpec qca(int n_sites, int tau);
  /// CZ chain applied to |+...+>.
  static CircuitSpec cluster_from_plus(int n_sites);
  std::size_t gate_count() const;
};

// ---------------------------------------------------------------- Hamiltonians

enum class Family { ClusterField, QcaField, IsingTransverse, KitaevGamma };
enum class Frame { Rotated, Unrotated };
enum class ChainEnd { XEnd, YEnd };

struct HamiltonianSpec {
  Family family = Family::ClusterField;
  int n_sites = 0;
  double alpha = 0.0;     // cluster, QCA, Ising
  double coupling = 1.0;  // Ising overall scale
  double phi = 0.0;       // Kitaev-Gamma: K = sin(phi), Gamma = cos(phi)
  double g_ratio = 1.0;   // Kitaev-Gamma: g_y / g_x with g_x = 1
  Frame frame = Frame::Rotated;
  ChainEnd end = ChainEnd::XEnd;
  /// Symmetry sector returned when the ground manifold is degenerate (default all zero).
  std::optional<std::vector<int>> sector;
  /// Declared effective entanglement range of the ground state.
  std::optional<int> delta;

  void check() const;
  std::string describe() const;
};

std::string family_name(Family f);
Family parse_family(const std::string& s);

/// Hamiltonian as a sum of Pauli strings with real coefficients.
PauliSum hamiltonian(const HamiltonianSpec& spec);
/// Global symmetry generators the Hamiltonian commutes with.
std::vector<PauliOperator> symmetry_generators(const HamiltonianSpec& spec);
/// Built-in scheme name matching the family (for certification and strings).
std::string default_scheme_for(Family f);

// ---------------------------------------------------------------- states

struct ResourceState {
  int n_sites = 0;
  CVec amplitudes;
  std::string provenance;
  std::optional<std::vector<int>> chi;  // certified character on generators
  int delta = 0;
  bool delta_exact = false;
  double energy = 0.0;
  int ground_degeneracy = 1;
};

struct SolverOptions {
  int dense_max_sites = 8;  // dense diagonalization up to here (hard limit 12)
  int iterative_max_sites = 20;
  int max_matvecs = 5000;
  double residual_tol = 1e-9;
  double screening_tol = 1e-5;  // residual for the first pass over symmetry sectors
  double degeneracy_tol = 1e-7;
  int krylov_dim = 40;
  std::uint64_t seed = 12345;
};

ResourceState build_circuit_state(const CircuitSpec& spec);
ResourceState ground_state(const HamiltonianSpec& spec, const SolverOptions& opts = {});
/// Applies the circuit to an arbitrary input vector.
CVec apply_circuit(const CircuitSpec& spec, const CVec& in);

struct SymmetryCertificate {
  bool symmetric = false;
  std::vector<int> chi;          // meaningful when symmetric
  std::vector<double> residual;  // || U(g)|phi> -/+ |phi> || per generator
  std::vector<int> failing;      // generators that do not stabilize the state
};

SymmetryCertificate certify_symmetry(const CVec& state, const ValidatedScheme& vs, double tol = 1e-8);
SymmetryCertificate certify_symmetry(const CVec& state, const std::vector<PauliOperator>& generators,
                                     double tol = 1e-8);
/// Certifies and stores chi in the state; throws if not symmetric.
void certify_in_place(ResourceState& state, const ValidatedScheme& vs, double tol = 1e-8);

/// Entanglement range in units of blocks. Exact mode conjugates every single-site
/// Pauli through a Clifford circuit; bound mode uses the gate lightcone.
int entanglement_range(const CircuitSpec& spec, const std::optional<SitePartition>& blocks = std::nullopt,
                       bool exact = true);

/// Heisenberg conjugation W^dagger P W through a Clifford circuit.
PauliOperator conjugate_through(const CircuitSpec& spec, const PauliOperator& p);

// ---------------------------------------------------------------- U6 frame change

enum class Direction { Forward, Inverse };
/// Site rotation of the six-site pattern for absolute site index (0-based, with offset).
CMat u6_site_rotation(int site);
CVec apply_u6(const CVec& state, int n_sites, Direction dir, int site_offset = 0);
/// Conjugates a Hamiltonian: Forward gives U6 H U6^dagger.
PauliSum apply_u6(const PauliSum& h, Direction dir, int site_offset = 0);

// ---------------------------------------------------------------- eigensolvers

struct EigenResult {
  double energy = 0.0;
  CVec vector;
  int matvecs = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Restarted Lanczos for the lowest eigenpair of a Hermitian Pauli sum, restricted to
/// the joint eigenspace of the given commuting involutions with eigenvalues (-1)^sector.
/// Starts from `start` when given, else from a seeded random vector.
EigenResult lanczos_ground(const PauliSum& h, const std::vector<PauliOperator>& sym, const std::vector<int>& sector,
                           const SolverOptions& opts, const CVec* start = nullptr);

/// Makes the largest-magnitude amplitude real and positive.
void fix_global_phase(CVec& v);

// ---------------------------------------------------------------- cache

/// Binary dump: "MBQCSTv1", u32 n_sites, u32 provenance length, provenance bytes,
/// then 2^n little-endian (re, im) double pairs.
void save_state(const std::string& path, const ResourceState& s);
ResourceState load_state(const std::string& path);
std::string cache_key(const HamiltonianSpec& spec);
/// Loads from cache_dir if present, else solves and stores.
ResourceState cached_ground_state(const HamiltonianSpec& spec, const std::string& cache_dir,
                                  const SolverOptions& opts = {});

}  // namespace mbqc
