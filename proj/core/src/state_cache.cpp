#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "mbqc/state.hpp"

namespace mbqc {

namespace {

constexpr char kMagic[8] = {'M', 'B', 'Q', 'C', 'S', 'T', 'v', '1'};

template <typename U>
void put_le(std::ostream& os, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U get_le(std::istream& is) {
  unsigned char bytes[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U))) throw std::runtime_error("truncated state file");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

void put_double(std::ostream& os, double d) { put_le(os, std::bit_cast<std::uint64_t>(d)); }
double get_double(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

}  // namespace

void save_state(const std::string& path, const ResourceState& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.write(kMagic, sizeof(kMagic));
  put_le(os, static_cast<std::uint32_t>(s.n_sites));
  put_le(os, static_cast<std::uint32_t>(s.provenance.size()));
  os.write(s.provenance.data(), static_cast<std::streamsize>(s.provenance.size()));
  for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i) {
    put_double(os, s.amplitudes[i].real());
    put_double(os, s.amplitudes[i].imag());
  }
  if (!os) throw std::runtime_error("write failed for " + path);
}

ResourceState load_state(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a state file: " + path);
  ResourceState s;
  s.n_sites = static_cast<int>(get_le<std::uint32_t>(is));
  if (s.n_sites < 1 || s.n_sites > dense_cap()) throw std::runtime_error("state file exceeds dense cap");
  const auto len = get_le<std::uint32_t>(is);
  s.provenance.resize(len);
  if (!is.read(s.provenance.data(), len)) throw std::runtime_error("truncated state file");
  const Eigen::Index dim = Eigen::Index{1} << s.n_sites;
  s.amplitudes.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = get_double(is);
    s.amplitudes[i] = cplx(re, get_double(is));
  }
  return s;
}

std::string cache_key(const HamiltonianSpec& spec) {
  // 64-bit FNV-1a of the canonical description
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : spec.describe()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

ResourceState cached_ground_state(const HamiltonianSpec& spec, const std::string& cache_dir,
                                  const SolverOptions& opts) {
  namespace fs = std::filesystem;
  const fs::path file = fs::path(cache_dir) / (cache_key(spec) + ".state");
  if (fs::exists(file)) {
    ResourceState s = load_state(file.string());
    if (s.provenance == "hamiltonian: " + spec.describe()) {
      const std::vector<PauliOperator> sym = symmetry_generators(spec);
      const SymmetryCertificate cert = certify_symmetry(s.amplitudes, sym, 1e-7);
      if (cert.symmetric) s.chi = cert.chi;
      s.energy = hamiltonian(spec).expectation(s.amplitudes).real();
      s.delta = spec.delta.value_or(spec.family == Family::QcaField ? 2 : 1);
      return s;
    }
  }
  ResourceState s = ground_state(spec, opts);
  fs::create_directories(cache_dir);
  save_state(file.string(), s);
  return s;
}

}  // namespace mbqc
