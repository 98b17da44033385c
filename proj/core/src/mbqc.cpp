#include "mbqc/mbqc.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace mbqc {

namespace {

constexpr double kPi = 3.14159265358979323846;

int parity(std::uint64_t x) { return std::popcount(x) & 1; }

double parse_number(std::string_view s) {
  if (s.empty()) return 1.0;
  if (s == "-") return -1.0;
  if (s == "+") return 1.0;
  std::string t(s);
  if (!t.empty() && t.back() == '*') t.pop_back();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad angle: " + std::string(s));
  }
  if (used != t.size()) throw std::invalid_argument("bad angle: " + std::string(s));
  return v;
}

// Readout bookkeeping: subset decomposition over the basis and the sign of the
// ordered basis product relative to the gauge-fixed image.
struct Readout {
  std::vector<GroupElement> basis;
  std::vector<GroupElement> elements;
  std::vector<std::uint32_t> subset;
  std::vector<int> correction;

  Readout(const ValidatedScheme& vs, const MeasurementPattern& p) : basis(readout_basis(vs, p)) {
    const int right = vs.n_bulk() + 1;
    std::vector<std::pair<GroupElement, std::uint32_t>> all;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << basis.size()); ++mask) {
      GroupElement h = 0;
      for (std::size_t b = 0; b < basis.size(); ++b)
        if ((mask >> b) & 1U) h ^= basis[b];
      all.emplace_back(h, mask);
    }
    std::sort(all.begin(), all.end());
    for (const auto& [h, mask] : all) {
      PauliOperator prod(vs.scheme().partition.block(right).size);
      for (std::size_t b = 0; b < basis.size(); ++b)
        if ((mask >> b) & 1U) prod = prod * vs.vL(right, basis[b]);
      const PauliOperator ratio = prod * vs.vL(right, h);
      if (!ratio.is_identity() || (ratio.phase() & 1))
        throw std::logic_error("readout images are not closed under products");
      elements.push_back(h);
      subset.push_back(mask);
      correction.push_back(ratio.phase() == 0 ? 0 : 1);
    }
  }

  // o(h) for every element from a record's s and s_right.
  std::vector<int> outputs(const OutcomeRecord& r) const {
    std::vector<int> o;
    for (std::size_t e = 0; e < elements.size(); ++e) {
      int bit = parity(r.s_right & subset[e]) ^ correction[e];
      for (std::size_t i = 0; i < r.s.size(); ++i) bit ^= parity(r.s[i] & elements[e]);
      o.push_back(bit);
    }
    return o;
  }
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from (seed, shot, block, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t shot, std::uint64_t block, std::uint64_t counter) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ shot);
  h = splitmix64(h ^ (block << 16) ^ counter);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

double parse_angle(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("empty angle");
  const auto p = s.find("pi");
  if (p == std::string::npos) return parse_number(s);
  double v = parse_number(std::string_view(s).substr(0, p)) * kPi;
  std::string_view rest = std::string_view(s).substr(p + 2);
  if (rest.empty()) return v;
  if (rest.front() != '/') throw std::invalid_argument("bad angle: " + std::string(text));
  const double d = parse_number(rest.substr(1));
  if (d == 0) throw std::invalid_argument("zero denominator in angle");
  return v / d;
}

// ---------------------------------------------------------------- patterns

MeasurementPattern MeasurementPattern::wire(const ValidatedScheme& vs) {
  MeasurementPattern p;
  p.scheme = vs.scheme().name;
  p.n_sites = vs.n_sites();
  p.blocks.assign(static_cast<std::size_t>(vs.n_bulk()), BlockSetting{});
  return p;
}

std::vector<int> MeasurementPattern::rotation_blocks() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].angle != 0.0) out.push_back(static_cast<int>(i) + 1);
  return out;
}

std::vector<GroupElement> readout_basis(const ValidatedScheme& vs, const MeasurementPattern& p) {
  return p.hprime_basis.empty() ? vs.Hprime().basis : p.hprime_basis;
}

std::vector<GroupElement> readout_elements(const ValidatedScheme& vs, const MeasurementPattern& p) {
  return Subgroup::span(readout_basis(vs, p)).elements;
}

std::vector<std::string> pattern_problems(const ValidatedScheme& vs, const MeasurementPattern& p, int delta) {
  std::vector<std::string> out;
  if (p.n_sites != vs.n_sites())
    out.push_back("pattern is for " + std::to_string(p.n_sites) + " sites, scheme has " + std::to_string(vs.n_sites()));
  if (static_cast<int>(p.blocks.size()) != vs.n_bulk())
    out.push_back("pattern has " + std::to_string(p.blocks.size()) + " bulk blocks, scheme has " +
                  std::to_string(vs.n_bulk()));
  for (std::size_t i = 0; i < p.blocks.size() && static_cast<int>(i) < vs.n_bulk(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const BlockSetting& b = p.blocks[i];
    if (!(std::abs(b.angle) <= kPi + 1e-12)) out.push_back("block " + std::to_string(k) + ": angle outside [-pi, pi]");
    if (b.axis >= vs.group_size()) {
      out.push_back("block " + std::to_string(k) + ": axis out of range");
      continue;
    }
    if (b.angle != 0.0 && (b.axis == 0 || !vs.G(k).contains(b.axis)))
      out.push_back("block " + std::to_string(k) + ": axis " + vs.label(b.axis) + " is not admissible");
  }
  const auto basis = readout_basis(vs, p);
  const int right = vs.n_bulk() + 1;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    if (basis[a] == 0 || basis[a] >= vs.group_size()) out.push_back("readout basis element out of range");
    for (std::size_t b = a + 1; b < basis.size(); ++b)
      if (basis[a] < vs.group_size() && basis[b] < vs.group_size() &&
          !commutes(vs.vL(right, basis[a]), vs.vL(right, basis[b])))
        out.push_back("readout elements " + vs.label(basis[a]) + " and " + vs.label(basis[b]) + " do not commute");
  }
  if (Subgroup::span(basis).order() != (std::size_t{1} << basis.size()))
    out.push_back("readout basis is not independent");
  if (!p.spacing_override) {
    const auto rot = p.rotation_blocks();
    for (std::size_t i = 1; i < rot.size(); ++i)
      if (rot[i] - rot[i - 1] < 2 * delta)
        out.push_back("rotations on blocks " + std::to_string(rot[i - 1]) + " and " + std::to_string(rot[i]) +
                      " are closer than " + std::to_string(2 * delta) + " blocks");
  }
  return out;
}

void check_pattern(const ValidatedScheme& vs, const MeasurementPattern& p, int delta) {
  const auto problems = pattern_problems(vs, p, delta);
  if (problems.empty()) return;
  std::string msg = "invalid pattern:";
  for (const auto& s : problems) msg += "\n  " + s;
  throw std::invalid_argument(msg);
}

MeasurementPattern parse_pattern(const std::string& json_text, const ValidatedScheme& vs) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  MeasurementPattern p = MeasurementPattern::wire(vs);
  p.scheme = j.value("scheme", vs.scheme().name);
  p.n_sites = j.value("n_sites", vs.n_sites());
  p.spacing_override = j.value("spacing_override", false);
  if (j.contains("hprime"))
    for (const auto& h : j.at("hprime")) p.hprime_basis.push_back(vs.scheme().parse_element(h.get<std::string>()));
  if (j.contains("blocks")) {
    for (const auto& b : j.at("blocks")) {
      const int k = b.at("block").get<int>();
      if (k < 1 || k > vs.n_bulk()) throw std::out_of_range("pattern block " + std::to_string(k) + " out of range");
      BlockSetting& s = p.at(k);
      s.axis = vs.scheme().parse_element(b.at("axis").get<std::string>());
      const auto& a = b.at("angle");
      s.angle = a.is_string() ? parse_angle(a.get<std::string>()) : a.get<double>();
    }
  }
  return p;
}

std::string pattern_to_json(const MeasurementPattern& p, const ValidatedScheme& vs) {
  nlohmann::ordered_json j;
  j["scheme"] = p.scheme;
  j["n_sites"] = p.n_sites;
  nlohmann::ordered_json hp = nlohmann::ordered_json::array();
  for (GroupElement h : readout_basis(vs, p)) hp.push_back(vs.label(h));
  j["hprime"] = hp;
  j["spacing_override"] = p.spacing_override;
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (int k : p.rotation_blocks())
    blocks.push_back({{"block", k}, {"axis", vs.label(p.at(k).axis)}, {"angle", p.at(k).angle}});
  j["blocks"] = blocks;
  return j.dump(2);
}

PauliSum measured_observable(const ValidatedScheme& vs, int k, int j, int q, const BlockSetting& setting) {
  const PauliOperator u = vs.u(k, GroupElement{1} << j);
  if (setting.angle == 0.0 || setting.axis == 0) return PauliSum(u);
  const PauliOperator v = vs.vL(k, setting.axis);
  if (commutes(u, v)) return PauliSum(u);
  // e^{i b v} u e^{-i b v} = u e^{-2 i b v} for anticommuting u, v
  const double beta = (q ? -1.0 : 1.0) * setting.angle / 2.0;
  PauliSum out(u.size());
  out.add(u, std::cos(2 * beta));
  out.add(u * v, cplx(0, -std::sin(2 * beta)));
  out.prune(1e-15);
  return out;
}

// ---------------------------------------------------------------- records

int OutcomeRecord::s_of(int block, GroupElement g) const { return parity(s.at(static_cast<std::size_t>(block)) & g); }

int OutcomeRecord::lambda(int k, GroupElement g) const {
  int bit = 0;
  for (int j = 0; j <= k; ++j) bit ^= s_of(j, g);
  return bit ? -1 : 1;
}

int OutcomeRecord::o_of(GroupElement h) const {
  for (std::size_t e = 0; e < readout.size(); ++e)
    if (readout[e] == h) return o[e];
  throw std::out_of_range("element is not in the readout subgroup");
}

std::vector<std::string> side_processing_problems(const OutcomeRecord& r, const ValidatedScheme& vs,
                                                  const MeasurementPattern& p) {
  std::vector<std::string> out;
  const int n = vs.n_bulk();
  if (static_cast<int>(r.s.size()) != n + 1 || static_cast<int>(r.q.size()) != n + 1) {
    out.push_back("record size does not match the scheme");
    return out;
  }
  for (int k = 1; k <= n; ++k) {
    int q = 0;
    for (int i = 0; i < k; ++i) q ^= r.s_of(i, p.at(k).axis);
    if (q != r.q[static_cast<std::size_t>(k)]) out.push_back("q_" + std::to_string(k) + " inconsistent");
  }
  const Readout ro(vs, p);
  if (ro.elements != r.readout) {
    out.push_back("readout elements differ");
    return out;
  }
  const auto o = ro.outputs(r);
  for (std::size_t e = 0; e < o.size(); ++e)
    if (o[e] != r.o[e]) out.push_back("o(" + vs.label(ro.elements[e]) + ") inconsistent");
  return out;
}

// ---------------------------------------------------------------- sampler

namespace {

enum class StepKind { Left, Right, Bulk };

struct Step {
  StepKind kind;
  int block;
  int index;  // generator or readout basis position
  bool closes_block;
};

}  // namespace

struct ShotSampler::Impl {
  struct Node {
    CVec psi;
    std::vector<char> present;  // blocks still in the vector
    OutcomeRecord rec;
    std::size_t step = 0;
    double p0 = 1.0;
    bool cached = false;
    std::once_flag once;
    std::unique_ptr<Node> child[2];
  };

  const ValidatedScheme& vs;
  MeasurementPattern pattern;
  SamplerOptions opts;
  Readout readout;
  std::vector<Step> steps;
  std::vector<int> block_size;
  std::vector<CMat> left_ops, right_ops;
  std::vector<std::array<std::vector<CMat>, 2>> bulk_ops;  // [k][q][j]
  std::unique_ptr<Node> root;
  mutable std::atomic<std::size_t> cached_amplitudes{0};

  Impl(const ResourceState& state, const ValidatedScheme& v, const MeasurementPattern& p, SamplerOptions o)
      : vs(v), pattern(p), opts(o), readout(v, p) {
    if (state.n_sites != vs.n_sites()) throw std::invalid_argument("state and scheme sizes differ");
    if (static_cast<int>(pattern.blocks.size()) != vs.n_bulk()) throw std::invalid_argument("pattern size mismatch");
    const int n = vs.n_bulk(), m = vs.m();
    for (int b = 0; b <= n + 1; ++b) block_size.push_back(vs.scheme().partition.block(b).size);
    for (int j = 0; j < m; ++j) {
      left_ops.push_back(to_dense(vs.u(0, GroupElement{1} << j)));
      steps.push_back({StepKind::Left, 0, j, j + 1 == m});
    }
    for (std::size_t b = 0; b < readout.basis.size(); ++b) {
      right_ops.push_back(to_dense(vs.vL(n + 1, readout.basis[b])));
      steps.push_back({StepKind::Right, n + 1, static_cast<int>(b), b + 1 == readout.basis.size()});
    }
    bulk_ops.resize(static_cast<std::size_t>(n + 1));
    for (int k = 1; k <= n; ++k) {
      for (int q = 0; q < 2; ++q)
        for (int j = 0; j < m; ++j)
          bulk_ops[static_cast<std::size_t>(k)][static_cast<std::size_t>(q)].push_back(
              measured_observable(vs, k, j, q, pattern.at(k)).to_dense());
      for (int j = 0; j < m; ++j) steps.push_back({StepKind::Bulk, k, j, j + 1 == m});
    }
    root = std::make_unique<Node>();
    root->psi = state.amplitudes;
    root->psi.normalize();
    root->present.assign(static_cast<std::size_t>(n + 2), 1);
    root->rec.s.assign(static_cast<std::size_t>(n + 1), 0);
    root->rec.q.assign(static_cast<std::size_t>(n + 1), 0);
    root->rec.readout = readout.elements;
  }

  // First active position of block b and the number of active sites.
  std::pair<int, int> layout(const Node& nd, int b) const {
    int pos = 0, total = 0;
    for (std::size_t i = 0; i < nd.present.size(); ++i) {
      if (!nd.present[i]) continue;
      if (static_cast<int>(i) < b) pos += block_size[i];
      total += block_size[i];
    }
    return {pos, total};
  }

  static CVec apply_local(const CMat& op, const CVec& psi, int pos, int bsize, int total) {
    const Eigen::Index mid = Eigen::Index{1} << bsize;
    const Eigen::Index lo = Eigen::Index{1} << (total - pos - bsize);
    const Eigen::Index hi = Eigen::Index{1} << pos;
    CVec out(psi.size());
    const CMat opT = op.transpose();
    for (Eigen::Index h = 0; h < hi; ++h) {
      Eigen::Map<const CMat> in(psi.data() + h * mid * lo, lo, mid);
      Eigen::Map<CMat> res(out.data() + h * mid * lo, lo, mid);
      res.noalias() = in * opT;
    }
    return out;
  }

  // Traces out block b when its reduced state is pure.
  void contract(Node& nd, int b) const {
    const auto [pos, total] = layout(nd, b);
    const int bsize = block_size[static_cast<std::size_t>(b)];
    const Eigen::Index mid = Eigen::Index{1} << bsize;
    const Eigen::Index lo = Eigen::Index{1} << (total - pos - bsize);
    const Eigen::Index hi = Eigen::Index{1} << pos;
    CMat rho = CMat::Zero(mid, mid);
    for (Eigen::Index h = 0; h < hi; ++h) {
      Eigen::Map<const CMat> in(nd.psi.data() + h * mid * lo, lo, mid);
      rho.noalias() += in.transpose() * in.conjugate();
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(rho);
    if (es.eigenvalues()[mid - 1] < rho.trace().real() - 1e-10) return;
    const CVec phi = es.eigenvectors().col(mid - 1).conjugate();
    CVec out(hi * lo);
    for (Eigen::Index h = 0; h < hi; ++h) {
      Eigen::Map<const CMat> in(nd.psi.data() + h * mid * lo, lo, mid);
      out.segment(h * lo, lo).noalias() = in * phi;
    }
    out.normalize();
    nd.psi = std::move(out);
    nd.present[static_cast<std::size_t>(b)] = 0;
  }

  const CMat& op_for(const Node& nd, int& q_out) const {
    const Step& st = steps[nd.step];
    q_out = 0;
    switch (st.kind) {
      case StepKind::Left: return left_ops[static_cast<std::size_t>(st.index)];
      case StepKind::Right: return right_ops[static_cast<std::size_t>(st.index)];
      case StepKind::Bulk: {
        int q = 0;
        for (int i = 0; i < st.block; ++i) q ^= nd.rec.s_of(i, pattern.at(st.block).axis);
        q_out = q;
        return bulk_ops[static_cast<std::size_t>(st.block)][static_cast<std::size_t>(q)]
                       [static_cast<std::size_t>(st.index)];
      }
    }
    throw std::logic_error("unreachable");
  }

  // Returns O|psi> and fills p0 = (1 + <O>)/2.
  CVec measure(const Node& nd, double& p0, int& q) const {
    const Step& st = steps[nd.step];
    const CMat& op = op_for(nd, q);
    const auto [pos, total] = layout(nd, st.block);
    CVec phi = apply_local(op, nd.psi, pos, block_size[static_cast<std::size_t>(st.block)], total);
    const double e = nd.psi.dot(phi).real();
    p0 = std::clamp(0.5 * (1.0 + e), 0.0, 1.0);
    return phi;
  }

  std::unique_ptr<Node> make_child(const Node& nd, const CVec& phi, double p0, int q, int outcome) const {
    const double p = outcome ? 1.0 - p0 : p0;
    if (p <= opts.null_probability) return nullptr;
    const Step& st = steps[nd.step];
    auto c = std::make_unique<Node>();
    c->psi = (outcome ? CVec(nd.psi - phi) : CVec(nd.psi + phi)) * (0.5 / std::sqrt(p));
    c->psi.normalize();
    c->present = nd.present;
    c->rec = nd.rec;
    c->step = nd.step + 1;
    const std::uint32_t bit = static_cast<std::uint32_t>(outcome) << st.index;
    switch (st.kind) {
      case StepKind::Left: c->rec.s[0] |= bit; break;
      case StepKind::Right: c->rec.s_right |= bit; break;
      case StepKind::Bulk:
        c->rec.s[static_cast<std::size_t>(st.block)] |= bit;
        c->rec.q[static_cast<std::size_t>(st.block)] = q;
        break;
    }
    if (st.closes_block) contract(*c, st.block);
    return c;
  }

  void expand(Node& nd) const {
    int q = 0;
    const CVec phi = measure(nd, nd.p0, q);
    const std::size_t need = 2 * static_cast<std::size_t>(nd.psi.size());
    if (cached_amplitudes.fetch_add(need) + need <= opts.cache_amplitudes) {
      nd.child[0] = make_child(nd, phi, nd.p0, q, 0);
      nd.child[1] = make_child(nd, phi, nd.p0, q, 1);
      nd.cached = true;
    } else {
      cached_amplitudes.fetch_sub(need);
    }
  }

  OutcomeRecord walk(std::uint64_t seed, std::uint64_t shot) const {
    const Node* cur = root.get();
    std::unique_ptr<Node> scratch;
    int nulls = 0;
    while (cur->step < steps.size()) {
      Node& nd = const_cast<Node&>(*cur);
      std::call_once(nd.once, [&] { expand(nd); });
      const Step& st = steps[cur->step];
      const double u = counter_uniform(seed, shot, static_cast<std::uint64_t>(st.block), cur->step);
      int outcome = u < cur->p0 ? 0 : 1;
      const double p = outcome ? 1.0 - cur->p0 : cur->p0;
      if (p <= opts.null_probability) {
        outcome ^= 1;
        ++nulls;
      }
      if (cur->cached) {
        cur = cur->child[outcome].get();
        if (cur == nullptr) throw std::runtime_error("both measurement branches are null");
      } else {
        double p0 = 0;
        int q = 0;
        const CVec phi = measure(*cur, p0, q);
        auto next = make_child(*cur, phi, p0, q, outcome);
        if (!next) throw std::runtime_error("both measurement branches are null");
        scratch = std::move(next);
        cur = scratch.get();
      }
    }
    OutcomeRecord rec = cur->rec;
    rec.o = readout.outputs(rec);
    rec.null_branches = nulls;
    return rec;
  }
};

ShotSampler::ShotSampler(const ResourceState& state, const ValidatedScheme& vs, const MeasurementPattern& pattern,
                         SamplerOptions opts)
    : impl_(std::make_unique<Impl>(state, vs, pattern, opts)) {}

ShotSampler::~ShotSampler() = default;

OutcomeRecord ShotSampler::shot(std::uint64_t seed, std::uint64_t shot) const { return impl_->walk(seed, shot); }

OutcomeRecord run_shot(const ResourceState& state, const ValidatedScheme& vs, const MeasurementPattern& pattern,
                       std::uint64_t seed, std::uint64_t shot) {
  const ShotSampler sampler(state, vs, pattern);
  return sampler.shot(seed, shot);
}

EstimateResult estimate_T(const ResourceState& state, const ValidatedScheme& vs, const MeasurementPattern& pattern,
                          std::size_t shots, std::uint64_t seed, int threads, SamplerOptions opts) {
  if (shots < 1) throw std::invalid_argument("shots must be at least 1");
  const ShotSampler sampler(state, vs, pattern, opts);
  const auto elements = readout_elements(vs, pattern);
  // Per-shot outputs stored by index so the reduction is independent of thread count.
  std::vector<std::uint32_t> bits(shots);
  std::vector<int> nulls(shots);
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(shots)));
  auto work = [&](int w) {
    for (std::size_t s = static_cast<std::size_t>(w); s < shots; s += static_cast<std::size_t>(workers)) {
      const OutcomeRecord r = sampler.shot(seed, s);
      std::uint32_t b = 0;
      for (std::size_t e = 0; e < r.o.size(); ++e) b |= static_cast<std::uint32_t>(r.o[e]) << e;
      bits[s] = b;
      nulls[s] = r.null_branches;
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  EstimateResult res;
  res.outside_assumptions = pattern.spacing_override;
  for (int v : nulls) res.null_branches += v;
  for (std::size_t e = 0; e < elements.size(); ++e) {
    double sum = 0, sum2 = 0;
    for (std::uint32_t b : bits) {
      const double x = ((b >> e) & 1U) ? -1.0 : 1.0;
      sum += x;
      sum2 += x * x;
    }
    const double n = static_cast<double>(shots);
    const double mean = sum / n;
    const double var = shots > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
    res.values.push_back({elements[e], mean, std::sqrt(var / n), shots});
  }
  return res;
}

// ---------------------------------------------------------------- recursion replay

RecursionReport verify_recursion(const ResourceState& state, const ValidatedScheme& vs,
                                 const MeasurementPattern& pattern, const OutcomeRecord& record, double tol) {
  if (vs.n_sites() > dense_cap()) throw std::runtime_error("chain exceeds dense cap");
  const int n = vs.n_bulk(), m = vs.m(), ns = vs.n_sites();
  const GroupElement gs = vs.group_size();
  RecursionReport rep;
  auto fail = [&](int block, const std::string& msg) {
    if (rep.consistent) rep.first_mismatch = block;
    rep.consistent = false;
    rep.messages.push_back("block " + std::to_string(block) + ": " + msg);
  };
  if (static_cast<int>(record.s.size()) != n + 1 || static_cast<int>(record.q.size()) != n + 1) {
    fail(0, "record size does not match the scheme");
    return rep;
  }

  CVec psi = state.amplitudes;
  psi.normalize();
  auto project = [&](const PauliSum& obs, int outcome, int block) {
    const CVec o = obs.apply(psi);
    CVec next = outcome ? CVec(0.5 * (psi - o)) : CVec(0.5 * (psi + o));
    const double p = next.squaredNorm();
    if (p < 1e-14) {
      fail(block, "recorded outcome has zero probability");
      return;
    }
    psi = next / std::sqrt(p);
  };
  auto check_values = [&](int k, const std::vector<PauliSum>& t) {
    for (GroupElement g = 1; g < gs; ++g) {
      const CVec tv = t[g].apply(psi);
      const double r = (tv - static_cast<double>(record.lambda(k, g)) * psi).norm();
      rep.max_residual = std::max(rep.max_residual, r);
      if (!(r < tol)) {
        fail(k, "T(<=" + std::to_string(k) + ")(" + vs.label(g) + ") does not have the recorded eigenvalue");
        return;
      }
    }
  };

  for (int j = 0; j < m; ++j)
    project(PauliSum(vs.embed(0, vs.u(0, GroupElement{1} << j))), static_cast<int>((record.s[0] >> j) & 1U), 0);
  const Readout ro(vs, pattern);
  for (std::size_t b = 0; b < ro.basis.size(); ++b)
    project(PauliSum(vs.embed(n + 1, vs.vL(n + 1, ro.basis[b]))), static_cast<int>((record.s_right >> b) & 1U),
            n + 1);

  std::vector<PauliSum> t(gs);
  for (GroupElement g = 0; g < gs; ++g) t[g] = PauliSum(vs.u_prefix(0, g));
  check_values(0, t);

  for (int k = 1; k <= n && rep.consistent; ++k) {
    const BlockSetting& set = pattern.at(k);
    int q = 0;
    for (int i = 0; i < k; ++i) q ^= record.s_of(i, set.axis);
    if (q != record.q[static_cast<std::size_t>(k)]) {
      fail(k, "recorded adjustment bit differs from the side-processing value");
      break;
    }
    for (int j = 0; j < m; ++j) {
      const PauliSum local = measured_observable(vs, k, j, record.q[static_cast<std::size_t>(k)], set);
      PauliSum global(ns);
      for (const auto& [key, c] : local.terms())
        global.add(vs.embed(k, PauliOperator(local.size(), key.first, key.second, 0)), c);
      project(global, static_cast<int>((record.s[static_cast<std::size_t>(k)] >> j) & 1U), k);
    }
    if (!rep.consistent) break;
    // T^{(<=k)}(g) = T^{(<=k-1)}(g) e^{i a/2 A} u_k(g) e^{-i a/2 A}, A = T^{(<=k-1)}(g_k) v_{L,k}(g_k)
    std::vector<PauliSum> next(gs);
    if (set.angle == 0.0 || set.axis == 0) {
      for (GroupElement g = 0; g < gs; ++g) next[g] = t[g] * PauliSum(vs.embed(k, vs.u(k, g)));
    } else {
      const PauliSum a = t[set.axis] * PauliSum(vs.embed(k, vs.vL(k, set.axis)));
      const PauliSum ep = exp_involution(a, set.angle / 2), em = exp_involution(a, -set.angle / 2);
      for (GroupElement g = 0; g < gs; ++g) {
        next[g] = t[g] * ep * PauliSum(vs.embed(k, vs.u(k, g))) * em;
        next[g].prune(1e-13);
      }
    }
    t = std::move(next);
    check_values(k, t);
  }

  if (rep.consistent) {
    const auto o = ro.outputs(record);
    for (std::size_t e = 0; e < ro.elements.size(); ++e) {
      const GroupElement h = ro.elements[e];
      if (e < record.o.size() && record.o[e] != o[e]) fail(n + 1, "recorded o(" + vs.label(h) + ") inconsistent");
      const PauliSum tn = t[h] * PauliSum(vs.embed(n + 1, vs.vL(n + 1, h)));
      const double r = (tn.apply(psi) - (o[e] ? -1.0 : 1.0) * psi).norm();
      rep.max_residual = std::max(rep.max_residual, r);
      if (!(r < tol)) fail(n + 1, "T_n(" + vs.label(h) + ") does not have eigenvalue (-1)^o");
    }
  }
  return rep;
}

}  // namespace mbqc
