#include "mbqc/scheme.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mbqc {

Subgroup Subgroup::span(const std::vector<GroupElement>& generators) {
  Subgroup s;
  std::set<GroupElement> elems{0};
  for (GroupElement g : generators) {
    if (elems.count(g)) continue;
    s.basis.push_back(g);
    std::vector<GroupElement> add;
    for (GroupElement e : elems) add.push_back(e ^ g);
    elems.insert(add.begin(), add.end());
  }
  s.elements.assign(elems.begin(), elems.end());
  return s;
}

bool Subgroup::contains(GroupElement g) const { return std::binary_search(elements.begin(), elements.end(), g); }

std::vector<Subgroup> all_subgroups(int m) {
  if (m < 0 || m > kMaxGenerators) throw std::invalid_argument("generator count out of range");
  const GroupElement order = GroupElement{1} << m;
  auto key = [](const Subgroup& s) {
    std::uint64_t k = 0;
    for (GroupElement e : s.elements) k |= std::uint64_t{1} << e;
    return k;
  };
  std::vector<Subgroup> out{Subgroup::span({})};
  std::set<std::uint64_t> seen{key(out[0])};
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    for (GroupElement g = 1; g < order; ++g) {
      if (out[idx].contains(g)) continue;
      auto basis = out[idx].basis;
      basis.push_back(g);
      Subgroup s = Subgroup::span(basis);
      if (seen.insert(key(s)).second) out.push_back(std::move(s));
    }
  }
  return out;
}

std::string SymmetryScheme::label(GroupElement g) const {
  if (g == 0) return "e";
  std::string out;
  for (int j = 0; j < m(); ++j) {
    if (!((g >> j) & 1)) continue;
    if (!out.empty()) out += '*';
    out += generators[static_cast<std::size_t>(j)];
  }
  return out;
}

GroupElement SymmetryScheme::parse_element(const std::string& text) const {
  if (text == "e" || text.empty()) return 0;
  GroupElement g = 0;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '*')) {
    auto it = std::find(generators.begin(), generators.end(), part);
    if (it == generators.end()) throw std::invalid_argument("unknown generator '" + part + "'");
    g ^= GroupElement{1} << (it - generators.begin());
  }
  return g;
}

std::string format_violation(const SymmetryScheme& s, const Violation& v) {
  std::ostringstream os;
  os << v.relation << " block=" << v.block << " pair=(" << s.label(v.g) << "," << s.label(v.gp) << ")";
  if (!v.lhs.empty() || !v.rhs.empty()) os << " images=(" << v.lhs << "," << v.rhs << ")";
  if (!v.message.empty()) os << " : " << v.message;
  return os.str();
}

namespace {

PauliOperator ordered_product(const std::vector<PauliOperator>& gens, GroupElement g, int size) {
  PauliOperator acc(size);
  for (std::size_t j = 0; j < gens.size(); ++j)
    if ((g >> j) & 1) acc = acc * gens[j];
  return acc;
}

}  // namespace

int ValidatedScheme::kappa(GroupElement g, GroupElement gp) const {
  int acc = 0;
  for (int i = 0; i < m(); ++i)
    for (int j = 0; j < m(); ++j)
      if (((g >> i) & 1) && ((gp >> j) & 1)) acc ^= kappa_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return acc;
}

const Subgroup& ValidatedScheme::G(int i) const {
  if (i < 1 || i > n_bulk()) throw std::out_of_range("bulk block index out of range");
  return G_[static_cast<std::size_t>(i - 1)];
}

PauliOperator ValidatedScheme::u(int block, GroupElement g) const {
  const int size = scheme_.partition.block(block).size;
  if (block == 0) return ordered_product(scheme_.u0, g, size);
  if (block >= 1 && block <= n_bulk()) return ordered_product(scheme_.bulk[static_cast<std::size_t>(block - 1)].u, g, size);
  throw std::out_of_range("u is defined on blocks 0..n");
}

PauliOperator ValidatedScheme::vL(int block, GroupElement g) const {
  const int size = scheme_.partition.block(block).size;
  if (block >= 1 && block <= n_bulk())
    return hermitian_gauge(ordered_product(scheme_.bulk[static_cast<std::size_t>(block - 1)].vL, g, size));
  if (block == n_bulk() + 1) return hermitian_gauge(ordered_product(scheme_.vL_right, g, size));
  throw std::out_of_range("vL is defined on blocks 1..n+1");
}

PauliOperator ValidatedScheme::vR(int block, GroupElement g) const {
  if (block == 0) return hermitian_gauge(ordered_product(scheme_.vR0, g, scheme_.partition.block(0).size));
  if (block >= 1 && block <= n_bulk()) return hermitian_gauge(vL(block, g) * u(block, g));
  throw std::out_of_range("vR is defined on blocks 0..n");
}

PauliOperator ValidatedScheme::embed(int block, const PauliOperator& local) const {
  return local.embed(n_sites(), scheme_.partition.block(block).first);
}

PauliOperator ValidatedScheme::U(GroupElement g) const { return ordered_product(U_gen_, g, n_sites()); }

PauliOperator ValidatedScheme::u_prefix(int k, GroupElement g) const {
  PauliOperator acc(n_sites());
  for (int j = 0; j <= k; ++j) acc = acc * embed(j, u(j, g));
  return acc;
}

PauliOperator ValidatedScheme::T(GroupElement g) const {
  return u_prefix(n_bulk(), g) * embed(n_bulk() + 1, vL(n_bulk() + 1, g));
}

PauliOperator ValidatedScheme::L(int k, GroupElement g) const {
  if (k < 1 || k > n_bulk()) throw std::out_of_range("L_k needs 1 <= k <= n");
  return u_prefix(k - 1, g) * embed(k, vL(k, g));
}

PauliOperator ValidatedScheme::R(int k, GroupElement g) const {
  if (k < 1 || k > n_bulk()) throw std::out_of_range("R_k needs 1 <= k <= n");
  PauliOperator acc = embed(k, vR(k, g));
  for (int j = k + 1; j <= n_bulk(); ++j) acc = acc * embed(j, u(j, g));
  return acc * embed(n_bulk() + 1, vL(n_bulk() + 1, g));
}

PauliOperator ValidatedScheme::assemble(OperatorKind kind, GroupElement g, int k) const {
  if (g >= group_size()) throw std::out_of_range("group element out of range");
  switch (kind) {
    case OperatorKind::U: return U(g);
    case OperatorKind::T: return T(g);
    case OperatorKind::L:
    case OperatorKind::R:
      if (!G(k).contains(g))
        throw std::invalid_argument("element " + label(g) + " is not an admissible axis on block " + std::to_string(k));
      return kind == OperatorKind::L ? L(k, g) : R(k, g);
  }
  throw std::logic_error("unreachable");
}

int ValidatedScheme::init_sign(GroupElement h) const {
  const PauliOperator p = T(h) * U(h);
  if (!p.is_identity() || (p.phase() & 1)) throw std::logic_error("T(h) and U(h) differ beyond a sign for " + label(h));
  return p.phase() == 0 ? 1 : -1;
}

struct Validator {
  const SymmetryScheme& s;
  std::vector<Violation> out;

  void add(std::string eq, int block, GroupElement g, GroupElement gp, std::string lhs, std::string rhs,
           std::string msg) {
    out.push_back({std::move(eq), block, g, gp, std::move(lhs), std::move(rhs), std::move(msg)});
  }

  bool check_shapes() {
    const std::size_t m = static_cast<std::size_t>(s.m());
    if (s.m() < 1 || s.m() > kMaxGenerators) {
      add("type", -1, 0, 0, "", "", "generator count must be in 1..6");
      return false;
    }
    if (s.partition.n_blocks() != s.n_bulk() + 2) {
      add("type", -1, 0, 0, "", "", "partition must have n+2 blocks");
      return false;
    }
    auto check_list = [&](const std::vector<PauliOperator>& list, int block, const char* what) {
      if (list.size() != m) {
        add("type", block, 0, 0, "", "", std::string(what) + " needs one image per generator");
        return;
      }
      for (std::size_t j = 0; j < m; ++j) {
        const auto& p = list[j];
        const GroupElement g = GroupElement{1} << j;
        if (p.size() != s.partition.block(block).size)
          add("support", block, g, 0, p.str(), "", std::string(what) + " image does not fit its block");
        else if (!p.is_hermitian())
          add("hermitian", block, g, 0, p.str(), "", std::string(what) + " image is not Hermitian");
      }
    };
    check_list(s.u0, 0, "u0");
    check_list(s.vR0, 0, "vR0");
    for (int i = 1; i <= s.n_bulk(); ++i) {
      check_list(s.bulk[static_cast<std::size_t>(i - 1)].u, i, "u");
      check_list(s.bulk[static_cast<std::size_t>(i - 1)].vL, i, "vL");
    }
    check_list(s.vL_right, s.n_bulk() + 1, "vL");
    if (!out.empty()) return false;
    auto check_abelian = [&](const std::vector<PauliOperator>& list, int block) {
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
          if (!commutes(list[a], list[b]))
            add("u_abelian", block, GroupElement{1} << a, GroupElement{1} << b, list[a].str(), list[b].str(),
                "linear representation images must commute");
    };
    check_abelian(s.u0, 0);
    for (int i = 1; i <= s.n_bulk(); ++i) check_abelian(s.bulk[static_cast<std::size_t>(i - 1)].u, i);
    return out.empty();
  }

  ValidationResult run() {
    ValidationResult res;
    if (!check_shapes()) {
      res.violations = std::move(out);
      return res;
    }
    ValidatedScheme vs;
    vs.scheme_ = s;
    const int m = s.m();
    const GroupElement order = s.group_size();
    const int right = s.n_bulk() + 1;

    // kappa from the right boundary
    vs.kappa_.assign(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m), 0));
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        vs.kappa_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
            commutation_sign(s.vL_right[static_cast<std::size_t>(a)], s.vL_right[static_cast<std::size_t>(b)]);
    for (GroupElement g = 0; g < order; ++g)
      for (GroupElement gp = 0; gp < order; ++gp) {
        const auto a = vs.vL(right, g), b = vs.vL(right, gp);
        if (commutation_sign(a, b) != vs.kappa(g, gp))
          add("right_kappa", right, g, gp, a.str(), b.str(), "right-boundary commutation is not bilinear");
      }

    // left boundary must carry the same projective class
    for (GroupElement g = 0; g < order; ++g)
      for (GroupElement gp = 0; gp < order; ++gp) {
        const auto a = vs.vR(0, g), b = vs.vR(0, gp);
        if (commutation_sign(a, b) != vs.kappa(g, gp))
          add("left_kappa", 0, g, gp, a.str(), b.str(), "vR0 commutation does not match kappa");
      }
    if (!out.empty()) {
      res.violations = std::move(out);
      return res;
    }

    // H: maximal kappa-isotropic subgroups on which u0 and vR0 agree
    const auto subgroups = all_subgroups(m);
    std::vector<Subgroup> isotropic;
    for (const auto& sg : subgroups) {
      bool iso = true;
      for (GroupElement a : sg.elements)
        for (GroupElement b : sg.elements) iso = iso && vs.kappa(a, b) == 0;
      if (iso) isotropic.push_back(sg);
    }
    auto is_subset = [](const Subgroup& a, const Subgroup& b) {
      return std::all_of(a.elements.begin(), a.elements.end(), [&](GroupElement e) { return b.contains(e); });
    };
    for (const auto& sg : isotropic) {
      const bool maximal = std::none_of(isotropic.begin(), isotropic.end(), [&](const Subgroup& o) {
        return o.order() > sg.order() && is_subset(sg, o);
      });
      if (!maximal) continue;
      const bool match = std::all_of(sg.elements.begin(), sg.elements.end(),
                                     [&](GroupElement h) { return vs.u(0, h).same_string(vs.vR(0, h)); });
      if (match) vs.H_candidates_.push_back(sg);
    }
    if (vs.H_candidates_.empty()) {
      add("init_subgroup", 0, 0, 0, "", "", "no maximal abelian subgroup of vR0 on which u0 = vR0");
    } else if (s.H) {
      const Subgroup declared = Subgroup::span(*s.H);
      auto it = std::find(vs.H_candidates_.begin(), vs.H_candidates_.end(), declared);
      if (it == vs.H_candidates_.end())
        add("init_subgroup", 0, 0, 0, "", "", "declared H is not a valid candidate");
      else
        vs.H_ = declared;
    } else if (vs.H_candidates_.size() > 1) {
      add("init_subgroup_choice", 0, 0, 0, "", "", std::to_string(vs.H_candidates_.size()) + " candidates for H; declare one");
    } else {
      vs.H_ = vs.H_candidates_.front();
    }

    // bulk: admissible axis sets
    for (int i = 1; i <= s.n_bulk(); ++i) {
      std::vector<GroupElement> all(order);
      for (GroupElement g = 0; g < order; ++g) all[g] = g;
      vs.G_.push_back(Subgroup{});
      Subgroup gi = compute_Gi_ordered(vs, i, all);
      const Subgroup closure = Subgroup::span(gi.elements);
      if (!(closure == gi)) add("axis_group", i, 0, 0, "", "", "admissible axis set is not a subgroup");
      vs.G_.back() = gi;
    }

    // global linear representation U
    for (int j = 0; j < m; ++j) {
      const GroupElement g = GroupElement{1} << j;
      PauliOperator acc = vs.embed(0, s.vR0[static_cast<std::size_t>(j)]);
      for (int i = 1; i <= s.n_bulk(); ++i) acc = acc * vs.embed(i, s.bulk[static_cast<std::size_t>(i - 1)].u[static_cast<std::size_t>(j)]);
      acc = acc * vs.embed(right, s.vL_right[static_cast<std::size_t>(j)]);
      vs.U_gen_.push_back(acc);
      if (!(acc * acc).is_identity() || (acc * acc).phase() != 0)
        add("U_linear", -1, g, g, acc.str(), "", "U(g)^2 != +I");
    }
    for (GroupElement g = 0; g < order; ++g)
      for (GroupElement gp = 0; gp < order; ++gp) {
        const auto lhs = vs.U(g) * vs.U(gp);
        if (lhs != vs.U(g ^ gp))
          add("U_linear", -1, g, gp, lhs.str(), vs.U(g ^ gp).str(), "U is not a linear representation");
      }

    // readout subgroup
    if (!vs.H_candidates_.empty() && !vs.H_.elements.empty()) {
      vs.Hprime_ = s.Hprime ? Subgroup::span(*s.Hprime) : vs.H_;
      for (GroupElement a : vs.Hprime_.elements)
        for (GroupElement b : vs.Hprime_.elements)
          if (!commutes(vs.vL(right, a), vs.vL(right, b)))
            add("readout_subgroup", right, a, b, vs.vL(right, a).str(), vs.vL(right, b).str(),
                "readout images must commute");
    }

    if (!out.empty()) {
      res.violations = std::move(out);
      return res;
    }
    res.scheme = std::move(vs);
    return res;
  }
};

std::vector<std::vector<PauliOperator>> derive_vR(const SymmetryScheme& scheme) {
  std::vector<std::vector<PauliOperator>> out;
  for (int i = 1; i <= scheme.n_bulk(); ++i) {
    const auto& b = scheme.bulk[static_cast<std::size_t>(i - 1)];
    if (b.u.size() != b.vL.size()) throw std::invalid_argument("image count mismatch on block " + std::to_string(i));
    std::vector<PauliOperator> row;
    for (std::size_t j = 0; j < b.u.size(); ++j) {
      if (b.u[j].size() != scheme.partition.block(i).size || b.vL[j].size() != scheme.partition.block(i).size)
        throw std::invalid_argument("image escapes block " + std::to_string(i));
      row.push_back(hermitian_gauge(b.vL[j] * b.u[j]));
    }
    out.push_back(std::move(row));
  }
  return out;
}

ValidationResult validate(const SymmetryScheme& scheme) { return Validator{scheme, {}}.run(); }

ValidatedScheme validate_or_throw(const SymmetryScheme& scheme) {
  auto res = validate(scheme);
  if (!res.ok()) {
    std::string msg = "scheme '" + scheme.name + "' failed validation:";
    for (const auto& v : res.violations) msg += "\n  " + format_violation(scheme, v);
    throw std::runtime_error(msg);
  }
  return std::move(*res.scheme);
}

Subgroup compute_Gi_ordered(const ValidatedScheme& vs, int i, const std::vector<GroupElement>& order) {
  const GroupElement n = vs.group_size();
  std::vector<GroupElement> members;
  for (GroupElement gp : order) {
    bool ok = true;
    const auto right = vs.vR(i, gp);
    for (GroupElement g = 0; g < n && ok; ++g) {
      ok = commutation_sign(vs.vR(i, g), right) == vs.kappa(g, gp) && commutes(vs.vL(i, g), right);
    }
    if (ok) members.push_back(gp);
  }
  Subgroup s;
  std::sort(members.begin(), members.end());
  s.elements = members;
  // independent basis by greedy span
  Subgroup acc = Subgroup::span({});
  for (GroupElement g : members)
    if (!acc.contains(g)) acc = Subgroup::span([&] { auto b = acc.basis; b.push_back(g); return b; }());
  s.basis = acc.basis;
  return s;
}

Subgroup compute_Gi(const ValidatedScheme& vs, int i) { return vs.G(i); }

AlgebraReport check_algebra(const ValidatedScheme& vs) {
  AlgebraReport rep;
  const auto& s = vs.scheme();
  const GroupElement n = vs.group_size();
  auto fail = [&](std::string eq, int k, GroupElement g, GroupElement gp, const PauliOperator& a,
                  const PauliOperator& b) {
    rep.failures.push_back({std::move(eq), k, g, gp, a.str(), b.str(), ""});
  };
  auto pm_one = [&](const PauliOperator& a, const PauliOperator& b, int block, GroupElement g, GroupElement gp) {
    ++rep.checks;
    const auto ab = a * b, ba = b * a;
    if (!ab.same_string(ba) || ((ab.phase() - ba.phase() + 4) % 2) != 0) fail("projective_sign", block, g, gp, a, b);
  };
  for (GroupElement g = 0; g < n; ++g)
    for (GroupElement gp = 0; gp < n; ++gp) {
      pm_one(vs.vR(0, g), vs.vR(0, gp), 0, g, gp);
      for (int i = 1; i <= vs.n_bulk(); ++i) {
        pm_one(vs.vL(i, g), vs.vL(i, gp), i, g, gp);
        pm_one(vs.vR(i, g), vs.vR(i, gp), i, g, gp);
      }
      pm_one(vs.vL(s.right_block(), g), vs.vL(s.right_block(), gp), s.right_block(), g, gp);

      ++rep.checks;
      if (vs.U(g) * vs.U(gp) != vs.U(g ^ gp)) fail("U_linear", -1, g, gp, vs.U(g), vs.U(gp));
      ++rep.checks;
      if (commutation_sign(vs.T(g), vs.T(gp)) != vs.kappa(g, gp)) fail("T_T_commutation", -1, g, gp, vs.T(g), vs.T(gp));
    }
  for (int k = 1; k <= vs.n_bulk(); ++k)
    for (GroupElement gp : vs.G(k).elements) {
      const auto R = vs.R(k, gp), L = vs.L(k, gp);
      ++rep.checks;
      if (vs.L(k, gp) * vs.R(k, gp) != vs.T(gp)) fail("L_R_product", k, gp, gp, L * R, vs.T(gp));
      for (GroupElement g = 0; g < n; ++g) {
        rep.checks += 3;
        if (!commutes(R, vs.U(g))) fail("R_U_commutation", k, g, gp, R, vs.U(g));
        if (!commutes(R, vs.T(g))) fail("R_T_commutation", k, g, gp, R, vs.T(g));
        if (commutation_sign(L, vs.T(g)) != vs.kappa(g, gp)) fail("L_T_commutation", k, g, gp, L, vs.T(g));
      }
    }
  for (GroupElement h : vs.H().elements) {
    ++rep.checks;
    if (!vs.T(h).same_string(vs.U(h))) fail("T_U_sign", -1, h, h, vs.T(h), vs.U(h));
  }
  return rep;
}

}  // namespace mbqc
