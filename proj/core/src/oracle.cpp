#include "mbqc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace mbqc {

LogicalModel::LogicalModel(const ValidatedScheme& vs) : vs_(&vs), gs_(vs.group_size()) {
  const int right = vs.n_bulk() + 1;
  const int sites = vs.scheme().partition.block(right).size;
  if (sites > 4) throw std::invalid_argument("boundary block larger than four sites");
  dim_ = 1 << sites;
  std::vector<PauliOperator> p;
  for (GroupElement g = 0; g < gs_; ++g) {
    p.push_back(vs.vL(right, g));
    ops_.push_back(to_dense(p.back()));
  }
  phase_.assign(gs_, std::vector<cplx>(gs_));
  anti_.assign(gs_, std::vector<char>(gs_, 0));
  for (GroupElement g = 0; g < gs_; ++g)
    for (GroupElement h = 0; h < gs_; ++h) {
      const PauliOperator prod = p[g] * p[h];
      const PauliOperator ratio = prod * p[g ^ h];  // p[g^h] is Hermitian and squares to one
      if (!ratio.is_identity()) throw std::logic_error("boundary images do not close under products");
      phase_[g][h] = ratio.phase_value();
      anti_[g][h] = static_cast<char>(!commutes(p[g], p[h]));
    }
}

std::vector<double> tvec_of(const LogicalModel& model, const CMat& rho) {
  std::vector<double> t(model.group_size());
  for (GroupElement g = 0; g < model.group_size(); ++g) t[g] = (model.op(g) * rho).trace().real();
  return t;
}

LogicalState init_logical(const LogicalModel& model, const std::vector<int>& chi) {
  const ValidatedScheme& vs = model.scheme();
  if (static_cast<int>(chi.size()) != vs.m()) throw std::invalid_argument("chi length differs from generator count");
  const int d = model.dim();
  LogicalState ls;
  ls.rho = CMat::Zero(d, d);
  for (GroupElement h : vs.H().elements) {
    int bit = 0;
    for (int j = 0; j < vs.m(); ++j)
      if ((h >> j) & 1U) bit ^= chi[static_cast<std::size_t>(j)];
    const double value = vs.init_sign(h) * (bit ? -1.0 : 1.0);
    ls.rho += value * model.op(h);
  }
  ls.rho /= static_cast<double>(d);
  if (min_eigenvalue(ls.rho) < -1e-10) throw std::runtime_error("initial logical state is not positive");
  ls.tvec = tvec_of(model, ls.rho);
  return ls;
}

LogicalState apply_channel(const LogicalModel& model, const LogicalState& ls, const LogicalChannel& ch) {
  if (std::abs(ch.sigma) > 1.0 + 1e-12) throw std::invalid_argument("|sigma| exceeds one");
  const int d = model.dim();
  const CMat v = std::cos(ch.angle / 2) * CMat::Identity(d, d) - cplx(0, std::sin(ch.angle / 2)) * model.op(ch.axis);
  LogicalState out;
  out.rho = 0.5 * (1 + ch.sigma) * v * ls.rho * v.adjoint() + 0.5 * (1 - ch.sigma) * v.adjoint() * ls.rho * v;
  out.tvec = tvec_of(model, out.rho);
  return out;
}

Eigen::MatrixXd transfer_matrix(const LogicalModel& model, const LogicalChannel& ch) {
  const GroupElement n = model.group_size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  if (ch.angle == 0.0 || ch.axis == 0) return m;
  for (GroupElement g = 0; g < n; ++g) {
    if (!model.anticommute(g, ch.axis)) continue;
    // <T(g)> -> cos a <T(g)> - i sigma sin a <T(g) T(axis)>, with T(g)T(axis) = phase T(g + axis)
    const cplx c = cplx(0, -1) * ch.sigma * std::sin(ch.angle) * model.phase(g, ch.axis);
    m(g, g) = std::cos(ch.angle);
    m(g, g ^ ch.axis) = c.real();
  }
  return m;
}

std::vector<double> evolve_tvec(const LogicalModel& model, const std::vector<double>& tvec, const LogicalChannel& ch) {
  const Eigen::MatrixXd m = transfer_matrix(model, ch);
  const Eigen::VectorXd out = m * Eigen::Map<const Eigen::VectorXd>(tvec.data(), static_cast<Eigen::Index>(tvec.size()));
  return {out.data(), out.data() + out.size()};
}

std::vector<LogicalChannel> pattern_channels(const MeasurementPattern& p, const std::map<int, double>& sigma) {
  std::vector<LogicalChannel> out;
  for (int k : p.rotation_blocks()) {
    const auto it = sigma.find(k);
    if (it == sigma.end()) throw std::invalid_argument("no string order value for block " + std::to_string(k));
    out.push_back({p.at(k).axis, p.at(k).angle, it->second});
  }
  return out;
}

Prediction predict(const LogicalModel& model, const std::vector<int>& chi, const MeasurementPattern& p,
                   const std::map<int, double>& sigma) {
  LogicalState ls = init_logical(model, chi);
  std::vector<double> t = ls.tvec;
  for (const LogicalChannel& ch : pattern_channels(p, sigma)) {
    ls = apply_channel(model, ls, ch);
    t = evolve_tvec(model, t, ch);
  }
  Prediction pr;
  pr.readout = readout_elements(model.scheme(), p);
  for (GroupElement h : pr.readout) {
    pr.value.push_back(ls.tvec[h]);
    pr.value_tvec.push_back(t[h]);
  }
  pr.final_state = std::move(ls);
  return pr;
}

// ---------------------------------------------------------------- superoperators

CMat unitary_superop(const CMat& u) {
  const Eigen::Index d = u.rows();
  CMat s(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) s.block(i * d, j * d, d, d) = std::conj(u(i, j)) * u;
  return s;
}

CMat channel_superop(const LogicalModel& model, const LogicalChannel& ch) {
  const int d = model.dim();
  const CMat v = std::cos(ch.angle / 2) * CMat::Identity(d, d) - cplx(0, std::sin(ch.angle / 2)) * model.op(ch.axis);
  return 0.5 * (1 + ch.sigma) * unitary_superop(v) + 0.5 * (1 - ch.sigma) * unitary_superop(v.adjoint());
}

CMat choi_state(const CMat& superop, int dim) {
  CMat j = CMat::Zero(dim * dim, dim * dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      // column index of vec(|a><b|) in column-major order
      const CVec out = superop.col(b * dim + a);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) j(a * dim + r, b * dim + c) = out[c * dim + r];
    }
  return j / static_cast<double>(dim);
}

double trace_norm(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double min_eigenvalue(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double split_bound(double alpha, double sigma, int n_split) {
  return alpha * alpha / n_split * (1 - sigma * sigma) / (sigma * sigma);
}

SplitResult split_rotation(const LogicalModel& model, GroupElement axis, double alpha, double sigma, int n_split) {
  if (sigma == 0.0) throw std::invalid_argument("sigma = 0 admits no rotation");
  if (n_split < 1) throw std::invalid_argument("split count must be positive");
  const int d = model.dim();
  const CMat step = channel_superop(model, {axis, alpha / (sigma * n_split), sigma});
  CMat total = CMat::Identity(d * d, d * d);
  for (int i = 0; i < n_split; ++i) total = step * total;
  const CMat u = std::cos(alpha / 2) * CMat::Identity(d, d) - cplx(0, std::sin(alpha / 2)) * model.op(axis);
  const CMat jc = choi_state(total, d);
  SplitResult r;
  r.lower = trace_norm(jc - choi_state(unitary_superop(u), d));
  r.upper = d * r.lower;
  r.bound = split_bound(alpha, sigma, n_split);
  r.choi_min_eig = min_eigenvalue(jc);
  r.within_bound = r.lower <= r.bound;
  return r;
}

// ---------------------------------------------------------------- Lie closure

namespace {

// Real coordinates of an anti-Hermitian matrix.
Eigen::VectorXd real_coords(const CMat& a) {
  Eigen::VectorXd v(2 * a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    v[2 * i] = a.data()[i].real();
    v[2 * i + 1] = a.data()[i].imag();
  }
  return v;
}

}  // namespace

LieReport lie_closure(const LogicalModel& model, std::vector<GroupElement> generators) {
  const ValidatedScheme& vs = model.scheme();
  if (generators.empty()) {
    std::set<GroupElement> all;
    for (int k = 1; k <= vs.n_bulk(); ++k)
      for (GroupElement g : vs.G(k).elements)
        if (g != 0) all.insert(g);
    generators.assign(all.begin(), all.end());
  }
  LieReport rep;
  rep.generators = generators;
  std::vector<CMat> basis;
  std::vector<Eigen::VectorXd> ortho;
  auto add = [&](const CMat& a) {
    Eigen::VectorXd v = real_coords(a);
    for (const auto& o : ortho) v -= o.dot(v) * o;
    const double nv = v.norm();
    if (nv < 1e-9) return false;
    ortho.push_back(v / nv);
    basis.push_back(a / nv);
    return true;
  };
  for (GroupElement g : generators) add(cplx(0, 1) * model.op(g));
  const std::size_t cap = static_cast<std::size_t>(model.dim()) * model.dim();
  std::size_t done = 0;
  while (done < basis.size() && basis.size() < cap) {
    ++rep.rounds;
    const std::size_t end = basis.size();
    for (std::size_t i = done; i < end; ++i)
      for (std::size_t j = 0; j < i; ++j) add(basis[i] * basis[j] - basis[j] * basis[i]);
    done = end;
  }
  rep.dimension = static_cast<int>(basis.size());
  return rep;
}

}  // namespace mbqc
