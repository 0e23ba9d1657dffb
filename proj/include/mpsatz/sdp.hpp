#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mpsatz/errors.hpp"
#include "mpsatz/numla.hpp"

namespace mpsatz {

/// One coefficient of a symmetric block matrix: A_ij = A_ji = value.
struct SdpEntry {
  int block = 0;
  int i = 0;
  int j = 0;
  double value = 0.0;
};

/// sum_b <A_k^(b), X_b> + sum_f coeff_f u_f = rhs.
struct SdpConstraint {
  std::vector<SdpEntry> entries;
  std::vector<std::pair<int, double>> free_coeffs;
  double rhs = 0.0;
};

/// Block-diagonal SDP over X_b PSD and free variables u:
///   minimize <C, X> + c_u^T u  subject to the constraints.
/// Without objective it is a pure feasibility problem.
struct SdpInstance {
  std::vector<int> blocks;
  int num_free = 0;
  std::vector<SdpConstraint> constraints;
  std::vector<SdpEntry> objective;
  std::vector<double> free_objective;

  int num_constraints() const { return static_cast<int>(constraints.size()); }

  bool has_objective() const {
    if (!objective.empty()) return true;
    return std::any_of(free_objective.begin(), free_objective.end(), [](double v) { return v != 0.0; });
  }

  void validate() const {
    auto check_entry = [&](const SdpEntry& e) {
      if (e.block < 0 || e.block >= static_cast<int>(blocks.size()))
        throw MalformedInstance("sdp: entry refers to a missing block");
      const int dim = blocks[static_cast<std::size_t>(e.block)];
      if (e.i < 0 || e.j < 0 || e.i >= dim || e.j >= dim) throw MalformedInstance("sdp: entry index out of range");
      if (!std::isfinite(e.value)) throw MalformedInstance("sdp: non-finite coefficient");
    };
    for (int d : blocks)
      if (d < 0) throw MalformedInstance("sdp: negative block dimension");
    if (num_free < 0) throw MalformedInstance("sdp: negative free-variable count");
    if (!free_objective.empty() && static_cast<int>(free_objective.size()) != num_free)
      throw MalformedInstance("sdp: free objective length differs from free-variable count");
    for (const auto& c : constraints) {
      if (!std::isfinite(c.rhs)) throw MalformedInstance("sdp: non-finite rhs");
      for (const auto& e : c.entries) check_entry(e);
      for (const auto& [f, v] : c.free_coeffs) {
        if (f < 0 || f >= num_free) throw MalformedInstance("sdp: free index out of range");
        if (!std::isfinite(v)) throw MalformedInstance("sdp: non-finite free coefficient");
      }
    }
    for (const auto& e : objective) check_entry(e);
  }
};

enum class SdpStatus { Feasible, Infeasible, Unknown };

inline const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Feasible: return "Feasible";
    case SdpStatus::Infeasible: return "Infeasible";
    default: return "Unknown";
  }
}

struct SdpOptions {
  double feas_tol = 1e-8;
  int max_iter = 200;
  double gap_tol = 1e-7;  // relative gap, optimization mode only
};

struct SdpMetrics {
  int iterations = 0;
  double primal_residual = 0.0;  // max_k |<A_k,X> + B u - b_k|
  double dual_residual = 0.0;
  double gap = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double rhs_reproduction = 0.0;
  double ray_margin = 0.0;  // -b^T y of a verified ray (normalized ||y||_inf = 1)
  std::vector<double> min_eigenvalues;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::Unknown;
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::VectorXd free;
  Eigen::VectorXd y;  // dual multipliers (Feasible) or separating ray (Infeasible)
  SdpMetrics metrics;
  std::string note;
};

namespace detail {

struct Expanded {
  int p, q;
  double v;
};

inline Eigen::MatrixXd sym(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

/// <A, X> for a sparse symmetric A given as expanded (both orientations) entries.
inline double sparse_dot(const std::vector<Expanded>& a, const Eigen::MatrixXd& x) {
  double s = 0.0;
  for (const auto& e : a) s += e.v * x(e.p, e.q);
  return s;
}

/// Largest alpha with diag(lam) + alpha D PSD (infinity when unbounded).
inline double max_step(const Eigen::VectorXd& lam, const Eigen::MatrixXd& d) {
  if (lam.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::VectorXd is = lam.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd m = sym(is.asDiagonal() * d * is.asDiagonal());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double ev = es.eigenvalues()(0);
  return ev >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / ev;
}

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling.
/// The instance's dual (y) plays the primal role x of the embedding and the
/// instance's primal X plays the role of the dual cone variable Z:
///   r1 = B w + G^T Z + c tau,   r2 = -B^T x + c_u tau,
///   r3 = -G x + C tau - S,      r4 = -c^T x - c_u^T w - <C,Z> - kappa,
/// with G x = sum_k x_k A_k and c = -b.
class HsdSolver {
 public:
  HsdSolver(const SdpInstance& inst, const SdpOptions& opts) : inst_(inst), opts_(opts) {
    m_ = inst.num_constraints();
    p_ = inst.num_free;
    nb_ = static_cast<int>(inst.blocks.size());
    ent_.assign(static_cast<std::size_t>(nb_), std::vector<std::vector<Expanded>>(static_cast<std::size_t>(m_)));
    touch_.assign(static_cast<std::size_t>(nb_), {});
    b_ = Eigen::VectorXd::Zero(m_);
    bmat_ = Eigen::MatrixXd::Zero(m_, p_);
    for (int k = 0; k < m_; ++k) {
      const auto& c = inst.constraints[static_cast<std::size_t>(k)];
      b_(k) = c.rhs;
      for (const auto& e : c.entries) {
        auto& lst = ent_[static_cast<std::size_t>(e.block)][static_cast<std::size_t>(k)];
        lst.push_back({e.i, e.j, e.value});
        if (e.i != e.j) lst.push_back({e.j, e.i, e.value});
      }
      for (const auto& [f, v] : c.free_coeffs) bmat_(k, f) += v;
    }
    for (int bl = 0; bl < nb_; ++bl)
      for (int k = 0; k < m_; ++k)
        if (!ent_[static_cast<std::size_t>(bl)][static_cast<std::size_t>(k)].empty())
          touch_[static_cast<std::size_t>(bl)].push_back(k);
    c_ = -b_;
    beq_ = Eigen::VectorXd::Zero(p_);
    for (int f = 0; f < p_ && f < static_cast<int>(inst.free_objective.size()); ++f)
      beq_(f) = inst.free_objective[static_cast<std::size_t>(f)];
    h_.clear();
    for (int bl = 0; bl < nb_; ++bl) h_.push_back(Eigen::MatrixXd::Zero(dim(bl), dim(bl)));
    for (const auto& e : inst.objective) {
      h_[static_cast<std::size_t>(e.block)](e.i, e.j) += e.value;
      if (e.i != e.j) h_[static_cast<std::size_t>(e.block)](e.j, e.i) += e.value;
    }
    optimize_ = inst.has_objective();
    total_dim_ = 0;
    for (int d : inst.blocks) total_dim_ += d;
  }

  SdpSolution run() {
    SdpSolution sol;
    if (m_ == 0) {
      sol.status = SdpStatus::Feasible;
      for (int bl = 0; bl < nb_; ++bl) sol.blocks.push_back(Eigen::MatrixXd::Zero(dim(bl), dim(bl)));
      sol.free = Eigen::VectorXd::Zero(p_);
      sol.y = Eigen::VectorXd(0);
      sol.metrics.min_eigenvalues.assign(static_cast<std::size_t>(nb_), 0.0);
      sol.note = "no constraints";
      return sol;
    }
    x_ = Eigen::VectorXd::Zero(m_);
    w_ = Eigen::VectorXd::Zero(p_);
    tau_ = kappa_ = 1.0;
    for (int bl = 0; bl < nb_; ++bl) {
      r_.push_back(Eigen::MatrixXd::Identity(dim(bl), dim(bl)));
      rinv_.push_back(Eigen::MatrixXd::Identity(dim(bl), dim(bl)));
      lam_.push_back(Eigen::VectorXd::Ones(dim(bl)));
    }
    const double bnorm = std::max(1.0, b_.lpNorm<Eigen::Infinity>());
    double hnorm = 1.0;
    for (const auto& h : h_)
      if (h.size() > 0) hnorm = std::max(hnorm, h.cwiseAbs().maxCoeff());
    const double cunorm = std::max(1.0, p_ > 0 ? beq_.lpNorm<Eigen::Infinity>() : 0.0);

    for (int it = 0; it <= opts_.max_iter; ++it) {
      sol.metrics.iterations = it;
      auto s = s_mat();
      auto z = z_mat();
      Eigen::VectorXd r1 = bmat_ * w_ + gt(z) + c_ * tau_;
      Eigen::VectorXd r2 = -bmat_.transpose() * x_ + beq_ * tau_;
      auto gx = g(x_);
      std::vector<Eigen::MatrixXd> r3(static_cast<std::size_t>(nb_));
      for (int bl = 0; bl < nb_; ++bl) r3[u(bl)] = -gx[u(bl)] + h_[u(bl)] * tau_ - s[u(bl)];
      const double hz = inner(h_, z);
      const double r4 = -c_.dot(x_) - beq_.dot(w_) - hz - kappa_;

      const double pres = r1.lpNorm<Eigen::Infinity>() / tau_;
      double dres = (p_ > 0 ? r2.lpNorm<Eigen::Infinity>() / tau_ / cunorm : 0.0);
      for (const auto& r : r3)
        if (r.size() > 0) dres = std::max(dres, r.cwiseAbs().maxCoeff() / tau_ / hnorm);
      const double gap = inner(s, z) / (tau_ * tau_);
      const double pcost = (hz + beq_.dot(w_)) / tau_;
      const double dcost = -c_.dot(x_) / tau_;
      sol.metrics.primal_residual = pres;
      sol.metrics.dual_residual = dres;
      sol.metrics.gap = gap;
      sol.metrics.primal_objective = pcost;
      sol.metrics.dual_objective = dcost;

      bool primal_ok = pres <= opts_.feas_tol * bnorm;
      if (optimize_) {
        primal_ok = primal_ok && dres <= opts_.feas_tol &&
                    (gap <= opts_.gap_tol * std::max(1.0, std::min(std::fabs(pcost), std::fabs(dcost))) ||
                     std::fabs(pcost - dcost) <= opts_.gap_tol * std::max(1.0, std::fabs(pcost)));
      }
      if (primal_ok) return finish_feasible(sol, z);

      // Candidate separating ray: b^T x > 0 with G x + S ~ 0 and B^T x ~ 0.
      const double bx = b_.dot(x_);
      if (bx > 0) {
        double dinf = 0.0;
        for (int bl = 0; bl < nb_; ++bl)
          if (dim(bl) > 0) dinf = std::max(dinf, (gx[u(bl)] + s[u(bl)]).cwiseAbs().maxCoeff());
        if (p_ > 0) dinf = std::max(dinf, (bmat_.transpose() * x_).lpNorm<Eigen::Infinity>());
        if (dinf / bx <= 1e-4) {
          Eigen::VectorXd ray = -x_ / bx;
          double margin = 0.0;
          if (verify_ray(ray, margin)) {
            sol.status = SdpStatus::Infeasible;
            sol.y = ray;
            sol.metrics.ray_margin = margin;
            sol.note = "verified dual ray";
            return sol;
          }
        }
      }
      if (it == opts_.max_iter) break;
      if (!step(r1, r2, r3, r4)) {
        sol.note = "numerical breakdown";
        return finish_unknown(sol);
      }
    }
    sol.note = "iteration limit";
    return finish_unknown(sol);
  }

  /// Independent check of a candidate Farkas ray: after projecting out the
  /// free-variable directions and normalizing ||y||_inf = 1, every block of
  /// sum_k y_k A_k must be PSD within feas_tol and b^T y <= -10 feas_tol.
  bool verify_ray(Eigen::VectorXd& y, double& margin) const {
    if (!y.allFinite()) return false;
    if (p_ > 0) {
      Eigen::MatrixXd btb = bmat_.transpose() * bmat_;
      Eigen::VectorXd coef = btb.ldlt().solve(bmat_.transpose() * y);
      y -= bmat_ * coef;
    }
    const double scale = y.lpNorm<Eigen::Infinity>();
    if (!(scale > 0)) return false;
    y /= scale;
    if (p_ > 0 && (bmat_.transpose() * y).lpNorm<Eigen::Infinity>() > opts_.feas_tol) return false;
    const double by = b_.dot(y);
    if (by > -10.0 * opts_.feas_tol) return false;
    auto gy = g(y);
    for (int bl = 0; bl < nb_; ++bl)
      if (dim(bl) > 0 && min_eigenvalue(gy[u(bl)]) < -opts_.feas_tol) return false;
    margin = -by;
    return true;
  }

 private:
  static std::size_t u(int i) { return static_cast<std::size_t>(i); }
  int dim(int bl) const { return inst_.blocks[u(bl)]; }

  std::vector<Eigen::MatrixXd> g(const Eigen::VectorXd& x) const {
    std::vector<Eigen::MatrixXd> out;
    for (int bl = 0; bl < nb_; ++bl) {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim(bl), dim(bl));
      for (int k : touch_[u(bl)])
        for (const auto& e : ent_[u(bl)][u(k)]) a(e.p, e.q) += x(k) * e.v;
      out.push_back(std::move(a));
    }
    return out;
  }

  Eigen::VectorXd gt(const std::vector<Eigen::MatrixXd>& mats) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m_);
    for (int bl = 0; bl < nb_; ++bl)
      for (int k : touch_[u(bl)]) out(k) += sparse_dot(ent_[u(bl)][u(k)], mats[u(bl)]);
    return out;
  }

  static double inner(const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i].array() * b[i].array()).sum();
    return s;
  }

  std::vector<Eigen::MatrixXd> s_mat() const {
    std::vector<Eigen::MatrixXd> out;
    for (int bl = 0; bl < nb_; ++bl) out.push_back(sym(r_[u(bl)] * lam_[u(bl)].asDiagonal() * r_[u(bl)].transpose()));
    return out;
  }
  std::vector<Eigen::MatrixXd> z_mat() const {
    std::vector<Eigen::MatrixXd> out;
    for (int bl = 0; bl < nb_; ++bl)
      out.push_back(sym(rinv_[u(bl)].transpose() * lam_[u(bl)].asDiagonal() * rinv_[u(bl)]));
    return out;
  }

  /// Scaled-space quantity R^-1 M R^-T.
  Eigen::MatrixXd scale_in(int bl, const Eigen::MatrixXd& m) const {
    return sym(rinv_[u(bl)] * m * rinv_[u(bl)].transpose());
  }
  /// R^-T M R^-1, the map whose G^T pairing gives <Atilde_k, M>.
  Eigen::MatrixXd scale_out(int bl, const Eigen::MatrixXd& m) const {
    return sym(rinv_[u(bl)].transpose() * m * rinv_[u(bl)]);
  }

  struct Direction {
    Eigen::VectorXd dx, dw;
    double dtau = 0, dkappa = 0;
    std::vector<Eigen::MatrixXd> ds, dz;  // scaled
  };

  bool step(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, const std::vector<Eigen::MatrixXd>& r3, double r4) {
    // KKT matrix [H B; B^T 0], H_ij = <Atilde_i, Atilde_j>.
    const int nk = m_ + p_;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nk, nk);
    for (int bl = 0; bl < nb_; ++bl) {
      if (dim(bl) == 0) continue;
      const Eigen::MatrixXd q = rinv_[u(bl)].transpose() * rinv_[u(bl)];
      const auto& tk = touch_[u(bl)];
      Eigen::MatrixXd mk(dim(bl), dim(bl));
      for (std::size_t a = 0; a < tk.size(); ++a) {
        const int k = tk[a];
        mk.setZero();
        for (const auto& e : ent_[u(bl)][u(k)]) mk.noalias() += e.v * q.col(e.p) * q.row(e.q);
        for (std::size_t bidx = a; bidx < tk.size(); ++bidx) {
          const int l = tk[bidx];
          const double v = sparse_dot(ent_[u(bl)][u(l)], mk);
          kkt(k, l) += v;
          if (l != k) kkt(l, k) += v;
        }
      }
    }
    kkt.topRightCorner(m_, p_) = bmat_;
    kkt.bottomLeftCorner(p_, m_) = bmat_.transpose();
    if (!kkt.allFinite()) return false;
    // Tiny diagonal regularization keeps dependent constraint rows solvable.
    const double reg = 1e-13 * std::max(1.0, m_ > 0 ? kkt.topLeftCorner(m_, m_).diagonal().cwiseAbs().maxCoeff() : 0.0);
    kkt.topLeftCorner(m_, m_).diagonal().array() += reg;
    if (p_ > 0) kkt.bottomRightCorner(p_, p_).diagonal().array() -= reg;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);
    auto solve = [&](const Eigen::VectorXd& rhs) {
      Eigen::VectorXd sol = lu.solve(rhs);
      sol += lu.solve(rhs - kkt * sol);
      return sol;
    };

    std::vector<Eigen::MatrixXd> htil(u(nb_)), r3til(u(nb_)), qhq(u(nb_));
    double hh = 0.0;
    for (int bl = 0; bl < nb_; ++bl) {
      htil[u(bl)] = scale_in(bl, h_[u(bl)]);
      r3til[u(bl)] = scale_in(bl, r3[u(bl)]);
      qhq[u(bl)] = scale_out(bl, htil[u(bl)]);
      hh += htil[u(bl)].squaredNorm();
    }
    const Eigen::VectorXd gh = gt(qhq);
    Eigen::VectorXd vvec(nk), avec(nk);
    vvec << c_ - gh, -beq_;
    avec << c_ + gh, beq_;
    const Eigen::VectorXd s1 = solve(vvec);
    if (!s1.allFinite()) return false;
    const double denom = avec.dot(s1) + hh + kappa_ / tau_;
    if (!(denom > 0) || !std::isfinite(denom)) return false;

    double mu = tau_ * kappa_;
    for (const auto& l : lam_) mu += l.squaredNorm();
    mu /= (total_dim_ + 1);

    auto direction = [&](const std::vector<Eigen::MatrixXd>& dsc, double dk, Direction& d) -> bool {
      std::vector<Eigen::MatrixXd> qv(u(nb_)), out(u(nb_));
      double hq = 0.0;
      for (int bl = 0; bl < nb_; ++bl) {
        const auto& lam = lam_[u(bl)];
        Eigen::MatrixXd qb(dim(bl), dim(bl));
        for (int i = 0; i < dim(bl); ++i)
          for (int j = 0; j < dim(bl); ++j) qb(i, j) = 2.0 * dsc[u(bl)](i, j) / (lam(i) + lam(j));
        qv[u(bl)] = qb;
        out[u(bl)] = scale_out(bl, qb - r3til[u(bl)]);
        hq += (htil[u(bl)].array() * (qb - r3til[u(bl)]).array()).sum();
      }
      Eigen::VectorXd rhs(nk);
      rhs << -r1 - gt(out), r2;
      const Eigen::VectorXd s0 = solve(rhs);
      if (!s0.allFinite()) return false;
      d.dtau = (-r4 + hq + dk / tau_ + avec.dot(s0)) / denom;
      Eigen::VectorXd sol = s0 - d.dtau * s1;
      d.dx = sol.head(m_);
      d.dw = sol.tail(p_);
      d.dkappa = (dk - kappa_ * d.dtau) / tau_;
      auto gdx = g(d.dx);
      d.ds.resize(u(nb_));
      d.dz.resize(u(nb_));
      for (int bl = 0; bl < nb_; ++bl) {
        Eigen::MatrixXd t = scale_in(bl, gdx[u(bl)] - h_[u(bl)] * d.dtau - r3[u(bl)]);
        d.dz[u(bl)] = qv[u(bl)] + t;
        d.ds[u(bl)] = -t;
      }
      return std::isfinite(d.dtau) && std::isfinite(d.dkappa) && d.dx.allFinite();
    };
    auto max_alpha = [&](const Direction& d) {
      double a = std::numeric_limits<double>::infinity();
      for (int bl = 0; bl < nb_; ++bl) {
        a = std::min(a, max_step(lam_[u(bl)], d.ds[u(bl)]));
        a = std::min(a, max_step(lam_[u(bl)], d.dz[u(bl)]));
      }
      if (d.dtau < 0) a = std::min(a, -tau_ / d.dtau);
      if (d.dkappa < 0) a = std::min(a, -kappa_ / d.dkappa);
      return a;
    };

    // Predictor.
    std::vector<Eigen::MatrixXd> dsc(u(nb_));
    for (int bl = 0; bl < nb_; ++bl) dsc[u(bl)] = Eigen::MatrixXd((-lam_[u(bl)].array().square()).matrix().asDiagonal());
    Direction aff;
    if (!direction(dsc, -tau_ * kappa_, aff)) return false;
    const double alpha_aff = std::min(1.0, max_alpha(aff));
    const double sigma = std::pow(1.0 - alpha_aff, 3);

    // Corrector.
    for (int bl = 0; bl < nb_; ++bl) {
      const Eigen::MatrixXd prod = aff.ds[u(bl)] * aff.dz[u(bl)];
      dsc[u(bl)] -= 0.5 * (prod + prod.transpose());
      dsc[u(bl)].diagonal().array() += sigma * mu;
    }
    Direction dir;
    if (!direction(dsc, -tau_ * kappa_ - aff.dtau * aff.dkappa + sigma * mu, dir)) return false;
    const double alpha = std::min(1.0, 0.99 * max_alpha(dir));
    if (!(alpha > 1e-12)) return false;

    x_ += alpha * dir.dx;
    w_ += alpha * dir.dw;
    tau_ += alpha * dir.dtau;
    kappa_ += alpha * dir.dkappa;
    for (int bl = 0; bl < nb_; ++bl) {
      if (dim(bl) == 0) continue;
      Eigen::MatrixXd st = sym(Eigen::MatrixXd(lam_[u(bl)].asDiagonal()) + alpha * dir.ds[u(bl)]);
      Eigen::MatrixXd zt = sym(Eigen::MatrixXd(lam_[u(bl)].asDiagonal()) + alpha * dir.dz[u(bl)]);
      Eigen::LLT<Eigen::MatrixXd> ls(st), lz(zt);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
      const Eigen::MatrixXd lsm = ls.matrixL();
      const Eigen::MatrixXd lzm = lz.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(lzm.transpose() * lsm, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::VectorXd sv = svd.singularValues();
      if (sv.size() > 0 && !(sv.minCoeff() > 0)) return false;
      const Eigen::VectorXd isq = sv.cwiseSqrt().cwiseInverse();
      const Eigen::MatrixXd rt = lsm * svd.matrixV() * isq.asDiagonal();
      const Eigen::MatrixXd rtinv = isq.asDiagonal() * svd.matrixU().transpose() * lzm.transpose();
      r_[u(bl)] = r_[u(bl)] * rt;
      rinv_[u(bl)] = rtinv * rinv_[u(bl)];
      lam_[u(bl)] = sv;
    }
    return x_.allFinite() && std::isfinite(tau_) && tau_ > 0 && kappa_ > 0;
  }

  SdpSolution& finish_feasible(SdpSolution& sol, const std::vector<Eigen::MatrixXd>& z) const {
    sol.status = SdpStatus::Feasible;
    sol.blocks.clear();
    sol.metrics.min_eigenvalues.clear();
    for (int bl = 0; bl < nb_; ++bl) {
      sol.blocks.push_back(sym(z[u(bl)] / tau_));
      sol.metrics.min_eigenvalues.push_back(dim(bl) > 0 ? min_eigenvalue(sol.blocks.back()) : 0.0);
    }
    sol.free = w_ / tau_;
    sol.y = x_ / tau_;
    sol.metrics.rhs_reproduction = (gt(sol.blocks) + bmat_ * sol.free - b_).lpNorm<Eigen::Infinity>();
    sol.note = optimize_ ? "optimal" : "feasible";
    return sol;
  }

  SdpSolution& finish_unknown(SdpSolution& sol) const {
    sol.status = SdpStatus::Unknown;
    auto z = z_mat();
    sol.blocks.clear();
    for (int bl = 0; bl < nb_; ++bl) sol.blocks.push_back(sym(z[u(bl)] / tau_));
    sol.free = w_ / tau_;
    sol.y = x_ / tau_;
    return sol;
  }

  const SdpInstance& inst_;
  SdpOptions opts_;
  int m_ = 0, p_ = 0, nb_ = 0, total_dim_ = 0;
  bool optimize_ = false;
  std::vector<std::vector<std::vector<Expanded>>> ent_;
  std::vector<std::vector<int>> touch_;
  Eigen::VectorXd b_, c_, beq_;
  Eigen::MatrixXd bmat_;
  std::vector<Eigen::MatrixXd> h_;
  Eigen::VectorXd x_, w_;
  double tau_ = 1, kappa_ = 1;
  std::vector<Eigen::MatrixXd> r_, rinv_;
  std::vector<Eigen::VectorXd> lam_;
};

}  // namespace detail

namespace detail {

struct Presolved {
  SdpInstance reduced;
  std::vector<std::vector<int>> keep;  // per block: original indices kept
  std::vector<int> rows;               // original constraint index of each reduced row
  bool changed = false;
  bool trivially_infeasible = false;
};

/// Facial reduction by zero diagonals: a constraint with rhs 0, no free
/// variables and only same-signed diagonal entries forces those rows and
/// columns of X to vanish.  Repeated to a fixed point.
inline Presolved facial_reduce(const SdpInstance& inst) {
  const std::size_t nb = inst.blocks.size();
  std::vector<std::vector<char>> zero(nb);
  for (std::size_t b = 0; b < nb; ++b) zero[b].assign(static_cast<std::size_t>(inst.blocks[b]), 0);
  auto dead = [&](const SdpEntry& e) {
    const auto& z = zero[static_cast<std::size_t>(e.block)];
    return z[static_cast<std::size_t>(e.i)] || z[static_cast<std::size_t>(e.j)];
  };
  Presolved p;
  for (bool again = true; again;) {
    again = false;
    for (const auto& c : inst.constraints) {
      if (c.rhs != 0.0 || !c.free_coeffs.empty()) continue;
      int sign = 0;
      bool ok = true, any = false;
      for (const auto& e : c.entries) {
        if (e.value == 0.0 || dead(e)) continue;
        const int s = e.value > 0 ? 1 : -1;
        if (e.i != e.j || (sign != 0 && s != sign)) {
          ok = false;
          break;
        }
        sign = s;
        any = true;
      }
      if (!ok || !any) continue;
      for (const auto& e : c.entries)
        if (e.value != 0.0 && !dead(e)) zero[static_cast<std::size_t>(e.block)][static_cast<std::size_t>(e.i)] = 1;
      again = p.changed = true;
    }
  }
  if (!p.changed) return p;
  std::vector<std::vector<int>> pos(nb);
  p.keep.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    pos[b].assign(zero[b].size(), -1);
    for (std::size_t i = 0; i < zero[b].size(); ++i)
      if (!zero[b][i]) {
        pos[b][i] = static_cast<int>(p.keep[b].size());
        p.keep[b].push_back(static_cast<int>(i));
      }
    p.reduced.blocks.push_back(static_cast<int>(p.keep[b].size()));
  }
  p.reduced.num_free = inst.num_free;
  p.reduced.free_objective = inst.free_objective;
  auto map_entry = [&](const SdpEntry& e) {
    const auto& ps = pos[static_cast<std::size_t>(e.block)];
    return SdpEntry{e.block, ps[static_cast<std::size_t>(e.i)], ps[static_cast<std::size_t>(e.j)], e.value};
  };
  for (std::size_t k = 0; k < inst.constraints.size(); ++k) {
    const auto& c = inst.constraints[k];
    SdpConstraint rc;
    rc.rhs = c.rhs;
    rc.free_coeffs = c.free_coeffs;
    for (const auto& e : c.entries)
      if (e.value != 0.0 && !dead(e)) rc.entries.push_back(map_entry(e));
    if (rc.entries.empty() && rc.free_coeffs.empty()) {
      if (rc.rhs != 0.0) p.trivially_infeasible = true;
      continue;
    }
    p.rows.push_back(static_cast<int>(k));
    p.reduced.constraints.push_back(std::move(rc));
  }
  for (const auto& e : inst.objective)
    if (!dead(e)) p.reduced.objective.push_back(map_entry(e));
  return p;
}

}  // namespace detail

/// Pure feasibility problems are first reduced by zero-diagonal facial
/// reduction; a feasible reduced solution is padded with zeros.  Anything
/// else (and every infeasibility claim) comes from the full instance.
inline SdpSolution solve_feasibility(const SdpInstance& inst, const SdpOptions& opts = {}) {
  inst.validate();
  if (!(opts.feas_tol > 0) || opts.max_iter < 0) throw MalformedInstance("sdp: invalid options");
  if (!inst.has_objective()) {
    detail::Presolved p = detail::facial_reduce(inst);
    if (p.changed && !p.trivially_infeasible) {
      detail::HsdSolver rs(p.reduced, opts);
      SdpSolution red = rs.run();
      if (red.status == SdpStatus::Feasible) {
        SdpSolution out = red;
        out.blocks.clear();
        out.metrics.min_eigenvalues.clear();
        for (std::size_t b = 0; b < inst.blocks.size(); ++b) {
          Eigen::MatrixXd x = Eigen::MatrixXd::Zero(inst.blocks[b], inst.blocks[b]);
          const auto& kp = p.keep[b];
          for (std::size_t i = 0; i < kp.size(); ++i)
            for (std::size_t j = 0; j < kp.size(); ++j)
              x(kp[i], kp[j]) = red.blocks[b](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          out.metrics.min_eigenvalues.push_back(
              x.size() ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(x, Eigen::EigenvaluesOnly).eigenvalues()(0) : 0.0);
          out.blocks.push_back(std::move(x));
        }
        out.y = Eigen::VectorXd::Zero(inst.num_constraints());
        for (std::size_t r = 0; r < p.rows.size(); ++r) out.y(p.rows[r]) = red.y(static_cast<Eigen::Index>(r));
        out.note += " (after facial reduction)";
        return out;
      }
    }
  }
  detail::HsdSolver solver(inst, opts);
  return solver.run();
}

/// Standalone Farkas-ray check (same test the solver applies before
/// declaring Infeasible).  y is normalized in place.
inline bool verify_dual_ray(const SdpInstance& inst, Eigen::VectorXd& y, const SdpOptions& opts = {}) {
  inst.validate();
  if (y.size() != inst.num_constraints()) throw DimensionMismatch("verify_dual_ray: length differs from constraint count");
  detail::HsdSolver solver(inst, opts);
  double margin = 0.0;
  return solver.verify_ray(y, margin);
}

// Debug dump format "mpsatz-sdp" v1 (see schemas/sdp_instance.schema.json).
inline nlohmann::json sdp_instance_to_json(const SdpInstance& inst) {
  using nlohmann::json;
  auto entry = [](const SdpEntry& e) { return json::array({e.block, e.i, e.j, e.value}); };
  json j;
  j["format"] = "mpsatz-sdp";
  j["version"] = 1;
  j["blocks"] = inst.blocks;
  j["num_free"] = inst.num_free;
  json cons = json::array();
  for (const auto& c : inst.constraints) {
    json jc;
    jc["rhs"] = c.rhs;
    jc["entries"] = json::array();
    for (const auto& e : c.entries) jc["entries"].push_back(entry(e));
    jc["free"] = json::array();
    for (const auto& [f, v] : c.free_coeffs) jc["free"].push_back(json::array({f, v}));
    cons.push_back(std::move(jc));
  }
  j["constraints"] = std::move(cons);
  j["objective"] = json::array();
  for (const auto& e : inst.objective) j["objective"].push_back(entry(e));
  j["free_objective"] = inst.free_objective;
  return j;
}

inline SdpInstance sdp_instance_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != "mpsatz-sdp") throw ParseError("not an mpsatz-sdp document");
    SdpInstance inst;
    inst.blocks = j.at("blocks").get<std::vector<int>>();
    inst.num_free = j.value("num_free", 0);
    auto entry = [](const nlohmann::json& e) {
      return SdpEntry{e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>(), e.at(3).get<double>()};
    };
    for (const auto& jc : j.at("constraints")) {
      SdpConstraint c;
      c.rhs = jc.at("rhs").get<double>();
      for (const auto& e : jc.at("entries")) c.entries.push_back(entry(e));
      if (jc.contains("free"))
        for (const auto& f : jc.at("free")) c.free_coeffs.emplace_back(f.at(0).get<int>(), f.at(1).get<double>());
      inst.constraints.push_back(std::move(c));
    }
    if (j.contains("objective"))
      for (const auto& e : j.at("objective")) inst.objective.push_back(entry(e));
    if (j.contains("free_objective")) inst.free_objective = j.at("free_objective").get<std::vector<double>>();
    inst.validate();
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sdp instance: ") + e.what());
  }
}

}  // namespace mpsatz
