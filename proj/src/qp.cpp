#include "cadsvm/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cadsvm::qp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Diagonal regularization ladder for singular Newton systems: first attempt
// is unregularized, then 1e-10 escalated up to 3 times.
constexpr double kRegLadder[] = {0.0, 1e-10, 1e-8, 1e-6};

// Abstract view of the operations the interior-point engine needs. Both the
// dense and the slack-eliminated training backend implement it; the engine
// itself never materializes P or G.
class KktOps {
 public:
  virtual ~KktOps() = default;
  virtual int num_vars() const = 0;
  virtual int num_cons() const = 0;
  virtual const VectorXd& q() const = 0;
  virtual const VectorXd& h() const = 0;
  virtual void mul_p(const VectorXd& x, VectorXd& out) const = 0;
  virtual void mul_g(const VectorXd& x, VectorXd& out) const = 0;
  virtual void mul_gt(const VectorXd& y, VectorXd& out) const = 0;
  // Factorizes M = P + G' diag(d) G + reg I; returns false when the
  // factorization breaks down.
  virtual bool factorize(const VectorXd& d, double reg) = 0;
  virtual void solve(const VectorXd& rhs, VectorXd& out) const = 0;
};

class DenseOps final : public KktOps {
 public:
  explicit DenseOps(const QpProblem& p) : p_(p) {}

  int num_vars() const override { return static_cast<int>(p_.q.size()); }
  int num_cons() const override { return static_cast<int>(p_.h.size()); }
  const VectorXd& q() const override { return p_.q; }
  const VectorXd& h() const override { return p_.h; }

  void mul_p(const VectorXd& x, VectorXd& out) const override { out.noalias() = p_.p * x; }
  void mul_g(const VectorXd& x, VectorXd& out) const override { out.noalias() = p_.g * x; }
  void mul_gt(const VectorXd& y, VectorXd& out) const override {
    out.noalias() = p_.g.transpose() * y;
  }

  bool factorize(const VectorXd& d, double reg) override {
    m_ = p_.p;
    if (num_cons() > 0) {
      scaled_.noalias() = d.asDiagonal() * p_.g;
      m_.noalias() += p_.g.transpose() * scaled_;
    }
    m_.diagonal().array() += reg;
    llt_.compute(m_);
    return llt_.info() == Eigen::Success;
  }

  void solve(const VectorXd& rhs, VectorXd& out) const override { out = llt_.solve(rhs); }

 private:
  const QpProblem& p_;
  MatrixXd m_, scaled_;
  Eigen::LLT<MatrixXd> llt_;
};

// Backend for training QPs. Variables (w, u, xi) with xi eliminated from the
// Newton system: because each slack couples to exactly one sample, the
// Schur complement onto (w, u) keeps the Phi' diag(.) Phi form and has
// dimension N_b (or 2 N_b with a rejector) instead of the full variable
// count.
class StructuredOps final : public KktOps {
 public:
  explicit StructuredOps(const TrainingProblem& t)
      : phi_(t.design),
        rows_(t.rows),
        lambda_(t.lambda),
        lambda_prime_(t.lambda_prime),
        p_extra_(t.p_extra) {
    ns_ = static_cast<int>(phi_.rows());
    nb_ = static_cast<int>(phi_.cols());
    nu_ = t.with_rejector ? nb_ : 0;
    nxi_ = t.n_slack;
    n_ = nb_ + nu_ + nxi_;
    m_cons_ = static_cast<int>(rows_.size());

    slack_sample_.assign(nxi_, -1);
    for (const ConstraintRow& r : rows_) {
      slack_sample_[r.slack] = r.sample;
    }

    q_ = VectorXd::Zero(n_);
    q_.tail(nxi_) = t.xi_cost;
    h_.resize(m_cons_);
    for (int r = 0; r < m_cons_; ++r) h_[r] = -rows_[r].constant;

    hw_.resize(ns_);
    hu_.resize(nu_ > 0 ? ns_ : 0);
    acc_w_.resize(ns_);
    acc_u_.resize(nu_ > 0 ? ns_ : 0);
    dxi_.resize(nxi_);
    ew_.resize(nxi_);
    eu_.resize(nxi_);
    const int nv = nb_ + nu_;
    m_.resize(nv, nv);
    tmp_.resize(ns_, nb_);
    rv_.resize(nv);
    dv_.resize(nv);
  }

  int num_vars() const override { return n_; }
  int num_cons() const override { return m_cons_; }
  const VectorXd& q() const override { return q_; }
  const VectorXd& h() const override { return h_; }

  void mul_p(const VectorXd& x, VectorXd& out) const override {
    out.resize(n_);
    out.head(nb_) = lambda_ * x.head(nb_);
    if (p_extra_.size() > 0) out.head(nb_).noalias() += p_extra_ * x.head(nb_);
    if (nu_ > 0) out.segment(nb_, nu_) = lambda_prime_ * x.segment(nb_, nu_);
    out.tail(nxi_).setZero();
  }

  void mul_g(const VectorXd& x, VectorXd& out) const override {
    hw_.noalias() = phi_ * x.head(nb_);
    if (nu_ > 0) hu_.noalias() = phi_ * x.segment(nb_, nu_);
    out.resize(m_cons_);
    const int xi_base = nb_ + nu_;
    for (int r = 0; r < m_cons_; ++r) {
      const ConstraintRow& row = rows_[r];
      double v = row.h_coeff * hw_[row.sample] - x[xi_base + row.slack];
      if (nu_ > 0) v += row.r_coeff * hu_[row.sample];
      out[r] = v;
    }
  }

  void mul_gt(const VectorXd& y, VectorXd& out) const override {
    acc_w_.setZero();
    if (nu_ > 0) acc_u_.setZero();
    out.resize(n_);
    out.tail(nxi_).setZero();
    const int xi_base = nb_ + nu_;
    for (int r = 0; r < m_cons_; ++r) {
      const ConstraintRow& row = rows_[r];
      acc_w_[row.sample] += row.h_coeff * y[r];
      if (nu_ > 0) acc_u_[row.sample] += row.r_coeff * y[r];
      out[xi_base + row.slack] -= y[r];
    }
    out.head(nb_).noalias() = phi_.transpose() * acc_w_;
    if (nu_ > 0) out.segment(nb_, nu_).noalias() = phi_.transpose() * acc_u_;
  }

  bool factorize(const VectorXd& d, double reg) override {
    dxi_.setConstant(reg);
    ew_.setZero();
    eu_.setZero();
    VectorXd cw = VectorXd::Zero(ns_);
    VectorXd cwu = VectorXd::Zero(ns_);
    VectorXd cu = VectorXd::Zero(ns_);
    for (int r = 0; r < m_cons_; ++r) {
      const ConstraintRow& row = rows_[r];
      const double dr = d[r];
      dxi_[row.slack] += dr;
      ew_[row.slack] += dr * row.h_coeff;
      cw[row.sample] += dr * row.h_coeff * row.h_coeff;
      if (nu_ > 0) {
        eu_[row.slack] += dr * row.r_coeff;
        cwu[row.sample] += dr * row.h_coeff * row.r_coeff;
        cu[row.sample] += dr * row.r_coeff * row.r_coeff;
      }
    }
    for (int k = 0; k < nxi_; ++k) {
      if (!(dxi_[k] > 0.0)) return false;
      const int s = slack_sample_[k];
      const double inv = 1.0 / dxi_[k];
      cw[s] -= ew_[k] * ew_[k] * inv;
      if (nu_ > 0) {
        cwu[s] -= ew_[k] * eu_[k] * inv;
        cu[s] -= eu_[k] * eu_[k] * inv;
      }
    }

    tmp_.noalias() = cw.asDiagonal() * phi_;
    m_.topLeftCorner(nb_, nb_).noalias() = phi_.transpose() * tmp_;
    m_.topLeftCorner(nb_, nb_).diagonal().array() += lambda_ + reg;
    if (p_extra_.size() > 0) m_.topLeftCorner(nb_, nb_) += p_extra_;
    if (nu_ > 0) {
      tmp_.noalias() = cwu.asDiagonal() * phi_;
      m_.topRightCorner(nb_, nu_).noalias() = phi_.transpose() * tmp_;
      m_.bottomLeftCorner(nu_, nb_) = m_.topRightCorner(nb_, nu_).transpose();
      tmp_.noalias() = cu.asDiagonal() * phi_;
      m_.bottomRightCorner(nu_, nu_).noalias() = phi_.transpose() * tmp_;
      m_.bottomRightCorner(nu_, nu_).diagonal().array() += lambda_prime_ + reg;
    }
    llt_.compute(m_);
    return llt_.info() == Eigen::Success;
  }

  void solve(const VectorXd& rhs, VectorXd& out) const override {
    const int xi_base = nb_ + nu_;
    acc_w_.setZero();
    if (nu_ > 0) acc_u_.setZero();
    for (int k = 0; k < nxi_; ++k) {
      const double f = rhs[xi_base + k] / dxi_[k];
      acc_w_[slack_sample_[k]] += ew_[k] * f;
      if (nu_ > 0) acc_u_[slack_sample_[k]] += eu_[k] * f;
    }
    rv_.head(nb_) = rhs.head(nb_);
    rv_.head(nb_).noalias() += phi_.transpose() * acc_w_;
    if (nu_ > 0) {
      rv_.tail(nu_) = rhs.segment(nb_, nu_);
      rv_.tail(nu_).noalias() += phi_.transpose() * acc_u_;
    }
    dv_ = llt_.solve(rv_);
    out.resize(n_);
    out.head(nb_ + nu_) = dv_;
    hw_.noalias() = phi_ * dv_.head(nb_);
    if (nu_ > 0) hu_.noalias() = phi_ * dv_.tail(nu_);
    for (int k = 0; k < nxi_; ++k) {
      const int s = slack_sample_[k];
      double num = rhs[xi_base + k] + ew_[k] * hw_[s];
      if (nu_ > 0) num += eu_[k] * hu_[s];
      out[xi_base + k] = num / dxi_[k];
    }
  }

 private:
  const MatrixXd& phi_;
  const std::vector<ConstraintRow>& rows_;
  double lambda_, lambda_prime_;
  const MatrixXd& p_extra_;
  int ns_ = 0, nb_ = 0, nu_ = 0, nxi_ = 0, n_ = 0, m_cons_ = 0;
  std::vector<int> slack_sample_;
  VectorXd q_, h_;
  VectorXd dxi_, ew_, eu_;
  mutable VectorXd hw_, hu_, acc_w_, acc_u_, rv_, dv_;
  MatrixXd m_, tmp_;
  Eigen::LLT<MatrixXd> llt_;
};

bool factorize_escalated(KktOps& ops, const VectorXd& d, double* reg_used) {
  for (double reg : kRegLadder) {
    if (ops.factorize(d, reg)) {
      *reg_used = reg;
      return true;
    }
  }
  return false;
}

// Solves M x = rhs with one iterative-refinement pass,
// M = P + G' diag(d) G + reg I.
void solve_refined(const KktOps& ops, const VectorXd& d, double reg, const VectorXd& rhs,
                   VectorXd& x, VectorXd& mn, VectorXd& mn2, VectorXd& mm, VectorXd& mm2) {
  ops.solve(rhs, x);
  ops.mul_p(x, mn);
  if (ops.num_cons() > 0) {
    ops.mul_g(x, mm);
    mm2 = d.cwiseProduct(mm);
    ops.mul_gt(mm2, mn2);
    mn += mn2;
  }
  mn += reg * x;
  mn = rhs - mn;  // residual
  ops.solve(mn, mn2);
  x += mn2;
}

double max_step(const VectorXd& s, const VectorXd& ds, const VectorXd& lam,
                const VectorXd& dlam) {
  double a = 1.0;
  for (int i = 0; i < s.size(); ++i) {
    if (ds[i] < 0.0) a = std::min(a, -s[i] / ds[i]);
    if (dlam[i] < 0.0) a = std::min(a, -lam[i] / dlam[i]);
  }
  return a;
}

QpSolution run_interior_point(KktOps& ops, const SolverOptions& opt) {
  const int n = ops.num_vars();
  const int m = ops.num_cons();
  const VectorXd& q = ops.q();
  const VectorXd& h = ops.h();

  QpSolution sol;
  VectorXd z = VectorXd::Zero(n);
  VectorXd pz(n);

  const auto finish = [&](SolveStatus status, const VectorXd& lam, double kkt, int iters) {
    sol.status = status;
    sol.z = z;
    sol.duals = lam;
    ops.mul_p(z, pz);
    sol.objective = 0.5 * z.dot(pz) + q.dot(z);
    sol.kkt_residual = kkt;
    sol.iterations = iters;
    return sol;
  };

  VectorXd mn(n), mn2(n), mm(m), mm2(m);

  if (m == 0) {
    const VectorXd d0(0);
    double reg = 0.0;
    if (!factorize_escalated(ops, d0, &reg)) {
      return finish(SolveStatus::NumericalFailure, VectorXd(0),
                    std::numeric_limits<double>::infinity(), 0);
    }
    solve_refined(ops, d0, reg, -q, z, mn, mn2, mm, mm2);
    ops.mul_p(z, pz);
    const double kkt = (pz + q).lpNorm<Eigen::Infinity>();
    return finish(kkt <= opt.tol ? SolveStatus::Converged : SolveStatus::MaxIterations,
                  VectorXd(0), kkt, 0);
  }

  VectorXd s(m);
  for (int i = 0; i < m; ++i) s[i] = std::max(1.0, std::abs(h[i]));
  VectorXd lam = VectorXd::Ones(m);

  VectorXd gz(m), gtl(n), rd(n), rp(m), dvec(m), rhs(n);
  VectorXd dz_aff(n), ds_aff(m), dlam_aff(m), dz(n), ds(m), dlam(m), rc(m), gdz(m);

  double kkt = std::numeric_limits<double>::infinity();
  for (int iter = 0;; ++iter) {
    ops.mul_g(z, gz);
    ops.mul_p(z, pz);
    ops.mul_gt(lam, gtl);
    rd = pz + q + gtl;
    rp = gz + s - h;

    const double stat = rd.lpNorm<Eigen::Infinity>();
    double viol = 0.0;
    double comp = 0.0;
    for (int i = 0; i < m; ++i) {
      const double gap = gz[i] - h[i];
      viol = std::max(viol, gap);
      comp = std::max(comp, std::abs(lam[i] * gap));
    }
    kkt = std::max({stat, std::max(viol, 0.0), comp});
    if (kkt <= opt.tol) return finish(SolveStatus::Converged, lam, kkt, iter);
    if (iter >= opt.max_iter) return finish(SolveStatus::MaxIterations, lam, kkt, iter);

    const double mu = lam.dot(s) / m;
    if (!std::isfinite(mu) || mu > 1e16) {
      return finish(SolveStatus::NumericalFailure, lam, kkt, iter);
    }

    dvec = lam.cwiseQuotient(s);
    double reg = 0.0;
    if (!factorize_escalated(ops, dvec, &reg)) {
      return finish(SolveStatus::NumericalFailure, lam, kkt, iter);
    }

    // Affine predictor: r_c = lam o s.
    mm = dvec.cwiseProduct(rp) - lam;
    ops.mul_gt(mm, rhs);
    rhs = -rd - rhs;
    solve_refined(ops, dvec, reg, rhs, dz_aff, mn, mn2, mm, mm2);
    ops.mul_g(dz_aff, gdz);
    ds_aff = -rp - gdz;
    dlam_aff = -dvec.cwiseProduct(ds_aff) - lam;

    const double alpha_aff = max_step(s, ds_aff, lam, dlam_aff);
    const double mu_aff =
        (s + alpha_aff * ds_aff).dot(lam + alpha_aff * dlam_aff) / m;
    const double ratio = std::clamp(mu_aff / mu, 0.0, 1.0);
    const double sigma = ratio * ratio * ratio;

    // Corrector: r_c = lam o s + dlam_aff o ds_aff - sigma mu.
    rc = lam.cwiseProduct(s) + dlam_aff.cwiseProduct(ds_aff);
    rc.array() -= sigma * mu;
    mm = dvec.cwiseProduct(rp) - rc.cwiseQuotient(s);
    ops.mul_gt(mm, rhs);
    rhs = -rd - rhs;
    solve_refined(ops, dvec, reg, rhs, dz, mn, mn2, mm, mm2);
    ops.mul_g(dz, gdz);
    ds = -rp - gdz;
    dlam = -dvec.cwiseProduct(ds) - rc.cwiseQuotient(s);

    const double alpha = std::min(1.0, 0.995 * max_step(s, ds, lam, dlam));
    z += alpha * dz;
    s += alpha * ds;
    lam += alpha * dlam;
  }
}

void validate_training(const TrainingProblem& t) {
  const int ns = static_cast<int>(t.design.rows());
  const int nb = static_cast<int>(t.design.cols());
  if (ns == 0 || nb == 0) throw std::invalid_argument("training qp: empty design matrix");
  if (!(t.lambda > 0.0)) throw std::invalid_argument("training qp: lambda must be positive");
  if (t.with_rejector && !(t.lambda_prime > 0.0)) {
    throw std::invalid_argument("training qp: lambda_prime must be positive with a rejector");
  }
  if (t.n_slack <= 0 || t.xi_cost.size() != t.n_slack) {
    throw std::invalid_argument("training qp: slack count and xi_cost mismatch");
  }
  if (t.p_extra.size() > 0 && (t.p_extra.rows() != nb || t.p_extra.cols() != nb)) {
    throw std::invalid_argument("training qp: p_extra must be N_b x N_b");
  }
  std::vector<int> slack_sample(t.n_slack, -1);
  std::vector<int> sample_slack(ns, -1);
  std::vector<int> slack_rows(t.n_slack, 0);
  for (const ConstraintRow& r : t.rows) {
    if (r.sample < 0 || r.sample >= ns) throw std::invalid_argument("training qp: bad sample index");
    if (r.slack < 0 || r.slack >= t.n_slack) {
      throw std::invalid_argument("training qp: bad slack index");
    }
    if (!t.with_rejector && r.r_coeff != 0.0) {
      throw std::invalid_argument("training qp: rejector coefficient without a rejector block");
    }
    if (slack_sample[r.slack] == -1) {
      slack_sample[r.slack] = r.sample;
      if (sample_slack[r.sample] != -1) {
        throw std::invalid_argument("training qp: sample owns two slacks");
      }
      sample_slack[r.sample] = r.slack;
    } else if (slack_sample[r.slack] != r.sample) {
      throw std::invalid_argument("training qp: slack spans two samples");
    }
    ++slack_rows[r.slack];
  }
  for (int k = 0; k < t.n_slack; ++k) {
    if (slack_rows[k] == 0) throw std::invalid_argument("training qp: unconstrained slack");
  }
}

}  // namespace

QpProblem QpProblem::make(Eigen::MatrixXd p, Eigen::VectorXd q, Eigen::MatrixXd g,
                          Eigen::VectorXd h) {
  const auto n = p.rows();
  if (p.cols() != n) throw std::invalid_argument("qp: P must be square");
  if (q.size() != n) throw std::invalid_argument("qp: q size mismatch");
  if (g.rows() != h.size()) throw std::invalid_argument("qp: G and h row mismatch");
  if (g.rows() > 0 && g.cols() != n) throw std::invalid_argument("qp: G column mismatch");
  const double asym = (p - p.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw std::invalid_argument("qp: P asymmetric beyond 1e-10 (max deviation " +
                                std::to_string(asym) + ")");
  }
  p = ((p + p.transpose()) * 0.5).eval();
  if (n <= 500) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p, Eigen::EigenvaluesOnly);
    if (es.info() == Eigen::Success && es.eigenvalues().minCoeff() < -1e-8) {
      throw std::invalid_argument("qp: P has an eigenvalue below -1e-8");
    }
  }
  QpProblem out;
  out.p = std::move(p);
  out.q = std::move(q);
  out.g = std::move(g);
  out.h = std::move(h);
  return out;
}

QpSolution solve_qp(const QpProblem& problem, const SolverOptions& options) {
  DenseOps ops(problem);
  return run_interior_point(ops, options);
}

QpProblem assemble_training_qp(const TrainingProblem& training) {
  validate_training(training);
  const int ns = static_cast<int>(training.design.rows());
  (void)ns;
  const int nb = static_cast<int>(training.design.cols());
  const int nu = training.with_rejector ? nb : 0;
  const int n = nb + nu + training.n_slack;
  const int m = static_cast<int>(training.rows.size());

  MatrixXd p = MatrixXd::Zero(n, n);
  p.topLeftCorner(nb, nb).diagonal().setConstant(training.lambda);
  if (training.p_extra.size() > 0) p.topLeftCorner(nb, nb) += training.p_extra;
  if (nu > 0) p.block(nb, nb, nu, nu).diagonal().setConstant(training.lambda_prime);

  VectorXd q = VectorXd::Zero(n);
  q.tail(training.n_slack) = training.xi_cost;

  MatrixXd g = MatrixXd::Zero(m, n);
  VectorXd h(m);
  const int xi_base = nb + nu;
  for (int r = 0; r < m; ++r) {
    const ConstraintRow& row = training.rows[r];
    if (row.h_coeff != 0.0) {
      g.row(r).segment(0, nb) = row.h_coeff * training.design.row(row.sample);
    }
    if (nu > 0 && row.r_coeff != 0.0) {
      g.row(r).segment(nb, nu) = row.r_coeff * training.design.row(row.sample);
    }
    g(r, xi_base + row.slack) = -1.0;
    h[r] = -row.constant;
  }
  return QpProblem::make(std::move(p), std::move(q), std::move(g), std::move(h));
}

QpSolution solve_training_qp(const TrainingProblem& training, const SolverOptions& options) {
  validate_training(training);
  StructuredOps ops(training);
  return run_interior_point(ops, options);
}

}  // namespace cadsvm::qp
