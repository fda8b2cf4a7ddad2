#include "rsopt/qcqp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "rsopt/errors.hpp"

namespace rsopt {

int QcqpProblem::antennas() const {
  return users.empty() ? 0 : static_cast<int>(users.front().f.size());
}

double QcqpProblem::weight(int k) const {
  return weights.size() == 0 ? 1.0 : weights(k);
}

void QcqpProblem::validate() const {
  const int K = num_users();
  const int Nt = antennas();
  if (K < 1 || Nt < 1) throw NumericalError("QCQP needs at least one user and antenna");
  if (!(Pt > 0.0)) throw NumericalError("QCQP power budget must be positive");
  if (!(sigma_n2 >= 0.0)) throw NumericalError("QCQP noise variance must be >= 0");
  if (weights.size() != 0 && weights.size() != K)
    throw DimensionError("QCQP weight vector has the wrong length");
  if (weights.size() != 0 && !(weights.array() > 0.0).all())
    throw NumericalError("QCQP weights must be positive");
  auto check_psd = [&](const CMat& A, const char* name) {
    if (A.rows() != Nt || A.cols() != Nt)
      throw DimensionError(std::string("QCQP matrix ") + name + " has the wrong shape");
    const double scale = 1.0 + A.cwiseAbs().maxCoeff();
    if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw NumericalError(std::string("QCQP matrix ") + name + " is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(A, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
      throw NumericalError(std::string("QCQP matrix ") + name + " is not PSD");
  };
  for (const auto& u : users) {
    check_psd(u.Psi, "Psi");
    check_psd(u.Psi_c, "Psi_c");
    if (u.f.size() != Nt || u.f_c.size() != Nt)
      throw DimensionError("QCQP linear term has the wrong length");
  }
}

const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::kOptimal: return "optimal";
    case SolverStatus::kMaxIterations: return "max_iterations";
    case SolverStatus::kNumericalTrouble: return "numerical_trouble";
  }
  return "unknown";
}

double KktReport::max() const {
  return std::max({stationarity, primal, dual, complementarity});
}

UserAwmse evaluate_user_awmse(const QcqpProblem& prob, const Precoder& P) {
  const int K = prob.num_users();
  UserAwmse out{RVec(K), RVec(K)};
  for (int k = 0; k < K; ++k) {
    const SafBundle& s = prob.users[static_cast<std::size_t>(k)];
    double q = prob.sigma_n2 * s.t + s.u - s.ups;
    double c = prob.sigma_n2 * s.t_c + s.u_c - s.ups_c;
    for (int i = 0; i < K; ++i) {
      const auto p = P.priv.col(i);
      q += std::real(p.dot(s.Psi * p));
      c += std::real(p.dot(s.Psi_c * p));
    }
    q -= 2.0 * std::real(s.f.dot(P.priv.col(k)));
    c += std::real(P.common.dot(s.Psi_c * P.common));
    c -= 2.0 * std::real(s.f_c.dot(P.common));
    out.q(k) = q;
    out.c(k) = c;
  }
  return out;
}

double qcqp_objective(const QcqpProblem& prob, const Precoder& P,
                      std::optional<double> xi_c, const RVec& split) {
  const UserAwmse a = evaluate_user_awmse(prob, P);
  double obj = 0.0;
  for (int k = 0; k < prob.num_users(); ++k) obj += prob.weight(k) * a.q(k);
  switch (prob.structure) {
    case CommonStructure::kNone: break;
    case CommonStructure::kEpigraph: obj += xi_c.value_or(a.c.maxCoeff()); break;
    case CommonStructure::kSharedSplit:
      for (int k = 0; k < split.size(); ++k) obj -= prob.weight(k) * split(k);
      break;
  }
  return obj;
}

namespace {

// 0.5 x^T Q x + c^T x + r
struct Quadratic {
  RMat Q;
  RVec c;
  double r = 0.0;
  bool linear = false;

  double value(const RVec& x) const {
    return (linear ? 0.0 : 0.5 * x.dot(Q * x)) + c.dot(x) + r;
  }
  RVec grad(const RVec& x) const { return linear ? c : RVec(Q * x + c); }
};

struct Layout {
  int Nt = 0;
  int K = 0;
  bool common = false;
  bool xi = false;
  bool split = false;
  int n = 0;

  int block() const { return 2 * Nt; }
  int common_off() const { return 0; }
  int priv_off(int i) const { return (common ? block() : 0) + block() * i; }
  int precoder_dim() const { return block() * (K + (common ? 1 : 0)); }
  int xi_off() const { return precoder_dim(); }
  int split_off() const { return precoder_dim() + (xi ? 1 : 0); }
};

struct RealProblem {
  Layout lay;
  Quadratic obj;
  std::vector<Quadratic> cons;  // common (0 or K), power, split >= 0 (0 or K)
  int n_common = 0;
  int power_idx = 0;
  double scale = 1.0;           // P = scale * z
};

Layout make_layout(const QcqpProblem& prob, bool split_active) {
  Layout lay;
  lay.Nt = prob.antennas();
  lay.K = prob.num_users();
  lay.common = prob.structure != CommonStructure::kNone;
  lay.xi = prob.structure == CommonStructure::kEpigraph;
  lay.split = prob.structure == CommonStructure::kSharedSplit && split_active;
  lay.n = lay.precoder_dim() + (lay.xi ? 1 : 0) + (lay.split ? lay.K : 0);
  return lay;
}

RealProblem build_real_problem(const QcqpProblem& prob, bool split_active) {
  RealProblem rp;
  rp.lay = make_layout(prob, split_active);
  const Layout& L = rp.lay;
  const int n = L.n;
  const int b = L.block();
  const double s = std::sqrt(prob.Pt);
  rp.scale = s;

  rp.obj.Q = RMat::Zero(n, n);
  rp.obj.c = RVec::Zero(n);
  CMat weighted_psi = CMat::Zero(L.Nt, L.Nt);
  for (int k = 0; k < L.K; ++k) {
    const SafBundle& u = prob.users[static_cast<std::size_t>(k)];
    weighted_psi += prob.weight(k) * u.Psi;
    rp.obj.r += prob.weight(k) * (prob.sigma_n2 * u.t + u.u - u.ups);
    rp.obj.c.segment(L.priv_off(k), b) = -2.0 * s * prob.weight(k) * stack_real(u.f);
  }
  const RMat q_priv = 2.0 * prob.Pt * real_embedding(weighted_psi);
  for (int i = 0; i < L.K; ++i) rp.obj.Q.block(L.priv_off(i), L.priv_off(i), b, b) = q_priv;
  if (L.xi) rp.obj.c(L.xi_off()) = 1.0;
  if (L.split)
    for (int j = 0; j < L.K; ++j) rp.obj.c(L.split_off() + j) = -prob.weight(j);

  const bool common_cons = L.xi || L.split;
  if (common_cons) {
    for (int k = 0; k < L.K; ++k) {
      const SafBundle& u = prob.users[static_cast<std::size_t>(k)];
      Quadratic q{RMat::Zero(n, n), RVec::Zero(n), 0.0, false};
      const RMat qc = 2.0 * prob.Pt * real_embedding(u.Psi_c);
      q.Q.block(L.common_off(), L.common_off(), b, b) = qc;
      for (int i = 0; i < L.K; ++i) q.Q.block(L.priv_off(i), L.priv_off(i), b, b) = qc;
      q.c.segment(L.common_off(), b) = -2.0 * s * stack_real(u.f_c);
      q.r = prob.sigma_n2 * u.t_c + u.u_c - u.ups_c;
      if (L.xi) q.c(L.xi_off()) = -1.0;
      if (L.split) {
        for (int j = 0; j < L.K; ++j) q.c(L.split_off() + j) = 1.0;
        q.r -= prob.common_budget;
      }
      rp.cons.push_back(std::move(q));
    }
    rp.n_common = L.K;
  }

  Quadratic power{RMat::Zero(n, n), RVec::Zero(n), -1.0, false};
  const int pd = L.precoder_dim();
  power.Q.topLeftCorner(pd, pd) = 2.0 * RMat::Identity(pd, pd);
  rp.power_idx = static_cast<int>(rp.cons.size());
  rp.cons.push_back(std::move(power));

  if (L.split) {
    for (int j = 0; j < L.K; ++j) {
      Quadratic q{RMat(), RVec::Zero(n), 0.0, true};
      q.c(L.split_off() + j) = -1.0;
      rp.cons.push_back(std::move(q));
    }
  }
  return rp;
}

RVec precoder_to_z(const Layout& L, const Precoder& P, double scale) {
  RVec z = RVec::Zero(L.precoder_dim());
  if (L.common) z.segment(L.common_off(), L.block()) = stack_real(P.common) / scale;
  for (int i = 0; i < L.K; ++i)
    z.segment(L.priv_off(i), L.block()) = stack_real(P.priv.col(i)) / scale;
  return z;
}

Precoder z_to_precoder(const Layout& L, const RVec& x, double scale) {
  Precoder P = Precoder::zeros(L.Nt, L.K, L.common ? PrecodingMode::kRS : PrecodingMode::kNoRS);
  if (L.common) P.common = scale * unstack_real(x.segment(L.common_off(), L.block()));
  for (int i = 0; i < L.K; ++i)
    P.priv.col(i) = scale * unstack_real(x.segment(L.priv_off(i), L.block()));
  return P;
}

double max_common_value(const RealProblem& rp, const RVec& x) {
  double m = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < rp.n_common; ++k) m = std::max(m, rp.cons[static_cast<std::size_t>(k)].value(x));
  return m;
}

std::pair<RVec, double> phase_one(const RealProblem& rp, const RVec& x0);

// Strictly feasible starting point. Returns false when the shared-split
// constraints admit no strictly feasible C > 0.
bool initial_point(const QcqpProblem& /*prob*/, const RealProblem& rp,
                   const std::optional<Precoder>& warm, RVec* x_out) {
  const Layout& L = rp.lay;
  RVec x = RVec::Zero(L.n);
  if (warm) {
    RVec z = precoder_to_z(L, *warm, rp.scale);
    const double nz = z.norm();
    if (nz > 0.9) z *= 0.9 / nz;
    x.head(L.precoder_dim()) = z;
  }
  if (L.xi) {
    x(L.xi_off()) = 0.0;
    const double mc = max_common_value(rp, x);
    x(L.xi_off()) = mc + 1.0 + 0.1 * std::abs(mc);
  }
  if (L.split) {
    auto slack_of = [&](const RVec& cand) {
      RVec y = cand;
      y.segment(L.split_off(), L.K).setZero();
      return -max_common_value(rp, y);  // budget - max_k c_k, budget folded into r
    };
    double best = slack_of(x);
    RVec best_x = x;
    // Zeroing the private streams only lowers every c_k; then scan the
    // common amplitude.
    RVec common_only = RVec::Zero(L.n);
    common_only.segment(L.common_off(), L.block()) = x.segment(L.common_off(), L.block());
    for (double a : {1.0, 0.75, 0.5, 0.25, 0.1, 0.0}) {
      RVec cand = a * common_only;
      const double sl = slack_of(cand);
      if (sl > best) {
        best = sl;
        best_x = cand;
      }
    }
    if (!(best > 1e-9)) {
      // Phase I: minimize s subject to c_k(z) - budget <= s.
      const auto phase = phase_one(rp, x);
      if (!(phase.second > 1e-9)) return false;
      best = phase.second;
      best_x = phase.first;
    }
    x = best_x;
    for (int j = 0; j < L.K; ++j) x(L.split_off() + j) = best / (2.0 * L.K);
  }
  *x_out = x;
  return true;
}

struct IpmResult {
  RVec x;
  RVec lambda;
  double gap = 0.0;
  int iterations = 0;
  SolverStatus status = SolverStatus::kOptimal;
};

// Largest step along dx that keeps constraint i strictly feasible.
double boundary_step(const Quadratic& ci, double fi, const RVec& gi, const RVec& dx) {
  const double a = ci.linear ? 0.0 : 0.5 * dx.dot(ci.Q * dx);
  const double b = gi.dot(dx);
  if (a > 0.0) {
    const double disc = std::sqrt(b * b - 4.0 * a * fi);
    return b >= 0.0 ? (-2.0 * fi) / (b + disc) : (-b + disc) / (2.0 * a);
  }
  return b > 0.0 ? -fi / b : std::numeric_limits<double>::infinity();
}

// Central-path multipliers 1/(-t f_i) lose relative accuracy once the slack
// is near rounding level. Re-fit the ones with near-zero slack by least squares on
// the stationarity equation and keep the fit only when it stays nonnegative.
RVec refine_multipliers(const RVec& g0, const RMat& Df, const RVec& f, const RVec& lambda_path) {
  const int m = static_cast<int>(lambda_path.size());
  std::vector<int> active;
  for (int i = 0; i < m; ++i)
    if (-f(i) <= 1e-6) active.push_back(i);
  if (active.empty()) return lambda_path;
  RVec rhs = -g0;
  RMat A(Df.cols(), static_cast<Eigen::Index>(active.size()));
  for (int i = 0; i < m; ++i) {
    bool is_active = false;
    for (std::size_t j = 0; j < active.size(); ++j)
      if (active[j] == i) {
        A.col(static_cast<Eigen::Index>(j)) = Df.row(i).transpose();
        is_active = true;
      }
    if (!is_active) rhs -= lambda_path(i) * Df.row(i).transpose();
  }
  const RVec fit = A.colPivHouseholderQr().solve(rhs);
  if (!fit.allFinite() || (fit.array() < 0.0).any()) return lambda_path;
  RVec lambda = lambda_path;
  for (std::size_t j = 0; j < active.size(); ++j) lambda(active[j]) = fit(static_cast<Eigen::Index>(j));
  const double before = (g0 + Df.transpose() * lambda_path).squaredNorm();
  const double after = (g0 + Df.transpose() * lambda).squaredNorm();
  return after <= before ? lambda : lambda_path;
}

// Log-barrier method with damped Newton centering. Dual estimates come from
// the central path, lambda_i = 1 / (-t f_i).
IpmResult barrier_ipm(const RealProblem& rp, RVec x, const QcqpOptions& opts) {
  const int n = rp.lay.n;
  const int m = static_cast<int>(rp.cons.size());
  constexpr double kMu = 20.0;
  constexpr double kAlpha = 0.25;
  constexpr double kBeta = 0.5;
  constexpr int kMaxCentering = 60;
  constexpr double kPureNewton = 0.25;

  RVec f(m);
  RMat Df(m, n);
  auto eval = [&](const RVec& xx) {
    for (int i = 0; i < m; ++i) {
      const auto& ci = rp.cons[static_cast<std::size_t>(i)];
      f(i) = ci.value(xx);
      Df.row(i) = ci.grad(xx).transpose();
    }
  };
  auto barrier_value = [&](const RVec& xx, double t) {
    double v = t * rp.obj.value(xx);
    for (int i = 0; i < m; ++i) {
      const double fi = rp.cons[static_cast<std::size_t>(i)].value(xx);
      if (!(fi < 0.0)) return std::numeric_limits<double>::infinity();
      v -= std::log(-fi);
    }
    return v;
  };

  const double grad_scale = 1.0 + rp.obj.c.cwiseAbs().maxCoeff();
  eval(x);
  double t = 1.0;
  IpmResult res;
  res.status = SolverStatus::kMaxIterations;
  int newton_steps = 0;
  while (newton_steps < opts.max_iterations) {
    bool stalled = false;
    double prev_decrement2 = std::numeric_limits<double>::infinity();
    for (int inner = 0; inner < kMaxCentering && newton_steps < opts.max_iterations; ++inner) {
      ++newton_steps;
      RVec grad = t * rp.obj.grad(x);
      RMat H = t * rp.obj.Q;
      for (int i = 0; i < m; ++i) {
        const auto& ci = rp.cons[static_cast<std::size_t>(i)];
        const double s = -f(i);
        const RVec gi = Df.row(i).transpose();
        grad += gi / s;
        if (!ci.linear) H += ci.Q / s;
        H.noalias() += gi * gi.transpose() / (s * s);
      }
      Eigen::LDLT<RMat> ldlt(H);
      RVec dx = -ldlt.solve(grad);
      if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
        const double reg = 1e-14 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
        dx = -(H + reg * RMat::Identity(n, n)).ldlt().solve(grad);
        if (!dx.allFinite()) {
          res.status = SolverStatus::kNumericalTrouble;
          stalled = true;
          break;
        }
      }
      const double decrement2 = -grad.dot(dx);
      if (decrement2 <= 1e-14) break;
      // Near the rounding floor further steps only shuffle noise.
      if (decrement2 < 1e-9 && decrement2 > 0.5 * prev_decrement2) break;
      prev_decrement2 = decrement2;

      double smax = 1.0;
      for (int i = 0; i < m; ++i)
        smax = std::min(smax, 0.99 * boundary_step(rp.cons[static_cast<std::size_t>(i)], f(i),
                                                   Df.row(i).transpose(), dx));
      double step = smax;
      if (decrement2 < kPureNewton) {
        // Quadratic-convergence region: the full step is accepted without a
        // line search, which would otherwise stall once changes in phi fall
        // below its rounding level.
        while (step > 1e-12 && !std::isfinite(barrier_value(x + step * dx, t))) step *= kBeta;
      } else {
        const double phi0 = barrier_value(x, t);
        while (step > 1e-12 &&
               barrier_value(x + step * dx, t) > phi0 - kAlpha * step * decrement2)
          step *= kBeta;
      }
      if (step <= 1e-12) break;
      x += step * dx;
      eval(x);
    }
    if (stalled) break;

    RVec lambda = refine_multipliers(rp.obj.grad(x), Df, f, (1.0 / (t * -f.array())).matrix());
    const RVec r_dual = rp.obj.grad(x) + Df.transpose() * lambda;
    const double gap = m / t;
    res.x = x;
    res.lambda = lambda;
    res.gap = gap;
    const double obj_scale = 1.0 + std::abs(rp.obj.value(x));
    if (gap <= opts.gap_tol * obj_scale) {
      res.status = r_dual.lpNorm<Eigen::Infinity>() <= opts.feas_tol * grad_scale
                       ? SolverStatus::kOptimal
                       : SolverStatus::kNumericalTrouble;
      break;
    }
    t *= kMu;
  }
  res.iterations = newton_steps;
  if (res.x.size() == 0) {
    res.x = x;
    res.lambda = (1.0 / (t * -f.array())).matrix();
    res.gap = m / t;
  }
  return res;
}

// Maximizes the common-constraint slack of the shared-split problem over the
// precoders. Returns the best point (split entries zero) and its slack.
std::pair<RVec, double> phase_one(const RealProblem& rp, const RVec& x0) {
  const Layout& L = rp.lay;
  const int pd = L.precoder_dim();
  RealProblem ph;
  ph.lay = L;
  ph.lay.xi = true;
  ph.lay.split = false;
  ph.lay.n = pd + 1;
  const int n = ph.lay.n;
  ph.obj = Quadratic{RMat::Zero(n, n), RVec::Zero(n), 0.0, false};
  ph.obj.c(pd) = 1.0;
  for (int k = 0; k < rp.n_common; ++k) {
    const Quadratic& src = rp.cons[static_cast<std::size_t>(k)];
    Quadratic q{RMat::Zero(n, n), RVec::Zero(n), src.r, false};
    q.Q.topLeftCorner(pd, pd) = src.Q.topLeftCorner(pd, pd);
    q.c.head(pd) = src.c.head(pd);
    q.c(pd) = -1.0;
    ph.cons.push_back(std::move(q));
  }
  ph.n_common = rp.n_common;
  const Quadratic& pw = rp.cons[static_cast<std::size_t>(rp.power_idx)];
  Quadratic power{RMat::Zero(n, n), RVec::Zero(n), pw.r, false};
  power.Q.topLeftCorner(pd, pd) = pw.Q.topLeftCorner(pd, pd);
  ph.power_idx = static_cast<int>(ph.cons.size());
  ph.cons.push_back(std::move(power));

  RVec y = RVec::Zero(n);
  y.head(pd) = x0.head(pd);
  double cmax = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < ph.n_common; ++k) cmax = std::max(cmax, ph.cons[static_cast<std::size_t>(k)].value(y));
  y(pd) = cmax + 1.0 + 0.1 * std::abs(cmax);
  QcqpOptions loose;
  loose.gap_tol = 1e-8;
  loose.feas_tol = 1e-6;
  const IpmResult r = barrier_ipm(ph, y, loose);
  RVec x = RVec::Zero(L.n);
  x.head(pd) = r.x.head(pd);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < rp.n_common; ++k) {
    RVec probe = x;
    worst = std::max(worst, rp.cons[static_cast<std::size_t>(k)].value(probe));
  }
  return {x, -worst};
}

}  // namespace

QcqpSolution solve_precoder_update(const QcqpProblem& prob,
                                   const std::optional<Precoder>& warm_start,
                                   const QcqpOptions& opts) {
  prob.validate();
  bool split_active = prob.structure == CommonStructure::kSharedSplit;
  RealProblem rp = build_real_problem(prob, split_active);
  RVec x0;
  if (!initial_point(prob, rp, warm_start, &x0)) {
    // No C > 0 keeps every common constraint strict: the common stream carries
    // nothing this iteration. Pin C = 0, which leaves p_c only in the power
    // constraint.
    split_active = false;
    QcqpProblem reduced = prob;
    reduced.structure = CommonStructure::kNone;
    QcqpSolution sol = solve_precoder_update(reduced, warm_start, opts);
    sol.P.mode = PrecodingMode::kRS;
    sol.split = RVec::Zero(prob.num_users());
    sol.lambda_split = RVec::Zero(prob.num_users());
    sol.lambda_common = RVec::Zero(prob.num_users());
    sol.split_active = false;
    sol.xi_c = evaluate_user_awmse(prob, sol.P).c.maxCoeff();
    sol.objective = qcqp_objective(prob, sol.P, std::nullopt, sol.split);
    sol.kkt_residual = check_kkt(prob, sol).max();
    return sol;
  }

  const IpmResult ipm = barrier_ipm(rp, x0, opts);
  const Layout& L = rp.lay;

  QcqpSolution sol;
  sol.P = z_to_precoder(L, ipm.x, rp.scale);
  sol.iterations = ipm.iterations;
  sol.status = ipm.status;
  sol.duality_gap = ipm.gap;
  sol.split_active = split_active;
  const UserAwmse a = evaluate_user_awmse(prob, sol.P);
  sol.xi_c = L.xi ? ipm.x(L.xi_off()) : (L.common ? a.c.maxCoeff() : 0.0);
  if (prob.structure == CommonStructure::kSharedSplit)
    sol.split = ipm.x.segment(L.split_off(), L.K);
  sol.lambda_common = rp.n_common ? RVec(ipm.lambda.head(rp.n_common)) : RVec::Zero(prob.num_users());
  sol.lambda_power = ipm.lambda(rp.power_idx) / prob.Pt;
  if (L.split) sol.lambda_split = ipm.lambda.tail(L.K);
  sol.objective = qcqp_objective(prob, sol.P, L.xi ? std::optional<double>(sol.xi_c) : std::nullopt,
                                 sol.split);
  sol.kkt_residual = check_kkt(prob, sol).max();
  return sol;
}

KktReport check_kkt(const QcqpProblem& prob, const QcqpSolution& sol) {
  const int K = prob.num_users();
  const int Nt = prob.antennas();
  const double s = std::sqrt(prob.Pt);
  const Precoder& P = sol.P;
  const bool epi = prob.structure == CommonStructure::kEpigraph;
  const bool split = prob.structure == CommonStructure::kSharedSplit && sol.split_active;
  const bool common = prob.structure != CommonStructure::kNone;
  const RVec lam_c = (common && sol.lambda_common.size() == K) ? sol.lambda_common : RVec::Zero(K);
  const double lam_z = sol.lambda_power * prob.Pt;  // multiplier of ||P||^2/Pt - 1 <= 0
  const RVec C = split ? sol.split : RVec::Zero(K);
  const RVec nu = (split && sol.lambda_split.size() == K) ? sol.lambda_split : RVec::Zero(K);

  KktReport rep;
  const UserAwmse a = evaluate_user_awmse(prob, P);

  // Complex gradients with respect to conj(p), mapped to the normalized
  // variable z = P / sqrt(Pt) and to real coordinates (factor 2).
  double scale = 1.0;
  for (int k = 0; k < K; ++k) {
    const SafBundle& u = prob.users[static_cast<std::size_t>(k)];
    scale = std::max(scale, 1.0 + 2.0 * s * prob.weight(k) * u.f.cwiseAbs().maxCoeff());
    if (common) scale = std::max(scale, 1.0 + 2.0 * s * u.f_c.cwiseAbs().maxCoeff());
  }
  double stat = 0.0;
  for (int i = 0; i < K; ++i) {
    CVec g = CVec::Zero(Nt);
    for (int k = 0; k < K; ++k) {
      const SafBundle& u = prob.users[static_cast<std::size_t>(k)];
      g += prob.weight(k) * (u.Psi * P.priv.col(i));
      if (common) g += lam_c(k) * (u.Psi_c * P.priv.col(i));
    }
    g -= prob.weight(i) * prob.users[static_cast<std::size_t>(i)].f;
    g += (lam_z / prob.Pt) * P.priv.col(i);
    stat = std::max(stat, 2.0 * s * g.cwiseAbs().maxCoeff());
  }
  if (common) {
    CVec g = CVec::Zero(Nt);
    for (int k = 0; k < K; ++k) {
      const SafBundle& u = prob.users[static_cast<std::size_t>(k)];
      g += lam_c(k) * (u.Psi_c * P.common - u.f_c);
    }
    g += (lam_z / prob.Pt) * P.common;
    stat = std::max(stat, 2.0 * s * g.cwiseAbs().maxCoeff());
  }
  stat /= scale;
  if (epi) stat = std::max(stat, std::abs(1.0 - lam_c.sum()));
  if (split) {
    for (int j = 0; j < K; ++j)
      stat = std::max(stat, std::abs(-prob.weight(j) + lam_c.sum() - nu(j)));
  }
  rep.stationarity = stat;

  const double pow_con = P.power() / prob.Pt - 1.0;
  double primal = std::max(0.0, pow_con);
  double comp = std::abs(lam_z * pow_con);
  if (prob.structure == CommonStructure::kNone || !common) {
    primal = std::max(primal, P.common.cwiseAbs().maxCoeff());
  }
  for (int k = 0; k < K && common; ++k) {
    double gk = 0.0;
    if (epi) {
      gk = a.c(k) - sol.xi_c;
    } else if (split) {
      gk = a.c(k) + C.sum() - prob.common_budget;
    } else {
      continue;
    }
    primal = std::max(primal, gk);
    comp = std::max(comp, std::abs(lam_c(k) * gk));
  }
  for (int j = 0; j < K && split; ++j) {
    primal = std::max(primal, -C(j));
    comp = std::max(comp, std::abs(nu(j) * C(j)));
  }
  rep.primal = primal;
  rep.complementarity = comp;
  double dual = std::max(0.0, -lam_z);
  for (int k = 0; k < K; ++k) dual = std::max(dual, -lam_c(k));
  for (int j = 0; j < nu.size(); ++j) dual = std::max(dual, -nu(j));
  rep.dual = dual;
  return rep;
}

namespace {

void write_cmat(std::ostream& os, const CMat& A) {
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      os << (j ? " " : "") << A(i, j).real() << ' ' << A(i, j).imag();
    os << '\n';
  }
}

void write_cvec(std::ostream& os, const CVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    os << (i ? " " : "") << v(i).real() << ' ' << v(i).imag();
  os << '\n';
}

const char* structure_name(CommonStructure s) {
  switch (s) {
    case CommonStructure::kNone: return "none";
    case CommonStructure::kEpigraph: return "epigraph";
    case CommonStructure::kSharedSplit: return "shared_split";
  }
  return "none";
}

void expect(std::istream& is, const std::string& word) {
  std::string tok;
  if (!(is >> tok) || tok != word)
    throw NumericalError("malformed QCQP dump: expected '" + word + "', got '" + tok + "'");
}

CMat read_cmat(std::istream& is, int n) {
  CMat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double re = 0, im = 0;
      if (!(is >> re >> im)) throw NumericalError("malformed QCQP dump: matrix entry");
      A(i, j) = Complex(re, im);
    }
  return A;
}

CVec read_cvec(std::istream& is, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) {
    double re = 0, im = 0;
    if (!(is >> re >> im)) throw NumericalError("malformed QCQP dump: vector entry");
    v(i) = Complex(re, im);
  }
  return v;
}

}  // namespace

void write_problem(std::ostream& os, const QcqpProblem& prob) {
  const auto old_prec = os.precision(17);
  os << "rsopt-qcqp 1\n";
  os << "users " << prob.num_users() << "\nantennas " << prob.antennas() << '\n';
  os << "structure " << structure_name(prob.structure) << '\n';
  os << "Pt " << prob.Pt << "\nsigma_n2 " << prob.sigma_n2 << '\n';
  os << "common_budget " << prob.common_budget << '\n';
  os << "weights";
  for (int k = 0; k < prob.num_users(); ++k) os << ' ' << prob.weight(k);
  os << '\n';
  for (int k = 0; k < prob.num_users(); ++k) {
    const SafBundle& u = prob.users[static_cast<std::size_t>(k)];
    os << "user " << k << '\n';
    os << "scalars " << u.t_c << ' ' << u.t << ' ' << u.u_c << ' ' << u.u << ' '
       << u.ups_c << ' ' << u.ups << '\n';
    os << "Psi_c\n";
    write_cmat(os, u.Psi_c);
    os << "Psi\n";
    write_cmat(os, u.Psi);
    os << "f_c\n";
    write_cvec(os, u.f_c);
    os << "f\n";
    write_cvec(os, u.f);
  }
  os.precision(old_prec);
}

QcqpProblem read_problem(std::istream& is) {
  QcqpProblem prob;
  expect(is, "rsopt-qcqp");
  int version = 0;
  is >> version;
  if (version != 1) throw NumericalError("unsupported QCQP dump version");
  int K = 0, Nt = 0;
  std::string s;
  expect(is, "users");
  is >> K;
  expect(is, "antennas");
  is >> Nt;
  expect(is, "structure");
  is >> s;
  if (s == "none") prob.structure = CommonStructure::kNone;
  else if (s == "epigraph") prob.structure = CommonStructure::kEpigraph;
  else if (s == "shared_split") prob.structure = CommonStructure::kSharedSplit;
  else throw NumericalError("malformed QCQP dump: structure '" + s + "'");
  expect(is, "Pt");
  is >> prob.Pt;
  expect(is, "sigma_n2");
  is >> prob.sigma_n2;
  expect(is, "common_budget");
  is >> prob.common_budget;
  expect(is, "weights");
  prob.weights.resize(K);
  for (int k = 0; k < K; ++k) is >> prob.weights(k);
  for (int k = 0; k < K; ++k) {
    SafBundle u;
    int idx = -1;
    expect(is, "user");
    is >> idx;
    if (idx != k) throw NumericalError("malformed QCQP dump: user index");
    expect(is, "scalars");
    is >> u.t_c >> u.t >> u.u_c >> u.u >> u.ups_c >> u.ups;
    expect(is, "Psi_c");
    u.Psi_c = read_cmat(is, Nt);
    expect(is, "Psi");
    u.Psi = read_cmat(is, Nt);
    expect(is, "f_c");
    u.f_c = read_cvec(is, Nt);
    expect(is, "f");
    u.f = read_cvec(is, Nt);
    prob.users.push_back(std::move(u));
  }
  if (!is) throw NumericalError("malformed QCQP dump: truncated");
  return prob;
}

}  // namespace rsopt
