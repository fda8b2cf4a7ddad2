#include "rsopt/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "rsopt/errors.hpp"
#include "rsopt/saa_engine.hpp"

namespace rsopt {

void AoTrace::write_csv(std::ostream& os) const {
  std::ostringstream buf;
  buf << std::setprecision(12);
  buf << "iteration,objective,asr,status\n";
  for (const auto& it : iterations)
    buf << it.n << ',' << it.objective << ',' << it.asr << ',' << to_string(it.status) << '\n';
  os << buf.str();
}

RVec optimal_common_split(const RVec& weights, double common_rate) {
  RVec C = RVec::Zero(weights.size());
  if (weights.size() == 0 || !(common_rate > 0.0)) return C;
  const double wmax = weights.maxCoeff();
  int ties = 0;
  for (int k = 0; k < weights.size(); ++k) ties += weights(k) == wmax ? 1 : 0;
  for (int k = 0; k < weights.size(); ++k)
    if (weights(k) == wmax) C(k) = common_rate / ties;
  return C;
}

double ConservativeRates::asr() const { return R_c.minCoeff() + R.sum(); }

ConservativeRates conservative_rates(const ChannelEstimate& est, const Precoder& P,
                                     double sigma_n2, bool include_self_terms) {
  const int K = est.users();
  ConservativeRates out{RVec(K), RVec(K), RVec(K), RVec(K), RVec(K), RVec(K)};
  const double se2 = est.sigma_e2;
  for (int k = 0; k < K; ++k) {
    const auto h = est.H_hat.col(k);
    double T = sigma_n2;
    double self = 0.0;
    double S = 0.0;
    for (int i = 0; i < K; ++i) {
      const double a = std::norm(h.dot(P.priv.col(i)));
      const double e = se2 * P.priv.col(i).squaredNorm();
      T += a + e;
      if (i == k) {
        S = a;
        self = e;
      }
    }
    const double Sc = std::norm(h.dot(P.common));
    const double self_c = se2 * P.common.squaredNorm();
    double Tc = Sc + self_c + T;
    if (!include_self_terms) {
      T -= self;
      Tc -= self + self_c;
    }
    out.eps(k) = 1.0 - S / T;
    out.eps_c(k) = 1.0 - Sc / Tc;
    // (1 - eps)/eps written without cancellation
    out.gamma(k) = S / (T - S);
    out.gamma_c(k) = Sc / (Tc - Sc);
    out.R(k) = std::log2(1.0 + out.gamma(k));
    out.R_c(k) = std::log2(1.0 + out.gamma_c(k));
  }
  return out;
}

namespace {

struct Evaluation {
  RVec R, R_c;
  double common = 0.0;
  double asr = 0.0;
  RVec split;
  double weighted = 0.0;
  double A = 0.0;
};

using Clock = std::chrono::steady_clock;

template <class Build, class Evaluate>
AsrResult run_ao(const SystemConfig& cfg, const Precoder& init, PrecodingMode mode,
                 Build build, Evaluate evaluate, const AoOptions& opts) {
  Precoder P = init.projected(cfg.Pt);
  P.mode = mode;
  if (mode == PrecodingMode::kNoRS) P.common.setZero();

  AsrResult res;
  Evaluation ev = evaluate(P);
  res.trace.iterations.push_back({0, ev.A, ev.asr, ev.A, SolverStatus::kOptimal, 0.0, 0.0});

  Precoder best_P = P;
  Evaluation best_ev = ev;
  double A_prev = ev.A;
  for (int n = 1; n <= cfg.max_iters; ++n) {
    const auto t0 = Clock::now();
    const QcqpProblem prob = build(P);
    const QcqpSolution sol = solve_precoder_update(prob, P, opts.qcqp);
    if (!sol.certified()) ++res.solver_failures;
    Precoder next = sol.P.projected(cfg.Pt);
    next.mode = mode;
    const Evaluation ev_next = evaluate(next);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    res.trace.iterations.push_back(
        {n, ev_next.A, ev_next.asr, sol.objective, sol.status, sol.kkt_residual, secs});

    const double increase = ev_next.A - A_prev;
    if (increase > kMonotoneSlack) {
      ++res.trace.monotonicity_violations;
      res.trace.max_increase = std::max(res.trace.max_increase, increase);
      if (opts.strict_monotone) {
        std::ostringstream msg;
        msg << "AO objective increased by " << increase << " at iteration " << n;
        throw NumericalError(msg.str());
      }
    }
    if (ev_next.A < best_ev.A) {
      best_ev = ev_next;
      best_P = next;
    }
    P = next;
    if (std::abs(increase) < cfg.eps_R) {
      res.trace.converged = true;
      break;
    }
    A_prev = ev_next.A;
  }

  res.P = best_P;
  res.R = best_ev.R;
  res.R_c = best_ev.R_c;
  res.R_common = best_ev.common;
  res.asr = best_ev.asr;
  res.split = best_ev.split.size() ? best_ev.split : RVec::Zero(best_ev.R.size());
  res.weighted_objective = best_ev.weighted;
  return res;
}

Evaluation evaluate_sampled(const ConditionalSample& sample, const Precoder& P,
                            double sigma_n2, PrecodingMode mode) {
  const SampledRates r = average_rates(sample, P, sigma_n2);
  Evaluation ev;
  ev.R = r.R;
  ev.R_c = r.R_c;
  ev.common = mode == PrecodingMode::kRS ? r.common_rate() : 0.0;
  ev.asr = ev.common + r.R.sum();
  ev.weighted = ev.asr;
  const int K = static_cast<int>(r.R.size());
  ev.A = K + 1 - ev.asr;
  return ev;
}

}  // namespace

AsrResult ao_solve(const ConditionalSample& sample, const SystemConfig& cfg,
                   const Precoder& init, PrecodingMode mode, const AoOptions& opts) {
  if (sample.size() < 1) throw DimensionError("empty conditional sample");
  if (init.users() != cfg.K || init.antennas() != cfg.Nt)
    throw DimensionError("initial precoder shape does not match the configuration");
  const CommonStructure structure =
      mode == PrecodingMode::kRS ? CommonStructure::kEpigraph : CommonStructure::kNone;
  auto build = [&](const Precoder& P) {
    const SampledEqualizers eq = update_equalizers_weights(sample, P, cfg.sigma_n2, opts.scaling);
    QcqpProblem prob;
    prob.users = accumulate_safs(sample, eq);
    prob.sigma_n2 = cfg.sigma_n2;
    prob.Pt = cfg.Pt;
    prob.structure = structure;
    return prob;
  };
  auto evaluate = [&](const Precoder& P) {
    return evaluate_sampled(sample, P, cfg.sigma_n2, mode);
  };
  return run_ao(cfg, init, mode, build, evaluate, opts);
}

AsrResult ao_solve(const ChannelEstimate& est, const SystemConfig& cfg,
                   const Precoder& init, PrecodingMode mode, const AoOptions& opts) {
  Rng rng(mix_seed(cfg.seed, kErrorStream));
  const ConditionalSample sample = sample_conditional(est, cfg.M, rng);
  return ao_solve(sample, cfg, init, mode, opts);
}

AsrResult weighted_asr_solve(const ConditionalSample& sample, const SystemConfig& cfg,
                             const Precoder& init, const RVec& weights,
                             PrecodingMode mode, const AoOptions& opts) {
  if (weights.size() != cfg.K) throw DimensionError("one weight per user is required");
  if (!(weights.array() > 0.0).all()) throw ConfigError("weights must be positive", "weights");
  const CommonStructure structure =
      mode == PrecodingMode::kRS ? CommonStructure::kSharedSplit : CommonStructure::kNone;
  const double budget = wmmse_offset(opts.scaling);
  auto build = [&](const Precoder& P) {
    const SampledEqualizers eq = update_equalizers_weights(sample, P, cfg.sigma_n2, opts.scaling);
    QcqpProblem prob;
    prob.users = accumulate_safs(sample, eq);
    prob.sigma_n2 = cfg.sigma_n2;
    prob.Pt = cfg.Pt;
    prob.weights = weights;
    prob.structure = structure;
    prob.common_budget = budget;
    return prob;
  };
  auto evaluate = [&](const Precoder& P) {
    Evaluation ev = evaluate_sampled(sample, P, cfg.sigma_n2, mode);
    ev.split = optimal_common_split(weights, ev.common);
    ev.weighted = weights.dot(ev.R + ev.split);
    ev.A = weights.sum() - ev.weighted;
    ev.asr = ev.weighted;
    return ev;
  };
  AsrResult res = run_ao(cfg, init, mode, build, evaluate, opts);
  // asr carries the weighted objective during the run; report the plain sum.
  res.asr = res.R_common + res.R.sum();
  return res;
}

AsrResult conservative_solve(const ChannelEstimate& est, const SystemConfig& cfg,
                             const Precoder& init, const AoOptions& opts) {
  if (init.users() != cfg.K || init.antennas() != cfg.Nt)
    throw DimensionError("initial precoder shape does not match the configuration");
  const int K = est.users();
  const int Nt = est.antennas();
  const CMat Re = est.sigma_e2 * CMat::Identity(Nt, Nt);
  auto build = [&](const Precoder& P) {
    const ConservativeRates cr = conservative_rates(est, P, cfg.sigma_n2);
    QcqpProblem prob;
    prob.sigma_n2 = cfg.sigma_n2;
    prob.Pt = cfg.Pt;
    prob.structure = CommonStructure::kEpigraph;
    for (int k = 0; k < K; ++k) {
      const auto h = est.H_hat.col(k);
      const CMat cov = h * h.adjoint() + Re;
      // relaxed equalizers g = p^H h / T_bar with T_bar = S / (1 - eps)
      const double Tbar = (cfg.sigma_n2 + [&] {
        double s = 0.0;
        for (int i = 0; i < K; ++i) s += std::real(P.priv.col(i).dot(cov * P.priv.col(i)));
        return s;
      }());
      const double Tcbar = Tbar + std::real(P.common.dot(cov * P.common));
      const Complex gc = std::conj(h.dot(P.common)) / Tcbar;
      const Complex gp = std::conj(h.dot(P.priv.col(k))) / Tbar;
      const double uc = mmse_weight(cr.eps_c(k), opts.scaling);
      const double up = mmse_weight(cr.eps(k), opts.scaling);
      SafBundle s;
      s.t_c = uc * std::norm(gc);
      s.t = up * std::norm(gp);
      s.Psi_c = s.t_c * cov;
      s.Psi = s.t * cov;
      s.f_c = (uc * std::conj(gc)) * h;
      s.f = (up * std::conj(gp)) * h;
      s.u_c = uc;
      s.u = up;
      s.ups_c = std::log2(uc);
      s.ups = std::log2(up);
      prob.users.push_back(std::move(s));
    }
    return prob;
  };
  auto evaluate = [&](const Precoder& P) {
    const ConservativeRates cr = conservative_rates(est, P, cfg.sigma_n2);
    Evaluation ev;
    ev.R = cr.R;
    ev.R_c = cr.R_c;
    ev.common = cr.R_c.minCoeff();
    ev.asr = cr.asr();
    ev.weighted = ev.asr;
    ev.A = K + 1 - ev.asr;
    return ev;
  };
  return run_ao(cfg, init, PrecodingMode::kRS, build, evaluate, opts);
}

}  // namespace rsopt
