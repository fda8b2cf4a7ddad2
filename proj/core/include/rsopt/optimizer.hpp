#pragma once

#include <iosfwd>
#include <vector>

#include "rsopt/channel_model.hpp"
#include "rsopt/qcqp_solver.hpp"
#include "rsopt/rate_wmmse.hpp"

namespace rsopt {

struct AoIteration {
  int n = 0;
  double objective = 0.0;       // A^[n], AWSMSE at the MMSE point of P^[n]
  double asr = 0.0;             // sampled ASR (or weighted objective) of P^[n]
  double qcqp_objective = 0.0;  // optimum of the precoder subproblem
  SolverStatus status = SolverStatus::kOptimal;
  double kkt_residual = 0.0;
  double wall_seconds = 0.0;
};

/// Per-iteration record of one AO run. Iteration 0 is the initial point.
struct AoTrace {
  std::vector<AoIteration> iterations;
  bool converged = false;
  int monotonicity_violations = 0;  // increases of A beyond 1e-8
  double max_increase = 0.0;

  /// CSV with header "iteration,objective,asr,status" and 12 significant digits.
  void write_csv(std::ostream& os) const;
};

struct AsrResult {
  Precoder P;
  RVec R;              // per-user sampled private ARs
  RVec R_c;            // per-user sampled common ARs
  double R_common = 0.0;  // min_j R_c,j (0 in NoRS)
  double asr = 0.0;       // R_common + sum_k R_k
  RVec split;             // C_k (weighted RS only; zeros otherwise)
  double weighted_objective = 0.0;  // sum_k w_k (R_k + C_k)
  AoTrace trace;
  int solver_failures = 0;
};

struct AoOptions {
  WeightScaling scaling = WeightScaling::kExact;
  QcqpOptions qcqp;
  /// Throw NumericalError on a monotonicity violation instead of recording it.
  bool strict_monotone = false;
};

/// Monotonicity slack on the AO objective.
inline constexpr double kMonotoneSlack = 1e-8;

/// SAA-WMMSE alternating optimization on a fixed conditional sample: MMSE
/// equalizers and weights per realization, sample averages, precoder QCQP,
/// until |A^[n] - A^[n-1]| < eps_R or max_iters.
AsrResult ao_solve(const ConditionalSample& sample, const SystemConfig& cfg,
                   const Precoder& init, PrecodingMode mode, const AoOptions& opts = {});

/// Convenience overload: draws the conditional sample of size cfg.M from a
/// stream derived from cfg.seed.
AsrResult ao_solve(const ChannelEstimate& est, const SystemConfig& cfg,
                   const Precoder& init, PrecodingMode mode, const AoOptions& opts = {});

/// Weighted ASR. RS mode uses the shared common-rate split C_k >= 0 with
/// R_c,k >= sum_j C_j; NoRS mode weights the private rates only.
AsrResult weighted_asr_solve(const ConditionalSample& sample, const SystemConfig& cfg,
                             const Precoder& init, const RVec& weights,
                             PrecodingMode mode = PrecodingMode::kRS,
                             const AoOptions& opts = {});

/// Common-rate split maximizing sum_k w_k C_k subject to sum_k C_k <= common
/// rate: everything to the largest weight, ties shared evenly.
RVec optimal_common_split(const RVec& weights, double common_rate);

/// Closed-form conservative quantities at precoder P: relaxed MMSEs use
/// T_bar = E{T | H_hat}, which adds p^H R_e p self-terms.
struct ConservativeRates {
  RVec eps_c, eps;       // relaxed MMSEs
  RVec gamma_c, gamma;   // (1 - eps) / eps
  RVec R_c, R;           // -log2(eps)
  double asr() const;
};
ConservativeRates conservative_rates(const ChannelEstimate& est, const Precoder& P,
                                     double sigma_n2, bool include_self_terms = true);

/// Conservative AO: no sampling; relaxed equalizers/weights on the estimate.
/// The returned ARs are the conservative rates.
AsrResult conservative_solve(const ChannelEstimate& est, const SystemConfig& cfg,
                             const Precoder& init, const AoOptions& opts = {});

/// Stream index used when a solver draws its own conditional sample.
inline constexpr std::uint64_t kErrorStream = 2;

}  // namespace rsopt
