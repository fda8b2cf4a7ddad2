#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "rsopt/rate_wmmse.hpp"
#include "rsopt/saa_engine.hpp"

namespace rsopt {

/// How the common stream enters the precoder subproblem.
///  - kNone:        NoRS, p_c = 0 and no common constraints.
///  - kEpigraph:    min xi_c + sum_k w_k q_k(P) s.t. c_k(P) <= xi_c.
///  - kSharedSplit: min sum_k w_k q_k(P) - sum_k w_k C_k
///                  s.t. c_k(P) + sum_j C_j <= common_budget, C >= 0.
/// q_k and c_k are the private and common sampled AWMSEs of user k written
/// with the sample-average quantities; all problems also carry tr(PP^H) <= Pt.
enum class CommonStructure { kNone, kEpigraph, kSharedSplit };

struct QcqpProblem {
  std::vector<SafBundle> users;
  double sigma_n2 = 1.0;
  double Pt = 1.0;
  RVec weights;                 // per-user objective weights; empty means all ones
  CommonStructure structure = CommonStructure::kEpigraph;
  double common_budget = 1.0;   // right-hand side of the shared-split constraints

  int num_users() const { return static_cast<int>(users.size()); }
  int antennas() const;
  double weight(int k) const;
  PrecodingMode mode() const {
    return structure == CommonStructure::kNone ? PrecodingMode::kNoRS
                                               : PrecodingMode::kRS;
  }
  /// Throws NumericalError when a quadratic form is not Hermitian PSD or
  /// dimensions disagree.
  void validate() const;
};

/// Private AWMSE q_k(P) and common AWMSE c_k(P) of every user.
struct UserAwmse {
  RVec q;
  RVec c;
};
UserAwmse evaluate_user_awmse(const QcqpProblem& prob, const Precoder& P);

/// Objective of the problem at (P, xi_c, C). For kEpigraph, xi_c is taken as
/// max_k c_k(P) when not supplied.
double qcqp_objective(const QcqpProblem& prob, const Precoder& P,
                      std::optional<double> xi_c = std::nullopt,
                      const RVec& split = RVec());

enum class SolverStatus { kOptimal, kMaxIterations, kNumericalTrouble };
const char* to_string(SolverStatus s);

struct QcqpSolution {
  Precoder P;
  double xi_c = 0.0;          // epigraph value (kEpigraph) or max_k c_k (others)
  RVec split;                 // C_k for kSharedSplit, empty otherwise
  double objective = 0.0;
  double kkt_residual = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
  SolverStatus status = SolverStatus::kOptimal;
  bool split_active = true;   // false when C was pinned to 0 (no strictly feasible split)

  // Lagrange multipliers
  RVec lambda_common;         // per-user common constraints
  double lambda_power = 0.0;
  RVec lambda_split;          // C_k >= 0

  bool certified() const { return status == SolverStatus::kOptimal; }
};

struct QcqpOptions {
  double gap_tol = 1e-10;    // surrogate duality gap, relative to 1 + |f0|
  double feas_tol = 1e-8;    // stationarity residual, relative to 1 + |c|
  int max_iterations = 500;  // Newton steps over all centering rounds
};

/// Log-barrier interior-point solve of the convex precoder update. The warm
/// start, when given, is scaled into the power ball and used as the initial
/// primal point.
QcqpSolution solve_precoder_update(const QcqpProblem& prob,
                                   const std::optional<Precoder>& warm_start = std::nullopt,
                                   const QcqpOptions& opts = {});

struct KktReport {
  double stationarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
  double max() const;
};

/// Recomputes the KKT residuals from the complex data (independent of the
/// real-stacked path used by the solver). Residuals are measured on the
/// problem with the precoder normalized to the unit power ball.
KktReport check_kkt(const QcqpProblem& prob, const QcqpSolution& sol);

/// Self-describing text dump: header, dimensions, scalars, then per-user
/// matrices and vectors in row-major order as "re im" pairs.
void write_problem(std::ostream& os, const QcqpProblem& prob);
QcqpProblem read_problem(std::istream& is);

}  // namespace rsopt
