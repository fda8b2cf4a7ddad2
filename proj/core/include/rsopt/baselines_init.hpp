#pragma once

#include <string>

#include "rsopt/channel_model.hpp"
#include "rsopt/rate_wmmse.hpp"

namespace rsopt {

enum class InitScheme { kZfE, kZfSvd, kMrcE, kMrcSvd };

const char* to_string(InitScheme s);
InitScheme parse_init_scheme(const std::string& name);

/// Common/private power split used by the DoF-motivated designs:
/// q_c = Pt - Pt^alpha and a private budget Pt^alpha (clamped so that
/// q_c >= 0 when Pt < 1).
struct PowerSplit {
  double common = 0.0;
  double priv = 0.0;
};
PowerSplit dof_power_split(double Pt, double alpha);

/// Unit-norm ZF directions: normalized columns of H (H^H H)^-1. Throws
/// NumericalError when H is rank deficient.
CMat zf_directions(const CMat& H);
/// Unit-norm MRC directions h_k / ||h_k||.
CMat mrc_directions(const CMat& H);
/// Dominant left singular vector.
CVec dominant_left_singular_vector(const CMat& H);
bool full_column_rank(const CMat& H, double rel_tol = 1e-10);

/// AO starting point. RS mode: q_c = Pt - Pt^alpha on e_1 (..._E) or the
/// dominant left singular vector (..._SVD), q_k = Pt^alpha / K on ZF or MRC
/// directions. NoRS mode: the same private directions with q_k = Pt / K.
/// ZF schemes fall back to MRC directions on a rank-deficient estimate and
/// set *fell_back.
Precoder init_precoder(const ChannelEstimate& est, const SystemConfig& cfg,
                       InitScheme scheme, PrecodingMode mode = PrecodingMode::kRS,
                       bool* fell_back = nullptr);

/// Water-filling q_k = max(0, mu - 1/gain_k) with sum q_k = budget.
RVec water_filling(const RVec& gains, double budget);

struct BaselineResult {
  Precoder P;
  double predicted_sum_rate = 0.0;  // treating the estimate as the true channel
};

/// NoRS-ZF: ZF directions with water-filling over the full budget.
BaselineResult nors_zf_wf(const ChannelEstimate& est, const SystemConfig& cfg);

/// RS-ZF-SVD: SVD common direction with q_c = Pt - Pt^alpha, ZF private
/// directions with water-filling over the remaining Pt^alpha.
Precoder rs_zf_svd_baseline(const ChannelEstimate& est, const SystemConfig& cfg);

}  // namespace rsopt
