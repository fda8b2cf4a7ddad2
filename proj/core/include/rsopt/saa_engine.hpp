#pragma once

#include <vector>

#include "rsopt/channel_model.hpp"
#include "rsopt/rate_wmmse.hpp"

namespace rsopt {

/// Per-realization MMSE equalizers and weights. Entry (k, m) belongs to user k
/// on realization H^(m).
struct SampledEqualizers {
  CMat g_c;   // K x M
  CMat g;     // K x M
  RMat u_c;   // K x M
  RMat u;     // K x M

  int users() const { return static_cast<int>(g.rows()); }
  int samples() const { return static_cast<int>(g.cols()); }
};

/// Sample-average quantities of one user feeding the precoder QCQP.
struct SafBundle {
  CMat Psi_c;          // mean of t_c h h^H
  CMat Psi;            // mean of t h h^H
  CVec f_c;            // mean of u_c h g_c^*
  CVec f;              // mean of u h g^*
  double t_c = 0.0;    // mean of u_c |g_c|^2
  double t = 0.0;
  double u_c = 0.0;
  double u = 0.0;
  double ups_c = 0.0;  // mean of log2(u_c)
  double ups = 0.0;
};

/// Closed-form MMSE equalizers and weights for every (user, realization).
SampledEqualizers update_equalizers_weights(
    const ConditionalSample& sample, const Precoder& P, double sigma_n2,
    WeightScaling scaling = WeightScaling::kPlain);

/// Arithmetic means over the sample, reduced pairwise in a fixed order.
std::vector<SafBundle> accumulate_safs(const ConditionalSample& sample,
                                       const SampledEqualizers& eq);

/// Sampled average rates of a fixed precoder.
struct SampledRates {
  RVec R_c;        // per-user common AR  (mean over m of R_c,k^(m))
  RVec R;          // per-user private AR
  RVec R_c_se;     // standard errors of the above
  RVec R_se;

  /// min_j R_c,j + sum_k R_k.
  double asr() const;
  double common_rate() const;
  double private_sum() const { return R.sum(); }
};

SampledRates average_rates(const ConditionalSample& sample, const Precoder& P,
                           double sigma_n2);

/// Direct per-realization evaluation of the sampled augmented WMSEs
/// xi_bar = mean_m (u eps(g) - log2 u) at precoder P.
struct SampledAwmse {
  RVec xi_c;  // per user
  RVec xi;
};
SampledAwmse sampled_awmse(const ConditionalSample& sample,
                           const SampledEqualizers& eq, const Precoder& P,
                           double sigma_n2);

}  // namespace rsopt
