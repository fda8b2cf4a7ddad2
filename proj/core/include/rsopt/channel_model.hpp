#pragma once

#include <cstdint>
#include <vector>

#include "rsopt/linalg.hpp"
#include "rsopt/rng.hpp"

namespace rsopt {

/// Scenario parameters shared by every stage of the pipeline.
struct SystemConfig {
  int K = 2;                // users
  int Nt = 2;               // transmit antennas
  double Pt = 100.0;        // total transmit power (linear)
  double sigma_n2 = 1.0;    // noise variance
  double alpha = 0.6;       // CSIT quality exponent
  double beta = 1.0;        // CSIT error scale
  int M = 100;              // SAA sample size
  double eps_R = 1e-4;      // AO tolerance on the AWSMSE objective
  int max_iters = 200;      // AO iteration cap
  std::uint64_t seed = 1;

  /// Per-entry CSIT error variance beta * Pt^-alpha.
  double sigma_e2() const;
  double snr_db() const;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  static double pt_from_snr_db(double snr_db, double sigma_n2 = 1.0);
};

/// Channel estimate H_hat (Nt x K, column k is h_hat_k) with isotropic error
/// covariance sigma_e2 * I for every user.
struct ChannelEstimate {
  CMat H_hat;
  double sigma_e2 = 0.0;

  int users() const { return static_cast<int>(H_hat.cols()); }
  int antennas() const { return static_cast<int>(H_hat.rows()); }
};

/// M conditional realizations H^(m) = H_hat + H_tilde^(m).
struct ConditionalSample {
  std::vector<CMat> realizations;

  int size() const { return static_cast<int>(realizations.size()); }
  const CMat& operator[](int m) const { return realizations[static_cast<std::size_t>(m)]; }
};

struct Scenario {
  ChannelEstimate estimate;
  CMat H_true;
};

/// Draws a normalized estimate H_n ~ CN(0,1), scales it to
/// sqrt(1 - sigma_e2) * H_n, and draws one true channel
/// H = H_hat + sqrt(sigma_e2) * H_tilde_n from the same stream.
Scenario generate_scenario(const SystemConfig& cfg, Rng& rng);

/// Builds an estimate from a pre-drawn normalized estimate (entries CN(0,1)).
/// Reusing the same normalized matrix across SNRs keeps ESR curves smooth.
ChannelEstimate estimate_from_normalized(const CMat& H_n, double sigma_e2);

/// Draws M normalized errors from `rng` and mixes them onto the estimate.
ConditionalSample sample_conditional(const ChannelEstimate& est, int M, Rng& rng);

/// Mixes an explicit set of normalized errors onto the estimate. This is the
/// route used when one error pool is shared across estimates and SNRs.
ConditionalSample sample_conditional(const ChannelEstimate& est,
                                     const std::vector<CMat>& normalized_errors);

/// Draws `M` normalized error matrices (entries CN(0,1)).
std::vector<CMat> draw_normalized_errors(int Nt, int K, int M, Rng& rng);

}  // namespace rsopt
