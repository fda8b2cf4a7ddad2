#include "rsopt/channel_model.hpp"

#include <cmath>
#include <string>

#include "rsopt/errors.hpp"

namespace rsopt {

double SystemConfig::sigma_e2() const { return beta * std::pow(Pt, -alpha); }

double SystemConfig::snr_db() const { return 10.0 * std::log10(Pt / sigma_n2); }

double SystemConfig::pt_from_snr_db(double snr_db, double sigma_n2) {
  return sigma_n2 * std::pow(10.0, snr_db / 10.0);
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw ConfigError("invalid " + key + ": " + why, key);
  };
  if (K < 1) fail("K", "must be >= 1");
  if (Nt < K) fail("Nt", "must be >= K");
  if (!(Pt > 0.0) || !std::isfinite(Pt)) fail("Pt", "must be positive and finite");
  if (!(sigma_n2 > 0.0) || !std::isfinite(sigma_n2)) fail("sigma_n2", "must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha", "must lie in [0, 1]");
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail("beta", "must be >= 0");
  if (M < 1) fail("M", "must be >= 1");
  if (!(eps_R > 0.0)) fail("eps_R", "must be > 0");
  if (max_iters < 1) fail("max_iters", "must be >= 1");
  const double se2 = sigma_e2();
  if (!(se2 < 1.0)) {
    fail("beta", "error variance beta*Pt^-alpha = " + std::to_string(se2) +
                     " must be < 1");
  }
}

ChannelEstimate estimate_from_normalized(const CMat& H_n, double sigma_e2) {
  if (!(sigma_e2 >= 0.0 && sigma_e2 < 1.0))
    throw ConfigError("error variance must lie in [0, 1)", "beta");
  return ChannelEstimate{std::sqrt(1.0 - sigma_e2) * H_n, sigma_e2};
}

Scenario generate_scenario(const SystemConfig& cfg, Rng& rng) {
  cfg.validate();
  const double se2 = cfg.sigma_e2();
  CMat H_n = rng.complex_normal_matrix(cfg.Nt, cfg.K);
  CMat err = rng.complex_normal_matrix(cfg.Nt, cfg.K);
  Scenario s{estimate_from_normalized(H_n, se2), CMat()};
  s.H_true = s.estimate.H_hat + std::sqrt(se2) * err;
  return s;
}

std::vector<CMat> draw_normalized_errors(int Nt, int K, int M, Rng& rng) {
  if (M < 1) throw ConfigError("sample size must be >= 1", "M");
  std::vector<CMat> out;
  out.reserve(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) out.push_back(rng.complex_normal_matrix(Nt, K));
  return out;
}

ConditionalSample sample_conditional(const ChannelEstimate& est,
                                     const std::vector<CMat>& normalized_errors) {
  if (normalized_errors.empty()) throw ConfigError("sample size must be >= 1", "M");
  const double se = std::sqrt(est.sigma_e2);
  ConditionalSample out;
  out.realizations.reserve(normalized_errors.size());
  for (const auto& e : normalized_errors) {
    if (e.rows() != est.H_hat.rows() || e.cols() != est.H_hat.cols())
      throw DimensionError("normalized error shape does not match the estimate");
    out.realizations.push_back(est.H_hat + se * e);
  }
  return out;
}

ConditionalSample sample_conditional(const ChannelEstimate& est, int M, Rng& rng) {
  return sample_conditional(
      est, draw_normalized_errors(est.antennas(), est.users(), M, rng));
}

}  // namespace rsopt
