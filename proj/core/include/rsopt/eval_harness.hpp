#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsopt/baselines_init.hpp"
#include "rsopt/channel_model.hpp"
#include "rsopt/optimizer.hpp"

namespace rsopt {

enum class Scheme { kRsOpt, kNoRsOpt, kNoRsZf, kRsZfSvd, kConservativeRs };

const char* to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

/// Monte-Carlo settings shared by every harness experiment. `base` supplies
/// K, Nt, sigma_n2, alpha, beta, M, eps_R, max_iters and seed; Pt is set per
/// SNR point.
struct HarnessConfig {
  SystemConfig base;
  int channels = 20;
  InitScheme init = InitScheme::kMrcSvd;
  int m_val = 10000;  // validation sample size
  int jobs = 1;
  AoOptions ao;
};

/// Normalized draws reused across SNRs: one CN(0, I) estimate per channel
/// index and one shared pool of normalized CSIT errors.
struct ChannelPool {
  std::vector<CMat> estimates;
  std::vector<CMat> errors;

  ChannelEstimate estimate(int c, double sigma_e2) const;
  ConditionalSample sample(int c, double sigma_e2, int M) const;
};

/// Random streams used by the harness (mixed with the seed via mix_seed).
inline constexpr std::uint64_t kEstimateStream = 1;
inline constexpr std::uint64_t kValidationStream = 3;

ChannelPool make_channel_pool(const SystemConfig& base, int channels, int M);

struct EsrPoint {
  std::string scheme;
  double snr_db = 0.0;
  double esr = 0.0;
  double std_err = 0.0;
  RVec er;  // per-user ERs (private plus equal share of the common rate)
  int n_channels = 0;
  int solver_failures = 0;
};

/// Per-run callback for AO traces: (scheme, snr_db, channel, trace).
using TraceSink = std::function<void(Scheme, double, int, const AoTrace&)>;

/// Result of one scheme on one channel estimate at one SNR.
struct SchemeOutcome {
  double asr = 0.0;
  RVec er;
  int solver_failures = 0;
  Precoder P;
  AoTrace trace;
};

/// Runs one scheme on one estimate. Optimized schemes and baselines report
/// the sampled ASR on `sample`; the conservative scheme reports its
/// conservative ASR.
SchemeOutcome run_scheme(Scheme scheme, const ChannelEstimate& est,
                         const ConditionalSample& sample, const SystemConfig& cfg,
                         InitScheme init, const AoOptions& ao = {});

/// ESR curves: for each SNR and scheme the mean ASR over channel estimates.
std::vector<EsrPoint> esr_sweep(const HarnessConfig& hc, const std::vector<double>& snr_db,
                                const std::vector<Scheme>& schemes,
                                const TraceSink& sink = {});

/// Least-squares slope of ESR versus log2(Pt) over snr_db in [lo_db, hi_db].
/// Throws std::invalid_argument with fewer than three points in the window.
double dof_slope(const std::vector<EsrPoint>& points, double lo_db, double hi_db);

/// SNR shift (dB) between two ESR curves at `at_db`: at_db minus the SNR at
/// which `better` reaches the ESR that `worse` attains at at_db, by linear
/// interpolation. Returns NaN when `better` never reaches that ESR.
double horizontal_gap_db(const std::vector<EsrPoint>& better,
                         const std::vector<EsrPoint>& worse, double at_db);

/// Per-user rates of a fixed precoder on an independent validation sample.
struct ValidatedRates {
  RVec R_c, R_c_se;
  RVec R, R_se;
  double asr = 0.0;  // min_k R_c,k + sum_k R_k
};
ValidatedRates validate_precoder(const ChannelEstimate& est, const Precoder& P,
                                 double sigma_n2, const std::vector<CMat>& normalized_errors);

/// Validation error pool of size m_val drawn from the validation stream.
std::vector<CMat> validation_errors(const SystemConfig& base, int m_val);

/// M-sensitivity: RS-Opt optimized with each sample size, then evaluated on
/// an independent validation sample with the common rate taken as the min
/// over users of the validated common ARs.
std::vector<EsrPoint> m_sensitivity(const HarnessConfig& hc, double snr_db,
                                    const std::vector<int>& m_list);

struct RegionPoint {
  std::string scheme;
  double w1 = 1.0, w2 = 1.0;
  double er1 = 0.0, er2 = 0.0;
  double weighted = 0.0;  // mean over channels of sum_k w_k (R_k + C_k)
  int solver_failures = 0;
};

using Point2 = std::array<double, 2>;

struct RegionResult {
  std::vector<RegionPoint> points;  // RS and NoRS for every weight pair
  std::vector<Point2> rs_hull;
  std::vector<Point2> nors_hull;
};

/// The 43 weight pairs (1, w2) with w2 in {1e-3, 10^-1, 10^-0.95, ..., 10^1, 1e3}.
std::vector<std::array<double, 2>> default_region_weights();

/// Two-user ergodic rate region at one SNR.
RegionResult rate_region(const HarnessConfig& hc, double snr_db,
                         const std::vector<std::array<double, 2>>& weights);

/// Upper-right (Pareto) convex hull of a point cloud together with the
/// projections onto both axes, counter-clockwise from (max x, 0).
std::vector<Point2> upper_right_hull(std::vector<Point2> pts);

/// True when p lies inside the region bounded by the axes and the hull,
/// allowing a slack of `tol` along the outward normal.
bool hull_contains(const std::vector<Point2>& hull, const Point2& p, double tol = 0.0);

/// Fixed-header CSV writers, 12 significant digits.
void write_esr_csv(std::ostream& os, const std::vector<EsrPoint>& pts);
void write_region_csv(std::ostream& os, const std::vector<RegionPoint>& pts);

struct SlopeRow {
  std::string scheme;
  double alpha = 0.0;
  int K = 0;
  double slope = 0.0;
};
void write_slopes_csv(std::ostream& os, const std::vector<SlopeRow>& rows);

}  // namespace rsopt
