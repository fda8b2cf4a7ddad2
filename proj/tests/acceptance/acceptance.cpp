// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "rsopt/baselines_init.hpp"
#include "rsopt/eval_harness.hpp"
#include "rsopt/optimizer.hpp"

using namespace rsopt;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

SystemConfig base_config(int K, int Nt, double snr_db, double alpha, int M) {
  SystemConfig cfg;
  cfg.K = K;
  cfg.Nt = Nt;
  cfg.Pt = SystemConfig::pt_from_snr_db(snr_db);
  cfg.alpha = alpha;
  cfg.M = M;
  return cfg;
}

// 1. Augmented MMSE minimum equals one minus the rate.
Verdict identity() {
  Rng rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int K = 1 + static_cast<int>(rng.next_u64() % 4);
    const int Nt = K + static_cast<int>(rng.next_u64() % 3);
    const double scale = std::pow(10.0, -1.0 + 2.5 * (rng.next_u64() % 1000) / 1000.0);
    Precoder P = Precoder::zeros(Nt, K);
    P.common = scale * rng.complex_normal_matrix(Nt, 1).col(0);
    P.priv = scale * rng.complex_normal_matrix(Nt, K);
    const CVec h = rng.complex_normal_matrix(Nt, 1).col(0);
    const int k = static_cast<int>(rng.next_u64() % static_cast<unsigned>(K));
    const LinkPowers lp = link_powers(h, P, 1.0, k);
    const Equalizers g = mmse_equalizers(lp);
    const SinrRate r = sinr_and_rate(lp);
    const double ec = mse_split(g.g_c, lp.hp_c, lp.I_c), ep = mse_split(g.g, lp.hp, lp.I);
    worst = std::max(worst, std::abs(augmented_wmse(1.0 / ec, ec) - (1.0 - r.R_c)));
    worst = std::max(worst, std::abs(augmented_wmse(1.0 / ep, ep) - (1.0 - r.R)));
  }
  return {worst < 1e-9, fmt("1000 instances, max |xi - (1 - R)| = %.2e (tol 1e-9)", worst)};
}

// 2. Monotone AO objective and termination within max_iters.
Verdict monotone() {
  double worst = 0.0;
  int violations = 0, unconverged = 0, failures = 0, max_n = 0;
  for (int run = 0; run < 50; ++run) {
    const int K = 2 + run % 3;
    const int Nt = K + (run / 3) % (5 - K);
    SystemConfig cfg = base_config(K, Nt, 10.0 + 5.0 * (run % 5), 0.6, 50);
    Rng rng(mix_seed(2002, run));
    const Scenario sc = generate_scenario(cfg, rng);
    const ConditionalSample s = sample_conditional(sc.estimate, cfg.M, rng);
    const PrecodingMode mode = run % 2 ? PrecodingMode::kNoRS : PrecodingMode::kRS;
    const InitScheme init = static_cast<InitScheme>(run % 4);
    const AsrResult r = ao_solve(s, cfg, init_precoder(sc.estimate, cfg, init, mode), mode);
    const auto& it = r.trace.iterations;
    for (std::size_t n = 1; n < it.size(); ++n) {
      const double inc = it[n].objective - it[n - 1].objective;
      worst = std::max(worst, inc);
      if (inc > 1e-8) ++violations;
    }
    if (!r.trace.converged) ++unconverged;
    failures += r.solver_failures;
    max_n = std::max(max_n, static_cast<int>(it.size()) - 1);
  }
  return {violations == 0 && unconverged == 0,
          fmt("50 runs, max increase %.2e (tol 1e-8), %d violations, %d not converged, "
              "max %d iterations (cap 200), %d uncertified QCQP solves",
              worst, violations, unconverged, max_n, failures)};
}

// 3. RS never loses to NoRS on matched estimate, sample and initialization.
Verdict dominance() {
  double worst = 1e300;
  int bad = 0;
  for (int i = 0; i < 50; ++i) {
    const int K = 2 + i % 2;
    SystemConfig cfg = base_config(K, K, 15.0 + 5.0 * (i % 6), 0.3 + 0.3 * (i % 3), 50);
    Rng rng(mix_seed(3003, i));
    const Scenario sc = generate_scenario(cfg, rng);
    const ConditionalSample s = sample_conditional(sc.estimate, cfg.M, rng);
    const InitScheme init = static_cast<InitScheme>(i % 4);
    const AsrResult rs = ao_solve(s, cfg, init_precoder(sc.estimate, cfg, init), PrecodingMode::kRS);
    const AsrResult no = ao_solve(
        s, cfg, init_precoder(sc.estimate, cfg, init, PrecodingMode::kNoRS), PrecodingMode::kNoRS);
    const double d = rs.asr - no.asr;
    worst = std::min(worst, d);
    if (d < -1e-4) ++bad;
  }
  return {bad == 0,
          fmt("50 triples, min ASR(RS) - ASR(NoRS) = %.3e (tol -1e-4), %d below", worst, bad)};
}

// 4. Interior-point optimum against an independent first-order oracle.
Verdict qcqp() {
  double worst_obj = 0.0, worst_kkt = 0.0;
  int uncertified = 0;
  const CommonStructure st[] = {CommonStructure::kNone, CommonStructure::kEpigraph,
                                CommonStructure::kSharedSplit};
  for (int i = 0; i < 50; ++i) {
    const int K = 1 + i % 3;
    const int Nt = std::max(K, 1 + (i / 3) % 4);
    const QcqpProblem prob =
        oracle::random_problem(K, Nt, 20, 5.0 + 5.0 * (i % 6), st[i % 3], 4000 + i);
    const QcqpSolution sol = solve_precoder_update(prob);
    if (!sol.certified()) ++uncertified;
    const oracle::QcqpOracleResult ref = oracle::solve_qcqp_alm(prob);
    worst_obj = std::max(worst_obj, std::abs(sol.objective - ref.objective) /
                                        std::max(1.0, std::abs(ref.objective)));
    worst_kkt = std::max(worst_kkt, check_kkt(prob, sol).max());
  }
  return {worst_obj <= 1e-5 && worst_kkt <= 1e-7 && uncertified == 0,
          fmt("50 instances, max rel objective gap %.2e (tol 1e-5), max KKT residual %.2e "
              "(tol 1e-7), %d uncertified",
              worst_obj, worst_kkt, uncertified)};
}

// 5. Small perfect-CSIT NoRS instance against multistart projected gradient.
Verdict brute_force() {
  double worst = 1e300;
  for (int i = 0; i < 10; ++i) {
    SystemConfig cfg = base_config(2, 2, 5.0 + 3.0 * i, 0.6, 1);
    cfg.beta = 0.0;
    Rng rng(mix_seed(5005, i));
    const CMat H = rng.complex_normal_matrix(2, 2);
    const ChannelEstimate est{H, 0.0};
    ConditionalSample s;
    s.realizations.push_back(H);
    const AsrResult r = ao_solve(
        s, cfg, init_precoder(est, cfg, InitScheme::kMrcSvd, PrecodingMode::kNoRS),
        PrecodingMode::kNoRS);
    const double brute = oracle::multistart_sum_rate(H, cfg.Pt, cfg.sigma_n2, 20, 500 + i);
    worst = std::min(worst, r.asr / brute);
  }
  return {worst >= 0.99, fmt("10 instances, min AO / brute-force ratio %.5f (tol 0.99)", worst)};
}

HarnessConfig harness(double alpha, double beta, int channels, int M) {
  HarnessConfig hc;
  hc.base = base_config(2, 2, 30.0, alpha, M);
  hc.base.beta = beta;
  hc.base.seed = 6006;
  hc.channels = channels;
  hc.jobs = jobs();
  return hc;
}

std::vector<EsrPoint> only(const std::vector<EsrPoint>& pts, Scheme s) {
  std::vector<EsrPoint> out;
  for (const auto& p : pts)
    if (p.scheme == to_string(s)) out.push_back(p);
  return out;
}

const std::vector<double> kSweep = {20, 25, 30, 35, 40};

// 6 and 7 share one sweep.
std::vector<EsrPoint>& main_sweep() {
  static std::vector<EsrPoint> pts =
      esr_sweep(harness(0.6, 1.0, 20, 100), kSweep, {Scheme::kRsOpt, Scheme::kNoRsOpt});
  return pts;
}

Verdict dof() {
  const auto& pts = main_sweep();
  const double no = dof_slope(only(pts, Scheme::kNoRsOpt), 25, 40);
  const double rs = dof_slope(only(pts, Scheme::kRsOpt), 25, 40);
  return {std::abs(no - 1.2) <= 0.15 && std::abs(rs - 1.6) <= 0.15,
          fmt("slope NoRS-Opt %.3f (1.2 +/- 0.15), RS-Opt %.3f (1.6 +/- 0.15)", no, rs)};
}

Verdict gain() {
  const auto& pts = main_sweep();
  const double gap = horizontal_gap_db(only(pts, Scheme::kRsOpt), only(pts, Scheme::kNoRsOpt), 35);
  return {gap >= 3.0, fmt("horizontal gap at 35 dB %.2f dB (min 3 dB)", gap)};
}

// 8. Conservative rates lower-bound the validated sampled rates, and the
// SAA design predicts a higher ESR at poor CSIT quality.
Verdict conservative() {
  int bad = 0;
  double worst = -1e300;
  for (int i = 0; i < 20; ++i) {
    const double alpha = 0.1 + 0.2 * (i % 5);
    SystemConfig cfg = base_config(2, 2, 10.0 + 5.0 * (i % 5), alpha, 100);
    Rng rng(mix_seed(8008, i));
    const Scenario sc = generate_scenario(cfg, rng);
    const AsrResult c =
        conservative_solve(sc.estimate, cfg, init_precoder(sc.estimate, cfg, InitScheme::kMrcSvd));
    Rng vrng(mix_seed(8009, i));
    const ValidatedRates v = validate_precoder(
        sc.estimate, c.P, cfg.sigma_n2, draw_normalized_errors(2, 2, 10000, vrng));
    for (int k = 0; k < 2; ++k) {
      const double ep = c.R(k) - v.R(k) - 3.0 * v.R_se(k);
      const double ec = c.R_c(k) - v.R_c(k) - 3.0 * v.R_c_se(k);
      worst = std::max({worst, ep, ec});
      if (ep > 0.0 || ec > 0.0) ++bad;
    }
  }
  HarnessConfig hc = harness(0.1, 1.0, 20, 100);
  const ChannelPool pool = make_channel_pool(hc.base, hc.channels, hc.base.M);
  SystemConfig cfg = hc.base;
  cfg.Pt = SystemConfig::pt_from_snr_db(30.0);
  std::vector<double> diff(static_cast<std::size_t>(hc.channels));
  for (int c = 0; c < hc.channels; ++c) {
    const ChannelEstimate est = pool.estimate(c, cfg.sigma_e2());
    const ConditionalSample s = pool.sample(c, cfg.sigma_e2(), cfg.M);
    diff[static_cast<std::size_t>(c)] =
        run_scheme(Scheme::kRsOpt, est, s, cfg, hc.init).asr -
        run_scheme(Scheme::kConservativeRs, est, s, cfg, hc.init).asr;
  }
  double mean = 0.0, var = 0.0;
  for (double d : diff) mean += d;
  mean /= static_cast<double>(diff.size());
  for (double d : diff) var += (d - mean) * (d - mean);
  const double se = std::sqrt(var / (diff.size() - 1.0) / static_cast<double>(diff.size()));
  const bool margin_ok = mean > 0.0 && mean > 2.0 * se;
  return {bad == 0 && margin_ok,
          fmt("20 instances, max (conservative - validated - 3 SE) = %.3e, %d above; "
              "alpha 0.1, 30 dB: SAA - conservative ESR = %.3f bps/Hz (paired SE %.3f)",
              worst, bad, mean, se)};
}

// 9. Sample-size sensitivity on an independent validation sample.
Verdict m_sens() {
  HarnessConfig hc = harness(0.6, 1.0, 20, 100);
  const auto pts = m_sensitivity(hc, 35.0, {1, 10, 100, 1000});
  const double combined = std::hypot(pts[2].std_err, pts[3].std_err);
  const double d = std::abs(pts[2].esr - pts[3].esr);
  return {d <= 2.0 * combined && pts[0].esr < pts[1].esr,
          fmt("validated ESR M=1 %.3f, M=10 %.3f, M=100 %.3f, M=1000 %.3f; "
              "|M100 - M1000| = %.3f vs 2 SE = %.3f",
              pts[0].esr, pts[1].esr, pts[2].esr, pts[3].esr, d, 2.0 * combined)};
}

// 10. Fixed CSIT error: zero-forcing saturates, RS keeps one DoF.
Verdict saturation() {
  HarnessConfig hc = harness(0.0, 0.063, 20, 100);
  const auto pts = esr_sweep(hc, kSweep, {Scheme::kRsOpt, Scheme::kNoRsZf});
  const auto zf = only(pts, Scheme::kNoRsZf);
  double e30 = 0.0, e40 = 0.0;
  for (const auto& p : zf) {
    if (p.snr_db == 30.0) e30 = p.esr;
    if (p.snr_db == 40.0) e40 = p.esr;
  }
  const double change = std::abs(e40 - e30) / e30;
  const double slope = dof_slope(only(pts, Scheme::kRsOpt), 25, 40);
  return {change < 0.05 && std::abs(slope - 1.0) <= 0.15,
          fmt("NoRS-ZF ESR %.3f -> %.3f (change %.2f%%, max 5%%), RS-Opt slope %.3f (1 +/- 0.15)",
              e30, e40, 100.0 * change, slope)};
}

// 11. Two-user region: RS encloses NoRS.
Verdict region() {
  HarnessConfig hc = harness(0.6, 1.0, 10, 100);
  const RegionResult r = rate_region(hc, 30.0, default_region_weights());
  int outside = 0, lower = 0;
  double worst = 1e300;
  for (const auto& v : r.nors_hull)
    if (!hull_contains(r.rs_hull, v, 1e-9)) ++outside;
  for (std::size_t i = 0; i + 1 < r.points.size(); i += 2) {
    const double d = r.points[i].weighted - r.points[i + 1].weighted;
    const double scale = r.points[i].w1 + r.points[i].w2;
    worst = std::min(worst, d / scale);
    if (d < -1e-4 * scale) ++lower;
  }
  return {outside == 0 && lower == 0,
          fmt("%zu NoRS hull vertices, %d outside the RS hull; 43 weight pairs, %d with RS below "
              "NoRS, min (RS - NoRS) / (w1 + w2) = %.3e",
              r.nors_hull.size(), outside, lower, worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"rate-WMMSE identity", identity},
      {"monotone AO convergence", monotone},
      {"RS dominance", dominance},
      {"QCQP correctness", qcqp},
      {"brute-force oracle", brute_force},
      {"DoF slopes", dof},
      {"high-SNR RS gain", gain},
      {"conservative bound", conservative},
      {"M-sensitivity", m_sens},
      {"NoRS-ZF saturation", saturation},
      {"region sanity", region},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2zu %-24s %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
