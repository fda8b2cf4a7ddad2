#include "rsopt/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rsopt/errors.hpp"
#include "rsopt/parallel.hpp"
#include "rsopt/saa_engine.hpp"

namespace rsopt {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::kRsOpt: return "RS-Opt";
    case Scheme::kNoRsOpt: return "NoRS-Opt";
    case Scheme::kNoRsZf: return "NoRS-ZF";
    case Scheme::kRsZfSvd: return "RS-ZF-SVD";
    case Scheme::kConservativeRs: return "Conservative-RS";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::kRsOpt, Scheme::kNoRsOpt, Scheme::kNoRsZf, Scheme::kRsZfSvd,
                   Scheme::kConservativeRs})
    if (name == to_string(s)) return s;
  throw ConfigError("unknown scheme '" + name + "'", "schemes");
}

ChannelEstimate ChannelPool::estimate(int c, double sigma_e2) const {
  return estimate_from_normalized(estimates.at(static_cast<std::size_t>(c)), sigma_e2);
}

ConditionalSample ChannelPool::sample(int c, double sigma_e2, int M) const {
  if (M > static_cast<int>(errors.size()))
    throw DimensionError("requested sample exceeds the error pool");
  const std::vector<CMat> head(errors.begin(), errors.begin() + M);
  return sample_conditional(estimate(c, sigma_e2), head);
}

ChannelPool make_channel_pool(const SystemConfig& base, int channels, int M) {
  ChannelPool pool;
  pool.estimates.reserve(static_cast<std::size_t>(channels));
  for (int c = 0; c < channels; ++c) {
    Rng rng(mix_seed(base.seed, kEstimateStream, static_cast<std::uint64_t>(c)));
    pool.estimates.push_back(rng.complex_normal_matrix(base.Nt, base.K));
  }
  Rng err_rng(mix_seed(base.seed, kErrorStream));
  pool.errors = draw_normalized_errors(base.Nt, base.K, M, err_rng);
  return pool;
}

namespace {

SystemConfig at_snr(const SystemConfig& base, double snr_db) {
  SystemConfig cfg = base;
  cfg.Pt = SystemConfig::pt_from_snr_db(snr_db, base.sigma_n2);
  return cfg;
}

// Per-user ERs for a sum-rate scheme: the common rate is shared equally.
RVec equal_share(const RVec& R, double common) {
  return (R.array() + common / static_cast<double>(R.size())).matrix();
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe out;
  const auto n = static_cast<double>(v.size());
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

EsrPoint aggregate(const std::string& scheme, double snr_db,
                   const std::vector<SchemeOutcome>& runs) {
  EsrPoint p;
  p.scheme = scheme;
  p.snr_db = snr_db;
  p.n_channels = static_cast<int>(runs.size());
  std::vector<double> asr;
  asr.reserve(runs.size());
  for (const auto& r : runs) {
    asr.push_back(r.asr);
    p.solver_failures += r.solver_failures;
    p.er = p.er.size() ? RVec(p.er + r.er) : r.er;
  }
  const MeanSe ms = mean_se(asr);
  p.esr = ms.mean;
  p.std_err = ms.se;
  if (!runs.empty()) p.er /= static_cast<double>(runs.size());
  return p;
}

}  // namespace

SchemeOutcome run_scheme(Scheme scheme, const ChannelEstimate& est,
                         const ConditionalSample& sample, const SystemConfig& cfg,
                         InitScheme init, const AoOptions& ao) {
  SchemeOutcome out;
  auto from_ao = [&](const AsrResult& r) {
    out.asr = r.asr;
    out.er = equal_share(r.R, r.R_common);
    out.solver_failures = r.solver_failures;
    out.P = r.P;
    out.trace = r.trace;
  };
  auto from_precoder = [&](const Precoder& P) {
    const SampledRates r = average_rates(sample, P, cfg.sigma_n2);
    const double common = P.mode == PrecodingMode::kRS ? r.common_rate() : 0.0;
    out.asr = common + r.R.sum();
    out.er = equal_share(r.R, common);
    out.P = P;
  };
  switch (scheme) {
    case Scheme::kRsOpt:
      from_ao(ao_solve(sample, cfg, init_precoder(est, cfg, init, PrecodingMode::kRS),
                       PrecodingMode::kRS, ao));
      break;
    case Scheme::kNoRsOpt:
      from_ao(ao_solve(sample, cfg, init_precoder(est, cfg, init, PrecodingMode::kNoRS),
                       PrecodingMode::kNoRS, ao));
      break;
    case Scheme::kConservativeRs:
      from_ao(conservative_solve(est, cfg, init_precoder(est, cfg, init, PrecodingMode::kRS), ao));
      break;
    case Scheme::kNoRsZf:
      from_precoder(nors_zf_wf(est, cfg).P);
      break;
    case Scheme::kRsZfSvd:
      from_precoder(rs_zf_svd_baseline(est, cfg));
      break;
  }
  return out;
}

std::vector<EsrPoint> esr_sweep(const HarnessConfig& hc, const std::vector<double>& snr_db,
                                const std::vector<Scheme>& schemes, const TraceSink& sink) {
  if (hc.channels < 1) throw ConfigError("at least one channel is required", "channels");
  hc.base.validate();
  const ChannelPool pool = make_channel_pool(hc.base, hc.channels, hc.base.M);
  const std::size_t C = static_cast<std::size_t>(hc.channels);
  const std::size_t S = schemes.size();
  const std::size_t jobs_total = snr_db.size() * S * C;
  std::vector<SchemeOutcome> runs(jobs_total);
  parallel_for(jobs_total, hc.jobs, [&](std::size_t idx) {
    const std::size_t c = idx % C;
    const std::size_t s = (idx / C) % S;
    const std::size_t i = idx / (C * S);
    const SystemConfig cfg = at_snr(hc.base, snr_db[i]);
    cfg.validate();
    const int ci = static_cast<int>(c);
    const ChannelEstimate est = pool.estimate(ci, cfg.sigma_e2());
    const ConditionalSample sample = pool.sample(ci, cfg.sigma_e2(), cfg.M);
    runs[idx] = run_scheme(schemes[s], est, sample, cfg, hc.init, hc.ao);
  });
  std::vector<EsrPoint> out;
  out.reserve(snr_db.size() * S);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t i = 0; i < snr_db.size(); ++i) {
      const auto first = runs.begin() + static_cast<std::ptrdiff_t>((i * S + s) * C);
      const std::vector<SchemeOutcome> block(first, first + static_cast<std::ptrdiff_t>(C));
      if (sink)
        for (std::size_t c = 0; c < C; ++c)
          if (!block[c].trace.iterations.empty())
            sink(schemes[s], snr_db[i], static_cast<int>(c), block[c].trace);
      out.push_back(aggregate(to_string(schemes[s]), snr_db[i], block));
    }
  }
  return out;
}

double dof_slope(const std::vector<EsrPoint>& points, double lo_db, double hi_db) {
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    if (p.snr_db < lo_db - 1e-9 || p.snr_db > hi_db + 1e-9) continue;
    xs.push_back(std::log2(SystemConfig::pt_from_snr_db(p.snr_db)));
    ys.push_back(p.esr);
  }
  if (xs.size() < 3)
    throw std::invalid_argument("dof_slope needs at least three points in the window");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

double horizontal_gap_db(const std::vector<EsrPoint>& better,
                         const std::vector<EsrPoint>& worse, double at_db) {
  auto sorted = [](std::vector<EsrPoint> v) {
    std::sort(v.begin(), v.end(),
              [](const EsrPoint& a, const EsrPoint& b) { return a.snr_db < b.snr_db; });
    return v;
  };
  const auto w = sorted(worse);
  const auto b = sorted(better);
  double target = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : w)
    if (std::abs(p.snr_db - at_db) < 1e-9) target = p.esr;
  if (std::isnan(target)) throw std::invalid_argument("no point at the requested SNR");
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    const double y0 = b[i].esr, y1 = b[i + 1].esr;
    if ((y0 - target) * (y1 - target) <= 0.0 && y1 != y0) {
      const double x = b[i].snr_db + (target - y0) / (y1 - y0) * (b[i + 1].snr_db - b[i].snr_db);
      return at_db - x;
    }
  }
  if (!b.empty() && b.front().esr >= target) return at_db - b.front().snr_db;  // lower bound
  return std::numeric_limits<double>::quiet_NaN();
}

ValidatedRates validate_precoder(const ChannelEstimate& est, const Precoder& P,
                                 double sigma_n2, const std::vector<CMat>& normalized_errors) {
  const SampledRates r = average_rates(sample_conditional(est, normalized_errors), P, sigma_n2);
  ValidatedRates v{r.R_c, r.R_c_se, r.R, r.R_se, 0.0};
  v.asr = (P.mode == PrecodingMode::kRS ? r.common_rate() : 0.0) + r.R.sum();
  return v;
}

std::vector<CMat> validation_errors(const SystemConfig& base, int m_val) {
  Rng rng(mix_seed(base.seed, kValidationStream));
  return draw_normalized_errors(base.Nt, base.K, m_val, rng);
}

std::vector<EsrPoint> m_sensitivity(const HarnessConfig& hc, double snr_db,
                                    const std::vector<int>& m_list) {
  if (m_list.empty()) throw ConfigError("m_list must not be empty", "m_list");
  for (int M : m_list)
    if (M < 1) throw ConfigError("sample sizes must be positive", "m_list");
  const int m_max = *std::max_element(m_list.begin(), m_list.end());
  const ChannelPool pool = make_channel_pool(hc.base, hc.channels, m_max);
  const std::vector<CMat> val = validation_errors(hc.base, hc.m_val);
  const std::size_t C = static_cast<std::size_t>(hc.channels);
  std::vector<SchemeOutcome> runs(m_list.size() * C);
  parallel_for(runs.size(), hc.jobs, [&](std::size_t idx) {
    const std::size_t c = idx % C;
    SystemConfig cfg = at_snr(hc.base, snr_db);
    cfg.M = m_list[idx / C];
    cfg.validate();
    const int ci = static_cast<int>(c);
    const ChannelEstimate est = pool.estimate(ci, cfg.sigma_e2());
    const ConditionalSample sample = pool.sample(ci, cfg.sigma_e2(), cfg.M);
    const AsrResult r = ao_solve(sample, cfg, init_precoder(est, cfg, hc.init), PrecodingMode::kRS,
                                 hc.ao);
    const ValidatedRates v = validate_precoder(est, r.P, cfg.sigma_n2, val);
    SchemeOutcome o;
    o.asr = v.asr;
    o.er = equal_share(v.R, v.R_c.minCoeff());
    o.solver_failures = r.solver_failures;
    runs[idx] = std::move(o);
  });
  std::vector<EsrPoint> out;
  for (std::size_t j = 0; j < m_list.size(); ++j) {
    const auto first = runs.begin() + static_cast<std::ptrdiff_t>(j * C);
    out.push_back(aggregate("RS-Opt/M=" + std::to_string(m_list[j]), snr_db,
                            std::vector<SchemeOutcome>(first, first + static_cast<std::ptrdiff_t>(C))));
  }
  return out;
}

std::vector<std::array<double, 2>> default_region_weights() {
  std::vector<std::array<double, 2>> w;
  w.push_back({1.0, 1e-3});
  for (int e = -20; e <= 20; ++e) w.push_back({1.0, std::pow(10.0, e / 20.0)});
  w.push_back({1.0, 1e3});
  return w;
}

RegionResult rate_region(const HarnessConfig& hc, double snr_db,
                         const std::vector<std::array<double, 2>>& weights) {
  if (hc.base.K != 2) throw ConfigError("rate regions need K = 2", "K");
  const SystemConfig cfg = at_snr(hc.base, snr_db);
  cfg.validate();
  const ChannelPool pool = make_channel_pool(hc.base, hc.channels, hc.base.M);
  const std::size_t C = static_cast<std::size_t>(hc.channels);
  const std::size_t W = weights.size();
  struct Run {
    RVec er;
    double weighted = 0.0;
    int failures = 0;
  };
  // index layout: ((w * 2) + mode) * C + c
  std::vector<Run> runs(W * 2 * C);
  parallel_for(runs.size(), hc.jobs, [&](std::size_t idx) {
    const std::size_t c = idx % C;
    const bool rs = ((idx / C) % 2) == 0;
    const std::size_t w = idx / (2 * C);
    const int ci = static_cast<int>(c);
    const ChannelEstimate est = pool.estimate(ci, cfg.sigma_e2());
    const ConditionalSample sample = pool.sample(ci, cfg.sigma_e2(), cfg.M);
    const PrecodingMode mode = rs ? PrecodingMode::kRS : PrecodingMode::kNoRS;
    RVec wv(2);
    wv << weights[w][0], weights[w][1];
    const AsrResult r =
        weighted_asr_solve(sample, cfg, init_precoder(est, cfg, hc.init, mode), wv, mode, hc.ao);
    runs[idx] = Run{r.R + r.split, r.weighted_objective, r.solver_failures};
  });
  RegionResult out;
  std::vector<Point2> rs_pts, nors_pts;
  for (std::size_t w = 0; w < W; ++w) {
    for (int m = 0; m < 2; ++m) {
      RegionPoint p;
      p.scheme = m == 0 ? "RS" : "NoRS";
      p.w1 = weights[w][0];
      p.w2 = weights[w][1];
      for (std::size_t c = 0; c < C; ++c) {
        const Run& r = runs[(w * 2 + static_cast<std::size_t>(m)) * C + c];
        p.er1 += r.er(0);
        p.er2 += r.er(1);
        p.weighted += r.weighted;
        p.solver_failures += r.failures;
      }
      p.er1 /= static_cast<double>(C);
      p.er2 /= static_cast<double>(C);
      p.weighted /= static_cast<double>(C);
      (m == 0 ? rs_pts : nors_pts).push_back({p.er1, p.er2});
      out.points.push_back(std::move(p));
    }
  }
  out.rs_hull = upper_right_hull(rs_pts);
  out.nors_hull = upper_right_hull(nors_pts);
  return out;
}

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

std::vector<Point2> upper_right_hull(std::vector<Point2> pts) {
  if (pts.empty()) return {};
  double xmax = 0.0, ymax = 0.0;
  for (const auto& p : pts) {
    xmax = std::max(xmax, p[0]);
    ymax = std::max(ymax, p[1]);
  }
  pts.push_back({0.0, 0.0});
  pts.push_back({xmax, 0.0});
  pts.push_back({0.0, ymax});
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  // Andrew's monotone chain, counter-clockwise.
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0.0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  // Rotate so the polygon starts at the x-axis extreme (max x, 0).
  const auto start = std::find_if(h.begin(), h.end(), [&](const Point2& p) {
    return p[1] == 0.0 && p[0] == xmax;
  });
  if (start != h.end()) std::rotate(h.begin(), start, h.end());
  return h;
}

bool hull_contains(const std::vector<Point2>& hull, const Point2& p, double tol) {
  if (hull.size() < 3) return false;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& a = hull[i];
    const Point2& b = hull[(i + 1) % hull.size()];
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    if (len == 0.0) continue;
    if (cross(a, b, p) / len < -tol) return false;
  }
  return true;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

void write_esr_csv(std::ostream& os, const std::vector<EsrPoint>& pts) {
  std::ostringstream buf;
  buf << "scheme,snr_db,esr,stderr,n\n";
  for (const auto& p : pts)
    buf << p.scheme << ',' << fmt(p.snr_db) << ',' << fmt(p.esr) << ',' << fmt(p.std_err) << ','
        << p.n_channels << '\n';
  os << buf.str();
}

void write_region_csv(std::ostream& os, const std::vector<RegionPoint>& pts) {
  std::ostringstream buf;
  buf << "scheme,w1,w2,er1,er2\n";
  for (const auto& p : pts)
    buf << p.scheme << ',' << fmt(p.w1) << ',' << fmt(p.w2) << ',' << fmt(p.er1) << ','
        << fmt(p.er2) << '\n';
  os << buf.str();
}

void write_slopes_csv(std::ostream& os, const std::vector<SlopeRow>& rows) {
  std::ostringstream buf;
  buf << "scheme,alpha,K,slope\n";
  for (const auto& r : rows)
    buf << r.scheme << ',' << fmt(r.alpha) << ',' << r.K << ',' << fmt(r.slope) << '\n';
  os << buf.str();
}

}  // namespace rsopt
