#include "rsopt/baselines_init.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rsopt/errors.hpp"

namespace rsopt {

const char* to_string(InitScheme s) {
  switch (s) {
    case InitScheme::kZfE: return "ZF-e";
    case InitScheme::kZfSvd: return "ZF-SVD";
    case InitScheme::kMrcE: return "MRC-e";
    case InitScheme::kMrcSvd: return "MRC-SVD";
  }
  return "?";
}

InitScheme parse_init_scheme(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  n.erase(std::remove(n.begin(), n.end(), '_'), n.end());
  n.erase(std::remove(n.begin(), n.end(), '-'), n.end());
  if (n == "zfe") return InitScheme::kZfE;
  if (n == "zfsvd") return InitScheme::kZfSvd;
  if (n == "mrce") return InitScheme::kMrcE;
  if (n == "mrcsvd") return InitScheme::kMrcSvd;
  throw ConfigError("unknown initialization scheme '" + name + "'", "init");
}

PowerSplit dof_power_split(double Pt, double alpha) {
  const double priv = std::min(Pt, std::pow(Pt, alpha));
  return {Pt - priv, priv};
}

bool full_column_rank(const CMat& H, double rel_tol) {
  if (H.cols() > H.rows()) return false;
  Eigen::JacobiSVD<CMat> svd(H);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return false;
  return sv(sv.size() - 1) > rel_tol * sv(0);
}

CMat zf_directions(const CMat& H) {
  if (!full_column_rank(H)) throw NumericalError("ZF directions need a full column rank estimate");
  const CMat gram = H.adjoint() * H;
  CMat W = H * gram.ldlt().solve(CMat::Identity(H.cols(), H.cols()));
  W.colwise().normalize();
  return W;
}

CMat mrc_directions(const CMat& H) {
  CMat W = H;
  for (Eigen::Index k = 0; k < W.cols(); ++k) {
    const double n = W.col(k).norm();
    if (n > 0.0) {
      W.col(k) /= n;
    } else {
      W.col(k).setZero();
      W(0, k) = 1.0;
    }
  }
  return W;
}

CVec dominant_left_singular_vector(const CMat& H) {
  Eigen::JacobiSVD<CMat> svd(H, Eigen::ComputeThinU);
  return svd.matrixU().col(0);
}

Precoder init_precoder(const ChannelEstimate& est, const SystemConfig& cfg,
                       InitScheme scheme, PrecodingMode mode, bool* fell_back) {
  const int Nt = est.antennas();
  const int K = est.users();
  const bool zf = scheme == InitScheme::kZfE || scheme == InitScheme::kZfSvd;
  const bool svd = scheme == InitScheme::kZfSvd || scheme == InitScheme::kMrcSvd;
  bool fb = false;
  CMat dirs;
  if (zf && full_column_rank(est.H_hat)) {
    dirs = zf_directions(est.H_hat);
  } else {
    fb = zf;
    dirs = mrc_directions(est.H_hat);
  }
  if (fell_back) *fell_back = fb;

  Precoder P = Precoder::zeros(Nt, K, mode);
  if (mode == PrecodingMode::kRS) {
    const PowerSplit split = dof_power_split(cfg.Pt, cfg.alpha);
    CVec common = CVec::Zero(Nt);
    if (svd) {
      common = dominant_left_singular_vector(est.H_hat);
    } else {
      common(0) = 1.0;
    }
    P.common = std::sqrt(split.common) * common;
    P.priv = std::sqrt(split.priv / K) * dirs;
  } else {
    P.priv = std::sqrt(cfg.Pt / K) * dirs;
  }
  return P;
}

RVec water_filling(const RVec& gains, double budget) {
  const int K = static_cast<int>(gains.size());
  RVec q = RVec::Zero(K);
  if (K == 0 || !(budget > 0.0)) return q;
  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  // strongest first
  std::sort(order.begin(), order.end(), [&](int a, int b) { return gains(a) > gains(b); });
  double mu = 0.0;
  int active = 0;
  double inv_sum = 0.0;
  for (int n = 0; n < K; ++n) {
    const double g = gains(order[static_cast<std::size_t>(n)]);
    if (!(g > 0.0)) break;
    const double cand_inv_sum = inv_sum + 1.0 / g;
    const double cand_mu = (budget + cand_inv_sum) / (n + 1);
    // the next-weakest channel joins only if its floor 1/g lies below the level
    if (cand_mu <= 1.0 / g) break;
    inv_sum = cand_inv_sum;
    mu = cand_mu;
    active = n + 1;
  }
  for (int n = 0; n < active; ++n) {
    const int k = order[static_cast<std::size_t>(n)];
    q(k) = std::max(0.0, mu - 1.0 / gains(k));
  }
  // remove rounding drift so that sum q == budget
  const double total = q.sum();
  if (total > 0.0) q *= budget / total;
  return q;
}

namespace {

RVec zf_gains(const CMat& H, const CMat& dirs, double sigma_n2) {
  RVec g(H.cols());
  for (Eigen::Index k = 0; k < H.cols(); ++k)
    g(k) = std::norm(H.col(k).dot(dirs.col(k))) / sigma_n2;
  return g;
}

}  // namespace

BaselineResult nors_zf_wf(const ChannelEstimate& est, const SystemConfig& cfg) {
  const CMat dirs = zf_directions(est.H_hat);
  const RVec gains = zf_gains(est.H_hat, dirs, cfg.sigma_n2);
  const RVec q = water_filling(gains, cfg.Pt);
  BaselineResult out{Precoder::zeros(est.antennas(), est.users(), PrecodingMode::kNoRS), 0.0};
  for (int k = 0; k < est.users(); ++k) {
    out.P.priv.col(k) = std::sqrt(q(k)) * dirs.col(k);
    out.predicted_sum_rate += std::log2(1.0 + q(k) * gains(k));
  }
  return out;
}

Precoder rs_zf_svd_baseline(const ChannelEstimate& est, const SystemConfig& cfg) {
  const CMat dirs = zf_directions(est.H_hat);
  const PowerSplit split = dof_power_split(cfg.Pt, cfg.alpha);
  const RVec q = water_filling(zf_gains(est.H_hat, dirs, cfg.sigma_n2), split.priv);
  Precoder P = Precoder::zeros(est.antennas(), est.users(), PrecodingMode::kRS);
  P.common = std::sqrt(split.common) * dominant_left_singular_vector(est.H_hat);
  for (int k = 0; k < est.users(); ++k) P.priv.col(k) = std::sqrt(q(k)) * dirs.col(k);
  return P;
}

}  // namespace rsopt
