#include "rsopt/saa_engine.hpp"

#include <algorithm>
#include <cmath>

#include "rsopt/errors.hpp"

namespace rsopt {

namespace {

struct Accum {
  CMat Psi_c, Psi;
  CVec f_c, f;
  double t_c = 0, t = 0, u_c = 0, u = 0, ups_c = 0, ups = 0;

  Accum(int Nt)
      : Psi_c(CMat::Zero(Nt, Nt)),
        Psi(CMat::Zero(Nt, Nt)),
        f_c(CVec::Zero(Nt)),
        f(CVec::Zero(Nt)) {}

  void add(const Accum& o) {
    Psi_c += o.Psi_c;
    Psi += o.Psi;
    f_c += o.f_c;
    f += o.f;
    t_c += o.t_c;
    t += o.t;
    u_c += o.u_c;
    u += o.u;
    ups_c += o.ups_c;
    ups += o.ups;
  }
};

constexpr int kLeafSize = 8;

// Pairwise reduction over [lo, hi); the split points depend only on M.
Accum reduce(const ConditionalSample& sample, const SampledEqualizers& eq, int k,
             int lo, int hi) {
  const int Nt = sample[0].rows();
  if (hi - lo <= kLeafSize) {
    Accum acc(Nt);
    for (int m = lo; m < hi; ++m) {
      const auto h = sample[m].col(k);
      const double uc = eq.u_c(k, m);
      const double up = eq.u(k, m);
      const Complex gc = eq.g_c(k, m);
      const Complex gp = eq.g(k, m);
      const double tc = uc * std::norm(gc);
      const double tp = up * std::norm(gp);
      const CMat hhH = h * h.adjoint();
      acc.Psi_c += tc * hhH;
      acc.Psi += tp * hhH;
      acc.f_c += (uc * std::conj(gc)) * h;
      acc.f += (up * std::conj(gp)) * h;
      acc.t_c += tc;
      acc.t += tp;
      acc.u_c += uc;
      acc.u += up;
      acc.ups_c += std::log2(uc);
      acc.ups += std::log2(up);
    }
    return acc;
  }
  const int mid = lo + (hi - lo) / 2;
  Accum left = reduce(sample, eq, k, lo, mid);
  left.add(reduce(sample, eq, k, mid, hi));
  return left;
}

double mean_and_se(const RVec& x, double* se) {
  const double n = static_cast<double>(x.size());
  const double mean = x.mean();
  if (x.size() > 1) {
    const double var = (x.array() - mean).square().sum() / (n - 1.0);
    *se = std::sqrt(var / n);
  } else {
    *se = 0.0;
  }
  return mean;
}

}  // namespace

SampledEqualizers update_equalizers_weights(const ConditionalSample& sample,
                                            const Precoder& P, double sigma_n2,
                                            WeightScaling scaling) {
  if (sample.size() < 1) throw DimensionError("empty conditional sample");
  const int K = P.users();
  const int M = sample.size();
  SampledEqualizers eq{CMat(K, M), CMat(K, M), RMat(K, M), RMat(K, M)};
  for (int m = 0; m < M; ++m) {
    if (sample[m].cols() != K || sample[m].rows() != P.antennas())
      throw DimensionError("realization shape does not match the precoder");
    for (int k = 0; k < K; ++k) {
      const LinkPowers lp = link_powers(sample[m].col(k), P, sigma_n2, k);
      const Equalizers g = mmse_equalizers(lp);
      const MmseValues e = mmse_values(lp);
      eq.g_c(k, m) = g.g_c;
      eq.g(k, m) = g.g;
      eq.u_c(k, m) = mmse_weight(e.eps_c, scaling);
      eq.u(k, m) = mmse_weight(e.eps, scaling);
    }
  }
  return eq;
}

std::vector<SafBundle> accumulate_safs(const ConditionalSample& sample,
                                       const SampledEqualizers& eq) {
  const int M = sample.size();
  if (M < 1 || eq.samples() != M)
    throw DimensionError("equalizer set does not match the sample");
  const double inv = 1.0 / static_cast<double>(M);
  std::vector<SafBundle> out;
  out.reserve(static_cast<std::size_t>(eq.users()));
  for (int k = 0; k < eq.users(); ++k) {
    Accum a = reduce(sample, eq, k, 0, M);
    SafBundle s;
    // Hermitian by construction; symmetrize away rounding asymmetry.
    s.Psi_c = 0.5 * inv * (a.Psi_c + a.Psi_c.adjoint());
    s.Psi = 0.5 * inv * (a.Psi + a.Psi.adjoint());
    s.f_c = inv * a.f_c;
    s.f = inv * a.f;
    s.t_c = inv * a.t_c;
    s.t = inv * a.t;
    s.u_c = inv * a.u_c;
    s.u = inv * a.u;
    s.ups_c = inv * a.ups_c;
    s.ups = inv * a.ups;
    out.push_back(std::move(s));
  }
  return out;
}

double SampledRates::common_rate() const {
  return R_c.size() ? R_c.minCoeff() : 0.0;
}

double SampledRates::asr() const { return common_rate() + R.sum(); }

SampledRates average_rates(const ConditionalSample& sample, const Precoder& P,
                           double sigma_n2) {
  const int K = P.users();
  const int M = sample.size();
  if (M < 1) throw DimensionError("empty conditional sample");
  RMat rc(K, M), rp(K, M);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const SinrRate r = sinr_and_rate(link_powers(sample[m].col(k), P, sigma_n2, k));
      rc(k, m) = r.R_c;
      rp(k, m) = r.R;
    }
  }
  SampledRates out;
  out.R_c.resize(K);
  out.R.resize(K);
  out.R_c_se.resize(K);
  out.R_se.resize(K);
  for (int k = 0; k < K; ++k) {
    out.R_c(k) = mean_and_se(rc.row(k).transpose(), &out.R_c_se(k));
    out.R(k) = mean_and_se(rp.row(k).transpose(), &out.R_se(k));
  }
  return out;
}

SampledAwmse sampled_awmse(const ConditionalSample& sample,
                           const SampledEqualizers& eq, const Precoder& P,
                           double sigma_n2) {
  const int K = P.users();
  const int M = sample.size();
  SampledAwmse out{RVec::Zero(K), RVec::Zero(K)};
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const LinkPowers lp = link_powers(sample[m].col(k), P, sigma_n2, k);
      const double ec = mse_split(eq.g_c(k, m), lp.hp_c, lp.I_c);
      const double ep = mse_split(eq.g(k, m), lp.hp, lp.I);
      out.xi_c(k) += augmented_wmse(eq.u_c(k, m), ec);
      out.xi(k) += augmented_wmse(eq.u(k, m), ep);
    }
  }
  out.xi_c /= static_cast<double>(M);
  out.xi /= static_cast<double>(M);
  return out;
}

}  // namespace rsopt
