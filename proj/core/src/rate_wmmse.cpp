#include "rsopt/rate_wmmse.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rsopt/errors.hpp"

namespace rsopt {

const char* to_string(PrecodingMode mode) {
  return mode == PrecodingMode::kRS ? "RS" : "NoRS";
}

Precoder Precoder::zeros(int Nt, int K, PrecodingMode mode) {
  return Precoder{CVec::Zero(Nt), CMat::Zero(Nt, K), mode};
}

double Precoder::power() const { return common.squaredNorm() + priv.squaredNorm(); }

bool Precoder::feasible(double Pt, double rel_tol) const {
  if (mode == PrecodingMode::kNoRS && common.squaredNorm() != 0.0) return false;
  return power() <= Pt * (1.0 + rel_tol);
}

Precoder Precoder::projected(double Pt) const {
  Precoder out = *this;
  if (out.mode == PrecodingMode::kNoRS) out.common.setZero();
  const double p = out.power();
  if (p > Pt) {
    const double s = std::sqrt(Pt / p);
    out.common *= s;
    out.priv *= s;
  }
  return out;
}

LinkPowers link_powers(const Eigen::Ref<const CVec>& h, const Precoder& P,
                       double sigma_n2, int k) {
  if (h.size() != P.antennas())
    throw DimensionError("channel length does not match the precoder");
  if (k < 0 || k >= P.users()) throw DimensionError("user index out of range");
  LinkPowers lp;
  lp.hp_c = h.dot(P.common);  // dot() conjugates the left operand: h^H p_c
  lp.S_c = std::norm(lp.hp_c);
  double interference = sigma_n2;
  for (int i = 0; i < P.users(); ++i) {
    const Complex hp = h.dot(P.priv.col(i));
    if (i == k) {
      lp.hp = hp;
      lp.S = std::norm(hp);
    } else {
      interference += std::norm(hp);
    }
  }
  lp.I = interference;
  lp.T = lp.S + lp.I;
  lp.I_c = lp.T;
  lp.T_c = lp.S_c + lp.T;
  return lp;
}

SinrRate sinr_and_rate(const LinkPowers& lp) {
  SinrRate r;
  r.gamma_c = lp.S_c / lp.I_c;
  r.gamma = lp.S / lp.I;
  r.R_c = std::log2(1.0 + r.gamma_c);
  r.R = std::log2(1.0 + r.gamma);
  return r;
}

Equalizers mmse_equalizers(const LinkPowers& lp) {
  return {std::conj(lp.hp_c) / lp.T_c, std::conj(lp.hp) / lp.T};
}

Equalizers mmse_equalizers(const Eigen::Ref<const CVec>& h, const Precoder& P,
                           double sigma_n2, int k) {
  return mmse_equalizers(link_powers(h, P, sigma_n2, k));
}

double mse(Complex g, double total_power, Complex hp) {
  return std::norm(g) * total_power - 2.0 * std::real(g * hp) + 1.0;
}

double mse_split(Complex g, Complex hp, double interference) {
  return std::norm(1.0 - g * hp) + std::norm(g) * interference;
}

MmseValues mmse_values(const LinkPowers& lp) {
  return {lp.I_c / lp.T_c, lp.I / lp.T};
}

double mmse_weight(double eps, WeightScaling scaling) {
  return scaling == WeightScaling::kPlain ? 1.0 / eps
                                          : 1.0 / (eps * std::numbers::ln2);
}

double wmmse_offset(WeightScaling scaling) {
  if (scaling == WeightScaling::kPlain) return 1.0;
  return 1.0 / std::numbers::ln2 + std::log2(std::numbers::ln2);
}

double augmented_wmse(double u, double eps) { return u * eps - std::log2(u); }

WmmseIdentity rate_wmmse_identity_check(const Eigen::Ref<const CVec>& h,
                                        const Precoder& P, double sigma_n2,
                                        int k) {
  const LinkPowers lp = link_powers(h, P, sigma_n2, k);
  const Equalizers g = mmse_equalizers(lp);
  const SinrRate rates = sinr_and_rate(lp);
  const double eps_c = mse_split(g.g_c, lp.hp_c, lp.I_c);
  const double eps = mse_split(g.g, lp.hp, lp.I);
  WmmseIdentity out;
  out.xi_c_min = augmented_wmse(1.0 / eps_c, eps_c);
  out.xi_min = augmented_wmse(1.0 / eps, eps);
  out.R_c = rates.R_c;
  out.R = rates.R;
  const double dc = std::abs(out.xi_c_min - (1.0 - rates.R_c));
  const double dp = std::abs(out.xi_min - (1.0 - rates.R));
  if (!(dc < 1e-9) || !(dp < 1e-9)) {
    std::ostringstream msg;
    msg << "rate-WMMSE identity violated for user " << k << ": |dxi_c|=" << dc
        << " |dxi|=" << dp;
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace rsopt
