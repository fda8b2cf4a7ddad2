#pragma once

#include "rsopt/linalg.hpp"

namespace rsopt {

enum class PrecodingMode { kRS, kNoRS };

const char* to_string(PrecodingMode mode);

/// P = [p_c, p_1, ..., p_K]. In NoRS mode the common precoder is identically
/// zero.
struct Precoder {
  CVec common;    // p_c, length Nt
  CMat priv;      // Nt x K, column k is p_k
  PrecodingMode mode = PrecodingMode::kRS;

  static Precoder zeros(int Nt, int K, PrecodingMode mode = PrecodingMode::kRS);

  int antennas() const { return static_cast<int>(priv.rows()); }
  int users() const { return static_cast<int>(priv.cols()); }

  /// tr(P P^H).
  double power() const;
  bool feasible(double Pt, double rel_tol = 1e-9) const;

  /// Scales into the power ball when tr(PP^H) exceeds Pt; drops p_c in NoRS.
  Precoder projected(double Pt) const;
};

/// Receive powers at user k for one channel state. I_c = T and T_c = S_c + T.
struct LinkPowers {
  double S_c = 0.0;
  double S = 0.0;
  double I = 0.0;
  double I_c = 0.0;
  double T = 0.0;
  double T_c = 0.0;
  Complex hp_c{};   // h^H p_c
  Complex hp{};     // h^H p_k
};

LinkPowers link_powers(const Eigen::Ref<const CVec>& h, const Precoder& P,
                       double sigma_n2, int k);

struct SinrRate {
  double gamma_c = 0.0;
  double gamma = 0.0;
  double R_c = 0.0;
  double R = 0.0;
};

SinrRate sinr_and_rate(const LinkPowers& lp);

struct Equalizers {
  Complex g_c{};
  Complex g{};
};

/// g_c = p_c^H h / T_c and g = p_k^H h / T.
Equalizers mmse_equalizers(const LinkPowers& lp);
Equalizers mmse_equalizers(const Eigen::Ref<const CVec>& h, const Precoder& P,
                           double sigma_n2, int k);

/// eps(g) = |g|^2 T - 2 Re{g h^H p} + 1.
double mse(Complex g, double total_power, Complex hp);
/// Same MSE written as |1 - g h^H p|^2 + |g|^2 I. Keeps full relative
/// accuracy at high SINR, where the expanded form cancels.
double mse_split(Complex g, Complex hp, double interference);

/// MMSE values I/T for both streams, in (0, 1].
struct MmseValues {
  double eps_c = 1.0;
  double eps = 1.0;
};
MmseValues mmse_values(const LinkPowers& lp);

/// How MMSE weights relate to the MMSE. kPlain drops the (ln 2)^-1 factor so
/// that u = 1/eps and the augmented minimum is exactly 1 - R. kExact keeps it,
/// u = 1/(eps ln 2), which makes u the exact minimizer of u*eps - log2(u); the
/// minimum is then c0 - R with c0 = 1/ln2 + log2(ln2).
enum class WeightScaling { kPlain, kExact };

double mmse_weight(double eps, WeightScaling scaling);
/// Value of min_{u,g} xi + R, i.e. the constant c0 of the scaling.
double wmmse_offset(WeightScaling scaling);

/// Augmented WMSE xi = u * eps - log2(u).
double augmented_wmse(double u, double eps);

struct WmmseIdentity {
  double xi_c_min = 0.0;
  double xi_min = 0.0;
  double R_c = 0.0;
  double R = 0.0;
};

/// Evaluates the augmented WMSE at g = g^MMSE, u = 1/eps^MMSE for both streams
/// of user k and checks xi = 1 - R to 1e-9. Throws NumericalError when the
/// identity fails.
WmmseIdentity rate_wmmse_identity_check(const Eigen::Ref<const CVec>& h,
                                        const Precoder& P, double sigma_n2,
                                        int k);

}  // namespace rsopt
