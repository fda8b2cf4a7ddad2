#include <gtest/gtest.h>

#include <cmath>

#include "rsopt/errors.hpp"
#include "rsopt/qcqp_solver.hpp"
#include "rsopt/saa_engine.hpp"

using namespace rsopt;

namespace {

ConditionalSample scalar_sample(std::initializer_list<double> hs) {
  ConditionalSample s;
  for (double h : hs) s.realizations.push_back(CMat::Constant(1, 1, Complex(h, 0.0)));
  return s;
}

Precoder random_precoder(int Nt, int K, Rng& rng) {
  Precoder P = Precoder::zeros(Nt, K);
  P.common = rng.complex_normal_matrix(Nt, 1).col(0);
  P.priv = rng.complex_normal_matrix(Nt, K);
  return P;
}

double rel_diff(const CMat& a, const CMat& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(SaaEngine, HandComputedTwoRealizations) {
  // Nt = K = 1, h in {1, 2}, p_c = p_1 = 1, sigma^2 = 1, u = 1/eps.
  const ConditionalSample s = scalar_sample({1.0, 2.0});
  Precoder P = Precoder::zeros(1, 1);
  P.common(0) = 1.0;
  P.priv(0, 0) = 1.0;
  const SampledEqualizers eq = update_equalizers_weights(s, P, 1.0, WeightScaling::kPlain);
  EXPECT_NEAR(eq.g(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(eq.g_c(0, 1).real(), 2.0 / 9.0, 1e-15);
  EXPECT_NEAR(eq.u(0, 1), 5.0, 1e-14);
  EXPECT_NEAR(eq.u_c(0, 0), 1.5, 1e-14);

  const SafBundle b = accumulate_safs(s, eq)[0];
  EXPECT_NEAR(b.t, 0.65, 1e-14);
  EXPECT_NEAR(b.t_c, 23.0 / 180.0, 1e-14);
  EXPECT_NEAR(std::abs(b.f(0) - Complex(2.5, 0.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(b.f_c(0) - Complex(0.65, 0.0)), 0.0, 1e-14);
  EXPECT_NEAR(b.Psi(0, 0).real(), 1.85, 1e-14);
  EXPECT_NEAR(b.Psi_c(0, 0).real(), 47.0 / 180.0, 1e-14);
  EXPECT_NEAR(b.u, 3.5, 1e-14);
  EXPECT_NEAR(b.u_c, 1.65, 1e-14);
  EXPECT_NEAR(b.ups, 0.5 * (1.0 + std::log2(5.0)), 1e-14);
  EXPECT_NEAR(b.ups_c, 0.5 * (std::log2(1.5) + std::log2(1.8)), 1e-14);
}

TEST(SaaEngine, ZeroPrecoderGivesUnitWeightsAndZeroForms) {
  Rng rng(1);
  const ChannelEstimate est{rng.complex_normal_matrix(3, 2), 0.1};
  const ConditionalSample s = sample_conditional(est, 7, rng);
  const SampledEqualizers eq =
      update_equalizers_weights(s, Precoder::zeros(3, 2), 1.0, WeightScaling::kPlain);
  for (const SafBundle& b : accumulate_safs(s, eq)) {
    EXPECT_EQ(b.t, 0.0);
    EXPECT_EQ(b.Psi.norm(), 0.0);
    EXPECT_EQ(b.f.norm(), 0.0);
    EXPECT_DOUBLE_EQ(b.u, 1.0);
    EXPECT_DOUBLE_EQ(b.u_c, 1.0);
    EXPECT_DOUBLE_EQ(b.ups, 0.0);
  }
}

TEST(SaaEngine, SingleRealizationReducesToDeterministicForms) {
  Rng rng(2);
  const CMat H = rng.complex_normal_matrix(3, 2);
  ConditionalSample s;
  s.realizations.push_back(H);
  const Precoder P = random_precoder(3, 2, rng);
  const SampledEqualizers eq = update_equalizers_weights(s, P, 1.0, WeightScaling::kExact);
  const std::vector<SafBundle> b = accumulate_safs(s, eq);
  for (int k = 0; k < 2; ++k) {
    const CVec h = H.col(k);
    const Equalizers g = mmse_equalizers(h, P, 1.0, k);
    const MmseValues e = mmse_values(link_powers(h, P, 1.0, k));
    const double u = mmse_weight(e.eps, WeightScaling::kExact);
    const double t = u * std::norm(g.g);
    const SafBundle& bk = b[static_cast<std::size_t>(k)];
    EXPECT_NEAR(bk.t, t, 1e-13 * t);
    EXPECT_LT(rel_diff(bk.Psi, t * h * h.adjoint()), 1e-13);
    EXPECT_LT(rel_diff(bk.f, u * std::conj(g.g) * h), 1e-13);
    EXPECT_NEAR(bk.ups, std::log2(u), 1e-13);
  }
}

TEST(SaaEngine, QuadraticFormsArePsdAndHermitian) {
  Rng rng(3);
  const ChannelEstimate est{rng.complex_normal_matrix(4, 3), 0.2};
  const ConditionalSample s = sample_conditional(est, 50, rng);
  const Precoder P = random_precoder(4, 3, rng);
  const SampledEqualizers eq = update_equalizers_weights(s, P, 1.0);
  for (const SafBundle& b : accumulate_safs(s, eq)) {
    for (const CMat* A : {&b.Psi, &b.Psi_c}) {
      EXPECT_EQ((*A - A->adjoint()).norm(), 0.0);
      Eigen::SelfAdjointEigenSolver<CMat> es(*A);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12 * es.eigenvalues().maxCoeff());
    }
  }
}

TEST(SaaEngine, QuadraticExpansionMatchesPerRealizationAverage) {
  // The SAF quadratic evaluated at any precoder equals the sample mean of
  // u * eps(g) - log2(u) with equalizers frozen.
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const ChannelEstimate est{rng.complex_normal_matrix(3, 3), 0.3};
    const ConditionalSample s = sample_conditional(est, 40, rng);
    const Precoder P0 = random_precoder(3, 3, rng);
    const SampledEqualizers eq = update_equalizers_weights(s, P0, 1.7, WeightScaling::kExact);
    QcqpProblem prob;
    prob.users = accumulate_safs(s, eq);
    prob.sigma_n2 = 1.7;
    const Precoder P1 = random_precoder(3, 3, rng);
    for (const Precoder* P : {&P0, &P1}) {
      const UserAwmse a = evaluate_user_awmse(prob, *P);
      const SampledAwmse d = sampled_awmse(s, eq, *P, 1.7);
      for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(a.q(k), d.xi(k), 1e-11 * (1.0 + std::abs(d.xi(k))));
        EXPECT_NEAR(a.c(k), d.xi_c(k), 1e-11 * (1.0 + std::abs(d.xi_c(k))));
      }
    }
  }
}

TEST(SaaEngine, SampledRatesStabilizeWithM) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Rng rng(seed);
    const ChannelEstimate est{rng.complex_normal_matrix(2, 2), 0.1};
    const Precoder P = random_precoder(2, 2, rng);
    Rng r1(100 + seed), r2(200 + seed);
    const SampledRates a = average_rates(sample_conditional(est, 10000, r1), P, 1.0);
    const SampledRates b = average_rates(sample_conditional(est, 100000, r2), P, 1.0);
    for (int k = 0; k < 2; ++k) {
      EXPECT_LT(std::abs(a.R(k) / b.R(k) - 1.0), 0.01) << "seed " << seed;
      EXPECT_LT(std::abs(a.R_c(k) / b.R_c(k) - 1.0), 0.01) << "seed " << seed;
    }
  }
}

TEST(SaaEngine, PerRealizationIdentity) {
  Rng rng(6);
  const ChannelEstimate est{rng.complex_normal_matrix(3, 3), 0.2};
  const ConditionalSample s = sample_conditional(est, 30, rng);
  const Precoder P = random_precoder(3, 3, rng);
  const SampledEqualizers eq = update_equalizers_weights(s, P, 1.0, WeightScaling::kPlain);
  for (int m = 0; m < s.size(); ++m) {
    ConditionalSample one;
    one.realizations.push_back(s[m]);
    const SampledEqualizers e1 = update_equalizers_weights(one, P, 1.0, WeightScaling::kPlain);
    const SampledAwmse xi = sampled_awmse(one, e1, P, 1.0);
    const SampledRates r = average_rates(one, P, 1.0);
    for (int k = 0; k < 3; ++k) {
      EXPECT_EQ(e1.g(k, 0), eq.g(k, m));
      EXPECT_EQ(e1.u_c(k, 0), eq.u_c(k, m));
      EXPECT_NEAR(xi.xi(k), 1.0 - r.R(k), 1e-9);
      EXPECT_NEAR(xi.xi_c(k), 1.0 - r.R_c(k), 1e-9);
    }
  }
}

TEST(SaaEngine, AverageRatesAndStandardErrors) {
  const ConditionalSample s = scalar_sample({1.0, std::sqrt(3.0)});
  Precoder P = Precoder::zeros(1, 1);
  P.priv(0, 0) = 1.0;
  const SampledRates r = average_rates(s, P, 1.0);
  EXPECT_NEAR(r.R(0), 1.5, 1e-14);                    // mean of log2(2), log2(4)
  EXPECT_NEAR(r.R_se(0), 0.5, 1e-14);                 // sd 1/sqrt(2), over sqrt(2)
  EXPECT_EQ(r.R_c(0), 0.0);
  EXPECT_NEAR(r.asr(), 1.5, 1e-14);
}

TEST(SaaEngine, ShapeMismatchThrows) {
  ConditionalSample s;
  EXPECT_THROW(update_equalizers_weights(s, Precoder::zeros(2, 2), 1.0), DimensionError);
  s.realizations.push_back(CMat::Ones(3, 2));
  EXPECT_THROW(update_equalizers_weights(s, Precoder::zeros(2, 2), 1.0), DimensionError);
}
