#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "rsopt/errors.hpp"
#include "rsopt/qcqp_solver.hpp"

using namespace rsopt;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

SafBundle hand_bundle(const CMat& Psi, const CVec& f, const CMat& Psi_c, const CVec& f_c) {
  SafBundle s;
  s.Psi = Psi;
  s.f = f;
  s.Psi_c = Psi_c;
  s.f_c = f_c;
  s.t = 0.5;
  s.t_c = 0.25;
  s.u = 2.0;
  s.u_c = 1.5;
  s.ups = 1.0;
  s.ups_c = std::log2(1.5);
  return s;
}

CMat psd(int n, Rng& rng, double ridge) {
  const CMat A = rng.complex_normal_matrix(n, n);
  return A * A.adjoint() + ridge * CMat::Identity(n, n);
}

class StructureTest : public ::testing::TestWithParam<CommonStructure> {};

}  // namespace

TEST(Qcqp, ZeroLinearTermsGiveZeroPrecoder) {
  for (CommonStructure st :
       {CommonStructure::kNone, CommonStructure::kEpigraph, CommonStructure::kSharedSplit}) {
    QcqpProblem prob = oracle::random_problem(2, 3, 20, 15.0, st, 4);
    for (SafBundle& s : prob.users) {
      s.f.setZero();
      s.f_c.setZero();
    }
    const QcqpSolution sol = solve_precoder_update(prob);
    ASSERT_TRUE(sol.certified()) << to_string(sol.status);
    EXPECT_LT(sol.P.power(), 1e-8 * prob.Pt);
    const UserAwmse at0 = evaluate_user_awmse(prob, Precoder::zeros(3, 2));
    double expect = 0.0;
    for (int k = 0; k < 2; ++k) expect += prob.weight(k) * at0.q(k);
    if (st == CommonStructure::kEpigraph) expect += at0.c.maxCoeff();
    if (st == CommonStructure::kSharedSplit) {
      // C may grow until some c_k + sum C hits the budget; all of it goes to
      // the heaviest user.
      const double room = prob.common_budget - at0.c.maxCoeff();
      if (room > 0.0) expect -= prob.weights.maxCoeff() * room;
    }
    EXPECT_LT(rel(sol.objective, expect), 1e-7);
  }
}

TEST(Qcqp, SingleUserInteriorClosedForm) {
  Rng rng(7);
  const CMat Psi = psd(2, rng, 0.5);
  const CMat Psi_c = psd(2, rng, 0.5);
  const CVec f = rng.complex_normal_matrix(2, 1).col(0);
  const CVec f_c = rng.complex_normal_matrix(2, 1).col(0);
  QcqpProblem prob;
  prob.users.push_back(hand_bundle(Psi, f, Psi_c, f_c));
  prob.Pt = 1e6;

  prob.structure = CommonStructure::kNone;
  QcqpSolution sol = solve_precoder_update(prob);
  ASSERT_TRUE(sol.certified());
  const CVec p = Psi.ldlt().solve(f);
  EXPECT_LT((sol.P.priv.col(0) - p).norm(), 1e-7 * (1.0 + p.norm()));

  prob.structure = CommonStructure::kEpigraph;
  sol = solve_precoder_update(prob);
  ASSERT_TRUE(sol.certified());
  const CVec pc = Psi_c.ldlt().solve(f_c);
  const CVec p1 = CMat(Psi + Psi_c).ldlt().solve(f);
  EXPECT_LT((sol.P.common - pc).norm(), 1e-7 * (1.0 + pc.norm()));
  EXPECT_LT((sol.P.priv.col(0) - p1).norm(), 1e-7 * (1.0 + p1.norm()));
}

TEST(Qcqp, NoRsMatchesClosedForm) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const int K = 1 + static_cast<int>(seed % 3);
    const QcqpProblem prob =
        oracle::random_problem(K, K + 1, 30, 10.0 + 2.5 * seed, CommonStructure::kNone, seed);
    const QcqpSolution sol = solve_precoder_update(prob);
    ASSERT_TRUE(sol.certified());
    const Precoder ref = oracle::nors_closed_form(prob);
    EXPECT_LT(rel(sol.objective, qcqp_objective(prob, ref)), 1e-7) << "seed " << seed;
    EXPECT_LT((sol.P.priv - ref.priv).norm() / std::sqrt(prob.Pt), 1e-5) << "seed " << seed;
  }
}

TEST_P(StructureTest, MatchesIndependentOracle) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const int K = 2 + static_cast<int>(seed % 2);
    const QcqpProblem prob =
        oracle::random_problem(K, K + static_cast<int>(seed % 2), 25, 5.0 + 5.0 * seed, GetParam(), seed);
    const QcqpSolution sol = solve_precoder_update(prob);
    ASSERT_TRUE(sol.certified()) << "seed " << seed;
    const oracle::QcqpOracleResult ref = oracle::solve_qcqp_alm(prob);
    EXPECT_LT(ref.max_violation, 1e-7);
    EXPECT_LT(rel(sol.objective, ref.objective), 1e-6) << "seed " << seed;
    // objective reported by the solver agrees with a direct expansion
    EXPECT_LT(rel(sol.objective, oracle::direct_objective(prob, sol.P, sol.xi_c, sol.split)), 1e-9);
    EXPECT_LT(check_kkt(prob, sol).max(), 1e-6) << "seed " << seed;
    EXPECT_TRUE(sol.P.feasible(prob.Pt, 1e-9));
  }
}

INSTANTIATE_TEST_SUITE_P(AllStructures, StructureTest,
                         ::testing::Values(CommonStructure::kNone, CommonStructure::kEpigraph,
                                           CommonStructure::kSharedSplit));

TEST(Qcqp, FeasiblePerturbationsDoNotImprove) {
  Rng rng(99);
  for (CommonStructure st : {CommonStructure::kNone, CommonStructure::kEpigraph}) {
    const QcqpProblem prob = oracle::random_problem(2, 3, 30, 20.0, st, 12);
    const QcqpSolution sol = solve_precoder_update(prob);
    ASSERT_TRUE(sol.certified());
    const double best = qcqp_objective(prob, sol.P);
    for (int trial = 0; trial < 200; ++trial) {
      Precoder Q = sol.P;
      const double step = std::sqrt(prob.Pt) * std::pow(10.0, -1.0 - trial % 5);
      Q.priv += step * rng.complex_normal_matrix(3, 2);
      if (st != CommonStructure::kNone) Q.common += step * rng.complex_normal_matrix(3, 1).col(0);
      Q = Q.projected(prob.Pt);
      EXPECT_GE(qcqp_objective(prob, Q), best - 1e-9 * (1.0 + std::abs(best)));
    }
  }
}

TEST(Qcqp, ObjectiveIsConvexAlongSegments) {
  Rng rng(5);
  const QcqpProblem prob = oracle::random_problem(3, 3, 20, 20.0, CommonStructure::kEpigraph, 3);
  for (int trial = 0; trial < 100; ++trial) {
    Precoder A = Precoder::zeros(3, 3), B = Precoder::zeros(3, 3);
    A.priv = 5.0 * rng.complex_normal_matrix(3, 3);
    B.priv = 5.0 * rng.complex_normal_matrix(3, 3);
    A.common = 5.0 * rng.complex_normal_matrix(3, 1).col(0);
    B.common = 5.0 * rng.complex_normal_matrix(3, 1).col(0);
    Precoder mid = A;
    mid.priv = 0.5 * (A.priv + B.priv);
    mid.common = 0.5 * (A.common + B.common);
    const double fa = qcqp_objective(prob, A), fb = qcqp_objective(prob, B);
    EXPECT_LE(qcqp_objective(prob, mid), 0.5 * (fa + fb) + 1e-9 * (std::abs(fa) + std::abs(fb)));
  }
}

TEST(Qcqp, UnitaryRotationOfTheData) {
  Rng rng(6);
  const QcqpProblem prob = oracle::random_problem(2, 3, 20, 25.0, CommonStructure::kEpigraph, 8);
  const Eigen::HouseholderQR<CMat> qr(rng.complex_normal_matrix(3, 3));
  const CMat U = qr.householderQ();
  QcqpProblem rot = prob;
  for (SafBundle& s : rot.users) {
    s.Psi = U * s.Psi * U.adjoint();
    s.Psi_c = U * s.Psi_c * U.adjoint();
    s.f = U * s.f;
    s.f_c = U * s.f_c;
  }
  const QcqpSolution a = solve_precoder_update(prob);
  const QcqpSolution b = solve_precoder_update(rot);
  ASSERT_TRUE(a.certified() && b.certified());
  EXPECT_LT(rel(a.objective, b.objective), 1e-8);
  EXPECT_LT((U * a.P.priv - b.P.priv).norm() / std::sqrt(prob.Pt), 1e-4);
}

TEST(Qcqp, WarmStartDoesNotChangeTheOptimum) {
  const QcqpProblem prob = oracle::random_problem(3, 4, 20, 30.0, CommonStructure::kEpigraph, 21);
  const QcqpSolution cold = solve_precoder_update(prob);
  Precoder warm = Precoder::zeros(4, 3);
  warm.priv.setConstant(Complex(100.0, 0.0));
  const QcqpSolution hot = solve_precoder_update(prob, warm);
  ASSERT_TRUE(cold.certified() && hot.certified());
  EXPECT_LT(rel(cold.objective, hot.objective), 1e-8);
}

TEST(Qcqp, ProblemRoundTripsThroughText) {
  const QcqpProblem prob =
      oracle::random_problem(2, 3, 10, 20.0, CommonStructure::kSharedSplit, 5);
  std::stringstream ss;
  write_problem(ss, prob);
  const QcqpProblem back = read_problem(ss);
  ASSERT_EQ(back.num_users(), 2);
  EXPECT_EQ(back.structure, prob.structure);
  EXPECT_EQ(back.Pt, prob.Pt);
  EXPECT_EQ(back.common_budget, prob.common_budget);
  EXPECT_EQ(back.weights, prob.weights);
  for (int k = 0; k < 2; ++k) {
    const SafBundle& x = prob.users[static_cast<std::size_t>(k)];
    const SafBundle& y = back.users[static_cast<std::size_t>(k)];
    EXPECT_EQ(x.Psi, y.Psi);
    EXPECT_EQ(x.Psi_c, y.Psi_c);
    EXPECT_EQ(x.f, y.f);
    EXPECT_EQ(x.f_c, y.f_c);
    EXPECT_EQ(x.t, y.t);
    EXPECT_EQ(x.ups_c, y.ups_c);
  }
}

TEST(Qcqp, RejectsIndefiniteData) {
  QcqpProblem prob = oracle::random_problem(2, 2, 5, 10.0, CommonStructure::kNone, 2);
  prob.users[0].Psi(0, 0) = -1.0;
  EXPECT_THROW(solve_precoder_update(prob), NumericalError);
}
