#include "exmerit/penalty.hpp"

#include <gtest/gtest.h>

#include <random>

#include "exmerit/problems.hpp"
#include "test_util.hpp"

namespace {

using exmerit::ExtReal;
using exmerit::PenaltyEval;
using exmerit::SingularPenaltyProblem;

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

TEST(EvalPenaltyTest, HandValue) {
  const SingularPenaltyProblem problem =
      exmerit::registry_get_penalty("eq-linear");
  // x=1, p=0.5, c=2: 1 + (2/0.5)(1 - 0.5)^2 + 2*0.5 = 1 + 1 + 1 = 3.
  const PenaltyEval eval = exmerit::eval_penalty(problem, scalar(1.0), 0.5, 2.0);
  ASSERT_TRUE(eval.value.is_finite());
  EXPECT_DOUBLE_EQ(eval.value.value(), 3.0);
  EXPECT_DOUBLE_EQ(eval.components.phi_term, 1.0);
  EXPECT_DOUBLE_EQ(eval.components.omega_term, 1.0);
}

TEST(EvalPenaltyTest, FeasibleFaceReturnsObjective) {
  const SingularPenaltyProblem problem =
      exmerit::registry_get_penalty("eq-linear");
  const PenaltyEval eval = exmerit::eval_penalty(problem, scalar(0.0), 0.0, 5.0);
  ASSERT_TRUE(eval.value.is_finite());
  EXPECT_DOUBLE_EQ(eval.value.value(), 0.0);
  EXPECT_FALSE(eval.grad_x.has_value());
  EXPECT_FALSE(eval.grad_p.has_value());
}

TEST(EvalPenaltyTest, InfeasibleFaceIsInfinite) {
  const SingularPenaltyProblem problem =
      exmerit::registry_get_penalty("eq-linear");
  const PenaltyEval eval = exmerit::eval_penalty(problem, scalar(1.0), 0.0, 5.0);
  EXPECT_FALSE(eval.value.is_finite());
}

TEST(EvalPenaltyTest, RejectsBadParameters) {
  const SingularPenaltyProblem problem =
      exmerit::registry_get_penalty("eq-linear");
  EXPECT_THROW(exmerit::eval_penalty(problem, scalar(0.0), -0.1, 1.0),
               std::invalid_argument);
  EXPECT_THROW(exmerit::eval_penalty(problem, scalar(0.0), 0.5, 0.0),
               std::invalid_argument);
}

TEST(EvalPenaltyTest, GradientMatchesFiniteDifferences) {
  const SingularPenaltyProblem problem =
      exmerit::registry_get_penalty("eq-linear");
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> xd(-2.0, 2.0);
  std::uniform_real_distribution<double> pd(0.1, 1.0);
  std::uniform_real_distribution<double> cd(0.5, 20.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd x = scalar(xd(rng));
    const double p = pd(rng);
    const double c = cd(rng);
    const PenaltyEval eval = exmerit::eval_penalty(problem, x, p, c, true);
    ASSERT_TRUE(eval.grad_x.has_value());
    ASSERT_TRUE(eval.grad_p.has_value());

    const double h = 1e-6;
    const auto at = [&](double xx, double pp) {
      return exmerit::eval_penalty(problem, scalar(xx), pp, c).value.value();
    };
    const double fd_x = (at(x(0) + h, p) - at(x(0) - h, p)) / (2.0 * h);
    const double fd_p = (at(x(0), p + h) - at(x(0), p - h)) / (2.0 * h);
    EXPECT_NEAR((*eval.grad_x)(0), fd_x, 1e-4 * std::max(1.0, std::abs(fd_x)));
    EXPECT_NEAR(*eval.grad_p, fd_p, 1e-4 * std::max(1.0, std::abs(fd_p)));
  }
}

TEST(EvalPenaltyTest, DominatesObjectiveEverywhere) {
  const SingularPenaltyProblem problem =
      exmerit::registry_get_penalty("eq-linear");
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> xd(-3.0, 3.0);
  std::uniform_real_distribution<double> pd(0.0, 2.0);
  std::uniform_real_distribution<double> cd(0.01, 100.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd x = scalar(xd(rng));
    const ExtReal value =
        exmerit::eval_penalty(problem, x, pd(rng), cd(rng)).value;
    const ExtReal fx = problem.objective(x);
    EXPECT_TRUE(fx <= value);
  }
}

TEST(EvalPenaltyTest, NondecreasingInC) {
  const SingularPenaltyProblem problem =
      exmerit::registry_get_penalty("eq-linear");
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> xd(-2.0, 2.0);
  std::uniform_real_distribution<double> pd(0.05, 1.5);
  std::uniform_real_distribution<double> cd(0.01, 50.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::VectorXd x = scalar(xd(rng));
    const double p = pd(rng);
    double c1 = cd(rng);
    double c2 = cd(rng);
    if (c1 > c2) std::swap(c1, c2);
    const double v1 = exmerit::eval_penalty(problem, x, p, c1).value.value();
    const double v2 = exmerit::eval_penalty(problem, x, p, c2).value.value();
    EXPECT_LE(v1, v2 + 1e-12);
  }
}

TEST(GrowthConditionsTest, IdentityHasUnitSlope) {
  const SingularPenaltyProblem problem =
      exmerit::registry_get_penalty("eq-linear");
  const auto report = exmerit::check_growth_conditions(problem, 1.0, 64);
  EXPECT_DOUBLE_EQ(report.phi.slope, 1.0);
  EXPECT_DOUBLE_EQ(report.omega.slope, 1.0);
  EXPECT_TRUE(report.phi.has_linear_minorant);
  EXPECT_TRUE(report.omega.has_linear_minorant);
}

TEST(GrowthConditionsTest, QuadraticShapeHasNoLinearMinorant) {
  SingularPenaltyProblem problem = exmerit::registry_get_penalty("eq-linear");
  problem.phi = {[](double t) { return t * t; },
                 [](double t) { return 2.0 * t; }};
  const auto report = exmerit::check_growth_conditions(problem, 1.0, 64);
  // phi(t)/t = t -> 0 near zero: no linear minorant on the sample.
  EXPECT_FALSE(report.phi.has_linear_minorant);
  EXPECT_TRUE(report.omega.has_linear_minorant);
}

TEST(GrowthConditionsTest, AffinePlusQuadraticSlope) {
  SingularPenaltyProblem problem = exmerit::registry_get_penalty("eq-linear");
  problem.phi = {[](double t) { return 2.0 * t + t * t; },
                 [](double t) { return 2.0 + 2.0 * t; }};
  const auto report = exmerit::check_growth_conditions(problem, 1.0, 64);
  EXPECT_GE(report.phi.slope, 2.0);
  EXPECT_LE(report.phi.slope, 2.0 + 1e-6);
}

TEST(LimitConsistencyTest, FeasiblePointConverges) {
  const SingularPenaltyProblem problem =
      exmerit::registry_get_penalty("eq-linear");
  // F(0, p, c) = (c/p) p^2 + c p = 2 c p -> 0 = f(0).
  std::vector<double> seq;
  for (double p = 0.5; p > 1e-6; p *= 0.5) seq.push_back(p);
  const auto report = exmerit::limit_consistency(problem, scalar(0.0), 2.0, seq);
  ASSERT_TRUE(report.face_value.is_finite());
  EXPECT_DOUBLE_EQ(report.face_value.value(), 0.0);
  EXPECT_EQ(report.verdict, exmerit::LimitVerdict::converges);
  EXPECT_NEAR(report.values.front().value(), 2.0 * 2.0 * 0.5, 1e-12);
}

TEST(LimitConsistencyTest, InfeasiblePointDiverges) {
  const SingularPenaltyProblem problem =
      exmerit::registry_get_penalty("eq-linear");
  std::vector<double> seq;
  for (double p = 0.5; p > 1e-6; p *= 0.5) seq.push_back(p);
  const auto report = exmerit::limit_consistency(problem, scalar(1.0), 2.0, seq);
  EXPECT_FALSE(report.face_value.is_finite());
  EXPECT_EQ(report.verdict, exmerit::LimitVerdict::diverges);
}

TEST(LimitConsistencyTest, FixedPositivePIsSmoke) {
  const SingularPenaltyProblem problem =
      exmerit::registry_get_penalty("eq-linear");
  const auto report =
      exmerit::limit_consistency(problem, scalar(0.7), 1.0, {0.3});
  ASSERT_EQ(report.values.size(), 1u);
  EXPECT_TRUE(report.values[0].is_finite());
}

TEST(LimitConsistencyTest, RejectsNonDecreasingSequence) {
  const SingularPenaltyProblem problem =
      exmerit::registry_get_penalty("eq-linear");
  EXPECT_THROW(
      exmerit::limit_consistency(problem, scalar(0.0), 1.0, {0.1, 0.2}),
      std::invalid_argument);
  EXPECT_THROW(
      exmerit::limit_consistency(problem, scalar(0.0), 1.0, {0.1, 0.0}),
      std::invalid_argument);
}

}  // namespace
