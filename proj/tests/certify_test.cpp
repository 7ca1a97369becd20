#include "exmerit/certify.hpp"

#include <gtest/gtest.h>

#include <random>

#include "exmerit/problems.hpp"
#include "exmerit/solver.hpp"
#include "test_util.hpp"

namespace {

using exmerit::ExtendedPoint;
using exmerit::NlsdpProblem;
using exmerit::NondegeneracyReport;
using exmerit::SoscVerdict;
using exmerit::SymMatrix;

ExtendedPoint scalar_point(double x, double lambda) {
  ExtendedPoint pt;
  pt.x = Eigen::VectorXd::Constant(1, x);
  pt.lambda = SymMatrix::diagonal(Eigen::VectorXd::Constant(1, lambda));
  pt.mu = Eigen::VectorXd(0);
  return pt;
}

TEST(KktCheckTest, KktPointHasVanishingResiduals) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("scalar-lmi");
  const exmerit::KktReport r =
      exmerit::kkt_check(problem, scalar_point(0.0, 1.0));
  EXPECT_LE(r.eta, 1e-12);
  EXPECT_LE(r.stationarity, 1e-12);
  EXPECT_LE(r.complementarity, 1e-12);
  EXPECT_LE(r.feas_sdp, 1e-12);
  EXPECT_TRUE(r.lambda_psd);
  EXPECT_TRUE(exmerit::kkt_passes(r, 1e-8));
}

TEST(KktCheckTest, StationarityResidualAtInteriorPoint) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("scalar-lmi");
  const exmerit::KktReport r =
      exmerit::kkt_check(problem, scalar_point(0.5, 0.5));
  EXPECT_DOUBLE_EQ(r.stationarity, 0.5);  // |1 - lambda|
  EXPECT_FALSE(exmerit::kkt_passes(r, 1e-8));
}

TEST(KktCheckTest, UnconstrainedStationaryPoint) {
  const NlsdpProblem problem = exmerit::test::make_unconstrained_quadratic();
  ExtendedPoint pt;
  pt.x = Eigen::VectorXd::Zero(2);
  pt.mu = Eigen::VectorXd(0);
  const exmerit::KktReport r = exmerit::kkt_check(problem, pt);
  EXPECT_DOUBLE_EQ(r.eta, 0.0);
  EXPECT_DOUBLE_EQ(r.feas_sdp, 0.0);
  EXPECT_DOUBLE_EQ(r.feas_eq, 0.0);
}

TEST(NondegeneracyTest, ScalarLmiIsNondegenerate) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("scalar-lmi");
  const NondegeneracyReport r =
      exmerit::nondegeneracy_test(problem, Eigen::VectorXd::Zero(1));
  EXPECT_TRUE(r.nondegenerate);
  EXPECT_EQ(r.constraint_rank, 0);
  EXPECT_EQ(r.vectors_required, 1);
  // Single test vector v_11 = (-1): smallest singular value 1.
  EXPECT_NEAR(r.sigma_min, 1.0, 1e-12);
}

TEST(NondegeneracyTest, Diag2FailsByCounting) {
  const NlsdpProblem problem =
      exmerit::registry_get_nlsdp("diag2-degenerate");
  const NondegeneracyReport r =
      exmerit::nondegeneracy_test(problem, Eigen::VectorXd::Zero(2));
  EXPECT_FALSE(r.nondegenerate);
  EXPECT_TRUE(r.count_exceeds_dim);
  EXPECT_EQ(r.vectors_required, 3);  // 3 vectors in R^2
}

TEST(NondegeneracyTest, EqualityOnlyProblem) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("eq-quadratic");
  const NondegeneracyReport r =
      exmerit::nondegeneracy_test(problem, Eigen::VectorXd::Ones(1));
  EXPECT_TRUE(r.nondegenerate);
  EXPECT_EQ(r.vectors_required, 1);  // grad h only
  EXPECT_NEAR(r.sigma_min, 1.0, 1e-12);
}

TEST(NondegeneracyTest, NearestCorrSolutionIsNondegenerate) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("nearest-corr-2");
  const NondegeneracyReport r = exmerit::nondegeneracy_test(
      problem, problem.known_solutions[0].x);
  EXPECT_TRUE(r.nondegenerate);
  EXPECT_EQ(r.constraint_rank, 1);
  EXPECT_EQ(r.vectors_required, 3);  // one v_11 plus two equality gradients
}

TEST(NondegeneracyTest, VerdictStableAcrossRankTol) {
  const NlsdpProblem lmi = exmerit::registry_get_nlsdp("scalar-lmi");
  const NlsdpProblem diag2 = exmerit::registry_get_nlsdp("diag2-degenerate");
  for (double rank_tol : {1e-12, 1e-9, 1e-6}) {
    EXPECT_TRUE(exmerit::nondegeneracy_test(lmi, Eigen::VectorXd::Zero(1),
                                            rank_tol)
                    .nondegenerate);
    EXPECT_FALSE(exmerit::nondegeneracy_test(diag2, Eigen::VectorXd::Zero(2),
                                             rank_tol)
                     .nondegenerate);
  }
}

TEST(NondegeneracyTest, InvariantUnderBasisReorthonormalization) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("nearest-corr-2");
  const Eigen::VectorXd x_star = problem.known_solutions[0].x;
  const exmerit::NullBasis nb =
      exmerit::null_basis(problem.constraint(x_star), 1e-9);
  ASSERT_EQ(nb.basis.cols(), 1);

  std::mt19937 rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    // Any re-orthonormalization of a 1-dimensional null space is a sign flip;
    // also exercise a rotated 2-dimensional basis on diag2-degenerate below.
    const double sign = (rng() % 2 == 0) ? 1.0 : -1.0;
    const auto r = exmerit::detail::nondegeneracy_with_basis(
        problem, x_star, sign * nb.basis, nb.rank, 1e-9);
    EXPECT_TRUE(r.nondegenerate);
    EXPECT_NEAR(r.sigma_min,
                exmerit::nondegeneracy_test(problem, x_star).sigma_min, 1e-9);
  }

  const NlsdpProblem diag2 = exmerit::registry_get_nlsdp("diag2-degenerate");
  std::uniform_real_distribution<double> angle(0.0, 6.28318);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = angle(rng);
    Eigen::MatrixXd rotated(2, 2);
    rotated << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    const auto r = exmerit::detail::nondegeneracy_with_basis(
        diag2, Eigen::VectorXd::Zero(2), rotated, 0, 1e-9);
    EXPECT_FALSE(r.nondegenerate);
  }
}

TEST(SoscTest, ScalarLmiConeIsTrivial) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("scalar-lmi");
  const exmerit::SoscReport r =
      exmerit::sosc_check(problem, problem.known_solutions[0]);
  EXPECT_EQ(r.verdict, SoscVerdict::pass_vacuous);
  EXPECT_EQ(r.equality_null_dim, 0);  // grad f = 1 annihilates R^1
  EXPECT_EQ(r.method, "sampled");
}

TEST(SoscTest, EqQuadraticConeIsTrivial) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("eq-quadratic");
  const exmerit::SoscReport r =
      exmerit::sosc_check(problem, problem.known_solutions[0]);
  EXPECT_EQ(r.verdict, SoscVerdict::pass_vacuous);
  EXPECT_DOUBLE_EQ(r.theta(0, 0), 2.0);  // hess f; equality is affine
}

TEST(SoscTest, BoxQpPassesWithIdentityScaledTheta) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("box-qp-sdp");
  const exmerit::SoscReport r =
      exmerit::sosc_check(problem, problem.known_solutions[0]);
  EXPECT_EQ(r.verdict, SoscVerdict::pass);
  EXPECT_GT(r.directions_tested, 0);
  EXPECT_NEAR(r.min_curvature, 2.0, 1e-9);
  EXPECT_LE((r.theta - 2.0 * Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-9);
}

TEST(SoscTest, VerdictStableAcrossRankTol) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("scalar-lmi");
  for (double rank_tol : {1e-12, 1e-9, 1e-6}) {
    const exmerit::SoscReport r = exmerit::sosc_check(
        problem, problem.known_solutions[0], 1e-8, 64, 0, rank_tol);
    EXPECT_EQ(r.verdict, SoscVerdict::pass_vacuous);
  }
}

TEST(SoscTest, RejectsNonKktPoint) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("scalar-lmi");
  EXPECT_THROW(exmerit::sosc_check(problem, scalar_point(0.5, 0.5)),
               std::invalid_argument);
}

TEST(MultiplierUniquenessTest, EtaPositiveOffTheMultiplier) {
  // Grid search around the unique multiplier of scalar-lmi: eta must be
  // strictly positive at every other grid node (spacing 0.1).
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("scalar-lmi");
  double min_off = std::numeric_limits<double>::infinity();
  for (int k = -20; k <= 20; ++k) {
    const double lambda = k * 0.1;
    if (std::abs(lambda - 1.0) < 1e-12) continue;
    min_off = std::min(min_off,
                       exmerit::eta_residual(problem, scalar_point(0.0, lambda)));
  }
  EXPECT_GE(min_off, 1e-6);
}

TEST(ExactnessSweepTest, ScalarLmiPassesAllHypotheses) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("scalar-lmi");
  const exmerit::ExactnessReport report = exmerit::exactness_sweep(
      problem, scalar_point(0.5, 0.5), exmerit::SolverConfig{});
  EXPECT_TRUE(report.trace.certified);
  EXPECT_LE(report.trace.stages.back().c, 10.0 + 1e-12);
  EXPECT_TRUE(report.minimizers_bounded);
  EXPECT_TRUE(report.cluster_feasible);
  EXPECT_TRUE(report.local_exactness);
  EXPECT_TRUE(report.all_pass());
}

TEST(ExactnessSweepTest, DegenerateProblemStillReportsFeasibility) {
  const NlsdpProblem problem =
      exmerit::registry_get_nlsdp("diag2-degenerate");
  ExtendedPoint start;
  start.x = Eigen::Vector2d(0.4, 0.6);
  start.lambda = SymMatrix::diagonal(Eigen::Vector2d(0.5, 0.5));
  start.mu = Eigen::VectorXd(0);
  const exmerit::ExactnessReport report =
      exmerit::exactness_sweep(problem, start, exmerit::SolverConfig{});
  EXPECT_FALSE(report.trace.stages.empty());
  // The rank test, not the sweep, is what flags the degeneracy.
  EXPECT_FALSE(
      exmerit::nondegeneracy_test(problem, Eigen::VectorXd::Zero(2))
          .nondegenerate);
}

TEST(ExactnessSweepTest, UnconstrainedProblemCertifiesTrivially) {
  const NlsdpProblem problem = exmerit::test::make_unconstrained_quadratic();
  ExtendedPoint start;
  start.x = Eigen::Vector2d(0.7, -0.3);
  start.mu = Eigen::VectorXd(0);
  const exmerit::ExactnessReport report =
      exmerit::exactness_sweep(problem, start, exmerit::SolverConfig{});
  EXPECT_TRUE(report.trace.certified);
  EXPECT_TRUE(report.all_pass());
}

TEST(SublevelProbeTest, ScalarLmiShowsNoCounterexample) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("scalar-lmi");
  const exmerit::SublevelReport report = exmerit::sublevel_probe(
      problem, 10.0, exmerit::Box::cube(2, 2.0), 10000, 1);
  EXPECT_EQ(report.verdict, exmerit::ProbeVerdict::no_counterexample);
  EXPECT_EQ(report.counterexample_count, 0);
}

TEST(SublevelProbeTest, DeterministicGivenSeed) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("eq-quadratic");
  const auto box = exmerit::Box::cube(2, 2.0);
  const auto r1 = exmerit::sublevel_probe(problem, 5.0, box, 2000, 42);
  const auto r2 = exmerit::sublevel_probe(problem, 5.0, box, 2000, 42);
  EXPECT_EQ(r1.verdict, r2.verdict);
  EXPECT_EQ(r1.counterexample_count, r2.counterexample_count);
}

TEST(SublevelProbeTest, FlatObjectiveWithEqualityIsDocumented) {
  // min 0 subject to x = 0: the probe reports whatever the sampling shows
  // about the multiplier directions; the result is a record, not a theorem.
  NlsdpProblem problem;
  problem.name = "flat-eq";
  problem.dim = 1;
  problem.eq_dim = 1;
  problem.objective = [](const Eigen::VectorXd&) { return 0.0; };
  problem.objective_grad = [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(1).eval();
  };
  problem.objective_hess = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(1, 1).eval();
  };
  problem.equality = [](const Eigen::VectorXd& x) { return x; };
  problem.equality_jac = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Ones(1, 1).eval();
  };
  problem.equality_hess_contracted = [](const Eigen::VectorXd&,
                                        const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(1, 1).eval();
  };
  problem.f_star = 0.0;

  const auto box = exmerit::Box::cube(2, 2.0);
  const auto r1 = exmerit::sublevel_probe(problem, 10.0, box, 5000, 3);
  const auto r2 = exmerit::sublevel_probe(problem, 10.0, box, 5000, 3);
  EXPECT_NE(r1.verdict, exmerit::ProbeVerdict::inconclusive);
  EXPECT_EQ(r1.verdict, r2.verdict);
  EXPECT_EQ(r1.counterexample_count, r2.counterexample_count);
  EXPECT_LE(r1.counterexamples.size(), 10u);
}

TEST(SublevelProbeTest, EmptyBudgetIsInconclusive) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("scalar-lmi");
  const exmerit::SublevelReport report =
      exmerit::sublevel_probe(problem, 10.0, exmerit::Box::cube(2, 2.0), 0);
  EXPECT_EQ(report.verdict, exmerit::ProbeVerdict::inconclusive);
}

TEST(SublevelProbeTest, RequiresKnownOptimalValue) {
  NlsdpProblem problem = exmerit::registry_get_nlsdp("scalar-lmi");
  problem.f_star.reset();
  EXPECT_THROW(
      exmerit::sublevel_probe(problem, 10.0, exmerit::Box::cube(2, 2.0), 10),
      std::invalid_argument);
}

TEST(CertifyPointTest, AggregatesVerdicts) {
  const NlsdpProblem problem = exmerit::registry_get_nlsdp("scalar-lmi");
  const exmerit::CertificationReport report =
      exmerit::certify_point(problem, problem.known_solutions[0]);
  EXPECT_TRUE(exmerit::kkt_passes(report.kkt, 1e-8));
  EXPECT_TRUE(report.nondegeneracy.nondegenerate);
  EXPECT_EQ(report.sosc.verdict, SoscVerdict::pass_vacuous);
}

}  // namespace
