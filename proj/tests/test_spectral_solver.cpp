#include "kspec/errors.hpp"
#include "kspec/spectral_solver.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

using namespace kspec;
using namespace kspec::gen;

namespace {

// Independent oracle for a rectangular a x b torus: (2πm/a)² + (2πn/b)².
std::vector<double> rectangular_spectrum(double a, double b, int range) {
  std::vector<double> out;
  for (int m = -range; m <= range; ++m)
    for (int n = -range; n <= range; ++n) out.push_back(std::pow(2 * kPi * m / a, 2) + std::pow(2 * kPi * n / b, 2));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(SpectralSolver, RoundSphereSpectrum) {
  const SurfaceModel m = sphere(8);
  const SpectralData s = solve_spectrum(m, KahlerPotential::zero(m), 16);
  const double expect[] = {0, 2, 2, 2, 6, 6, 6, 6, 6, 12, 12, 12, 12, 12, 12, 12};
  EXPECT_NEAR(s.eigenvalues[0], 0.0, 1e-12);
  for (int i = 1; i < 16; ++i) EXPECT_NEAR(s.eigenvalues[i], expect[i], 1e-8 * expect[i]) << i;
}

TEST(SpectralSolver, RadiusScaling) {
  const double r = 1.7;
  const SurfaceModel m = sphere(5, r);
  const SpectralData s = solve_spectrum(m, KahlerPotential::zero(m), 9);
  EXPECT_NEAR(s.eigenvalues[1], 2.0 / (r * r), 1e-12);
  EXPECT_NEAR(s.eigenvalues[8], 6.0 / (r * r), 1e-12);
}

TEST(SpectralSolver, LowDegreeSphere) {
  const SurfaceModel m = sphere(1);
  const SpectralData s = solve_spectrum(m, KahlerPotential::zero(m), 4);
  EXPECT_NEAR(s.eigenvalues[3], 2.0, 1e-14);
}

TEST(SpectralSolver, RectangularTorusSpectrum) {
  const SurfaceModel m = torus(4, rect2_lattice());
  const SpectralData s = solve_spectrum(m, KahlerPotential::zero(m), 12);
  const std::vector<double> ref = rectangular_spectrum(2 * kPi, 4 * kPi, 4);
  for (int i = 0; i < 12; ++i) EXPECT_NEAR(s.eigenvalues[i], ref[static_cast<std::size_t>(i)], 1e-10) << i;
  EXPECT_NEAR(s.eigenvalues[1], 0.25, 1e-12);
}

TEST(SpectralSolver, EquilateralTorusFirstCluster) {
  const SurfaceModel m = torus(4, equilateral_lattice());
  const SpectralData s = solve_spectrum(m, KahlerPotential::zero(m), m.basis_size());
  const EigenspaceCluster c = cluster(s, 1);
  EXPECT_EQ(c.d, 6);
  EXPECT_NEAR(c.lambda, 4.0 / 3.0, 1e-12);
}

TEST(SpectralSolver, EigenvectorsAreMassOrthonormal) {
  Gen g(21);
  const SurfaceModel m = sphere(6);
  const SpectralData s = solve_spectrum(m, random_potential(m, g, 0.5), 20);
  const Eigen::MatrixXd G = s.eigvecs.transpose() * s.mass_matrix * s.eigvecs;
  EXPECT_LT((G - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff(), 1e-10);
  for (Eigen::Index i = 1; i < 20; ++i) EXPECT_GE(s.eigenvalues[i], s.eigenvalues[i - 1]);
}

TEST(SpectralSolver, RayleighQuotientEqualsEigenvalue) {
  Gen g(22);
  const SurfaceModel m = torus(4, square_lattice());
  const SpectralData s = solve_spectrum(m, random_potential(m, g, 0.6), 10);
  for (Eigen::Index i = 0; i < 10; ++i) {
    const Eigen::VectorXd v = s.eigvecs.col(i);
    EXPECT_NEAR(v.dot(m.stiffness_diagonal().cwiseProduct(v)), s.eigenvalues[i], 1e-10 * (1 + s.eigenvalues[i]));
  }
}

TEST(SpectralSolver, ClusterAndTrust) {
  const SurfaceModel m = sphere(4);
  const SpectralData s = solve_spectrum(m, KahlerPotential::zero(m), m.basis_size());
  const EigenspaceCluster c = cluster(s, 2);
  EXPECT_EQ(c.k, 1);
  EXPECT_EQ(c.d, 3);
  // trusted below ½·4·5 = 10: the l = 3 shell (12) is not trusted.
  EXPECT_THROW(cluster(s, 9), TrustError);
  EXPECT_THROW(cluster(s, 0), PreconditionError);
  const auto all = all_clusters(s);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[1].d, 5);
}

TEST(SpectralSolver, TruncatedListCannotCloseCluster) {
  const SurfaceModel m = sphere(8);
  const SpectralData s = solve_spectrum(m, KahlerPotential::zero(m), 3);
  EXPECT_THROW(cluster(s, 1), TrustError);
}

TEST(SpectralSolver, RejectsBadRequests) {
  const SurfaceModel m = sphere(2);
  EXPECT_THROW(solve_spectrum(m, KahlerPotential::zero(m), 0), PreconditionError);
  EXPECT_THROW(solve_spectrum(m, KahlerPotential::zero(m), 10), PreconditionError);
  KahlerPotential bad = KahlerPotential::zero(m);
  bad.coeffs[0] = 100.0;
  EXPECT_THROW(solve_spectrum(m, bad, 4), NotPositiveError);
}

TEST(SpectralSolver, ScaleInvarianceOfLambdaTimesArea) {
  // λ_k · Area is invariant under homothety of the background.
  Gen g(23);
  const SurfaceModel a = sphere(5, 1.0), b = sphere(5, 2.5);
  const KahlerPotential phi_a = random_potential(a, g, 0.4);
  // The same potential scaled by r² gives the same conformal factor.
  const KahlerPotential phi_b{phi_a.coeffs * 2.5 * 2.5 * 2.5};
  const SpectralData sa = solve_spectrum(a, phi_a, 10), sb = solve_spectrum(b, phi_b, 10);
  for (Eigen::Index i = 1; i < 10; ++i)
    EXPECT_NEAR(sa.eigenvalues[i] * a.area(), sb.eigenvalues[i] * b.area(), 1e-9 * sa.eigenvalues[i] * a.area());
}
