#include "kspec/errors.hpp"
#include "kspec/product_compose.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <map>
#include <memory>

using namespace kspec;
using namespace kspec::gen;

namespace {

AbstractSpectrum leaf(SurfaceModel m, const KahlerPotential* phi = nullptr) {
  auto model = std::make_shared<const SurfaceModel>(std::move(m));
  const KahlerPotential p = phi ? *phi : KahlerPotential::zero(*model);
  return AbstractSpectrum::surface(model, solve_spectrum(*model, p, model->basis_size()));
}

ExtremalityCertificate certify_first(const AbstractSpectrum& A) {
  const EigenspaceCluster c = cluster(*A.spectral_data(), 1);
  return certify(polarize(*A.model(), *A.spectral_data(), c));
}

}  // namespace

TEST(Product, SphereTimesSphere) {
  const AbstractSpectrum A = leaf(sphere(6));
  const AbstractSpectrum P = product_spectrum(A, A, 20);
  const auto [first, d] = product_cluster(P, 1);
  EXPECT_EQ(first, 1);
  EXPECT_EQ(d, 6);
  EXPECT_NEAR(P.eigenvalues()[1], 2.0, 1e-12);
  EXPECT_NEAR(P.area(), 16.0 * kPi * kPi, 1e-10);
}

TEST(Product, SquareTorusSquared) {
  const AbstractSpectrum A = leaf(torus(3, square_lattice()));
  const AbstractSpectrum P = product_spectrum(A, A, 20);
  const auto [first, d] = product_cluster(P, 1);
  EXPECT_EQ(d, 8);
  EXPECT_NEAR(P.eigenvalues()[first], 1.0, 1e-12);
}

TEST(Product, PointIsIdentity) {
  const AbstractSpectrum A = leaf(sphere(5));
  const AbstractSpectrum P = product_spectrum(A, AbstractSpectrum::point(), 16);
  EXPECT_TRUE(P.eigenvalues() == A.eigenvalues().head(16));
  EXPECT_EQ(P.area(), A.area());
  EXPECT_TRUE(P.values(4) == A.values(4));
}

TEST(Product, Commutative) {
  const AbstractSpectrum A = leaf(sphere(5)), B = leaf(torus(3, rect2_lattice()));
  EXPECT_TRUE(product_spectrum(A, B, 30).eigenvalues() == product_spectrum(B, A, 30).eigenvalues());
}

TEST(Product, MultiplicityCounting) {
  Gen g(81);
  const SurfaceModel mA = sphere(6);
  const KahlerPotential phi = random_potential(mA, g, 0.2, 2);
  const AbstractSpectrum A = leaf(sphere(6), &phi), B = leaf(torus(3, square_lattice()));
  const AbstractSpectrum P = product_spectrum(A, B, 40);
  // Every product eigenvalue is a pair sum; count pairs with equal sums.
  std::map<double, int> count;
  for (Eigen::Index i = 0; i < A.eigenvalues().size(); ++i)
    for (Eigen::Index j = 0; j < B.eigenvalues().size(); ++j) ++count[A.eigenvalues()[i] + B.eigenvalues()[j]];
  std::map<double, int> seen;
  for (Eigen::Index k = 0; k < P.eigenvalues().size(); ++k) ++seen[P.eigenvalues()[k]];
  const double top = P.eigenvalues()[P.eigenvalues().size() - 1];
  for (const auto& [v, n] : seen)
    if (v < top) EXPECT_EQ(n, count[v]) << v;
}

TEST(Product, DepthBeyondTrustIsRejected) {
  const AbstractSpectrum A = leaf(sphere(2));
  EXPECT_THROW(product_spectrum(A, A, 30), PreconditionError);
  EXPECT_THROW(product_spectrum(A, A, 0), PreconditionError);
}

TEST(Product, ProductNodesIntegrateTensorEigenfunctions) {
  const AbstractSpectrum A = leaf(sphere(4)), B = leaf(torus(2, square_lattice()));
  const AbstractSpectrum P = product_spectrum(A, B, 12);
  const Eigen::VectorXd w = P.weights();
  for (Eigen::Index a = 0; a < 12; ++a)
    for (Eigen::Index b = 0; b < 12; ++b)
      EXPECT_NEAR(w.dot(P.values(a).cwiseProduct(P.values(b))), a == b ? 1.0 : 0.0, 1e-10);
}

TEST(Product, LiftSphereCertificate) {
  const AbstractSpectrum A = leaf(sphere(6));
  const ExtremalityCertificate cA = certify_first(A);
  ASSERT_EQ(cA.verdict, Verdict::CertifiedExtremal);
  const ExtremalityCertificate lifted = lift_certificate(cA, A, A);
  EXPECT_EQ(lifted.verdict, Verdict::CertifiedExtremal);
  EXPECT_LE(lifted.residual, 1e-7);
  EXPECT_NEAR(lifted.residual, cA.residual / std::sqrt(A.area()), 1e-12);
  EXPECT_EQ(lifted.B.rows(), 6);
  EXPECT_NEAR(lifted.B.trace(), 1.0, 1e-12);
}

TEST(Product, LiftEquilateralTorusCertificate) {
  const AbstractSpectrum A = leaf(torus(3, equilateral_lattice()));
  const ExtremalityCertificate lifted = lift_certificate(certify_first(A), A, A);
  EXPECT_EQ(lifted.verdict, Verdict::CertifiedExtremal);
  EXPECT_LE(lifted.residual, 1e-7);
}

TEST(Product, LiftRefusedWhenSecondFactorHasSmallerGap) {
  const AbstractSpectrum A = leaf(sphere(5)), B = leaf(sphere(5, 1.5));
  EXPECT_THROW(lift_certificate(certify_first(A), A, B), PreconditionError);
  // The reverse order satisfies the hypothesis.
  EXPECT_NO_THROW(lift_certificate(certify_first(B), B, A));
}

TEST(Product, FullClusterCertificateLivesOnFirstFactorBlock) {
  // λ₁(B) > λ₁(A): the product λ₁ cluster is {f ⊗ 1}.
  const AbstractSpectrum A = leaf(sphere(5, 1.2)), B = leaf(sphere(5));
  const AbstractSpectrum P = product_spectrum(A, B, 20);
  const auto [first, d] = product_cluster(P, 1);
  ASSERT_EQ(d, 3);
  for (Eigen::Index a = first; a < first + d; ++a) EXPECT_EQ(P.pairs()[static_cast<std::size_t>(a)].second, 0);
  const ExtremalityCertificate c = certify(product_polarize(P, first, d));
  EXPECT_EQ(c.verdict, Verdict::CertifiedExtremal);
  EXPECT_LT((c.B - Eigen::MatrixXd::Identity(3, 3) / 3.0).norm(), 1e-6);
}

TEST(Product, EqualGapsCertifyOverTheMixedCluster) {
  const AbstractSpectrum A = leaf(sphere(5));
  const AbstractSpectrum P = product_spectrum(A, A, 20);
  const auto [first, d] = product_cluster(P, 1);
  const ExtremalityCertificate c = certify(product_polarize(P, first, d));
  EXPECT_EQ(c.verdict, Verdict::CertifiedExtremal);
}

TEST(Product, MixedTensorsAreRejected) {
  const AbstractSpectrum A = leaf(sphere(4));
  const AbstractSpectrum P = product_spectrum(A, A, 30);
  Eigen::Index mixed = -1;
  for (Eigen::Index k = 1; k < 30 && mixed < 0; ++k)
    if (P.pairs()[static_cast<std::size_t>(k)].first != 0 && P.pairs()[static_cast<std::size_t>(k)].second != 0) mixed = k;
  ASSERT_GE(mixed, 0);
  EXPECT_THROW(product_polarize(P, mixed, 1), PreconditionError);
}
