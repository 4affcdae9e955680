#include "kspec/errors.hpp"
#include "kspec/extremality_cert.hpp"
#include "kspec/variation.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace kspec;
using namespace kspec::gen;

namespace {

struct Fixture {
  SurfaceModel model;
  SpectralData spec;
  EigenspaceCluster cl;
};

Fixture at(SurfaceModel m, const KahlerPotential& phi, Eigen::Index k = 1) {
  SpectralData s = solve_spectrum(m, phi, m.basis_size());
  EigenspaceCluster c = cluster(s, k);
  return {std::move(m), std::move(s), std::move(c)};
}

Fixture round(SurfaceModel m) {
  const KahlerPotential z = KahlerPotential::zero(m);
  return at(std::move(m), z);
}

double l2(const Eigen::VectorXd& w, const Eigen::VectorXd& v) { return std::sqrt((w.array() * v.array().square()).sum()); }

}  // namespace

TEST(Polarize, Invariants) {
  Gen g(51);
  const SurfaceModel m0 = sphere(8);
  const Fixture s = at(sphere(8), random_potential(m0, g, 0.2, 2));
  const PolarizedL lam = polarize(s.model, s.spec, s.cl);
  for (Eigen::Index a = 0; a < lam.d; ++a) {
    EXPECT_LT((lam.at(a, a) - apply_L(s.model, s.spec, s.cl, s.cl.basis.col(a))).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index b = 0; b < lam.d; ++b) {
      EXPECT_TRUE(lam.at(a, b) == lam.at(b, a));
      EXPECT_LT(std::abs(lam.weights.dot(lam.at(a, b))), 1e-8);
    }
  }
  // Bilinearity: Λ_ab = ½(L(f_a + f_b) - L(f_a) - L(f_b)).
  if (lam.d >= 2) {
    const Eigen::VectorXd fa = s.cl.basis.col(0), fb = s.cl.basis.col(1);
    const Eigen::VectorXd both = polarized_L(s.model, s.spec, s.cl.lambda, fa + fb, fa + fb);
    const Eigen::VectorXd expect = 0.5 * (both - lam.at(0, 0) - lam.at(1, 1));
    EXPECT_LT((expect - lam.at(0, 1)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Polarize, SphereCrossTermIsProportionalToXY) {
  // Λ for (x, y) is 2(λ² xy - λ ∇x·∇y) = 2(4xy + 2xy) = 12 xy (unnormalized).
  const Fixture s = round(sphere(6));
  const PolarizedL lam = polarize(s.model, s.spec, s.cl);
  const Eigen::Index ix = s.model.index_of({1, 1, 0}), iy = s.model.index_of({1, -1, 0});
  Eigen::VectorXd fx = Eigen::VectorXd::Zero(s.model.basis_size()), fy = fx;
  fx[ix] = 1.0;
  fy[iy] = 1.0;
  const Eigen::VectorXd cross = polarized_L(s.model, s.spec, 2.0, fx, fy);
  const double c = 3.0 / (4.0 * kPi);
  for (Eigen::Index j = 0; j < s.model.node_count(); ++j) {
    const double th = s.model.nodes()(0, j), ph = s.model.nodes()(1, j);
    const double xy = std::sin(th) * std::sin(th) * std::cos(ph) * std::sin(ph);
    EXPECT_NEAR(cross[j], 12.0 * c * xy, 1e-12);
  }
}

TEST(Polarize, TorusConjugatePairCancels) {
  // cos and sin of one mode: L(cos) + L(sin) = 0.
  const Fixture s = round(torus(3, rect2_lattice()));
  ASSERT_EQ(s.cl.d, 2);
  const PolarizedL lam = polarize(s.model, s.spec, s.cl);
  EXPECT_LT((lam.at(0, 0) + lam.at(1, 1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Certify, RoundSphere) {
  const Fixture s = round(sphere(8));
  const ExtremalityCertificate c = certify(polarize(s.model, s.spec, s.cl));
  EXPECT_EQ(c.verdict, Verdict::CertifiedExtremal);
  EXPECT_TRUE(c.sufficient);
  EXPECT_LE(c.residual, 1e-8);
  EXPECT_LT((c.B - Eigen::MatrixXd::Identity(3, 3) / 3.0).norm(), 1e-8);
  EXPECT_EQ(c.functions.cols(), 3);
  EXPECT_NEAR(c.function_weights.sum(), 1.0, 1e-12);
  // Σ ∫ f_i² v_g̃ = 1.
  const Eigen::MatrixXd fv = s.model.basis_values() * c.functions;
  EXPECT_NEAR((s.model.weights().asDiagonal() * fv.cwiseAbs2()).sum(), 1.0, 1e-8);
  EXPECT_LT(cross_check_constancy(s.model, s.spec, s.cl, c), 1e-8);
}

TEST(Certify, EquilateralTorus) {
  const Fixture s = round(torus(4, equilateral_lattice()));
  ASSERT_EQ(s.cl.d, 6);
  const ExtremalityCertificate c = certify(polarize(s.model, s.spec, s.cl));
  EXPECT_EQ(c.verdict, Verdict::CertifiedExtremal);
  EXPECT_LT(cross_check_constancy(s.model, s.spec, s.cl, c), 1e-8);
}

TEST(Certify, RectangularTorusFirstEigenspaceIsDoubleAndCertified) {
  // λ₁ = 1/4 on the 2π × 4π torus is spanned by cos(y/2), sin(y/2), and
  // cos² + sin² = 1, so the certificate exists.
  const Fixture s = round(torus(4, rect2_lattice()));
  EXPECT_EQ(s.cl.d, 2);
  const ExtremalityCertificate c = certify(polarize(s.model, s.spec, s.cl));
  EXPECT_EQ(c.verdict, Verdict::CertifiedExtremal);
  EXPECT_LT((c.B - Eigen::MatrixXd::Identity(2, 2) / 2.0).norm(), 1e-8);
}

TEST(Certify, SimpleEigenvalueIsRefused) {
  const SurfaceModel m = sphere(8);
  KahlerPotential base = KahlerPotential::zero(m);
  base.coeffs[m.index_of({2, 0, 0}) - 1] = 0.05;
  const SpectralData spec = solve_spectrum(m, base, m.basis_size());
  for (Eigen::Index k = 1; k <= 3; ++k) {
    const EigenspaceCluster cl = cluster(spec, k);
    if (cl.d != 1) continue;
    const PolarizedL lam = polarize(m, spec, cl);
    const ExtremalityCertificate c = certify(lam);
    EXPECT_EQ(c.verdict, Verdict::NotCertified);
    EXPECT_NEAR(c.residual, l2(lam.weights, lam.at(0, 0)), 1e-14);
    EXPECT_GT(c.residual, 0.01);
    // The witness ψ = L(f) separates K from 0.
    EXPECT_GT(c.witness_margin, 0.0);
    EXPECT_EQ(c.witness.size(), m.node_count());
  }
}

TEST(Certify, PerturbedSphereProducesWitness) {
  Gen g(52);
  const SurfaceModel m = sphere(8);
  const Fixture s = at(sphere(8), random_potential(m, g, 0.3, 3));
  const ExtremalityCertificate c = certify(polarize(s.model, s.spec, s.cl));
  EXPECT_EQ(c.verdict, Verdict::NotCertified);
  EXPECT_GT(c.witness_margin, 0.0);
}

TEST(Certify, RotationEquivariance) {
  Gen g(53);
  const Fixture s = round(torus(4, equilateral_lattice()));
  const PolarizedL lam = polarize(s.model, s.spec, s.cl);
  const ExtremalityCertificate c0 = certify(lam);
  for (int trial = 0; trial < 3; ++trial) {
    const Eigen::MatrixXd Q = g.orthogonal(s.cl.d);
    EigenspaceCluster rotated = s.cl;
    rotated.basis = s.cl.basis * Q;
    const ExtremalityCertificate c1 = certify(polarize(s.model, s.spec, rotated));
    EXPECT_NEAR(c1.residual, c0.residual, 1e-9);
    // B transforms as Qᵀ B Q; compare through the value Σ B_ab Λ_ab.
    const ExtremalityCertificate back = evaluate_certificate(lam, Q * c1.B * Q.transpose());
    EXPECT_NEAR(back.residual, c1.residual, 1e-9);
  }
}

TEST(Certify, BruteForceForTwoDimensionalClusters) {
  // An axisymmetric deformation keeps {x, y} as a double eigenvalue with a
  // positive optimal residual; the round rect2 torus has residual zero.
  for (double amp : {0.02, 0.05, -0.04}) {
    const SurfaceModel m0 = sphere(8);
    KahlerPotential base = KahlerPotential::zero(m0);
    base.coeffs[m0.index_of({2, 0, 0}) - 1] = amp;
    const SpectralData spec = solve_spectrum(m0, base, m0.basis_size());
    for (Eigen::Index k = 1; k <= 3; ++k) {
      const EigenspaceCluster cl = cluster(spec, k);
      if (cl.d != 2) continue;
      const PolarizedL lam = polarize(m0, spec, cl);
      const ExtremalityCertificate c = certify(lam);
      const SpectrahedronProblem p{2, gram_operator(lam.samples, lam.weights), {}};
      EXPECT_GT(c.residual, 1e-3);
      EXPECT_NEAR(c.residual, std::sqrt(std::max(0.0, brute_force_minimum(p))), 1e-6) << amp;
      break;
    }
  }
  const Fixture s = round(torus(3, rect2_lattice()));
  const PolarizedL lam = polarize(s.model, s.spec, s.cl);
  const SpectrahedronProblem p{2, gram_operator(lam.samples, lam.weights), {}};
  EXPECT_NEAR(certify(lam).residual, std::sqrt(std::max(0.0, brute_force_minimum(p))), 1e-6);
}

TEST(Certify, HandBuiltSingleFunction) {
  const Fixture s = round(sphere(6));
  // B = e e^T on f = z (the second basis column in degree order is z).
  Eigen::Index iz = -1;
  for (Eigen::Index a = 0; a < 3; ++a)
    if (std::abs(s.cl.basis(s.model.index_of({1, 0, 0}), a)) > 0.5) iz = a;
  ASSERT_GE(iz, 0);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 3);
  B(iz, iz) = 1.0;
  const ExtremalityCertificate c = evaluate_certificate(polarize(s.model, s.spec, s.cl), B);
  EXPECT_EQ(c.verdict, Verdict::NotCertified);
  EXPECT_GT(cross_check_constancy(s.model, s.spec, s.cl, c), 0.1);
}

TEST(Certify, CertificateImpliesStraddlingGramSpectra) {
  Gen g(55);
  const Fixture s = round(sphere(6));
  for (int trial = 0; trial < 10; ++trial) {
    const HadamardGram G = hadamard_gram(s.model, s.spec, s.cl, random_potential(s.model, g, 1.0, 3));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G.matrix, Eigen::EigenvaluesOnly);
    EXPECT_LE(es.eigenvalues().minCoeff(), 1e-6);
    EXPECT_GE(es.eigenvalues().maxCoeff(), -1e-6);
  }
}

TEST(Certify, HigherClusterOnlyReportsNecessaryCondition) {
  const Fixture s = at(sphere(8), KahlerPotential::zero(sphere(8)), 4);
  const ExtremalityCertificate c = certify(polarize(s.model, s.spec, s.cl));
  EXPECT_EQ(c.verdict, Verdict::CertifiedExtremal);
  EXPECT_FALSE(c.sufficient);
}
