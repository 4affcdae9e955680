#include "kspec/errors.hpp"
#include "kspec/extremality_cert.hpp"
#include "kspec/flow.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace kspec;
using namespace kspec::gen;

TEST(Flow, RoundSphereStopsImmediately) {
  const SurfaceModel m = sphere(8);
  const FlowState st = ascend(m, KahlerPotential::zero(m), 50, 1e-6);
  EXPECT_EQ(st.steps, 0);
  EXPECT_EQ(st.stop, FlowStop::Stationary);
  ASSERT_EQ(st.history.size(), 1u);
  EXPECT_NEAR(st.lambda1_area, 8.0 * kPi, 1e-10);
}

TEST(Flow, AscendsToRoundMetric) {
  Gen g(71);
  const SurfaceModel m = sphere(8);
  const KahlerPotential phi0 = random_potential(m, g, 0.3, 4);
  const FlowState st = ascend(m, phi0, 200, 1e-6);
  EXPECT_NEAR(st.lambda1_area / (8.0 * kPi), 1.0, 5e-3);
  for (std::size_t i = 1; i < st.history.size(); ++i) {
    EXPECT_GE(st.history[i].lambda1_area, st.history[i - 1].lambda1_area);
    EXPECT_EQ(st.history[i].step, static_cast<int>(i));
  }
  EXPECT_GT(conformal_factor(m, st.phi).values.minCoeff(), kDefaultPositivity);
}

TEST(Flow, FinalStateIsNearlyCertified) {
  Gen g(72);
  const SurfaceModel m = sphere(8);
  const FlowState st = ascend(m, random_potential(m, g, 0.2, 4), 200, 1e-6);
  const SpectralData spec = solve_spectrum(m, st.phi, m.basis_size());
  // The flow's own group may be split by more than the default cluster
  // tolerance, so group the three lowest branches explicitly.
  const EigenspaceCluster c = cluster(spec, 1, 1e-4);
  ASSERT_EQ(c.d, 3);
  const PolarizedL lam = polarize(m, spec, c);
  const ExtremalityCertificate cert = certify(lam);
  EXPECT_LT(cert.residual, 1e-4);
}

TEST(Flow, SquareTorusStaysBelowEquilateralBound) {
  Gen g(73);
  const SurfaceModel m = torus(4, square_lattice());
  const FlowState st = ascend(m, random_potential(m, g, 0.2, 2), 40, 1e-6);
  const double bound = 8.0 * kPi * kPi / std::sqrt(3.0);
  for (const FlowRecord& r : st.history) EXPECT_LE(r.lambda1_area, bound * 1.01);
  for (std::size_t i = 1; i < st.history.size(); ++i) EXPECT_GE(st.history[i].lambda1_area, st.history[i - 1].lambda1_area);
}

TEST(Flow, RejectsInadmissibleStart) {
  const SurfaceModel m = sphere(4);
  KahlerPotential bad = KahlerPotential::zero(m);
  bad.coeffs[0] = 50.0;
  EXPECT_THROW(ascend(m, bad, 5, 1e-6), NotPositiveError);
  EXPECT_THROW(ascend(m, KahlerPotential::zero(m), -1, 1e-6), PreconditionError);
}

TEST(Flow, DirectionsUpToHalfDegree) {
  const SurfaceModel m = sphere(8);
  const auto d = flow_directions(m, -1);
  EXPECT_EQ(d.size(), 24u);  // degrees 1..4
  EXPECT_THROW(flow_directions(m, 9), PreconditionError);
}

TEST(Flow, Deterministic) {
  Gen g(74);
  const SurfaceModel m = sphere(6);
  const KahlerPotential phi0 = random_potential(m, g, 0.2, 3);
  const FlowState a = ascend(m, phi0, 10, 1e-6), b = ascend(m, phi0, 10, 1e-6);
  EXPECT_TRUE(a.phi.coeffs == b.phi.coeffs);
  EXPECT_EQ(a.history.size(), b.history.size());
}
