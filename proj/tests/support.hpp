#pragma once

// Hand-rolled generators shared by the test suites. Every generator takes an
// explicit seed so failures are reproducible.

#include "kspec/spectral_solver.hpp"
#include "kspec/spectrahedron.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace kspec::gen {

inline constexpr double kPi = std::numbers::pi;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  // Uniform in [lo, hi), built from raw engine bits.
  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  // Box-Muller.
  double normal() {
    const double u1 = uniform(1e-300, 1.0), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }
  // Haar-ish orthogonal matrix from QR of a Gaussian matrix.
  Eigen::MatrixXd orthogonal(Eigen::Index n) {
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n * n; ++i) g.data()[i] = normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::VectorXd diag = qr.matrixQR().diagonal();
    for (Eigen::Index i = 0; i < n; ++i)
      if (diag[i] < 0) q.col(i) *= -1.0;
    return q;
  }
  std::uint64_t raw() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

// Random potential with degrees 1..max_degree (all if <= 0), scaled so that
// max |Δφ| over the nodes equals `amplitude`; admissible for amplitude < 1.
inline KahlerPotential random_potential(const SurfaceModel& model, Gen& g, double amplitude, int max_degree = 0) {
  KahlerPotential phi = KahlerPotential::zero(model);
  for (Eigen::Index i = 1; i < model.basis_size(); ++i)
    if (max_degree <= 0 || model.degree(i) <= max_degree) phi.coeffs[i - 1] = g.normal() / (1.0 + model.degree(i));
  const double peak = laplacian(model, phi.full()).cwiseAbs().maxCoeff();
  phi.coeffs *= amplitude / peak;
  return phi;
}

inline SurfaceModel sphere(int l_max, double radius = 1.0) {
  ModelDescriptor d;
  d.kind = SurfaceKind::RoundSphere;
  d.l_max = l_max;
  d.radius = radius;
  return SurfaceModel::build(d);
}

inline Eigen::Matrix2d square_lattice() { return Eigen::Matrix2d::Identity() * 2.0 * kPi; }

inline Eigen::Matrix2d rect2_lattice() {
  Eigen::Matrix2d a;
  a << 2.0 * kPi, 0.0, 0.0, 4.0 * kPi;
  return a;
}

inline Eigen::Matrix2d equilateral_lattice() {
  Eigen::Matrix2d a;
  a << 2.0 * kPi, kPi, 0.0, std::sqrt(3.0) * kPi;
  return a;
}

inline SurfaceModel torus(int l_max, const Eigen::Matrix2d& lattice) {
  ModelDescriptor d;
  d.kind = SurfaceKind::FlatTorus;
  d.l_max = l_max;
  d.lattice = lattice;
  return SurfaceModel::build(d);
}

// Brute-force minimum of a spectrahedron problem with d ≤ 2 by zooming grid
// search over B = [[p, q], [q, 1 - p]], q = s·√(p(1 - p)), (p, s) ∈ [0,1]×[-1,1].
// Zooming grid search over the trace-one PSD 2x2 matrices B = (I + x X + z Z) / 2 with x² + z² ≤ 1,
// on which the objective is a convex function of (x, z).
inline double brute_force_minimum(const SpectrahedronProblem& prob, int grid = 60, int rounds = 60) {
  if (prob.d == 1) return spectrahedron_objective(prob, Eigen::MatrixXd::Ones(1, 1));
  auto eval = [&](double x, double z) {
    const double r = std::hypot(x, z);
    if (r > 1.0) {
      x /= r;
      z /= r;
    }
    Eigen::Matrix2d B;
    B << 0.5 * (1 + z), 0.5 * x, 0.5 * x, 0.5 * (1 - z);
    return spectrahedron_objective(prob, B);
  };
  double best = 1e300, bx = 0.0, bz = 0.0, half = 1.0;
  for (int r = 0; r < rounds; ++r) {
    const double cx = bx, cz = bz;
    for (int i = 0; i <= grid; ++i) {
      for (int j = 0; j <= grid; ++j) {
        const double x = cx + half * (2.0 * i / grid - 1.0), z = cz + half * (2.0 * j / grid - 1.0);
        const double v = eval(x, z);
        if (v < best) {
          best = v;
          bx = x;
          bz = z;
        }
      }
    }
    half *= 4.0 / grid;
  }
  return best;
}

}  // namespace kspec::gen
