#pragma once

// Kähler-Einstein criteria.
//
// Toric model: on a toric Kähler-Einstein manifold every element of E₁ ⊕ ℝ is
// the pullback of an affine function (u, x) + λ of the moment coordinates.
// The λ₁ criterion asks for non-trivial f_i with Σ f_i² again affine. The
// quadratic part of Σ((u_i, x) + λ_i)² is Q = Σ u_i u_iᵀ, a sum of PSD
// rank-one terms, so it vanishes only when every u_i = 0. This is decided in
// exact rational arithmetic.
//
// Numeric model: the unit round sphere is the m = 1 Kähler-Einstein metric
// with Scal = 2, λ₁ = 2 and E₁ = l = 1 harmonics.

#include "kspec/spectral_solver.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace kspec {

using Rational = boost::multiprecision::cpp_rational;

struct AffineFunction {
  std::vector<Rational> u;  // momentum-coordinate covector
  Rational lam;
  bool trivial() const;
};

enum class ToricVerdict { NotAffine, AffineSum };

struct ToricReport {
  ToricVerdict verdict = ToricVerdict::NotAffine;
  std::vector<std::vector<Rational>> Q;  // quadratic part Σ u_i u_iᵀ
  std::vector<Rational> linear;          // 2 Σ λ_i u_i
  Rational constant;                     // Σ λ_i²
  bool only_trivial = false;             // every f_i is constant
  // True when the λ₁ criterion cannot hold with non-trivial f_i.
  bool criterion_unsatisfiable = false;
};

ToricReport toric_extremality_test(const std::vector<AffineFunction>& fs);

Rational parse_rational(const std::string& s);
std::string to_string(const Rational& r);
std::string to_string(ToricVerdict v);

// Distance in L²(v_g̃) from the zero-mean part of Σ f_i² to the cluster span.
// Columns of `functions` are model coefficients. Requires λ₁ = 2 within 1e-6.
double ke_criterion_numeric(const SurfaceModel& model, const SpectralData& spec, const EigenspaceCluster& c,
                            const Eigen::MatrixXd& functions);

struct EinsteinIdentityReport {
  double lambda1 = 0.0;
  double lambda1_error = 0.0;             // |λ₁ - 2|
  std::vector<double> square_residuals;    // Δf² = 4f² - 2|df|², per member (max over nodes)
  std::vector<double> combined_residuals;  // Δ(f² - |df|²) = 4f² - 4|df|² + |dd^c f|², per member
  bool passed = false;
  std::string failed;  // which identity failed, empty if none
};

// Node-level check of the Kähler-Einstein identities on each cluster member.
// |dd^c f|² is the 2-form norm, equal to (Δf)² on a surface.
EinsteinIdentityReport verify_einstein_identities(const SurfaceModel& model, const SpectralData& spec,
                                                  const EigenspaceCluster& c, double tol = 1e-6);

}  // namespace kspec
