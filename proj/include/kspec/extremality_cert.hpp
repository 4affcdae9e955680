#pragma once

// Extremality certificates on an eigenspace E.
//
// Let Λ_ab be the polarization of f ↦ L(f) on an orthonormal basis of E. The
// set K = {Σ_i L(f_i) : f_i ∈ E, Σ ‖f_i‖² = 1} equals {Σ_ab B_ab Λ_ab : B ⪰ 0,
// tr B = 1}, and the metric passes the extremality test iff 0 ∈ K. We decide
// this by minimizing ‖Σ B_ab Λ_ab‖² over the spectrahedron. When the minimum
// is positive, the optimal residual ψ is a separating function:
// ∫ ψ u v_g̃ >= ‖ψ‖² for every u ∈ K, so deforming along ψ raises every branch
// of the eigenvalue to first order.

#include "kspec/spectral_solver.hpp"

#include <string>
#include <vector>

namespace kspec {

struct PolarizedL {
  Eigen::Index d = 0;
  Eigen::Index k = 0;           // index of the eigenvalue the cluster realizes
  double lambda = 0.0;
  Eigen::MatrixXd samples;      // nodes x d², column a + d·b holds Λ_ab
  Eigen::VectorXd weights;      // quadrature weights of v_g̃
  Eigen::MatrixXd basis;        // cluster basis as model coefficients (may be empty)

  Eigen::VectorXd at(Eigen::Index a, Eigen::Index b) const { return samples.col(a + d * b); }
};

enum class Verdict { CertifiedExtremal, NotCertified };

struct ExtremalityCertificate {
  Verdict verdict = Verdict::NotCertified;
  bool inconclusive = false;  // iteration limit hit with residual in (τ, 10τ)
  // For k = 1 a certificate is sufficient for
  // extremality; for k >= 2 it only shows the necessary condition holds.
  bool sufficient = false;
  double residual = 0.0;      // ‖Σ B_ab Λ_ab‖ in L²(v_g̃)
  double tau = 0.0;           // absolute certification threshold
  Eigen::MatrixXd B;
  Eigen::VectorXd function_weights;  // ‖f_i‖², summing to 1
  Eigen::MatrixXd coords;            // d x ℓ, f_i = Σ_a coords(a, i) e_a
  Eigen::MatrixXd functions;         // model coefficients of the f_i (if the basis is known)
  Eigen::VectorXd witness;           // separating function ψ (node samples), non-certified only
  double witness_margin = 0.0;       // min over u ∈ K of ∫ ψ u v_g̃
  double duality_gap = 0.0;
  int iterations = 0;
  std::vector<double> history;       // R(B) per iteration
};

struct CertifyOptions {
  double tau_relative = 1e-7;  // τ_cert = tau_relative · max_a ‖Λ_aa‖
  int max_iters = 500;
};

PolarizedL polarize(const SurfaceModel& model, const SpectralData& spec, const EigenspaceCluster& c);

ExtremalityCertificate certify(const PolarizedL& lam, const CertifyOptions& opts = {});

// ‖Σ_i f_i² - mean‖ in L²(v_g̃) for the certificate's functions.
double cross_check_constancy(const SurfaceModel& model, const SpectralData& spec, const EigenspaceCluster& c,
                             const ExtremalityCertificate& cert);

// Certificate evaluated for a prescribed B (no optimization).
ExtremalityCertificate evaluate_certificate(const PolarizedL& lam, const Eigen::MatrixXd& B,
                                            const CertifyOptions& opts = {});

std::string to_string(Verdict v);

}  // namespace kspec
