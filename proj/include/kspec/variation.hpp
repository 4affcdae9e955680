#pragma once

// First variation of Laplace eigenvalues along rays φ_base + t·φ_dir in the
// Kähler (= conformal, volume-preserving) class of a surface.
//
// On a surface the fourth-order operator L(f) = δ^c δ(f dd^c f) restricted to
// a λ-eigenspace reads
//     L(f) = 2 (λ² f² - λ |∇f|²_g̃),      |∇f|²_g̃ = e^{-σ} |∇f|²_g,
// where |dd^c f|² = (Δf)² is the 2-form norm (|ω|² = 1). The derivative of
// the operator along the ray is  Δ̇ f = (Δ_g̃ f)(Δ_g̃ φ_dir), so the Hadamard
// form on the eigenspace is  Q(f) = ∫ f (Δ̇ f) v_g̃ = ∫ φ_dir L(f) v_g̃.

#include "kspec/spectral_solver.hpp"

#include <vector>

namespace kspec {

struct HadamardGram {
  // λ ∫ f_a f_b (Δ_g̃ φ_dir) v_g̃ over the cluster basis: the form Q with
  // Δ_g̃ f = λ f substituted. It is the exact derivative of the discrete
  // eigenproblem, so its spectrum gives the one-sided derivatives.
  Eigen::MatrixXd matrix;
  // ½ ∫ [f_a Δ_g̃f_b + f_b Δ_g̃f_a] (Δ_g̃ φ_dir) v_g̃ with Δ_g̃ applied to the
  // truncated expansions. Equal to `matrix` in the continuum; the difference
  // measures how well the cluster is resolved.
  Eigen::MatrixXd operator_form;
  double consistency_gap = 0.0;  // max |matrix - operator_form|
  EigenspaceCluster cluster;
  KahlerPotential direction;
};

struct DerivativeReport {
  Eigen::Index k = 0;
  double lambda = 0.0;
  Eigen::VectorXd gram_spectrum;      // ascending
  Eigen::VectorXd operator_spectrum;  // spectrum of HadamardGram::operator_form
  double consistency_gap = 0.0;       // HadamardGram::consistency_gap
  // One-sided derivatives of the sorted cluster branches λ_{c.k}, ..., λ_{c.k+d-1}.
  Eigen::VectorXd branch_right;
  Eigen::VectorXd branch_left;
  // Derivatives of λ_k itself.
  double fd_right = 0.0;
  double fd_left = 0.0;
  double extremal_sign_product = 0.0;
  // d/dt of the cluster sum, from finite differences, and tr(Gram).
  double fd_trace = 0.0;
  double gram_trace = 0.0;
  double max_mismatch = 0.0;  // max over branches of |fd - Gram prediction|
  bool consistent = false;    // max_mismatch <= 1e-4 (1 + |λ|)
  std::vector<double> steps;  // step sizes actually used
};

struct DerivativeOptions {
  std::vector<double> h_list{1e-3, 5e-4, 2.5e-4};
  double tau_cluster = kDefaultClusterTolerance;
  double h_floor = 1e-8;
};

// Node samples of L(f) at the metric of `spec`. f (basis coefficients) must
// lie in the span of the cluster.
Eigen::VectorXd apply_L(const SurfaceModel& model, const SpectralData& spec, const EigenspaceCluster& c,
                        const Eigen::VectorXd& f);

// Node samples of the polarization L(f, h) = 2(λ² f h - λ (∇f, ∇h)_g̃), with λ
// the cluster eigenvalue. No span check.
Eigen::VectorXd polarized_L(const SurfaceModel& model, const SpectralData& spec, double lambda,
                            const Eigen::VectorXd& f, const Eigen::VectorXd& h);

HadamardGram hadamard_gram(const SurfaceModel& model, const SpectralData& spec, const EigenspaceCluster& c,
                           const KahlerPotential& direction);

// Linearized Gram for a group of nearly equal eigenvalues: entry (a, b) is
// ½(λ_a + λ_b) ∫ f_a f_b (Δ_g̃ φ) v_g̃. Reduces to `matrix` on an exact cluster.
Eigen::MatrixXd group_gram(const SurfaceModel& model, const SpectralData& spec, const Eigen::MatrixXd& basis,
                           const Eigen::VectorXd& eigenvalues, const KahlerPotential& direction);

DerivativeReport eigenvalue_derivatives(const SurfaceModel& model, const KahlerPotential& base, Eigen::Index k,
                                        const KahlerPotential& direction, const DerivativeOptions& opts = {});

// Richardson (polynomial) extrapolation of D(h) to h = 0.
double extrapolate_to_zero(const std::vector<double>& h, const std::vector<double>& values);

}  // namespace kspec
