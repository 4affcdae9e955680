#pragma once

#include "kspec/surface_model.hpp"

namespace kspec {

// Laplace-Beltrami spectrum of g̃ = e^σ g on a SurfaceModel.
//
// In dimension two the Dirichlet energy is conformally invariant, so the
// stiffness matrix S does not depend on φ and only the mass matrix
// (M_σ)_ab = ∫ b_a b_b e^σ v_g does. Eigenvectors are M_σ-orthonormal,
// i.e. normalized in L²(v_g̃).
struct SpectralData {
  KahlerPotential potential;
  ConformalFactor factor;
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigvecs;      // basis x n, columns are eigenfunctions
  Eigen::MatrixXd mass_matrix;
  double trusted_below = 0.0;

  Eigen::Index size() const { return eigenvalues.size(); }
  bool trusted(Eigen::Index i) const { return eigenvalues[i] < trusted_below; }
};

// A numerically resolved eigenspace: eigenvalues k .. k+d-1 agree to within
// τ·lambda.
struct EigenspaceCluster {
  Eigen::Index k = 0;
  Eigen::Index d = 0;
  double lambda = 0.0;
  Eigen::VectorXd eigenvalues;  // the d members
  Eigen::MatrixXd basis;        // basis_size x d, M_σ-orthonormal
};

inline constexpr double kDefaultClusterTolerance = 1e-6;

// Lowest n_eigs eigenpairs of S v = λ M_σ v.
SpectralData solve_spectrum(const SurfaceModel& model, const KahlerPotential& phi, Eigen::Index n_eigs);

// Mass matrix for a given conformal factor (serial reference path available
// through kernels::weighted_gram_serial).
Eigen::MatrixXd assemble_mass(const SurfaceModel& model, const ConformalFactor& factor);

// Maximal τ-cluster containing eigenvalue index k (k >= 1). Throws TrustError
// if the cluster reaches an untrusted eigenvalue or the end of the computed
// list.
EigenspaceCluster cluster(const SpectralData& spec, Eigen::Index k, double tau = kDefaultClusterTolerance);

// Partition of the trusted eigenvalues 1.. into clusters (λ₀ excluded).
std::vector<EigenspaceCluster> all_clusters(const SpectralData& spec, double tau = kDefaultClusterTolerance);

}  // namespace kspec
