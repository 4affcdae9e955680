#include "kspec/spectral_solver.hpp"

#include "kspec/errors.hpp"
#include "kspec/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace kspec {

Eigen::MatrixXd assemble_mass(const SurfaceModel& model, const ConformalFactor& factor) {
  return kernels::weighted_gram(model.basis_values(), model.weights().cwiseProduct(factor.values));
}

SpectralData solve_spectrum(const SurfaceModel& model, const KahlerPotential& phi, Eigen::Index n_eigs) {
  if (n_eigs < 1 || n_eigs > model.basis_size()) {
    std::ostringstream os;
    os << "requested " << n_eigs << " eigenvalues from a basis of size " << model.basis_size();
    throw PreconditionError(os.str());
  }
  SpectralData out;
  out.potential = phi;
  out.factor = conformal_factor(model, phi);
  out.mass_matrix = assemble_mass(model, out.factor);
  out.trusted_below = model.trusted_below();

  Eigen::LLT<Eigen::MatrixXd> llt(out.mass_matrix);
  if (llt.info() != Eigen::Success) throw TrustError("mass matrix is not positive definite (quadrature breakdown)");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(model.stiffness(), out.mass_matrix,
                                                                   Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) throw TrustError("generalized eigensolver did not converge");

  out.eigenvalues = solver.eigenvalues().head(n_eigs);
  out.eigvecs = solver.eigenvectors().leftCols(n_eigs);
  // Deterministic sign: the largest-magnitude coefficient is positive.
  for (Eigen::Index i = 0; i < n_eigs; ++i) {
    Eigen::Index arg = 0;
    out.eigvecs.col(i).cwiseAbs().maxCoeff(&arg);
    if (out.eigvecs(arg, i) < 0.0) out.eigvecs.col(i) *= -1.0;
  }
  return out;
}

EigenspaceCluster cluster(const SpectralData& spec, Eigen::Index k, double tau) {
  if (k < 1 || k >= spec.size()) {
    std::ostringstream os;
    os << "cluster index k = " << k << " outside 1.." << spec.size() - 1;
    throw PreconditionError(os.str());
  }
  const Eigen::VectorXd& ev = spec.eigenvalues;
  const double tol = tau * std::abs(ev[k]);
  Eigen::Index lo = k, hi = k;
  while (lo > 1 && ev[hi] - ev[lo - 1] <= tol) --lo;
  while (hi + 1 < spec.size() && ev[hi + 1] - ev[lo] <= tol) ++hi;
  // The eigenvalue above the cluster must have been computed to know the cluster ends.
  if (hi + 1 >= spec.size() || !spec.trusted(hi)) {
    std::ostringstream os;
    os << "cluster at k = " << k << " (lambda = " << ev[k]
       << ") touches the untrusted tail of the spectrum; increase L_max";
    throw TrustError(os.str());
  }
  EigenspaceCluster c;
  c.k = lo;
  c.d = hi - lo + 1;
  c.eigenvalues = ev.segment(lo, c.d);
  c.lambda = c.eigenvalues.mean();
  c.basis = spec.eigvecs.middleCols(lo, c.d);
  return c;
}

std::vector<EigenspaceCluster> all_clusters(const SpectralData& spec, double tau) {
  std::vector<EigenspaceCluster> out;
  Eigen::Index k = 1;
  while (k < spec.size() && spec.trusted(k)) {
    try {
      out.push_back(cluster(spec, k, tau));
    } catch (const TrustError&) {
      break;
    }
    k = out.back().k + out.back().d;
  }
  return out;
}

}  // namespace kspec
