#include "kspec/variation.hpp"

#include "kspec/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kspec {

namespace {

// Δ_g φ at nodes; Δ_g̃ φ = e^{-σ} Δ_g φ.
Eigen::VectorXd raw_laplacian(const SurfaceModel& model, const KahlerPotential& phi) {
  if (phi.coeffs.size() != model.basis_size() - 1) throw PreconditionError("direction does not match the model");
  return laplacian(model, phi.full());
}

}  // namespace

Eigen::VectorXd polarized_L(const SurfaceModel& model, const SpectralData& spec, double lambda,
                            const Eigen::VectorXd& f, const Eigen::VectorXd& h) {
  const Eigen::VectorXd fv = evaluate(model, f);
  const Eigen::VectorXd hv = evaluate(model, h);
  const Eigen::VectorXd grad = gradient_product(model, f, h);
  return 2.0 * (lambda * lambda * fv.cwiseProduct(hv) - lambda * grad.cwiseQuotient(spec.factor.values)).array();
}

Eigen::VectorXd apply_L(const SurfaceModel& model, const SpectralData& spec, const EigenspaceCluster& c,
                        const Eigen::VectorXd& f) {
  if (f.size() != model.basis_size()) throw PreconditionError("eigenfunction does not match the model basis");
  const Eigen::VectorXd proj = c.basis * (c.basis.transpose() * (spec.mass_matrix * f));
  const Eigen::VectorXd r = f - proj;
  const double fn = std::sqrt(f.dot(spec.mass_matrix * f));
  const double rn = std::sqrt(std::max(0.0, r.dot(spec.mass_matrix * r)));
  if (rn > 1e-8 * std::max(fn, 1e-300)) {
    std::ostringstream os;
    os << "function is not in the cluster span (relative projection residual " << rn / fn << ")";
    throw PreconditionError(os.str());
  }
  return polarized_L(model, spec, c.lambda, f, f);
}

Eigen::MatrixXd group_gram(const SurfaceModel& model, const SpectralData& /*spec*/, const Eigen::MatrixXd& basis,
                           const Eigen::VectorXd& eigenvalues, const KahlerPotential& direction) {
  const Eigen::VectorXd lap_phi = raw_laplacian(model, direction);
  const Eigen::MatrixXd fv = model.basis_values() * basis;
  // e^σ from v_g̃ and e^{-σ} from Δ_g̃ φ cancel.
  const Eigen::MatrixXd weighted = (model.weights().cwiseProduct(lap_phi)).asDiagonal() * fv;
  Eigen::MatrixXd g = fv.transpose() * weighted;
  const Eigen::Index d = basis.cols();
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) g(a, b) *= 0.5 * (eigenvalues[a] + eigenvalues[b]);
  return 0.5 * (g + g.transpose());
}

HadamardGram hadamard_gram(const SurfaceModel& model, const SpectralData& spec, const EigenspaceCluster& c,
                           const KahlerPotential& direction) {
  const Eigen::VectorXd lap_phi = raw_laplacian(model, direction);
  const Eigen::MatrixXd fv = model.basis_values() * c.basis;
  const Eigen::MatrixXd lap_f = model.basis_values() * (model.stiffness_diagonal().asDiagonal() * c.basis);
  const Eigen::VectorXd w = model.weights().cwiseProduct(lap_phi).cwiseQuotient(spec.factor.values);
  const Eigen::MatrixXd cross = fv.transpose() * w.asDiagonal() * lap_f;

  HadamardGram out;
  out.operator_form = 0.5 * (cross + cross.transpose());
  out.matrix = group_gram(model, spec, c.basis, Eigen::VectorXd::Constant(c.d, c.lambda), direction);
  out.consistency_gap = (out.matrix - out.operator_form).cwiseAbs().maxCoeff();
  out.cluster = c;
  out.direction = direction;
  return out;
}

double extrapolate_to_zero(const std::vector<double>& h, const std::vector<double>& values) {
  if (h.empty() || h.size() != values.size()) throw PreconditionError("extrapolation needs matching step/value lists");
  std::vector<double> p = values;
  const std::size_t n = h.size();
  // Neville's scheme evaluated at 0.
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      const double hi = h[i], hj = h[i + level];
      p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
    }
  }
  return p[0];
}

DerivativeReport eigenvalue_derivatives(const SurfaceModel& model, const KahlerPotential& base, Eigen::Index k,
                                        const KahlerPotential& direction, const DerivativeOptions& opts) {
  if (opts.h_list.empty()) throw PreconditionError("empty step list");
  const Eigen::Index n = model.basis_size();
  const SpectralData spec0 = solve_spectrum(model, base, n);
  const EigenspaceCluster c = cluster(spec0, k, opts.tau_cluster);
  const HadamardGram gram = hadamard_gram(model, spec0, c, direction);

  DerivativeReport rep;
  rep.k = k;
  rep.lambda = c.lambda;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram.matrix, Eigen::EigenvaluesOnly);
  rep.gram_spectrum = es.eigenvalues();
  rep.gram_trace = gram.matrix.trace();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(gram.operator_form, Eigen::EigenvaluesOnly);
  rep.operator_spectrum = eg.eigenvalues();
  rep.consistency_gap = gram.consistency_gap;

  std::vector<double> hs = opts.h_list;
  const auto [lo, hi] = admissible_interval(model, base, direction);
  double hmax = *std::max_element(hs.begin(), hs.end());
  while (!(-hmax > lo && hmax < hi)) {
    for (double& h : hs) h *= 0.5;
    hmax *= 0.5;
    if (hmax < opts.h_floor) {
      std::ostringstream os;
      os << "no admissible finite-difference step: the ray is positive only for t in (" << lo << ", " << hi << ")";
      throw NotPositiveError(os.str(), lo, hi);
    }
  }
  rep.steps = hs;

  const Eigen::Index d = c.d;
  const Eigen::VectorXd ev0 = spec0.eigenvalues.segment(c.k, d);
  std::vector<std::vector<double>> right(static_cast<std::size_t>(d)), left(static_cast<std::size_t>(d));
  std::vector<double> trace;
  for (double h : hs) {
    KahlerPotential plus{base.coeffs + h * direction.coeffs};
    KahlerPotential minus{base.coeffs - h * direction.coeffs};
    const Eigen::VectorXd ep = solve_spectrum(model, plus, n).eigenvalues.segment(c.k, d);
    const Eigen::VectorXd em = solve_spectrum(model, minus, n).eigenvalues.segment(c.k, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      right[static_cast<std::size_t>(i)].push_back((ep[i] - ev0[i]) / h);
      left[static_cast<std::size_t>(i)].push_back((ev0[i] - em[i]) / h);
    }
    trace.push_back((ep.sum() - em.sum()) / (2.0 * h));
  }
  rep.branch_right.resize(d);
  rep.branch_left.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    rep.branch_right[i] = extrapolate_to_zero(hs, right[static_cast<std::size_t>(i)]);
    rep.branch_left[i] = extrapolate_to_zero(hs, left[static_cast<std::size_t>(i)]);
  }
  rep.fd_trace = extrapolate_to_zero(hs, trace);

  // For t > 0 the sorted branches leave with ascending slopes; for t < 0 the
  // order is reversed.
  for (Eigen::Index i = 0; i < d; ++i) {
    rep.max_mismatch = std::max(rep.max_mismatch, std::abs(rep.branch_right[i] - rep.gram_spectrum[i]));
    rep.max_mismatch = std::max(rep.max_mismatch, std::abs(rep.branch_left[i] - rep.gram_spectrum[d - 1 - i]));
  }
  rep.consistent = rep.max_mismatch <= 1e-4 * (1.0 + std::abs(rep.lambda));

  const Eigen::Index idx = k - c.k;
  rep.fd_right = rep.branch_right[idx];
  rep.fd_left = rep.branch_left[idx];
  rep.extremal_sign_product = rep.fd_left * rep.fd_right;
  return rep;
}

}  // namespace kspec
