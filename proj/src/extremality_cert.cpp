#include "kspec/extremality_cert.hpp"

#include "kspec/errors.hpp"
#include "kspec/kernels.hpp"
#include "kspec/spectrahedron.hpp"
#include "kspec/variation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace kspec {

namespace {

double lambda_scale(const PolarizedL& lam) {
  double s = 0.0;
  for (Eigen::Index a = 0; a < lam.d; ++a) {
    const Eigen::VectorXd v = lam.at(a, a);
    s = std::max(s, std::sqrt(kernels::weighted_sum(lam.weights, v.cwiseAbs2())));
  }
  return s;
}

Eigen::VectorXd combine(const PolarizedL& lam, const Eigen::MatrixXd& B) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(lam.samples.rows());
  for (Eigen::Index b = 0; b < lam.d; ++b)
    for (Eigen::Index a = 0; a < lam.d; ++a)
      if (B(a, b) != 0.0) r += B(a, b) * lam.at(a, b);
  return r;
}

void extract_functions(const PolarizedL& lam, ExtremalityCertificate& cert) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert.B);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = lam.d - 1; i >= 0; --i)
    if (es.eigenvalues()[i] >= 1e-12) keep.push_back(i);
  const auto l = static_cast<Eigen::Index>(keep.size());
  cert.function_weights.resize(l);
  cert.coords.resize(lam.d, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    const Eigen::Index src = keep[static_cast<std::size_t>(i)];
    cert.function_weights[i] = es.eigenvalues()[src];
    cert.coords.col(i) = std::sqrt(es.eigenvalues()[src]) * es.eigenvectors().col(src);
  }
  if (lam.basis.size() != 0) cert.functions = lam.basis * cert.coords;
}

void finish(const PolarizedL& lam, ExtremalityCertificate& cert) {
  const Eigen::VectorXd r = combine(lam, cert.B);
  cert.residual = std::sqrt(kernels::weighted_sum(lam.weights, r.cwiseAbs2()));
  cert.verdict = cert.residual <= cert.tau ? Verdict::CertifiedExtremal : Verdict::NotCertified;
  cert.sufficient = lam.k == 1;
  extract_functions(lam, cert);
  if (cert.verdict == Verdict::NotCertified) {
    // (G_ψ)_ab = ∫ ψ Λ_ab; its bottom eigenvalue is min over K of ∫ ψ u.
    Eigen::MatrixXd g(lam.d, lam.d);
    for (Eigen::Index a = 0; a < lam.d; ++a)
      for (Eigen::Index b = 0; b < lam.d; ++b) g(a, b) = kernels::weighted_sum(lam.weights, r.cwiseProduct(lam.at(a, b)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
    cert.witness_margin = es.eigenvalues()[0];
    if (cert.witness_margin > 0.0) cert.witness = r;
  }
}

}  // namespace

std::string to_string(Verdict v) { return v == Verdict::CertifiedExtremal ? "CertifiedExtremal" : "NotCertified"; }

PolarizedL polarize(const SurfaceModel& model, const SpectralData& spec, const EigenspaceCluster& c) {
  PolarizedL lam;
  lam.d = c.d;
  lam.k = c.k;
  lam.lambda = c.lambda;
  lam.basis = c.basis;
  lam.weights = model.weights().cwiseProduct(spec.factor.values);
  lam.samples.resize(model.node_count(), c.d * c.d);
  for (Eigen::Index b = 0; b < c.d; ++b) {
    for (Eigen::Index a = 0; a <= b; ++a) {
      lam.samples.col(a + c.d * b) = polarized_L(model, spec, c.lambda, c.basis.col(a), c.basis.col(b));
      lam.samples.col(b + c.d * a) = lam.samples.col(a + c.d * b);
    }
  }
  return lam;
}

ExtremalityCertificate evaluate_certificate(const PolarizedL& lam, const Eigen::MatrixXd& B,
                                            const CertifyOptions& opts) {
  if (B.rows() != lam.d || B.cols() != lam.d) throw PreconditionError("certificate matrix has the wrong size");
  ExtremalityCertificate cert;
  cert.tau = opts.tau_relative * lambda_scale(lam);
  cert.B = B;
  finish(lam, cert);
  return cert;
}

ExtremalityCertificate certify(const PolarizedL& lam, const CertifyOptions& opts) {
  if (lam.d < 1) throw PreconditionError("cannot certify an empty cluster");
  ExtremalityCertificate cert;
  cert.tau = opts.tau_relative * lambda_scale(lam);

  if (lam.d == 1) {
    // L has trivial kernel on a line: a simple eigenvalue is never certified.
    cert.B = Eigen::MatrixXd::Ones(1, 1);
    finish(lam, cert);
    cert.verdict = Verdict::NotCertified;
    return cert;
  }

  SpectrahedronProblem prob;
  prob.d = lam.d;
  prob.K = gram_operator(lam.samples, lam.weights);
  SpectrahedronOptions so;
  so.max_iters = opts.max_iters;
  so.objective_floor = 1e-4 * cert.tau * cert.tau;
  so.gap_tol = 1e-3 * cert.tau * cert.tau;
  const SpectrahedronResult res = minimize_on_spectrahedron(prob, so);

  cert.B = res.B;
  cert.duality_gap = res.gap;
  cert.iterations = res.iterations;
  cert.history = res.history;
  finish(lam, cert);
  if (cert.verdict == Verdict::NotCertified && !res.converged && cert.residual < 10.0 * cert.tau)
    cert.inconclusive = true;
  return cert;
}

double cross_check_constancy(const SurfaceModel& model, const SpectralData& spec, const EigenspaceCluster& c,
                             const ExtremalityCertificate& cert) {
  const Eigen::MatrixXd fv = model.basis_values() * (c.basis * cert.coords);
  const Eigen::VectorXd sum = fv.cwiseAbs2().rowwise().sum();
  const double vol = integrate(model, Eigen::VectorXd::Ones(model.node_count()), spec.factor);
  const double mean = integrate(model, sum, spec.factor) / vol;
  return std::sqrt(integrate(model, (sum.array() - mean).square().matrix(), spec.factor));
}

}  // namespace kspec
