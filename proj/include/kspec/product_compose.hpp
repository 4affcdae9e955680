#pragma once

// Spectra of Riemannian (Kähler) products M × M' built from factor data.
//
// Eigenfunctions of the product are tensor products f ⊗ g with eigenvalue
// λ + μ. The m = 2 operator
//     L(F) = λ² F² - 2λ |∇F|² + |dd^c F|²
// is evaluated from factor data. For pure tensors F_a = f_a ⊗ g_a,
//     (∇F_a, ∇F_b) = (∇f_a, ∇f_b) g_a g_b + f_a f_b (∇g_a, ∇g_b).
// The members used here have one constant factor, so dd^c f_a and dd^c g_b
// live in the orthogonal summands Λ²M and Λ²M', and with (λ_a, μ_a) the
// factor eigenvalues of F_a,
//     (dd^c F_a, dd^c F_b) = (λ_a λ_b + μ_a μ_b) F_a F_b.
// On f ⊗ 1 this reduces to L_M(f) ⊗ 1.

#include "kspec/extremality_cert.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace kspec {

class AbstractSpectrum {
 public:
  enum class Kind { Surface, Point, Product };

  // A surface factor with the metric of `spec`; eigenvalues beyond the
  // model's trusted range are kept but marked untrusted.
  static AbstractSpectrum surface(std::shared_ptr<const SurfaceModel> model, SpectralData spec);
  // The one-point space: spectrum {0}, unit measure.
  static AbstractSpectrum point();

  Kind kind() const { return kind_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double area() const { return area_; }
  // Eigenvalues strictly below this bound are complete and trusted.
  double trusted_below() const { return trusted_below_; }
  Eigen::Index trusted_depth() const;

  // Factor indices (i, j) of product eigenvalue n.
  const std::vector<std::pair<Eigen::Index, Eigen::Index>>& pairs() const { return pairs_; }
  const AbstractSpectrum& left() const { return *left_; }
  const AbstractSpectrum& right() const { return *right_; }

  // Leaf data: joint quadrature nodes for products are (a, b) -> a + N_A·b.
  Eigen::Index node_count() const;
  Eigen::VectorXd weights() const;  // quadrature weights of the metric volume
  // Node samples of L²-normalized eigenfunction i (leaf factors only).
  Eigen::VectorXd values(Eigen::Index i) const;
  // (∇f_i, ∇f_j) in the metric at the nodes (leaf factors only).
  Eigen::VectorXd gradient_product(Eigen::Index i, Eigen::Index j) const;

  const SurfaceModel* model() const { return model_.get(); }
  const SpectralData* spectral_data() const { return spec_.get(); }

 private:
  friend AbstractSpectrum product_spectrum(const AbstractSpectrum&, const AbstractSpectrum&, Eigen::Index);
  Kind kind_ = Kind::Point;
  Eigen::VectorXd eigenvalues_;
  double area_ = 1.0;
  double trusted_below_ = 0.0;
  std::shared_ptr<const SurfaceModel> model_;
  std::shared_ptr<const SpectralData> spec_;
  Eigen::MatrixXd values_, grad1_, grad2_;  // leaf: nodes x eigenfunctions, gradients in a g̃-orthonormal frame
  Eigen::VectorXd weights_;
  std::shared_ptr<const AbstractSpectrum> left_, right_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs_;
};

// Lowest n eigenvalues of A × B, sorted, ties ordered by (i, j). Throws
// PreconditionError when the n-th eigenvalue is not trusted in both factors.
AbstractSpectrum product_spectrum(const AbstractSpectrum& A, const AbstractSpectrum& B, Eigen::Index n);

// Index range [k, k + d) of the product cluster containing eigenvalue k.
std::pair<Eigen::Index, Eigen::Index> product_cluster(const AbstractSpectrum& P, Eigen::Index k,
                                                      double tau = kDefaultClusterTolerance);

// Polarized L on the product cluster [first, first + d). Members must be of
// the form f ⊗ 1 or 1 ⊗ g, and both factors must be leaves.
PolarizedL product_polarize(const AbstractSpectrum& P, Eigen::Index first, Eigen::Index d);

// Lifts a λ₁ certificate of A (built on the λ₁ cluster of A's spectral data)
// to A × B, supported on the f_i ⊗ 1 block, and re-evaluates the residual on
// the product grid. For the same B-matrix the residual scales as
// ‖R_A‖ / √area(B). Refuses if the certificate is not CertifiedExtremal or
// λ₁(B) < λ₁(A).
ExtremalityCertificate lift_certificate(const ExtremalityCertificate& certA, const AbstractSpectrum& A,
                                        const AbstractSpectrum& B, const CertifyOptions& opts = {});

}  // namespace kspec
