#include "kspec/product_compose.hpp"

#include "kspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace kspec {

AbstractSpectrum AbstractSpectrum::surface(std::shared_ptr<const SurfaceModel> model, SpectralData spec) {
  if (!model) throw PreconditionError("surface spectrum needs a model");
  AbstractSpectrum s;
  s.kind_ = Kind::Surface;
  s.eigenvalues_ = spec.eigenvalues;
  s.area_ = model->area();
  s.trusted_below_ = model->trusted_below();
  if (spec.size() < model->basis_size()) s.trusted_below_ = std::min(s.trusted_below_, spec.eigenvalues[spec.size() - 1]);
  const Eigen::VectorXd inv_root = spec.factor.values.cwiseSqrt().cwiseInverse();
  s.values_ = model->basis_values() * spec.eigvecs;
  s.grad1_ = inv_root.asDiagonal() * (model->table().grad1 * spec.eigvecs);
  s.grad2_ = inv_root.asDiagonal() * (model->table().grad2 * spec.eigvecs);
  s.weights_ = model->weights().cwiseProduct(spec.factor.values);
  s.model_ = std::move(model);
  s.spec_ = std::make_shared<const SpectralData>(std::move(spec));
  return s;
}

AbstractSpectrum AbstractSpectrum::point() {
  AbstractSpectrum s;
  s.kind_ = Kind::Point;
  s.eigenvalues_ = Eigen::VectorXd::Zero(1);
  s.area_ = 1.0;
  s.trusted_below_ = std::numeric_limits<double>::infinity();
  s.values_ = Eigen::MatrixXd::Ones(1, 1);
  s.grad1_ = Eigen::MatrixXd::Zero(1, 1);
  s.grad2_ = Eigen::MatrixXd::Zero(1, 1);
  s.weights_ = Eigen::VectorXd::Ones(1);
  return s;
}

Eigen::Index AbstractSpectrum::trusted_depth() const {
  Eigen::Index n = 0;
  while (n < eigenvalues_.size() && eigenvalues_[n] < trusted_below_) ++n;
  return n;
}

namespace {

void require_leaf(const AbstractSpectrum& s) {
  if (s.kind() == AbstractSpectrum::Kind::Product)
    throw PreconditionError("node evaluation of nested products is not supported");
}

void require_index(const AbstractSpectrum& s, Eigen::Index i) {
  if (i < 0 || i >= s.eigenvalues().size()) throw PreconditionError("eigenfunction index out of range");
}

// out[a + n_a·b] = x[a]·y[b]
Eigen::VectorXd kron(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::VectorXd out(x.size() * y.size());
  for (Eigen::Index b = 0; b < y.size(); ++b) out.segment(b * x.size(), x.size()) = y[b] * x;
  return out;
}

}  // namespace

Eigen::Index AbstractSpectrum::node_count() const {
  if (kind_ == Kind::Product) return left_->node_count() * right_->node_count();
  return weights_.size();
}

Eigen::VectorXd AbstractSpectrum::weights() const {
  if (kind_ == Kind::Product) return kron(left_->weights(), right_->weights());
  return weights_;
}

Eigen::VectorXd AbstractSpectrum::values(Eigen::Index i) const {
  require_index(*this, i);
  if (kind_ == Kind::Product) {
    require_leaf(*left_);
    require_leaf(*right_);
    const auto [a, b] = pairs_[static_cast<std::size_t>(i)];
    return kron(left_->values(a), right_->values(b));
  }
  return values_.col(i);
}

Eigen::VectorXd AbstractSpectrum::gradient_product(Eigen::Index i, Eigen::Index j) const {
  require_index(*this, i);
  require_index(*this, j);
  if (kind_ == Kind::Product) {
    require_leaf(*left_);
    require_leaf(*right_);
    const auto [ai, bi] = pairs_[static_cast<std::size_t>(i)];
    const auto [aj, bj] = pairs_[static_cast<std::size_t>(j)];
    return kron(left_->gradient_product(ai, aj), right_->values(bi).cwiseProduct(right_->values(bj))) +
           kron(left_->values(ai).cwiseProduct(left_->values(aj)), right_->gradient_product(bi, bj));
  }
  return grad1_.col(i).cwiseProduct(grad1_.col(j)) + grad2_.col(i).cwiseProduct(grad2_.col(j));
}

AbstractSpectrum product_spectrum(const AbstractSpectrum& A, const AbstractSpectrum& B, Eigen::Index n) {
  const Eigen::Index na = A.eigenvalues().size(), nb = B.eigenvalues().size();
  if (n < 1 || n > na * nb) {
    std::ostringstream os;
    os << "requested " << n << " product eigenvalues from " << na * nb << " available pairs";
    throw PreconditionError(os.str());
  }
  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> all;
  all.reserve(static_cast<std::size_t>(na * nb));
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < nb; ++j) all.emplace_back(A.eigenvalues()[i] + B.eigenvalues()[j], i, j);
  std::sort(all.begin(), all.end());

  AbstractSpectrum P;
  P.kind_ = AbstractSpectrum::Kind::Product;
  P.area_ = A.area() * B.area();
  P.trusted_below_ = std::min(A.trusted_below(), B.trusted_below());
  P.eigenvalues_.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& [v, i, j] = all[static_cast<std::size_t>(k)];
    P.eigenvalues_[k] = v;
    P.pairs_.emplace_back(i, j);
  }
  if (!(P.eigenvalues_[n - 1] < P.trusted_below_)) {
    std::ostringstream os;
    os << "product eigenvalue " << n - 1 << " = " << P.eigenvalues_[n - 1]
       << " is beyond the trusted range of the factors (< " << P.trusted_below_ << ")";
    throw PreconditionError(os.str());
  }
  P.left_ = std::make_shared<const AbstractSpectrum>(A);
  P.right_ = std::make_shared<const AbstractSpectrum>(B);
  return P;
}

std::pair<Eigen::Index, Eigen::Index> product_cluster(const AbstractSpectrum& P, Eigen::Index k, double tau) {
  const Eigen::VectorXd& ev = P.eigenvalues();
  if (k < 1 || k >= ev.size()) throw PreconditionError("product cluster index out of range");
  const double tol = tau * std::abs(ev[k]);
  Eigen::Index lo = k, hi = k;
  while (lo > 1 && ev[hi] - ev[lo - 1] <= tol) --lo;
  while (hi + 1 < ev.size() && ev[hi + 1] - ev[lo] <= tol) ++hi;
  if (hi + 1 >= ev.size())
    throw TrustError("product cluster reaches the end of the computed spectrum; request more eigenvalues");
  return {lo, hi - lo + 1};
}

PolarizedL product_polarize(const AbstractSpectrum& P, Eigen::Index first, Eigen::Index d) {
  if (P.kind() != AbstractSpectrum::Kind::Product) throw PreconditionError("product_polarize needs a product spectrum");
  if (d < 1 || first < 1 || first + d > P.eigenvalues().size()) throw PreconditionError("cluster range out of bounds");
  for (Eigen::Index a = first; a < first + d; ++a) {
    const auto [i, j] = P.pairs()[static_cast<std::size_t>(a)];
    if (i != 0 && j != 0) throw PreconditionError("cluster member is a mixed tensor f ⊗ g; only f ⊗ 1 and 1 ⊗ g are supported");
  }
  PolarizedL out;
  out.d = d;
  out.k = first;
  out.lambda = P.eigenvalues().segment(first, d).mean();
  out.weights = P.weights();
  out.samples.resize(P.node_count(), d * d);
  const double lam = out.lambda;
  std::vector<Eigen::VectorXd> vals;
  for (Eigen::Index a = 0; a < d; ++a) vals.push_back(P.values(first + a));
  for (Eigen::Index a = 0; a < d; ++a) {
    const auto [ia, ja] = P.pairs()[static_cast<std::size_t>(first + a)];
    for (Eigen::Index b = a; b < d; ++b) {
      const auto [ib, jb] = P.pairs()[static_cast<std::size_t>(first + b)];
      const double dd = P.left().eigenvalues()[ia] * P.left().eigenvalues()[ib] +
                        P.right().eigenvalues()[ja] * P.right().eigenvalues()[jb];
      const Eigen::VectorXd ff = vals[static_cast<std::size_t>(a)].cwiseProduct(vals[static_cast<std::size_t>(b)]);
      const Eigen::VectorXd col = (lam * lam + dd) * ff - 2.0 * lam * P.gradient_product(first + a, first + b);
      out.samples.col(a + d * b) = col;
      out.samples.col(b + d * a) = col;
    }
  }
  return out;
}

ExtremalityCertificate lift_certificate(const ExtremalityCertificate& certA, const AbstractSpectrum& A,
                                        const AbstractSpectrum& B, const CertifyOptions& opts) {
  if (certA.verdict != Verdict::CertifiedExtremal) throw PreconditionError("only a certified metric can be lifted");
  if (A.kind() == AbstractSpectrum::Kind::Product || B.kind() == AbstractSpectrum::Kind::Product)
    throw PreconditionError("lifting needs leaf factors");
  if (A.eigenvalues().size() < 2) throw PreconditionError("factor A has no λ₁");
  const double l1a = A.eigenvalues()[1];
  const double l1b = B.eigenvalues().size() > 1 ? B.eigenvalues()[1] : std::numeric_limits<double>::infinity();
  if (l1b < l1a * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "λ₁ of the second factor (" << l1b << ") is below λ₁ of the first (" << l1a
       << "); the product is not λ₁-extremal in general";
    throw PreconditionError(os.str());
  }
  // Certificate coordinates refer to the λ₁ cluster of A.
  const Eigen::Index dA = certA.B.rows();
  const Eigen::Index kA = 1;
  if (A.eigenvalues().size() < kA + dA + 1) throw PreconditionError("certificate does not match factor A");

  const Eigen::Index total = A.eigenvalues().size() * B.eigenvalues().size();
  Eigen::Index n = 1;
  const double T = std::min(A.trusted_below(), B.trusted_below());
  {
    // Every pair strictly inside the trusted range.
    Eigen::Index cnt = 0;
    for (Eigen::Index i = 0; i < A.eigenvalues().size(); ++i)
      for (Eigen::Index j = 0; j < B.eigenvalues().size(); ++j)
        if (A.eigenvalues()[i] + B.eigenvalues()[j] < T) ++cnt;
    n = std::min(total, cnt);
  }
  const AbstractSpectrum P = product_spectrum(A, B, n);
  const auto [first, d] = product_cluster(P, 1, 1e-6);

  Eigen::MatrixXd Bp = Eigen::MatrixXd::Zero(d, d);
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(dA), -1);
  for (Eigen::Index m = 0; m < d; ++m) {
    const auto [i, j] = P.pairs()[static_cast<std::size_t>(first + m)];
    if (j == 0 && i >= kA && i < kA + dA) pos[static_cast<std::size_t>(i - kA)] = m;
  }
  for (Eigen::Index a = 0; a < dA; ++a)
    if (pos[static_cast<std::size_t>(a)] < 0) throw TrustError("λ₁ cluster of A is not contained in the product λ₁ cluster");
  for (Eigen::Index a = 0; a < dA; ++a)
    for (Eigen::Index b = 0; b < dA; ++b)
      Bp(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]) = certA.B(a, b);
  return evaluate_certificate(product_polarize(P, first, d), Bp, opts);
}

}  // namespace kspec
