#include "kspec/spectrahedron.hpp"

#include "kspec/errors.hpp"
#include "kspec/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace kspec {

namespace {

Eigen::VectorXd vec(const Eigen::MatrixXd& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); }

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, Eigen::Index d) { return Eigen::Map<const Eigen::MatrixXd>(v.data(), d, d); }

Eigen::MatrixXd sym(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a.array() * b.array()).sum(); }

double quad(const SpectrahedronProblem& p, const Eigen::MatrixXd& X) {
  const Eigen::VectorXd x = vec(X);
  return x.dot(p.K * x);
}

Eigen::MatrixXd gradient(const SpectrahedronProblem& p, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd g = 2.0 * unvec(p.K * vec(B), p.d);
  if (p.C.size() != 0) g += p.C;
  return sym(g);
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

// Newton step on the face {U W Uᵀ : tr W = 1} through the range of B.
bool face_newton(const SpectrahedronProblem& p, Eigen::MatrixXd& B, double& fB) {
  const Eigen::Index d = p.d;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  const double top = es.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < d; ++i)
    if (es.eigenvalues()[i] > 1e-10 * top) keep.push_back(i);
  const auto r = static_cast<Eigen::Index>(keep.size());
  if (r == 0) return false;
  Eigen::MatrixXd U(d, r);
  for (Eigen::Index i = 0; i < r; ++i) U.col(i) = es.eigenvectors().col(keep[static_cast<std::size_t>(i)]);

  const Eigen::Index m = r * (r + 1) / 2;
  Eigen::MatrixXd P(d * d, m);
  Eigen::VectorXd t(m);
  Eigen::Index col = 0;
  for (Eigen::Index q = 0; q < r; ++q) {
    for (Eigen::Index pp = 0; pp <= q; ++pp, ++col) {
      Eigen::MatrixXd E;
      if (pp == q) {
        E = U.col(pp) * U.col(pp).transpose();
        t[col] = 1.0;
      } else {
        E = (U.col(pp) * U.col(q).transpose() + U.col(q) * U.col(pp).transpose()) / std::sqrt(2.0);
        t[col] = 0.0;
      }
      P.col(col) = vec(E);
    }
  }
  const Eigen::MatrixXd H = P.transpose() * p.K * P;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
  if (p.C.size() != 0) c = P.transpose() * vec(p.C);

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
  kkt.topLeftCorner(m, m) = 2.0 * H;
  kkt.topRightCorner(m, 1) = t;
  kkt.bottomLeftCorner(1, m) = t.transpose();
  Eigen::VectorXd rhs(m + 1);
  rhs.head(m) = -c;
  rhs[m] = 1.0;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
  const Eigen::VectorXd sol = cod.solve(rhs);
  if (!sol.allFinite() || (kkt * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) return false;

  Eigen::MatrixXd target = sym(unvec(P * sol.head(m), d));
  target /= target.trace();
  const Eigen::MatrixXd dir = target - B;
  double gamma = 1.0;
  if (min_eigenvalue(target) < 0.0) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (min_eigenvalue(B + mid * dir) >= 0.0 ? lo : hi) = mid;
    }
    gamma = lo;
  }
  if (gamma <= 0.0) return false;
  Eigen::MatrixXd cand = sym(B + gamma * dir);
  cand /= cand.trace();
  if (min_eigenvalue(cand) < -1e-15) return false;
  const double fc = spectrahedron_objective(p, cand);
  if (!(fc < fB)) return false;
  B = cand;
  fB = fc;
  return true;
}

}  // namespace

Eigen::MatrixXd gram_operator(const Eigen::MatrixXd& samples, const Eigen::VectorXd& weights) {
  return kernels::weighted_gram(samples, weights);
}

double spectrahedron_objective(const SpectrahedronProblem& p, const Eigen::MatrixXd& B) {
  double f = quad(p, B);
  if (p.C.size() != 0) f += inner(p.C, B);
  return f;
}

SpectrahedronResult minimize_on_spectrahedron(const SpectrahedronProblem& p, const SpectrahedronOptions& opts) {
  if (p.d < 1 || p.K.rows() != p.d * p.d || p.K.cols() != p.d * p.d)
    throw PreconditionError("spectrahedron problem has inconsistent dimensions");
  if (p.C.size() != 0 && (p.C.rows() != p.d || p.C.cols() != p.d))
    throw PreconditionError("linear term has the wrong shape");

  SpectrahedronResult res;
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(p.d, p.d) / double(p.d);
  double fB = spectrahedron_objective(p, B);

  for (int it = 0; it < opts.max_iters; ++it) {
    res.history.push_back(fB);
    const Eigen::MatrixXd G = gradient(p, B);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const Eigen::VectorXd s = es.eigenvectors().col(0);
    const double gap = inner(G, B) - es.eigenvalues()[0];
    res.gap = gap;
    res.iterations = it;
    if (gap <= opts.gap_tol || fB <= opts.objective_floor) {
      res.converged = true;
      break;
    }
    const Eigen::MatrixXd D = s * s.transpose() - B;
    const double curv = quad(p, D);
    const double gamma = curv > 0.0 ? std::min(1.0, gap / (2.0 * curv)) : 1.0;
    Eigen::MatrixXd next = sym(B + gamma * D);
    next /= next.trace();
    const double fn = spectrahedron_objective(p, next);
    if (fn <= fB) {
      B = next;
      fB = fn;
    }
    if (opts.face_newton) face_newton(p, B, fB);
    res.iterations = it + 1;
  }
  res.B = B;
  res.objective = fB;
  res.gradient = gradient(p, B);
  if (!res.converged) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res.gradient, Eigen::EigenvaluesOnly);
    res.gap = inner(res.gradient, B) - es.eigenvalues()[0];
    res.converged = res.gap <= opts.gap_tol || fB <= opts.objective_floor;
  }
  return res;
}

}  // namespace kspec
