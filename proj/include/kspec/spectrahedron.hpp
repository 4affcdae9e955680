#pragma once

// Convex quadratic minimization over the spectrahedron
//     {B symmetric d x d : B ⪰ 0, tr B = 1}
// of  f(B) = ⟨B, 𝒦 B⟩ + ⟨C, B⟩,  with 𝒦 a PSD operator on vec(B).
//
// Frank-Wolfe: the linear minimization oracle over the spectrahedron is the
// rank-one matrix s sᵀ for the bottom eigenvector s of the gradient
// G = 2 𝒦 B + C, and the step length is the exact minimizer of the 1-D
// quadratic. Each iteration is followed by a Newton step on the face spanned
// by the range of B (an equality-constrained quadratic, solved exactly),
// accepted only when it lowers f. The duality gap ⟨G, B⟩ - λ_min(G) bounds
// f(B) - f* from above.

#include <Eigen/Dense>

#include <vector>

namespace kspec {

struct SpectrahedronProblem {
  Eigen::Index d = 0;
  Eigen::MatrixXd K;  // d² x d², acting on column-major vec(B)
  Eigen::MatrixXd C;  // d x d linear term (may be empty)
};

struct SpectrahedronOptions {
  int max_iters = 500;
  double gap_tol = 1e-18;          // stop when the duality gap is below this
  double objective_floor = -1e300; // or when f(B) is below this
  bool face_newton = true;
};

struct SpectrahedronResult {
  Eigen::MatrixXd B;
  double objective = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // f(B) at the start of every iteration
  Eigen::MatrixXd gradient;     // G at the returned B
};

// Builds 𝒦 from vectors V_ab (columns of `samples`, index a + d·b) under the
// weighted inner product Σ_j w_j x_j y_j, so that f(B) = ‖Σ_ab B_ab V_ab‖².
Eigen::MatrixXd gram_operator(const Eigen::MatrixXd& samples, const Eigen::VectorXd& weights);

double spectrahedron_objective(const SpectrahedronProblem& p, const Eigen::MatrixXd& B);

SpectrahedronResult minimize_on_spectrahedron(const SpectrahedronProblem& p, const SpectrahedronOptions& opts = {});

}  // namespace kspec
