#pragma once

// Data-parallel quadrature kernels.
//
// Every kernel has a serial reference (`*_serial`) and an OpenMP version.
// The parallel versions assign each output entry to exactly one thread and
// sum in the same order as the reference, so results are bitwise identical
// regardless of the thread count.

#include <Eigen/Dense>

namespace kspec::kernels {

// G = Vᵀ diag(w) V, i.e. G_ab = Σ_j w_j V_ja V_jb.
Eigen::MatrixXd weighted_gram_serial(const Eigen::MatrixXd& values, const Eigen::VectorXd& weights);
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& values, const Eigen::VectorXd& weights);

// y_a = Σ_j w_j V_ja s_j  (projection of node samples onto the columns of V).
Eigen::VectorXd weighted_project_serial(const Eigen::MatrixXd& values, const Eigen::VectorXd& weights,
                                        const Eigen::VectorXd& samples);
Eigen::VectorXd weighted_project(const Eigen::MatrixXd& values, const Eigen::VectorXd& weights,
                                 const Eigen::VectorXd& samples);

// Σ_j w_j s_j with a fixed left-to-right order.
double weighted_sum(const Eigen::VectorXd& weights, const Eigen::VectorXd& samples);

// Caps the OpenMP team size; n <= 0 leaves the runtime default.
void set_thread_limit(int n);
int thread_limit();

}  // namespace kspec::kernels
