#include "kspec/kernels.hpp"

#include <omp.h>

namespace kspec::kernels {

namespace {

inline double column_dot(const Eigen::MatrixXd& values, const Eigen::VectorXd& weights, Eigen::Index a,
                         Eigen::Index b) {
  const double* va = values.col(a).data();
  const double* vb = values.col(b).data();
  const double* w = weights.data();
  double s = 0.0;
  for (Eigen::Index j = 0; j < values.rows(); ++j) s += w[j] * va[j] * vb[j];
  return s;
}

}  // namespace

Eigen::MatrixXd weighted_gram_serial(const Eigen::MatrixXd& values, const Eigen::VectorXd& weights) {
  const Eigen::Index n = values.cols();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = b; a < n; ++a) {
      g(a, b) = column_dot(values, weights, a, b);
      g(b, a) = g(a, b);
    }
  }
  return g;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& values, const Eigen::VectorXd& weights) {
  const Eigen::Index n = values.cols();
  Eigen::MatrixXd g(n, n);
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = b; a < n; ++a) {
      g(a, b) = column_dot(values, weights, a, b);
    }
  }
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = b + 1; a < n; ++a) g(b, a) = g(a, b);
  return g;
}

Eigen::VectorXd weighted_project_serial(const Eigen::MatrixXd& values, const Eigen::VectorXd& weights,
                                        const Eigen::VectorXd& samples) {
  Eigen::VectorXd y(values.cols());
  for (Eigen::Index a = 0; a < values.cols(); ++a) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < values.rows(); ++j) s += weights[j] * values(j, a) * samples[j];
    y[a] = s;
  }
  return y;
}

Eigen::VectorXd weighted_project(const Eigen::MatrixXd& values, const Eigen::VectorXd& weights,
                                 const Eigen::VectorXd& samples) {
  Eigen::VectorXd y(values.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index a = 0; a < values.cols(); ++a) {
    const double* v = values.col(a).data();
    double s = 0.0;
    for (Eigen::Index j = 0; j < values.rows(); ++j) s += weights[j] * v[j] * samples[j];
    y[a] = s;
  }
  return y;
}

double weighted_sum(const Eigen::VectorXd& weights, const Eigen::VectorXd& samples) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < weights.size(); ++j) s += weights[j] * samples[j];
  return s;
}

void set_thread_limit(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int thread_limit() { return omp_get_max_threads(); }

}  // namespace kspec::kernels
