#include "kspec/kernels.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace kspec;

TEST(Kernels, GramParallelMatchesSerialBitwise) {
  gen::Gen g(5);
  Eigen::MatrixXd V(517, 37);
  for (Eigen::Index i = 0; i < V.size(); ++i) V.data()[i] = g.normal();
  const Eigen::VectorXd w = g.normal_vector(517).cwiseAbs();
  for (int threads : {1, 2, 3}) {
    kernels::set_thread_limit(threads);
    EXPECT_TRUE(kernels::weighted_gram(V, w) == kernels::weighted_gram_serial(V, w)) << threads;
  }
  kernels::set_thread_limit(0);
}

TEST(Kernels, ProjectParallelMatchesSerialBitwise) {
  gen::Gen g(6);
  Eigen::MatrixXd V(301, 19);
  for (Eigen::Index i = 0; i < V.size(); ++i) V.data()[i] = g.normal();
  const Eigen::VectorXd w = g.normal_vector(301), s = g.normal_vector(301);
  EXPECT_TRUE(kernels::weighted_project(V, w, s) == kernels::weighted_project_serial(V, w, s));
}

TEST(Kernels, GramMatchesDenseProduct) {
  gen::Gen g(7);
  Eigen::MatrixXd V(50, 6);
  for (Eigen::Index i = 0; i < V.size(); ++i) V.data()[i] = g.normal();
  const Eigen::VectorXd w = g.normal_vector(50);
  const Eigen::MatrixXd ref = V.transpose() * w.asDiagonal() * V;
  EXPECT_LT((kernels::weighted_gram(V, w) - ref).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(kernels::weighted_sum(w, V.col(0)), w.dot(V.col(0)), 1e-12);
}
