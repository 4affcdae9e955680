#pragma once

// λ₁·Area ascent over admissible Kähler potentials.
//
// Each step linearizes the lowest eigenvalues near λ₁ (an ε-group, so that
// nearly coalescing branches are moved together) along a fixed basis of
// directions φ_j:  λ(t) ≈ spec(D + t Σ_j c_j G_j),  D = diag(λ_a - λ₁),
// with G_j the group Gram matrices. The direction is the proximal max-min
//     c* = argmax_c  λ_min(D + Σ c_j G_j) - (μ/2)‖c‖²,
// whose dual is  min_{B ⪰ 0, tr B = 1} ⟨B, D⟩ + (1/2μ) Σ_j ⟨B, G_j⟩²  with
// c*_j = ⟨B*, G_j⟩ / μ. The dual lives on the spectrahedron and is solved by
// the Frank-Wolfe component. A backtracking line search (factor ½, Armijo
// constant 1e-4) keeps the conformal factor positive. The run stops when
// min_B ‖(⟨B, G_j⟩)_j‖ over the group falls below `tol`: no direction raises
// every branch to first order.

#include "kspec/spectral_solver.hpp"

#include <string>
#include <vector>

namespace kspec {

struct FlowRecord {
  int step = 0;
  double lambda1_area = 0.0;
  double step_size = 0.0;
  Eigen::Index cluster_dim = 0;
};

enum class FlowStop { Stationary, MaxSteps, NoAdmissibleStep, NoProgress };

struct FlowState {
  KahlerPotential phi;
  double lambda1 = 0.0;
  double lambda1_area = 0.0;
  std::vector<FlowRecord> history;  // accepted states, starting with φ₀ as step 0
  int steps = 0;                    // accepted steps
  FlowStop stop = FlowStop::MaxSteps;
  double stationarity = 0.0;        // last min_B ‖(⟨B, G_j⟩)_j‖
};

struct FlowOptions {
  int direction_degree = -1;    // -1: L_max / 2
  double group_width = 0.1;     // ε-group: eigenvalues below (1 + width) λ₁
  double prox_initial = 1.0;    // μ at the first step (relative to λ₁)
  double armijo = 1e-4;
  int max_backtracks = 40;
  double eps_pos = kDefaultPositivity;
};

// Basis indices used as ascent directions: degrees 1..direction_degree.
std::vector<Eigen::Index> flow_directions(const SurfaceModel& model, int direction_degree);

FlowState ascend(const SurfaceModel& model, const KahlerPotential& phi0, int max_steps, double tol,
                 const FlowOptions& opts = {});

std::string to_string(FlowStop s);

}  // namespace kspec
