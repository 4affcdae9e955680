#include "kspec/flow.hpp"

#include "kspec/errors.hpp"
#include "kspec/spectrahedron.hpp"
#include "kspec/variation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace kspec {

namespace {

struct Group {
  Eigen::MatrixXd basis;
  Eigen::VectorXd eigenvalues;
  std::vector<Eigen::MatrixXd> grams;
};

Group build_group(const SurfaceModel& model, const SpectralData& spec, const std::vector<Eigen::Index>& dirs,
                  double width) {
  const double l1 = spec.eigenvalues[1];
  Eigen::Index d = 1;
  while (1 + d < spec.size() && spec.eigenvalues[1 + d] <= (1.0 + width) * l1 && spec.trusted(1 + d)) ++d;
  Group g;
  g.basis = spec.eigvecs.middleCols(1, d);
  g.eigenvalues = spec.eigenvalues.segment(1, d);
  const Eigen::Index n = model.basis_size();
  for (Eigen::Index j : dirs) {
    KahlerPotential e{Eigen::VectorXd::Zero(n - 1)};
    e.coeffs[j - 1] = 1.0;
    g.grams.push_back(group_gram(model, spec, g.basis, g.eigenvalues, e));
  }
  return g;
}

// Rows are vec(G_j)ᵀ, so ‖A(B)‖² = vec(B)ᵀ (VᵀV) vec(B).
Eigen::MatrixXd stacked(const Group& g) {
  const Eigen::Index d = g.eigenvalues.size();
  Eigen::MatrixXd v(static_cast<Eigen::Index>(g.grams.size()), d * d);
  for (std::size_t j = 0; j < g.grams.size(); ++j)
    v.row(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(g.grams[j].data(), d * d).transpose();
  return v;
}

Eigen::VectorXd apply_A(const Eigen::MatrixXd& v, const Eigen::MatrixXd& B) {
  return v * Eigen::Map<const Eigen::VectorXd>(B.data(), B.size());
}

double lambda_min(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

}  // namespace

std::string to_string(FlowStop s) {
  switch (s) {
    case FlowStop::Stationary: return "stationary";
    case FlowStop::MaxSteps: return "max_steps";
    case FlowStop::NoAdmissibleStep: return "no_admissible_step";
    case FlowStop::NoProgress: return "no_progress";
  }
  return "unknown";
}

std::vector<Eigen::Index> flow_directions(const SurfaceModel& model, int direction_degree) {
  const int deg = direction_degree < 0 ? std::max(1, model.l_max() / 2) : direction_degree;
  if (deg < 1 || deg > model.l_max()) throw PreconditionError("direction degree must lie in 1..L_max");
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 1; i < model.basis_size(); ++i)
    if (model.degree(i) <= deg) out.push_back(i);
  return out;
}

FlowState ascend(const SurfaceModel& model, const KahlerPotential& phi0, int max_steps, double tol,
                 const FlowOptions& opts) {
  if (max_steps < 0) throw PreconditionError("max_steps must be non-negative");
  if (!(tol > 0.0)) throw PreconditionError("flow tolerance must be positive");
  conformal_factor(model, phi0, opts.eps_pos);  // throws if φ₀ is not admissible

  const std::vector<Eigen::Index> dirs = flow_directions(model, opts.direction_degree);
  const Eigen::Index n = model.basis_size();
  const double area = model.area();

  FlowState st;
  st.phi = phi0;
  SpectralData spec = solve_spectrum(model, st.phi, n);
  st.lambda1 = spec.eigenvalues[1];
  st.lambda1_area = st.lambda1 * area;

  double mu = opts.prox_initial * st.lambda1;
  for (int step = 0;; ++step) {
    const Group g = build_group(model, spec, dirs, opts.group_width);
    const Eigen::Index d = g.eigenvalues.size();
    if (step == 0) st.history.push_back({0, st.lambda1_area, 0.0, d});
    const Eigen::MatrixXd V = stacked(g);
    const Eigen::MatrixXd K = V.transpose() * V;

    SpectrahedronProblem stat{d, K, {}};
    SpectrahedronOptions sopt;
    sopt.max_iters = 300;
    sopt.objective_floor = 0.01 * tol * tol;
    const SpectrahedronResult sr = minimize_on_spectrahedron(stat, sopt);
    st.stationarity = std::sqrt(std::max(0.0, sr.objective));
    if (st.stationarity <= tol) {
      st.stop = FlowStop::Stationary;
      break;
    }
    if (step >= max_steps) {
      st.stop = FlowStop::MaxSteps;
      break;
    }

    const Eigen::MatrixXd D = (g.eigenvalues.array() - st.lambda1).matrix().asDiagonal();
    bool accepted = false;
    bool any_admissible = false;
    for (int attempt = 0; attempt < 8 && !accepted; ++attempt) {
      SpectrahedronProblem prox{d, K / (2.0 * mu), D};
      SpectrahedronOptions popt;
      popt.max_iters = 300;
      popt.gap_tol = 1e-14 * st.lambda1;
      const SpectrahedronResult pr = minimize_on_spectrahedron(prox, popt);
      const Eigen::VectorXd c = apply_A(V, pr.B) / mu;

      Eigen::MatrixXd pencil = D;
      for (std::size_t j = 0; j < g.grams.size(); ++j) pencil += c[static_cast<Eigen::Index>(j)] * g.grams[j];
      const double predicted = lambda_min(pencil);

      KahlerPotential dir = KahlerPotential::zero(model);
      for (std::size_t j = 0; j < dirs.size(); ++j) dir.coeffs[dirs[j] - 1] = c[static_cast<Eigen::Index>(j)];
      const double hi = admissible_interval(model, st.phi, dir, opts.eps_pos).second;

      double t = 1.0;
      for (int bt = 0; bt <= opts.max_backtracks; ++bt, t *= 0.5) {
        if (!(t < hi)) continue;
        any_admissible = true;
        KahlerPotential trial{st.phi.coeffs + t * dir.coeffs};
        SpectralData ts = solve_spectrum(model, trial, n);
        const double l1 = ts.eigenvalues[1];
        if (l1 >= st.lambda1 + opts.armijo * t * std::max(predicted, 0.0) && l1 > st.lambda1) {
          st.phi = trial;
          spec = std::move(ts);
          st.lambda1 = l1;
          st.lambda1_area = l1 * area;
          ++st.steps;
          st.history.push_back({st.steps, st.lambda1_area, t * c.norm(), d});
          accepted = true;
          // Full steps suggest the proximal weight is too cautious.
          mu = bt == 0 ? std::max(mu * 0.5, 1e-6 * st.lambda1) : mu * std::pow(2.0, std::min(bt, 3));
          break;
        }
      }
      if (!accepted) mu *= 16.0;
    }
    if (!accepted) {
      st.stop = any_admissible ? FlowStop::NoProgress : FlowStop::NoAdmissibleStep;
      break;
    }
  }
  return st;
}

}  // namespace kspec
