#include "kspec/ke_toric.hpp"

#include "kspec/errors.hpp"

#include <cmath>
#include <sstream>

namespace kspec {

bool AffineFunction::trivial() const {
  for (const Rational& x : u)
    if (x != 0) return false;
  return true;
}

Rational parse_rational(const std::string& s) {
  try {
    return Rational(s);
  } catch (const std::exception&) {
    throw PreconditionError("not a rational number: '" + s + "'");
  }
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::string to_string(ToricVerdict v) { return v == ToricVerdict::AffineSum ? "AffineSum" : "NotAffine"; }

ToricReport toric_extremality_test(const std::vector<AffineFunction>& fs) {
  if (fs.empty()) throw PreconditionError("toric test needs at least one affine function");
  const std::size_t m = fs.front().u.size();
  for (const AffineFunction& f : fs)
    if (f.u.size() != m) throw PreconditionError("affine functions have different momentum dimensions");

  ToricReport rep;
  rep.Q.assign(m, std::vector<Rational>(m, Rational(0)));
  rep.linear.assign(m, Rational(0));
  rep.constant = 0;
  bool all_trivial = true;
  for (const AffineFunction& f : fs) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) rep.Q[i][j] += f.u[i] * f.u[j];
      rep.linear[i] += 2 * f.lam * f.u[i];
    }
    rep.constant += f.lam * f.lam;
    all_trivial = all_trivial && f.trivial();
  }
  bool q_zero = true;
  for (const auto& row : rep.Q)
    for (const Rational& x : row) q_zero = q_zero && x == 0;

  rep.verdict = q_zero ? ToricVerdict::AffineSum : ToricVerdict::NotAffine;
  rep.only_trivial = all_trivial;
  // Q = 0 forces every u_i = 0, so an affine sum is only reachable with trivial f_i.
  rep.criterion_unsatisfiable = !q_zero || all_trivial;
  return rep;
}

double ke_criterion_numeric(const SurfaceModel& model, const SpectralData& spec, const EigenspaceCluster& c,
                            const Eigen::MatrixXd& functions) {
  if (model.kind() != SurfaceKind::RoundSphere) throw PreconditionError("Kähler-Einstein test needs the round sphere");
  if (c.k != 1 || std::abs(c.lambda - 2.0) > 1e-6) {
    std::ostringstream os;
    os << "λ₁ = " << c.lambda << " is not 2: the model is not the normalized Kähler-Einstein sphere";
    throw PreconditionError(os.str());
  }
  if (functions.rows() != model.basis_size()) throw PreconditionError("functions do not match the model basis");
  const Eigen::MatrixXd fv = model.basis_values() * functions;
  Eigen::VectorXd sum = fv.cwiseAbs2().rowwise().sum();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(model.node_count());
  sum.array() -= integrate(model, sum, spec.factor) / integrate(model, ones, spec.factor);
  // Project onto the (L²(v_g̃)-orthonormal) cluster span.
  const Eigen::MatrixXd cv = model.basis_values() * c.basis;
  const Eigen::VectorXd w = model.weights().cwiseProduct(spec.factor.values);
  const Eigen::VectorXd coeff = cv.transpose() * w.cwiseProduct(sum);
  const Eigen::VectorXd rest = sum - cv * coeff;
  return std::sqrt(integrate(model, rest.cwiseAbs2(), spec.factor));
}

EinsteinIdentityReport verify_einstein_identities(const SurfaceModel& model, const SpectralData& spec,
                                                  const EigenspaceCluster& c, double tol) {
  if (model.kind() != SurfaceKind::RoundSphere) throw PreconditionError("Kähler-Einstein identities need the round sphere");
  EinsteinIdentityReport rep;
  rep.lambda1 = spec.eigenvalues[1];
  rep.lambda1_error = std::abs(rep.lambda1 - 2.0);

  const FineLaplacian fine(model);
  for (Eigen::Index i = 0; i < c.d; ++i) {
    const Eigen::VectorXd coeff = c.basis.col(i);
    const Eigen::VectorXd f = evaluate(model, coeff);
    const Eigen::VectorXd df2 = gradient_energy(model, coeff);
    const Eigen::VectorXd lap_f = laplacian(model, coeff);
    const Eigen::VectorXd ddc2 = lap_f.cwiseAbs2();

    const Eigen::VectorXd lap_f2 = fine.laplacian_of_squares(coeff);
    const Eigen::VectorXd lap_df2 = fine.laplacian_of_gradient_energy(coeff);

    const Eigen::VectorXd r10 = lap_f2 - (4.0 * f.cwiseAbs2() - 2.0 * df2);
    const Eigen::VectorXd r11 = (lap_f2 - lap_df2) - (4.0 * f.cwiseAbs2() - 4.0 * df2 + ddc2);
    rep.square_residuals.push_back(r10.cwiseAbs().maxCoeff());
    rep.combined_residuals.push_back(r11.cwiseAbs().maxCoeff());
  }
  std::ostringstream failed;
  if (rep.lambda1_error > 1e-8) failed << "λ₁ = 2; ";
  for (std::size_t i = 0; i < rep.square_residuals.size(); ++i) {
    if (rep.square_residuals[i] > tol) failed << "Δf² = 4f² - 2|df|² (member " << i << "); ";
    if (rep.combined_residuals[i] > tol) failed << "Δ(f² - |df|²) = 4f² - 4|df|² + |dd^c f|² (member " << i << "); ";
  }
  rep.failed = failed.str();
  rep.passed = rep.failed.empty();
  return rep;
}

}  // namespace kspec
