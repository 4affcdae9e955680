#include "kspec/surface_model.hpp"

#include "kspec/errors.hpp"
#include "kspec/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace kspec {

namespace {

constexpr double kPi = std::numbers::pi;

// Fully normalized associated Legendre functions (no Condon-Shortley phase),
// ∫ P̄_l^m(cos θ)² · 2π sin θ dθ = 1 for m = 0, and their θ-derivatives.
// Layout: index l*(l+1)/2 + m for 0 <= m <= l.
void legendre_table(int l_max, double theta, std::vector<double>& p, std::vector<double>& dp) {
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  const auto at = [](int l, int m) { return static_cast<std::size_t>(l * (l + 1) / 2 + m); };
  const std::size_t n = static_cast<std::size_t>((l_max + 1) * (l_max + 2) / 2);
  p.assign(n, 0.0);
  dp.assign(n, 0.0);

  p[at(0, 0)] = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 1; m <= l_max; ++m)
    p[at(m, m)] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[at(m - 1, m - 1)];
  for (int m = 0; m < l_max; ++m) p[at(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * p[at(m, m)];
  for (int m = 0; m <= l_max; ++m) {
    for (int l = m + 2; l <= l_max; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * (l - 1) * (l - 1) - 1.0));
      p[at(l, m)] = a * (x * p[at(l - 1, m)] - b * p[at(l - 2, m)]);
    }
  }
  // (x² - 1) dP_l^m/dx = l x P_l^m - (l + m) P_{l-1}^m, rewritten for θ and
  // for the normalized functions.
  for (int l = 1; l <= l_max; ++l) {
    for (int m = 0; m <= l; ++m) {
      double prev = 0.0;
      if (m < l)
        prev = std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * double(l - m) * double(l + m)) * p[at(l - 1, m)];
      dp[at(l, m)] = (l * x * p[at(l, m)] - prev) / s;
    }
  }
}

void fill_sphere_row(int l_max, double radius, double theta, double phi, Eigen::Index row, BasisTable& t) {
  std::vector<double> p, dp;
  legendre_table(l_max, theta, p, dp);
  const double s = std::sin(theta);
  const double inv_r = 1.0 / radius;
  const double inv_r2 = inv_r * inv_r;
  const double root2 = std::sqrt(2.0);
  Eigen::Index col = 0;
  for (int l = 0; l <= l_max; ++l) {
    for (int m = -l; m <= l; ++m, ++col) {
      const int am = std::abs(m);
      const std::size_t idx = static_cast<std::size_t>(l * (l + 1) / 2 + am);
      if (m == 0) {
        t.values(row, col) = p[idx] * inv_r;
        t.grad1(row, col) = dp[idx] * inv_r2;
        t.grad2(row, col) = 0.0;
      } else if (m > 0) {
        const double c = std::cos(m * phi), sn = std::sin(m * phi);
        t.values(row, col) = root2 * p[idx] * c * inv_r;
        t.grad1(row, col) = root2 * dp[idx] * c * inv_r2;
        t.grad2(row, col) = -root2 * m * p[idx] * sn / s * inv_r2;
      } else {
        const double c = std::cos(am * phi), sn = std::sin(am * phi);
        t.values(row, col) = root2 * p[idx] * sn * inv_r;
        t.grad1(row, col) = root2 * dp[idx] * sn * inv_r2;
        t.grad2(row, col) = root2 * am * p[idx] * c / s * inv_r2;
      }
    }
  }
}

BasisTable allocate(Eigen::Index rows, Eigen::Index cols) {
  return {Eigen::MatrixXd(rows, cols), Eigen::MatrixXd(rows, cols), Eigen::MatrixXd(rows, cols)};
}

std::vector<BasisKey> torus_keys(int l_max) {
  std::vector<BasisKey> keys{{0, 0, 0}};
  for (int k1 = 0; k1 <= l_max; ++k1) {
    for (int k2 = -l_max; k2 <= l_max; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      keys.push_back({k1, k2, 0});
      keys.push_back({k1, k2, 1});
    }
  }
  return keys;
}

BasisTable torus_table(const std::vector<BasisKey>& keys, const Eigen::Matrix2d& dual, double area,
                       const Eigen::Matrix2Xd& points) {
  const Eigen::Index n = points.cols();
  const auto nb = static_cast<Eigen::Index>(keys.size());
  BasisTable t = allocate(n, nb);
  const double c0 = 1.0 / std::sqrt(area);
  const double c1 = std::sqrt(2.0 / area);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Vector2d x = points.col(j);
    t.values(j, 0) = c0;
    t.grad1(j, 0) = 0.0;
    t.grad2(j, 0) = 0.0;
    for (Eigen::Index a = 1; a < nb; ++a) {
      const BasisKey& key = keys[static_cast<std::size_t>(a)];
      const Eigen::Vector2d k = key.i * dual.col(0) + key.j * dual.col(1);
      const double arg = k.dot(x);
      const double c = std::cos(arg), s = std::sin(arg);
      if (key.parity == 0) {
        t.values(j, a) = c1 * c;
        t.grad1(j, a) = -c1 * s * k[0];
        t.grad2(j, a) = -c1 * s * k[1];
      } else {
        t.values(j, a) = c1 * s;
        t.grad1(j, a) = c1 * c * k[0];
        t.grad2(j, a) = c1 * c * k[1];
      }
    }
  }
  return t;
}

}  // namespace

namespace detail {

void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

BasisTable sphere_harmonics_serial(int l_max, double radius, const Eigen::Matrix2Xd& points) {
  BasisTable t = allocate(points.cols(), (l_max + 1) * (l_max + 1));
  for (Eigen::Index j = 0; j < points.cols(); ++j) fill_sphere_row(l_max, radius, points(0, j), points(1, j), j, t);
  return t;
}

BasisTable sphere_harmonics(int l_max, double radius, const Eigen::Matrix2Xd& points) {
  BasisTable t = allocate(points.cols(), (l_max + 1) * (l_max + 1));
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < points.cols(); ++j) fill_sphere_row(l_max, radius, points(0, j), points(1, j), j, t);
  return t;
}

}  // namespace detail

std::string to_string(SurfaceKind kind) { return kind == SurfaceKind::RoundSphere ? "sphere" : "torus"; }

SurfaceModel SurfaceModel::build(const ModelDescriptor& desc) {
  if (desc.l_max < 1) throw PreconditionError("l_max must be at least 1");
  SurfaceModel m;
  m.desc_ = desc;
  const int L = desc.l_max;

  if (desc.kind == SurfaceKind::RoundSphere) {
    if (!(desc.radius > 0.0)) throw PreconditionError("sphere radius must be positive");
    const double r2 = desc.radius * desc.radius;
    // Exact for polynomial degree 3L: triple products b_a b_b e^σ.
    const int n_theta = 3 * L / 2 + 1;
    const int n_phi = 3 * L + 1;
    Eigen::VectorXd gx, gw;
    detail::gauss_legendre(n_theta, gx, gw);
    m.nodes_.resize(2, n_theta * n_phi);
    m.weights_.resize(n_theta * n_phi);
    for (int i = 0; i < n_theta; ++i) {
      for (int k = 0; k < n_phi; ++k) {
        const Eigen::Index j = i * n_phi + k;
        m.nodes_(0, j) = std::acos(gx[i]);
        m.nodes_(1, j) = 2.0 * kPi * k / n_phi;
        m.weights_[j] = r2 * gw[i] * 2.0 * kPi / n_phi;
      }
    }
    m.area_ = 4.0 * kPi * r2;
    for (int l = 0; l <= L; ++l)
      for (int mm = -l; mm <= l; ++mm) m.keys_.push_back({l, mm, 0});
    m.stiffness_.resize(m.basis_size());
    for (Eigen::Index a = 0; a < m.basis_size(); ++a) {
      const int l = m.keys_[static_cast<std::size_t>(a)].i;
      m.stiffness_[a] = l * (l + 1.0) / r2;
    }
    m.table_ = detail::sphere_harmonics(L, desc.radius, m.nodes_);
    m.trusted_below_ = 0.5 * L * (L + 1.0) / r2;
    m.dual_.setZero();
    return m;
  }

  const Eigen::Matrix2d& A = desc.lattice;
  const double det = A.determinant();
  const double scale = A.col(0).norm() * A.col(1).norm();
  if (!(scale > 0.0) || std::abs(det) <= 1e-12 * scale) {
    std::ostringstream os;
    os << "degenerate torus lattice: det = " << det << " for basis vectors (" << A(0, 0) << ", " << A(1, 0)
       << ") and (" << A(0, 1) << ", " << A(1, 1) << ")";
    throw PreconditionError(os.str());
  }
  m.area_ = std::abs(det);
  m.dual_ = 2.0 * kPi * A.transpose().inverse();
  const int n = 4 * L + 2;
  m.nodes_.resize(2, n * n);
  m.weights_.setConstant(n * n, m.area_ / (double(n) * n));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) m.nodes_.col(i * n + k) = (double(i) / n) * A.col(0) + (double(k) / n) * A.col(1);
  m.keys_ = torus_keys(L);
  m.stiffness_.resize(m.basis_size());
  double max_retained = 0.0;
  for (Eigen::Index a = 0; a < m.basis_size(); ++a) {
    const BasisKey& key = m.keys_[static_cast<std::size_t>(a)];
    m.stiffness_[a] = (key.i * m.dual_.col(0) + key.j * m.dual_.col(1)).squaredNorm();
    max_retained = std::max(max_retained, m.stiffness_[a]);
  }
  double min_omitted = std::numeric_limits<double>::infinity();
  for (int k1 = -(L + 1); k1 <= L + 1; ++k1) {
    for (int k2 = -(L + 1); k2 <= L + 1; ++k2) {
      if (std::max(std::abs(k1), std::abs(k2)) != L + 1) continue;
      min_omitted = std::min(min_omitted, (k1 * m.dual_.col(0) + k2 * m.dual_.col(1)).squaredNorm());
    }
  }
  m.trusted_below_ = std::min(0.5 * max_retained, min_omitted);
  m.table_ = torus_table(m.keys_, m.dual_, m.area_, m.nodes_);
  return m;
}

Eigen::Index SurfaceModel::index_of(const BasisKey& key) const {
  const auto it = std::find(keys_.begin(), keys_.end(), key);
  return it == keys_.end() ? -1 : static_cast<Eigen::Index>(it - keys_.begin());
}

int SurfaceModel::degree(Eigen::Index basis_index) const {
  const BasisKey& key = keys_.at(static_cast<std::size_t>(basis_index));
  if (desc_.kind == SurfaceKind::RoundSphere) return key.i;
  return std::max(std::abs(key.i), std::abs(key.j));
}

BasisTable SurfaceModel::evaluate(const Eigen::Matrix2Xd& points) const {
  if (desc_.kind == SurfaceKind::RoundSphere) return detail::sphere_harmonics(desc_.l_max, desc_.radius, points);
  return torus_table(keys_, dual_, area_, points);
}

KahlerPotential KahlerPotential::zero(const SurfaceModel& model) {
  return {Eigen::VectorXd::Zero(model.basis_size() - 1)};
}

KahlerPotential KahlerPotential::from_full(const Eigen::VectorXd& full) { return {full.tail(full.size() - 1)}; }

Eigen::VectorXd KahlerPotential::full() const {
  Eigen::VectorXd f(coeffs.size() + 1);
  f[0] = 0.0;
  f.tail(coeffs.size()) = coeffs;
  return f;
}

namespace {

void check_coeffs(const SurfaceModel& model, const Eigen::VectorXd& c) {
  if (c.size() != model.basis_size()) {
    std::ostringstream os;
    os << "coefficient vector has length " << c.size() << ", model basis has " << model.basis_size();
    throw PreconditionError(os.str());
  }
}

void check_potential(const SurfaceModel& model, const KahlerPotential& phi) {
  if (phi.coeffs.size() != model.basis_size() - 1) {
    std::ostringstream os;
    os << "potential has " << phi.coeffs.size() << " coefficients, model expects " << model.basis_size() - 1;
    throw PreconditionError(os.str());
  }
}

}  // namespace

Eigen::VectorXd evaluate(const SurfaceModel& model, const Eigen::VectorXd& coeffs) {
  check_coeffs(model, coeffs);
  return model.basis_values() * coeffs;
}

Eigen::VectorXd laplacian(const SurfaceModel& model, const Eigen::VectorXd& coeffs) {
  check_coeffs(model, coeffs);
  return model.basis_values() * model.stiffness_diagonal().cwiseProduct(coeffs);
}

Eigen::VectorXd gradient_energy(const SurfaceModel& model, const Eigen::VectorXd& coeffs) {
  check_coeffs(model, coeffs);
  const Eigen::VectorXd g1 = model.table().grad1 * coeffs;
  const Eigen::VectorXd g2 = model.table().grad2 * coeffs;
  return g1.cwiseAbs2() + g2.cwiseAbs2();
}

Eigen::VectorXd gradient_product(const SurfaceModel& model, const Eigen::VectorXd& f, const Eigen::VectorXd& h) {
  check_coeffs(model, f);
  check_coeffs(model, h);
  const BasisTable& t = model.table();
  return (t.grad1 * f).cwiseProduct(t.grad1 * h) + (t.grad2 * f).cwiseProduct(t.grad2 * h);
}

std::pair<double, double> admissible_interval(const SurfaceModel& model, const KahlerPotential& base,
                                              const KahlerPotential& dir, double eps_pos) {
  check_potential(model, base);
  check_potential(model, dir);
  const Eigen::VectorXd b = 1.0 - laplacian(model, base.full()).array();
  const Eigen::VectorXd d = -laplacian(model, dir.full());
  // b_j + t d_j > eps for all j.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double slack = b[j] - eps_pos;
    if (d[j] > 0.0)
      lo = std::max(lo, -slack / d[j]);
    else if (d[j] < 0.0)
      hi = std::min(hi, -slack / d[j]);
    else if (slack <= 0.0)
      return {1.0, -1.0};
  }
  return {lo, hi};
}

ConformalFactor conformal_factor(const SurfaceModel& model, const KahlerPotential& phi, double eps_pos) {
  check_potential(model, phi);
  ConformalFactor f{1.0 - laplacian(model, phi.full()).array()};
  Eigen::Index worst = 0;
  const double min_value = f.values.minCoeff(&worst);
  if (min_value <= eps_pos) {
    const auto [lo, hi] = admissible_interval(model, KahlerPotential::zero(model), phi, eps_pos);
    std::ostringstream os;
    os << "metric not positive: 1 - Δφ = " << min_value << " at node " << worst
       << "; along the ray t·φ the metric is positive for t in (" << lo << ", " << hi << ")";
    throw NotPositiveError(os.str(), lo, hi);
  }
  return f;
}

double integrate(const SurfaceModel& model, const Eigen::VectorXd& samples) {
  if (samples.size() != model.node_count()) throw PreconditionError("sample length does not match node count");
  return kernels::weighted_sum(model.weights(), samples);
}

double integrate(const SurfaceModel& model, const Eigen::VectorXd& samples, const ConformalFactor& factor) {
  if (samples.size() != model.node_count() || factor.values.size() != model.node_count())
    throw PreconditionError("sample length does not match node count");
  return kernels::weighted_sum(model.weights(), samples.cwiseProduct(factor.values));
}

Eigen::VectorXd embed_coefficients(const SurfaceModel& from, const SurfaceModel& to, const Eigen::VectorXd& coeffs) {
  check_coeffs(from, coeffs);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(to.basis_size());
  for (Eigen::Index a = 0; a < from.basis_size(); ++a) {
    const Eigen::Index b = to.index_of(from.keys()[static_cast<std::size_t>(a)]);
    if (b < 0) {
      if (coeffs[a] != 0.0) throw PreconditionError("coefficient on a mode absent from the target model");
      continue;
    }
    out[b] = coeffs[a];
  }
  return out;
}

FineLaplacian::FineLaplacian(const SurfaceModel& coarse) {
  ModelDescriptor desc = coarse.descriptor();
  desc.l_max = 2 * coarse.l_max();
  fine_ = std::make_shared<const SurfaceModel>(SurfaceModel::build(desc));
  lift_map_.resize(static_cast<std::size_t>(coarse.basis_size()));
  for (Eigen::Index a = 0; a < coarse.basis_size(); ++a)
    lift_map_[static_cast<std::size_t>(a)] = fine_->index_of(coarse.keys()[static_cast<std::size_t>(a)]);
  fine_at_coarse_ = fine_->evaluate(coarse.nodes()).values;
}

Eigen::VectorXd FineLaplacian::lift(const Eigen::VectorXd& coarse_coeffs) const {
  if (coarse_coeffs.size() != static_cast<Eigen::Index>(lift_map_.size()))
    throw PreconditionError("coefficient vector does not match the coarse model");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(fine_->basis_size());
  for (std::size_t a = 0; a < lift_map_.size(); ++a) out[lift_map_[a]] = coarse_coeffs[static_cast<Eigen::Index>(a)];
  return out;
}

Eigen::VectorXd FineLaplacian::laplacian_at_coarse(const Eigen::VectorXd& fine_samples) const {
  const Eigen::VectorXd c = kernels::weighted_project(fine_->basis_values(), fine_->weights(), fine_samples);
  return fine_at_coarse_ * fine_->stiffness_diagonal().cwiseProduct(c);
}

Eigen::VectorXd FineLaplacian::laplacian_of_squares(const Eigen::MatrixXd& coeffs) const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(fine_->node_count());
  for (Eigen::Index i = 0; i < coeffs.cols(); ++i) s += evaluate(*fine_, lift(coeffs.col(i))).cwiseAbs2();
  return laplacian_at_coarse(s);
}

Eigen::VectorXd FineLaplacian::laplacian_of_gradient_energy(const Eigen::MatrixXd& coeffs) const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(fine_->node_count());
  for (Eigen::Index i = 0; i < coeffs.cols(); ++i) s += gradient_energy(*fine_, lift(coeffs.col(i)));
  return laplacian_at_coarse(s);
}

}  // namespace kspec
