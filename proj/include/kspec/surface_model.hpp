#pragma once

// Spectral discretizations of closed surfaces and the volume-preserving
// conformal family g̃ = (1 - Δ_g φ) g.
//
// Two backgrounds are supported:
//   * the round sphere of radius R, with real spherical harmonics Y_lm
//     (l <= L_max) on a Gauss-Legendre x uniform-azimuth grid;
//   * a flat torus R²/Λ, with real Fourier modes √(2/A) cos/sin(k*·x) over
//     dual-lattice indices |k|_∞ <= L_max on a uniform grid.
//
// All basis functions are L²(v_g)-orthonormal and are eigenfunctions of Δ_g,
// so the stiffness matrix is diagonal. Δ denotes the positive Laplacian δd.
//
// Basis order (stable; also the order of serialized potentials):
//   sphere: (l, m) with l ascending and m = -l..l;
//   torus:  constant first, then (k1, k2) lexicographic over the half plane
//           k1 > 0 or (k1 == 0, k2 > 0), cos before sin.

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace kspec {

enum class SurfaceKind { RoundSphere, FlatTorus };

struct ModelDescriptor {
  SurfaceKind kind = SurfaceKind::RoundSphere;
  int l_max = 8;
  // Torus only: columns are the two lattice basis vectors.
  Eigen::Matrix2d lattice = Eigen::Matrix2d::Identity() * 2.0 * 3.14159265358979323846;
  // Sphere only.
  double radius = 1.0;
};

// (l, m, 0) on the sphere, (k1, k2, parity) on the torus with parity 0 = cos, 1 = sin.
struct BasisKey {
  int i = 0;
  int j = 0;
  int parity = 0;
  friend bool operator==(const BasisKey&, const BasisKey&) = default;
};

// Basis functions and their gradients at a set of points. Gradient components
// are taken in a g-orthonormal frame, so |∇f|²_g = (grad1·c)² + (grad2·c)².
struct BasisTable {
  Eigen::MatrixXd values;  // points x basis
  Eigen::MatrixXd grad1;
  Eigen::MatrixXd grad2;
};

class SurfaceModel {
 public:
  static SurfaceModel build(const ModelDescriptor& desc);

  const ModelDescriptor& descriptor() const { return desc_; }
  SurfaceKind kind() const { return desc_.kind; }
  int l_max() const { return desc_.l_max; }
  Eigen::Index basis_size() const { return static_cast<Eigen::Index>(keys_.size()); }
  Eigen::Index node_count() const { return weights_.size(); }
  double area() const { return area_; }

  // Sphere: (colatitude, azimuth); torus: Cartesian (x, y).
  const Eigen::Matrix2Xd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::MatrixXd& basis_values() const { return table_.values; }
  const BasisTable& table() const { return table_; }
  const std::vector<BasisKey>& keys() const { return keys_; }

  // Δ_g eigenvalue of each basis function (diagonal of the stiffness matrix).
  const Eigen::VectorXd& stiffness_diagonal() const { return stiffness_; }
  Eigen::MatrixXd stiffness() const { return stiffness_.asDiagonal(); }

  // Eigenvalues at or above this value are not trusted at this truncation.
  double trusted_below() const { return trusted_below_; }

  // Index of `key` in the basis, or -1.
  Eigen::Index index_of(const BasisKey& key) const;
  // Polynomial degree of a basis function (l on the sphere, |k|_∞ on the torus).
  int degree(Eigen::Index basis_index) const;

  BasisTable evaluate(const Eigen::Matrix2Xd& points) const;

 private:
  SurfaceModel() = default;

  ModelDescriptor desc_;
  double area_ = 0.0;
  double trusted_below_ = 0.0;
  Eigen::Matrix2Xd nodes_;
  Eigen::VectorXd weights_;
  BasisTable table_;
  Eigen::VectorXd stiffness_;
  std::vector<BasisKey> keys_;
  Eigen::Matrix2d dual_;  // columns b1, b2 with a_i·b_j = 2π δ_ij
};

// Zero-mean Kähler potential: coefficients of the non-constant basis
// functions (basis indices 1..n-1). The constant mode has no slot.
struct KahlerPotential {
  Eigen::VectorXd coeffs;

  static KahlerPotential zero(const SurfaceModel& model);
  // Drops the constant coefficient of a full basis vector.
  static KahlerPotential from_full(const Eigen::VectorXd& full);
  Eigen::VectorXd full() const;
};

// e^σ = 1 - Δ_g φ sampled at the quadrature nodes.
struct ConformalFactor {
  Eigen::VectorXd values;
};

inline constexpr double kDefaultPositivity = 1e-8;

// Node samples of Σ_a c_a b_a.
Eigen::VectorXd evaluate(const SurfaceModel& model, const Eigen::VectorXd& coeffs);
// Node samples of Δ_g applied to a basis expansion.
Eigen::VectorXd laplacian(const SurfaceModel& model, const Eigen::VectorXd& coeffs);
// Node samples of |∇f|²_g.
Eigen::VectorXd gradient_energy(const SurfaceModel& model, const Eigen::VectorXd& coeffs);
// Node samples of (∇f, ∇h)_g.
Eigen::VectorXd gradient_product(const SurfaceModel& model, const Eigen::VectorXd& f, const Eigen::VectorXd& h);

// Throws NotPositiveError if some node has e^σ <= eps_pos; the message and
// the exception carry the admissible interval of t for the ray t·φ.
ConformalFactor conformal_factor(const SurfaceModel& model, const KahlerPotential& phi,
                                 double eps_pos = kDefaultPositivity);

// Open interval (lo, hi) of t with 1 - Δ(base + t·dir) > eps_pos at every node.
// Returns lo > hi when no t is admissible.
std::pair<double, double> admissible_interval(const SurfaceModel& model, const KahlerPotential& base,
                                              const KahlerPotential& dir, double eps_pos = kDefaultPositivity);

// Σ_j w_j s_j (e^σ_j): integral against v_g, or against v_g̃ = e^σ v_g.
double integrate(const SurfaceModel& model, const Eigen::VectorXd& samples);
double integrate(const SurfaceModel& model, const Eigen::VectorXd& samples, const ConformalFactor& factor);

// Maps coefficients between two models of the same surface; modes missing
// from `to` must have zero coefficient.
Eigen::VectorXd embed_coefficients(const SurfaceModel& from, const SurfaceModel& to, const Eigen::VectorXd& coeffs);

// Applies Δ_g to quadratic expressions in basis expansions (f², |∇f|², ...)
// without truncation: the products are sampled on a model of twice the
// degree, projected exactly onto its basis, and the Laplacian is evaluated
// back at the coarse nodes.
class FineLaplacian {
 public:
  explicit FineLaplacian(const SurfaceModel& coarse);

  const SurfaceModel& fine() const { return *fine_; }
  // Lifts coarse coefficients into the fine basis.
  Eigen::VectorXd lift(const Eigen::VectorXd& coarse_coeffs) const;
  // Fine-node samples -> Δ_g at the coarse nodes.
  Eigen::VectorXd laplacian_at_coarse(const Eigen::VectorXd& fine_samples) const;
  // Δ_g(Σ_i f_i²) at coarse nodes; columns of `coeffs` are coarse expansions.
  Eigen::VectorXd laplacian_of_squares(const Eigen::MatrixXd& coeffs) const;
  // Δ_g(Σ_i |∇f_i|²_g) at coarse nodes.
  Eigen::VectorXd laplacian_of_gradient_energy(const Eigen::MatrixXd& coeffs) const;

 private:
  std::vector<Eigen::Index> lift_map_;  // coarse basis index -> fine basis index
  std::shared_ptr<const SurfaceModel> fine_;
  Eigen::MatrixXd fine_at_coarse_;  // fine basis values at coarse nodes
};

// Quadrature rules and basis tabulation, exposed for tests and benchmarks.
namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w);

BasisTable sphere_harmonics(int l_max, double radius, const Eigen::Matrix2Xd& points);
BasisTable sphere_harmonics_serial(int l_max, double radius, const Eigen::Matrix2Xd& points);

}  // namespace detail

std::string to_string(SurfaceKind kind);

}  // namespace kspec
