#pragma once

// JSON and CSV persistence.
//
// Model descriptor:  {"kind": "sphere" | "torus", "l_max": 8, "radius": 1.0,
//                     "lattice": [[a1x, a1y], [a2x, a2y]]}
// Potential:         {"model": {...}, "coeffs": [...]} or a bare array of the
//                    non-constant basis coefficients in model basis order.
// CSV files are UTF-8 with LF line endings, '.' as decimal separator and
// shortest round-trip number formatting.

#include "kspec/extremality_cert.hpp"
#include "kspec/flow.hpp"
#include "kspec/ke_toric.hpp"
#include "kspec/product_compose.hpp"
#include "kspec/variation.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace kspec::io {

using json = nlohmann::json;

// "square" (2π·I), "rect2" (2π × 4π), "equilateral" (side 2π), or four
// comma-separated numbers a1x,a1y,a2x,a2y.
Eigen::Matrix2d lattice_preset(const std::string& spec);

json model_to_json(const ModelDescriptor& d);
ModelDescriptor model_from_json(const json& j);

json potential_to_json(const ModelDescriptor& d, const KahlerPotential& phi);
// Checks the embedded model (if any) against `model` and the length.
KahlerPotential potential_from_json(const json& j, const SurfaceModel& model);

// Deterministic pseudo-random potential with degrees 1..max_degree (all when
// max_degree <= 0), scaled so that max |Δφ| at the nodes equals `amplitude`.
KahlerPotential random_potential(const SurfaceModel& model, std::uint64_t seed, double amplitude, int max_degree = 0);

json matrix_to_json(const Eigen::MatrixXd& m);  // row-major nested arrays
json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

json spectrum_to_json(const SurfaceModel& model, const SpectralData& spec, double tau_cluster);
json certificate_to_json(const ExtremalityCertificate& cert);
json derivative_to_json(const DerivativeReport& rep);
json flow_to_json(const FlowState& st, const ModelDescriptor& d);
json toric_to_json(const ToricReport& rep);
std::vector<AffineFunction> toric_from_json(const json& j);
json identities_to_json(const EinsteinIdentityReport& rep);
json product_to_json(const AbstractSpectrum& P, double tau_cluster);

std::string format_double(double x);
// Header "step,lambda1_area,step_size,cluster_dim".
std::string flow_history_csv(const std::vector<FlowRecord>& history);
// Header "index,eigenvalue,cluster_id,trusted"; cluster 0 is λ₀.
std::string spectrum_csv(const SpectralData& spec, double tau_cluster);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace kspec::io
