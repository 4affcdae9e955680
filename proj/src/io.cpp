#include "kspec/io.hpp"

#include "kspec/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace kspec::io {

namespace {

std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    double v = 0.0;
    const char* b = tok.data();
    const char* e = b + tok.size();
    while (b < e && *b == ' ') ++b;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) throw PreconditionError("not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

// Cluster id of every eigenvalue: 0 for λ₀, then consecutive τ-clusters.
std::vector<int> cluster_ids(const SpectralData& spec, double tau) {
  std::vector<int> ids(static_cast<std::size_t>(spec.size()), 0);
  int id = 0;
  for (Eigen::Index i = 1; i < spec.size(); ++i) {
    const bool joins = i > 1 && spec.eigenvalues[i] - spec.eigenvalues[i - 1] <= tau * std::abs(spec.eigenvalues[i]);
    if (!joins) ++id;
    ids[static_cast<std::size_t>(i)] = id;
  }
  return ids;
}

}  // namespace

Eigen::Matrix2d lattice_preset(const std::string& spec) {
  const double tp = 2.0 * std::numbers::pi;
  Eigen::Matrix2d m;
  if (spec == "square") {
    m << tp, 0.0, 0.0, tp;
  } else if (spec == "rect2") {
    m << tp, 0.0, 0.0, 2.0 * tp;
  } else if (spec == "equilateral") {
    m << tp, 0.5 * tp, 0.0, 0.5 * std::sqrt(3.0) * tp;
  } else {
    const std::vector<double> v = split_numbers(spec);
    if (v.size() != 4) throw PreconditionError("lattice must be a preset name or four numbers a1x,a1y,a2x,a2y");
    m << v[0], v[2], v[1], v[3];
  }
  return m;
}

json model_to_json(const ModelDescriptor& d) {
  json j;
  j["kind"] = to_string(d.kind);
  j["l_max"] = d.l_max;
  if (d.kind == SurfaceKind::RoundSphere) {
    j["radius"] = d.radius;
  } else {
    j["lattice"] = json::array({json::array({d.lattice(0, 0), d.lattice(1, 0)}),
                                json::array({d.lattice(0, 1), d.lattice(1, 1)})});
  }
  return j;
}

ModelDescriptor model_from_json(const json& j) {
  try {
    ModelDescriptor d;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "sphere")
      d.kind = SurfaceKind::RoundSphere;
    else if (kind == "torus")
      d.kind = SurfaceKind::FlatTorus;
    else
      throw PreconditionError("unknown model kind '" + kind + "'");
    d.l_max = j.at("l_max").get<int>();
    if (j.contains("radius")) d.radius = j.at("radius").get<double>();
    if (j.contains("lattice")) {
      const json& l = j.at("lattice");
      if (l.is_string()) {
        d.lattice = lattice_preset(l.get<std::string>());
      } else {
        for (int c = 0; c < 2; ++c)
          for (int r = 0; r < 2; ++r) d.lattice(r, c) = l.at(static_cast<std::size_t>(c)).at(static_cast<std::size_t>(r)).get<double>();
      }
    }
    return d;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("malformed model descriptor: ") + e.what());
  }
}

json potential_to_json(const ModelDescriptor& d, const KahlerPotential& phi) {
  return json{{"model", model_to_json(d)}, {"coeffs", vector_to_json(phi.coeffs)}};
}

KahlerPotential potential_from_json(const json& j, const SurfaceModel& model) {
  try {
    const json* arr = &j;
    if (j.is_object()) {
      if (j.contains("model")) {
        const ModelDescriptor d = model_from_json(j.at("model"));
        const ModelDescriptor& m = model.descriptor();
        const bool same = d.kind == m.kind && d.l_max == m.l_max &&
                          (d.kind == SurfaceKind::RoundSphere ? d.radius == m.radius : d.lattice == m.lattice);
        if (!same) throw PreconditionError("potential was written for a different model");
      }
      arr = &j.at("coeffs");
    }
    KahlerPotential phi{vector_from_json(*arr)};
    if (phi.coeffs.size() != model.basis_size() - 1) {
      std::ostringstream os;
      os << "potential has " << phi.coeffs.size() << " coefficients, the model needs " << model.basis_size() - 1;
      throw PreconditionError(os.str());
    }
    return phi;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("malformed potential: ") + e.what());
  }
}

KahlerPotential random_potential(const SurfaceModel& model, std::uint64_t seed, double amplitude, int max_degree) {
  std::mt19937_64 rng(seed);
  KahlerPotential phi = KahlerPotential::zero(model);
  for (Eigen::Index i = 1; i < model.basis_size(); ++i) {
    // Top 53 bits mapped to [-1, 1); independent of library distributions.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    if (max_degree <= 0 || model.degree(i) <= max_degree) phi.coeffs[i - 1] = u;
  }
  const double peak = laplacian(model, phi.full()).cwiseAbs().maxCoeff();
  if (peak > 0.0) phi.coeffs *= amplitude / peak;
  return phi;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw PreconditionError("expected a numeric array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw PreconditionError("expected a numeric array");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json spectrum_to_json(const SurfaceModel& model, const SpectralData& spec, double tau_cluster) {
  json j;
  j["model"] = model_to_json(model.descriptor());
  j["area"] = model.area();
  j["trusted_below"] = spec.trusted_below;
  j["eigenvalues"] = vector_to_json(spec.eigenvalues);
  json trusted = json::array();
  for (Eigen::Index i = 0; i < spec.size(); ++i) trusted.push_back(spec.trusted(i));
  j["trusted"] = trusted;
  const std::vector<int> ids = cluster_ids(spec, tau_cluster);
  j["cluster_id"] = ids;
  json clusters = json::array();
  for (const EigenspaceCluster& c : all_clusters(spec, tau_cluster))
    clusters.push_back({{"k", c.k}, {"d", c.d}, {"lambda", c.lambda}});
  j["clusters"] = clusters;
  return j;
}

json certificate_to_json(const ExtremalityCertificate& cert) {
  json j;
  j["verdict"] = to_string(cert.verdict);
  j["inconclusive"] = cert.inconclusive;
  j["sufficient"] = cert.sufficient;
  j["claim"] = cert.verdict != Verdict::CertifiedExtremal
                   ? "none"
                   : (cert.sufficient ? "extremal" : "necessary condition holds");
  j["residual"] = cert.residual;
  j["tau"] = cert.tau;
  j["B"] = matrix_to_json(cert.B);
  j["function_weights"] = vector_to_json(cert.function_weights);
  json fs = json::array();
  for (Eigen::Index i = 0; i < cert.functions.cols(); ++i) fs.push_back(vector_to_json(cert.functions.col(i)));
  j["functions"] = fs;
  if (cert.witness.size() != 0) {
    j["witness"] = vector_to_json(cert.witness);
    j["witness_margin"] = cert.witness_margin;
  }
  j["duality_gap"] = cert.duality_gap;
  j["iterations"] = cert.iterations;
  return j;
}

json derivative_to_json(const DerivativeReport& rep) {
  return json{{"k", rep.k},
              {"lambda", rep.lambda},
              {"gram_spectrum", vector_to_json(rep.gram_spectrum)},
              {"operator_spectrum", vector_to_json(rep.operator_spectrum)},
              {"consistency_gap", rep.consistency_gap},
              {"branch_right", vector_to_json(rep.branch_right)},
              {"branch_left", vector_to_json(rep.branch_left)},
              {"fd_right", rep.fd_right},
              {"fd_left", rep.fd_left},
              {"extremal_sign_product", rep.extremal_sign_product},
              {"fd_trace", rep.fd_trace},
              {"gram_trace", rep.gram_trace},
              {"max_mismatch", rep.max_mismatch},
              {"consistent", rep.consistent},
              {"steps", rep.steps}};
}

json flow_to_json(const FlowState& st, const ModelDescriptor& d) {
  json hist = json::array();
  for (const FlowRecord& r : st.history)
    hist.push_back({{"step", r.step}, {"lambda1_area", r.lambda1_area}, {"step_size", r.step_size}, {"cluster_dim", r.cluster_dim}});
  return json{{"lambda1", st.lambda1},       {"lambda1_area", st.lambda1_area}, {"steps", st.steps},
              {"stop", to_string(st.stop)},  {"stationarity", st.stationarity}, {"history", hist},
              {"potential", potential_to_json(d, st.phi)}};
}

json toric_to_json(const ToricReport& rep) {
  json q = json::array();
  for (const auto& row : rep.Q) {
    json r = json::array();
    for (const Rational& x : row) r.push_back(to_string(x));
    q.push_back(r);
  }
  json lin = json::array();
  for (const Rational& x : rep.linear) lin.push_back(to_string(x));
  return json{{"verdict", to_string(rep.verdict)},
              {"Q", q},
              {"linear", lin},
              {"constant", to_string(rep.constant)},
              {"only_trivial", rep.only_trivial},
              {"criterion_unsatisfiable", rep.criterion_unsatisfiable}};
}

std::vector<AffineFunction> toric_from_json(const json& j) {
  try {
    const json& list = j.is_object() ? j.at("functions") : j;
    if (!list.is_array()) throw PreconditionError("toric input must be a list of {\"u\": [...], \"lam\": ...}");
    std::vector<AffineFunction> out;
    auto rational = [](const json& x) {
      if (x.is_string()) return parse_rational(x.get<std::string>());
      if (x.is_number_integer()) return Rational(x.get<long long>());
      throw PreconditionError("rationals must be given as integers or \"p/q\" strings");
    };
    for (const json& f : list) {
      AffineFunction a;
      for (const json& x : f.at("u")) a.u.push_back(rational(x));
      a.lam = rational(f.at("lam"));
      out.push_back(std::move(a));
    }
    return out;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("malformed toric input: ") + e.what());
  }
}

json identities_to_json(const EinsteinIdentityReport& rep) {
  return json{{"lambda1", rep.lambda1},
              {"lambda1_error", rep.lambda1_error},
              {"square_residuals", rep.square_residuals},
              {"combined_residuals", rep.combined_residuals},
              {"passed", rep.passed},
              {"failed", rep.failed}};
}

json product_to_json(const AbstractSpectrum& P, double tau_cluster) {
  json pairs = json::array();
  for (const auto& [i, j] : P.pairs()) pairs.push_back(json::array({i, j}));
  json out{{"area", P.area()}, {"eigenvalues", vector_to_json(P.eigenvalues())}, {"pairs", pairs}};
  if (P.eigenvalues().size() > 2) {
    const auto [first, d] = product_cluster(P, 1, tau_cluster);
    out["lambda1"] = P.eigenvalues().segment(first, d).mean();
    out["multiplicity"] = d;
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw PreconditionError("number formatting failed");
  return std::string(buf, ptr);
}

std::string flow_history_csv(const std::vector<FlowRecord>& history) {
  std::string s = "step,lambda1_area,step_size,cluster_dim\n";
  for (const FlowRecord& r : history)
    s += std::to_string(r.step) + "," + format_double(r.lambda1_area) + "," + format_double(r.step_size) + "," +
         std::to_string(r.cluster_dim) + "\n";
  return s;
}

std::string spectrum_csv(const SpectralData& spec, double tau_cluster) {
  const std::vector<int> ids = cluster_ids(spec, tau_cluster);
  std::string s = "index,eigenvalue,cluster_id,trusted\n";
  for (Eigen::Index i = 0; i < spec.size(); ++i)
    s += std::to_string(i) + "," + format_double(spec.eigenvalues[i]) + "," + std::to_string(ids[static_cast<std::size_t>(i)]) +
         "," + (spec.trusted(i) ? "true" : "false") + "\n";
  return s;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw PreconditionError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PreconditionError("cannot write '" + path + "'");
  out << content;
  if (!out) throw PreconditionError("write to '" + path + "' failed");
}

}  // namespace kspec::io
