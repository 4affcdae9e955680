#include "kspec/cli.hpp"

#include "kspec/errors.hpp"
#include "kspec/io.hpp"
#include "kspec/kernels.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <ostream>
#include <sstream>

namespace kspec::cli {

namespace {

using io::json;

void add_surface_options(CLI::App* app, SurfaceSpec& s, const std::string& suffix) {
  app->add_option("--model" + suffix, s.model, "sphere or torus")->check(CLI::IsMember({"sphere", "torus", "point"}));
  app->add_option("--lmax" + suffix, s.lmax, "spectral truncation degree")->check(CLI::PositiveNumber);
  app->add_option("--lattice" + suffix, s.lattice, "square, rect2, equilateral or a1x,a1y,a2x,a2y");
  app->add_option("--radius" + suffix, s.radius, "sphere radius")->check(CLI::PositiveNumber);
  app->add_option("--potential" + suffix, s.potential, "potential JSON file or random:SEED[:AMP[:DEG]]");
}

void add_common(CLI::App* app, RunConfig& c) {
  add_surface_options(app, c.surface, "");
  app->add_option("--tol-cluster", c.tol_cluster, "relative eigenvalue clustering tolerance")->check(CLI::PositiveNumber);
  app->add_option("--eps-pos", c.eps_pos, "positivity floor of the conformal factor")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out_dir, "directory for JSON/CSV artifacts");
  app->add_option("--seed", c.seed, "reserved (all algorithms are deterministic)");
}

ModelDescriptor descriptor(const SurfaceSpec& s) {
  ModelDescriptor d;
  if (s.model == "sphere") {
    d.kind = SurfaceKind::RoundSphere;
    d.radius = s.radius;
  } else if (s.model == "torus") {
    d.kind = SurfaceKind::FlatTorus;
    d.lattice = io::lattice_preset(s.lattice);
  } else {
    throw PreconditionError("model '" + s.model + "' is not a surface");
  }
  d.l_max = s.lmax;
  return d;
}

// "random:SEED[:AMP[:DEG]]", a JSON file, or φ = 0.
KahlerPotential load_potential(const std::string& spec, const SurfaceModel& model) {
  if (spec.empty()) return KahlerPotential::zero(model);
  if (spec.rfind("random:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(spec.substr(7));
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.empty() || parts.size() > 3) throw PreconditionError("expected random:SEED[:AMP[:DEG]]");
    try {
      const auto seed = static_cast<std::uint64_t>(std::stoull(parts[0]));
      const double amp = parts.size() > 1 ? std::stod(parts[1]) : 0.1;
      const int deg = parts.size() > 2 ? std::stoi(parts[2]) : 0;
      return io::random_potential(model, seed, amp, deg);
    } catch (const std::logic_error&) {
      throw PreconditionError("expected random:SEED[:AMP[:DEG]], got '" + spec + "'");
    }
  }
  return io::potential_from_json(io::read_json_file(spec), model);
}

// "basis:INDEX" selects a single basis function; otherwise a potential spec.
KahlerPotential load_direction(const std::string& spec, const SurfaceModel& model) {
  if (spec.rfind("basis:", 0) == 0) {
    Eigen::Index i = 0;
    try {
      i = std::stol(spec.substr(6));
    } catch (const std::logic_error&) {
      throw PreconditionError("expected basis:INDEX");
    }
    if (i < 1 || i >= model.basis_size()) throw PreconditionError("direction basis index out of range");
    KahlerPotential d = KahlerPotential::zero(model);
    d.coeffs[i - 1] = 1.0;
    return d;
  }
  if (spec.empty()) throw PreconditionError("--direction is required");
  return load_potential(spec, model);
}

void write_artifact(const RunConfig& c, const std::string& name, const std::string& content) {
  if (c.out_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  io::write_text_file((std::filesystem::path(c.out_dir) / name).string(), content);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_spectrum(const RunConfig& c, std::ostream& out) {
  const SurfaceModel model = SurfaceModel::build(descriptor(c.surface));
  const KahlerPotential phi = load_potential(c.surface.potential, model);
  const SpectralData spec = solve_spectrum(model, phi, c.n);
  const json j = io::spectrum_to_json(model, spec, c.tol_cluster);
  write_artifact(c, "spectrum.json", dump(j));
  write_artifact(c, "spectrum.csv", io::spectrum_csv(spec, c.tol_cluster));
  out << dump(j);
  return kOk;
}

int cmd_variation(const RunConfig& c, std::ostream& out) {
  const SurfaceModel model = SurfaceModel::build(descriptor(c.surface));
  const KahlerPotential phi = load_potential(c.surface.potential, model);
  const KahlerPotential dir = load_direction(c.direction, model);
  DerivativeOptions opts;
  opts.h_list = c.h_list;
  opts.tau_cluster = c.tol_cluster;
  const DerivativeReport rep = eigenvalue_derivatives(model, phi, c.k, dir, opts);
  const json j = io::derivative_to_json(rep);
  write_artifact(c, "variation.json", dump(j));
  out << dump(j);
  return kOk;
}

int cmd_certify(const RunConfig& c, std::ostream& out) {
  const SurfaceModel model = SurfaceModel::build(descriptor(c.surface));
  const KahlerPotential phi = load_potential(c.surface.potential, model);
  const SpectralData spec = solve_spectrum(model, phi, model.basis_size());
  const EigenspaceCluster cl = cluster(spec, c.k, c.tol_cluster);
  CertifyOptions opts;
  opts.tau_relative = c.tol_cert;
  opts.max_iters = c.max_iters;
  const ExtremalityCertificate cert = certify(polarize(model, spec, cl), opts);
  json j = io::certificate_to_json(cert);
  j["k"] = cl.k;
  j["d"] = cl.d;
  j["lambda"] = cl.lambda;
  j["constancy_defect"] = cross_check_constancy(model, spec, cl, cert);
  write_artifact(c, "certificate.json", dump(j));
  out << dump(j);
  return kOk;
}

int cmd_maximize(const RunConfig& c, std::ostream& out) {
  const ModelDescriptor d = descriptor(c.surface);
  const SurfaceModel model = SurfaceModel::build(d);
  const KahlerPotential phi = load_potential(c.surface.potential, model);
  FlowOptions opts;
  opts.eps_pos = c.eps_pos;
  const FlowState st = ascend(model, phi, c.max_steps, c.tol, opts);
  const json j = io::flow_to_json(st, d);
  write_artifact(c, "history.csv", io::flow_history_csv(st.history));
  write_artifact(c, "potential.json", dump(io::potential_to_json(d, st.phi)));
  out << dump(j);
  return kOk;
}

int cmd_toric(const RunConfig& c, std::ostream& out) {
  if (c.input.empty()) throw PreconditionError("--in is required");
  const ToricReport rep = toric_extremality_test(io::toric_from_json(io::read_json_file(c.input)));
  const json j = io::toric_to_json(rep);
  write_artifact(c, "toric.json", dump(j));
  out << dump(j);
  return kOk;
}

AbstractSpectrum factor(const SurfaceSpec& s, std::shared_ptr<const SurfaceModel>& model_out) {
  if (s.model == "point") return AbstractSpectrum::point();
  model_out = std::make_shared<const SurfaceModel>(SurfaceModel::build(descriptor(s)));
  const KahlerPotential phi = load_potential(s.potential, *model_out);
  return AbstractSpectrum::surface(model_out, solve_spectrum(*model_out, phi, model_out->basis_size()));
}

int cmd_product(const RunConfig& c, std::ostream& out) {
  if (c.surface.model == "point") throw PreconditionError("the first factor must be a surface");
  std::shared_ptr<const SurfaceModel> ma, mb;
  const AbstractSpectrum A = factor(c.surface, ma);
  const AbstractSpectrum B = factor(c.second, mb);
  const AbstractSpectrum P = product_spectrum(A, B, c.n);
  json j = io::product_to_json(P, c.tol_cluster);
  if (c.lift) {
    const EigenspaceCluster cl = cluster(*A.spectral_data(), 1, c.tol_cluster);
    CertifyOptions opts;
    opts.tau_relative = c.tol_cert;
    opts.max_iters = c.max_iters;
    const ExtremalityCertificate certA = certify(polarize(*ma, *A.spectral_data(), cl), opts);
    j["factor_certificate"] = io::certificate_to_json(certA);
    j["lifted_certificate"] = io::certificate_to_json(lift_certificate(certA, A, B, opts));
  }
  write_artifact(c, "product.json", dump(j));
  out << dump(j);
  return kOk;
}

int cmd_identities(const RunConfig& c, std::ostream& out) {
  const SurfaceModel model = SurfaceModel::build(descriptor(c.surface));
  const KahlerPotential phi = load_potential(c.surface.potential, model);
  const SpectralData spec = solve_spectrum(model, phi, model.basis_size());
  const EigenspaceCluster cl = cluster(spec, 1, c.tol_cluster);
  const EinsteinIdentityReport rep = verify_einstein_identities(model, spec, cl, c.tol);
  const json j = io::identities_to_json(rep);
  write_artifact(c, "identities.json", dump(j));
  out << dump(j);
  return rep.passed ? kOk : kTrust;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (const char* env = std::getenv("KSPEC_THREADS")) {
    try {
      kernels::set_thread_limit(std::stoi(env));
    } catch (const std::logic_error&) {
      err << "ignoring malformed KSPEC_THREADS='" << env << "'\n";
    }
  }

  RunConfig c;
  CLI::App app{"Spectral extremality laboratory for Kähler surfaces", "kspec"};
  app.require_subcommand(1);

  CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues of the deformed metric");
  add_common(spectrum, c);
  spectrum->add_option("--n", c.n, "number of eigenvalues")->check(CLI::PositiveNumber);

  CLI::App* variation = app.add_subcommand("variation", "one-sided eigenvalue derivatives along a ray");
  // --h is the step list here, so help is long-form only.
  variation->set_help_flag("--help", "Print this help message and exit");
  add_common(variation, c);
  variation->add_option("--direction", c.direction, "direction potential file, basis:INDEX or random:SEED[:AMP[:DEG]]")
      ->required();
  variation->add_option("--k", c.k, "eigenvalue index")->check(CLI::PositiveNumber);
  variation->add_option("--h", c.h_list, "finite-difference steps")->delimiter(',');

  CLI::App* certify_cmd = app.add_subcommand("certify", "extremality certificate on an eigenvalue cluster");
  add_common(certify_cmd, c);
  certify_cmd->add_option("--k", c.k, "eigenvalue index")->check(CLI::PositiveNumber);
  certify_cmd->add_option("--tol-cert", c.tol_cert, "relative certification threshold")->check(CLI::PositiveNumber);
  certify_cmd->add_option("--max-iters", c.max_iters, "Frank-Wolfe iteration limit")->check(CLI::PositiveNumber);

  CLI::App* maximize = app.add_subcommand("maximize", "λ₁·Area ascent in the Kähler class");
  add_common(maximize, c);
  maximize->add_option("--max-steps", c.max_steps, "accepted step limit")->check(CLI::NonNegativeNumber);
  maximize->add_option("--tol", c.tol, "stationarity tolerance")->check(CLI::PositiveNumber);

  CLI::App* toric = app.add_subcommand("toric", "exact affine-square test on a toric model");
  toric->add_option("--in", c.input, "JSON list of {\"u\": [...], \"lam\": \"p/q\"}")->required();
  toric->add_option("--out", c.out_dir, "directory for JSON artifacts");

  CLI::App* product = app.add_subcommand("product", "spectrum of a product and certificate lifting");
  add_common(product, c);
  add_surface_options(product, c.second, "2");
  product->add_option("--n", c.n, "number of product eigenvalues")->check(CLI::PositiveNumber);
  product->add_option("--tol-cert", c.tol_cert, "relative certification threshold")->check(CLI::PositiveNumber);
  product->add_flag("--lift", c.lift, "certify λ₁ of the first factor and lift it");

  CLI::App* identities = app.add_subcommand("verify-identities", "Kähler-Einstein identities on the round sphere");
  add_common(identities, c);
  identities->add_option("--tol", c.tol, "node-wise residual tolerance")->check(CLI::PositiveNumber);

  std::vector<std::string> argv_store{"kspec"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(c, out);
    if (variation->parsed()) return cmd_variation(c, out);
    if (certify_cmd->parsed()) return cmd_certify(c, out);
    if (maximize->parsed()) return cmd_maximize(c, out);
    if (toric->parsed()) return cmd_toric(c, out);
    if (product->parsed()) return cmd_product(c, out);
    if (identities->parsed()) return cmd_identities(c, out);
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << "\n";
    return kPrecondition;
  } catch (const TrustError& e) {
    err << "numerical trust failure: " << e.what() << "\n";
    return kTrust;
  }
  return kUsage;
}

}  // namespace kspec::cli
