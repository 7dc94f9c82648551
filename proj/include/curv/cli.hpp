#pragma once

#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "curv/cones.hpp"
#include "curv/experiments.hpp"
#include "curv/io.hpp"
#include "curv/models.hpp"
#include "curv/ode.hpp"
#include "curv/warped.hpp"

namespace curv::cli {

using nlohmann::json;

inline void emit(const std::string& out_path, const json& report) {
  const std::string body = report.dump(2) + "\n";
  if (out_path.empty())
    std::cout << body;
  else
    io::write_text_file(out_path, body);
}

// ---------------------------------------------------------------------------
// check: evaluate every condition on a tensor (or a warped-metric node).
// ---------------------------------------------------------------------------

inline json check_tensor(const Tensor& rm, int budget, std::uint64_t seed) {
  json rep;
  rep["n"] = rm.dim();
  rep["frobenius_norm"] = frobenius_norm(rm);
  const double r = scalar_curvature(rm);
  rep["scalar"] = r;
  if (r > 0) rep["norm_over_scalar"] = frobenius_norm(rm) / r;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ricci(rm));
  rep["ricci_eigenvalues"] =
      std::vector<double>(es.eigenvalues().data(),
                          es.eigenvalues().data() + rm.dim());
  if (r > 0)
    rep["two_ricci_delta"] =
        (es.eigenvalues()[0] + es.eigenvalues()[1]) / r;

  for (auto mode :
       {IsotropicMode::PIC, IsotropicMode::PIC1, IsotropicMode::PIC2}) {
    const IsotropicReport ir = min_isotropic(rm, mode, budget, seed);
    rep[std::string("isotropic_") + to_string(mode)] =
        io::isotropic_report_to_json(ir);
  }
  const PsdReport psd = psd_curvature_operator(rm);
  rep["psd"] = {{"min_eigenvalue", psd.min_eigenvalue}, {"psd", psd.psd}};

  if (rm.dim() == 4) {
    rep["blocks"] = io::block_report_to_json(pinching_report(rm));
  } else if (r > 0) {
    rep["theta"] = uniform_pic_theta(rm, budget, seed);
  }
  return rep;
}

inline int cmd_check(const std::string& in, const std::string& warped,
                     int node, int budget, std::uint64_t seed,
                     const std::string& out) {
  json rep;
  if (!in.empty()) {
    rep = check_tensor(io::tensor_from_json(io::load_json(in)), budget, seed);
    rep["source"] = in;
  } else if (!warped.empty()) {
    const WarpedMetric w = io::warped_from_json(io::load_json(warped));
    if (node < 0 || node >= w.nodes())
      throw ConfigError("--node: index " + std::to_string(node) +
                        " outside grid [0, " + std::to_string(w.nodes() - 1) +
                        "]");
    const WarpedCurvature wc = warped_curvature(w, node);
    rep = check_tensor(wc.rm, budget, seed);
    rep["source"] = warped;
    rep["node"] = node;
    rep["k_rad"] = wc.k_rad;
    rep["k_sph"] = wc.k_sph;
  } else {
    throw ConfigError("--in/--warped: one input file is required");
  }
  emit(out, rep);
  return 0;
}

// ---------------------------------------------------------------------------
// flow: integrate the curvature reaction ODE from a tensor file.
// ---------------------------------------------------------------------------

inline int cmd_flow(const std::string& in, double horizon, double rel_tol,
                    double abs_tol, const std::string& out,
                    const std::string& csv) {
  if (in.empty()) throw ConfigError("--in: tensor file is required");
  const Tensor rm0 = io::tensor_from_json(io::load_json(in));
  const ODETrajectory traj =
      integrate_hamilton_ode(rm0, horizon, rel_tol, abs_tol);

  json rep;
  rep["n"] = rm0.dim();
  rep["horizon"] = horizon;
  rep["termination"] = to_string(traj.reason);
  rep["accepted_steps"] = traj.accepted;
  rep["rejected_steps"] = traj.rejected;
  rep["t_end"] = traj.times.back();
  if (traj.reason == Termination::Blowup) rep["blowup_time"] = traj.blowup_time;
  rep["scalar_end"] = scalar_curvature(traj.tensors.back());
  rep["norm_end"] = frobenius_norm(traj.tensors.back());

  std::ostringstream os;
  os << "t,norm,scalar\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    os << io::fmt17(traj.times[i]) << ','
       << io::fmt17(frobenius_norm(traj.tensors[i])) << ','
       << io::fmt17(scalar_curvature(traj.tensors[i])) << '\n';
  if (!csv.empty()) io::write_text_file(csv, os.str());

  emit(out, rep);
  return traj.reason == Termination::ToleranceFailure ? 1 : 0;
}

// ---------------------------------------------------------------------------
// invariance / tau experiments.
// ---------------------------------------------------------------------------

inline int cmd_invariance(const std::string& cone_name, int dim, int samples,
                          std::uint64_t seed, double horizon_scale,
                          double tolerance, const std::string& out,
                          const std::string& csv) {
  const auto cones = builtin_cones(dim);
  const ConeSpec cone = find_cone(cones, cone_name);
  const InvarianceReport rep = invariance_experiment(
      cone, dim, samples, horizon_scale, seed, tolerance, tolerance * 1e-2);
  if (!csv.empty()) io::write_text_file(csv, io::invariance_report_csv(rep));
  emit(out, io::invariance_report_to_json(rep));
  return rep.violations == 0 ? 0 : 1;
}

inline int cmd_tau(const std::string& cone_name, int dim, int samples,
                   std::uint64_t seed, const std::string& out,
                   const std::string& csv) {
  const auto cones = builtin_cones(dim);
  const ConeSpec cone = find_cone(cones, cone_name);
  const TauReport rep = transversality_tau(cone, dim, samples, seed);
  if (!csv.empty()) io::write_text_file(csv, io::tau_report_csv(rep));
  emit(out, io::tau_report_to_json(rep));
  return 0;
}

// ---------------------------------------------------------------------------
// models emit / bryant.
// ---------------------------------------------------------------------------

inline int cmd_models_emit(const std::string& name, int dim, double tau,
                           double smax, int nodes, double tip_curvature,
                           const std::string& out) {
  if (out.empty()) throw ConfigError("--out: output file is required");
  json meta = {{"model", name}};
  if (name == "bryant") {
    const WarpedMetric w = bryant_soliton(dim, smax, nodes, tip_curvature);
    io::write_text_file(out, io::warped_to_json(w).dump(2) + "\n");
    return 0;
  }
  Tensor rm;
  if (name == "identity") {
    rm = identity_tensor<double>(dim);
  } else if (name == "cylinder") {
    rm = cylinder<double>(dim);
  } else if (name == "shrinking-cylinder") {
    if (!(tau > 0)) throw ConfigError("--tau: must be positive");
    rm = shrinking_cylinder<double>(dim, tau);
    meta["tau"] = tau;
  } else if (name == "cp2") {
    rm = kahler_models().cp2;
  } else if (name == "c-cp1") {
    rm = kahler_models().c_cp1;
  } else if (name == "cp1-cp1") {
    rm = kahler_models().cp1_cp1;
  } else if (name == "c2") {
    rm = flat<double>(4);
  } else if (name == "s2xs2") {
    rm = product<double>(space_form<double>(2, 1.0), space_form<double>(2, 1.0));
  } else {
    throw ConfigError("--name: unknown model '" + name + "'");
  }
  io::write_text_file(out, io::tensor_to_json(rm, meta).dump(2) + "\n");
  return 0;
}

inline int cmd_bryant(int dim, double smax, int nodes, double tip_curvature,
                      const std::string& out) {
  const WarpedMetric w = bryant_soliton(dim, smax, nodes, tip_curvature);
  double worst_warp = 0, worst_pot = 0;
  for (int i = 2; i <= w.nodes() - 3; ++i) {
    const SolitonResidual r = soliton_residual(w, i);
    worst_warp = std::max(worst_warp, std::abs(r.warp_eq));
    worst_pot = std::max(worst_pot, std::abs(r.potential_eq));
  }
  json rep;
  rep["n"] = dim;
  rep["smax"] = smax;
  rep["nodes"] = nodes;
  rep["tip_curvature"] = tip_curvature;
  rep["max_residual_warp_eq"] = worst_warp;
  rep["max_residual_potential_eq"] = worst_pot;
  if (!out.empty()) io::write_text_file(out, io::warped_to_json(w).dump(2) + "\n");
  std::cout << rep.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare: the scalar comparison ODE sweep and the ancient blowup check.
// ---------------------------------------------------------------------------

inline int cmd_compare(const std::string& out, const std::string& csv) {
  const std::vector<double> cs = {0.5, 1.0, 5.0, 20.0, 100.0};
  const std::vector<double> ars = {0.5, 1.0, 2.0, 5.0};
  const std::vector<double> u0s = {0.0, -1.0, -10.0, -100.0, -1000.0};

  int cases = 0, failures = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::ostringstream os;
  os << "C,Ar,u0,bound_ok,min_margin\n";
  for (double c : cs)
    for (double ar : ars)
      for (double u0 : u0s) {
        const ComparisonResult r = comparison_ode(u0, c, ar, 1.0, 10.0);
        ++cases;
        if (!r.bound_ok) ++failures;
        worst = std::min(worst, r.min_margin);
        os << io::fmt17(c) << ',' << io::fmt17(ar) << ',' << io::fmt17(u0)
           << ',' << (r.bound_ok ? 1 : 0) << ',' << io::fmt17(r.min_margin)
           << '\n';
      }

  json rep;
  rep["cases"] = cases;
  rep["failures"] = failures;
  rep["min_margin"] = worst;
  json blowups = json::array();
  for (auto [f0, delta] : std::vector<std::pair<double, double>>{
           {-1.0, 1.0}, {-2.0, 0.5}, {-1e-3, 1.0}}) {
    const BlowupResult b = ancient_blowup_check(f0, delta);
    blowups.push_back({{"f0", f0},
                       {"delta", delta},
                       {"t_star", b.t_star_closed_form},
                       {"t_detected", b.t_detected},
                       {"ok", b.bracketed_within_1pct}});
    if (!b.bracketed_within_1pct) ++failures;
  }
  rep["blowups"] = blowups;
  if (!csv.empty()) io::write_text_file(csv, os.str());
  emit(out, rep);
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Entry point.
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv) {
  CLI::App app{"curvature-cone laboratory"};
  app.require_subcommand(1);

  // check
  auto* check = app.add_subcommand("check", "evaluate conditions on a tensor");
  std::string check_in, check_warped, check_out;
  int check_node = -1, check_budget = 16;
  std::uint64_t check_seed = 7;
  check->add_option("--in", check_in, "tensor JSON file");
  check->add_option("--warped", check_warped, "warped-metric JSON file");
  check->add_option("--node", check_node, "grid node for --warped");
  check->add_option("--budget", check_budget, "multistart budget");
  check->add_option("--seed", check_seed, "optimizer seed");
  check->add_option("--out", check_out, "report JSON path (default stdout)");

  // flow
  auto* flow = app.add_subcommand("flow", "integrate dRm/dt = Q(Rm)");
  std::string flow_in, flow_out, flow_csv;
  double flow_horizon = 0.1, flow_rel = 1e-8, flow_abs = 1e-10;
  flow->add_option("--in", flow_in, "tensor JSON file")->required();
  flow->add_option("--horizon", flow_horizon, "integration horizon");
  flow->add_option("--rel-tol", flow_rel, "relative tolerance");
  flow->add_option("--abs-tol", flow_abs, "absolute tolerance");
  flow->add_option("--out", flow_out, "report JSON path");
  flow->add_option("--csv", flow_csv, "per-step CSV path");

  // invariance
  auto* inv = app.add_subcommand("invariance", "cone invariance experiment");
  std::string inv_cone = "weak-pic", inv_out, inv_csv;
  int inv_dim = 4, inv_samples = 200;
  std::uint64_t inv_seed = 7;
  double inv_horizon = 10.0, inv_tol = 1e-7;
  inv->add_option("--cone", inv_cone, "cone name");
  inv->add_option("--dim", inv_dim, "dimension")->check(CLI::Range(4, 12));
  inv->add_option("--samples", inv_samples, "boundary samples");
  inv->add_option("--seed", inv_seed, "experiment seed");
  inv->add_option("--horizon-scale", inv_horizon, "horizon in characteristic times");
  inv->add_option("--tolerance", inv_tol, "ODE relative tolerance");
  inv->add_option("--out", inv_out, "report JSON path");
  inv->add_option("--csv", inv_csv, "per-sample CSV path");

  // tau
  auto* tau = app.add_subcommand("tau", "transversality constant experiment");
  std::string tau_cone = "weak-pic", tau_out, tau_csv;
  int tau_dim = 4, tau_samples = 50;
  std::uint64_t tau_seed = 7;
  tau->add_option("--cone", tau_cone, "cone name");
  tau->add_option("--dim", tau_dim, "dimension")->check(CLI::Range(4, 12));
  tau->add_option("--samples", tau_samples, "boundary samples");
  tau->add_option("--seed", tau_seed, "experiment seed");
  tau->add_option("--out", tau_out, "report JSON path");
  tau->add_option("--csv", tau_csv, "per-sample CSV path");

  // models emit
  auto* models = app.add_subcommand("models", "model geometries");
  auto* memit = models->add_subcommand("emit", "write a model to a file");
  std::string m_name = "identity", m_out;
  int m_dim = 4, m_nodes = 2000;
  double m_tau = 1.0, m_smax = 50.0, m_tipk = 1.0;
  memit->add_option("--name", m_name, "model name")->required();
  memit->add_option("--dim", m_dim, "dimension");
  memit->add_option("--tau", m_tau, "shrinking-cylinder time");
  memit->add_option("--smax", m_smax, "bryant arclength span");
  memit->add_option("--nodes", m_nodes, "bryant grid nodes");
  memit->add_option("--tip-curvature", m_tipk, "bryant tip curvature");
  memit->add_option("--out", m_out, "output path")->required();

  // bryant
  auto* bry = app.add_subcommand("bryant", "solve the steady soliton");
  int b_dim = 4, b_nodes = 2000;
  double b_smax = 50.0, b_tipk = 1.0;
  std::string b_out;
  bry->add_option("--dim", b_dim, "dimension")->check(CLI::Range(4, 12));
  bry->add_option("--smax", b_smax, "arclength span");
  bry->add_option("--nodes", b_nodes, "grid nodes");
  bry->add_option("--tip-curvature", b_tipk, "tip sectional curvature");
  bry->add_option("--out", b_out, "warped-metric JSON path");

  // compare
  auto* cmp = app.add_subcommand("compare", "scalar comparison ODE sweep");
  std::string cmp_out, cmp_csv;
  cmp->add_option("--out", cmp_out, "report JSON path");
  cmp->add_option("--csv", cmp_csv, "per-case CSV path");

  try {
    app.parse(argc, argv);
    if (check->parsed())
      return cmd_check(check_in, check_warped, check_node, check_budget,
                       check_seed, check_out);
    if (flow->parsed())
      return cmd_flow(flow_in, flow_horizon, flow_rel, flow_abs, flow_out,
                      flow_csv);
    if (inv->parsed())
      return cmd_invariance(inv_cone, inv_dim, inv_samples, inv_seed,
                            inv_horizon, inv_tol, inv_out, inv_csv);
    if (tau->parsed())
      return cmd_tau(tau_cone, tau_dim, tau_samples, tau_seed, tau_out, tau_csv);
    if (models->parsed()) {
      if (!memit->parsed())
        throw ConfigError("models: the 'emit' subcommand is required");
      return cmd_models_emit(m_name, m_dim, m_tau, m_smax, m_nodes, m_tipk,
                             m_out);
    }
    if (bry->parsed()) return cmd_bryant(b_dim, b_smax, b_nodes, b_tipk, b_out);
    if (cmp->parsed()) return cmd_compare(cmp_out, cmp_csv);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace curv::cli
