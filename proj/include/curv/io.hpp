#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "curv/errors.hpp"
#include "curv/experiments.hpp"
#include "curv/fourd.hpp"
#include "curv/isotropic.hpp"
#include "curv/tensor.hpp"
#include "curv/warped.hpp"

namespace curv::io {

using nlohmann::json;

/// 17-significant-digit rendering used for CSV cells.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Tensor exchange file: {"n", "format": "dense", "components", "meta"}.
// Readers validate the symmetries on load.
// ---------------------------------------------------------------------------

inline json tensor_to_json(const Tensor& rm, json meta = json::object()) {
  json j;
  j["n"] = rm.dim();
  j["format"] = "dense";
  j["components"] = std::vector<double>(rm.data().data(),
                                        rm.data().data() + rm.data().size());
  j["meta"] = std::move(meta);
  return j;
}

inline Tensor tensor_from_json(const json& j) {
  if (!j.contains("n") || !j.contains("components"))
    throw ConfigError("tensor file: missing 'n' or 'components'");
  if (j.value("format", "dense") != "dense")
    throw ConfigError("tensor file: unsupported format '" +
                      j.value("format", "") + "'");
  const int n = j["n"].get<int>();
  const auto comp = j["components"].get<std::vector<double>>();
  Eigen::VectorXd v =
      Eigen::Map<const Eigen::VectorXd>(comp.data(), static_cast<long>(comp.size()));
  return make_tensor<double>(n, v);  // validates symmetries
}

// ---------------------------------------------------------------------------
// Warped-metric file: {"n", "s", "phi", "f" (optional), "tip"}.
// ---------------------------------------------------------------------------

inline json warped_to_json(const WarpedMetric& w) {
  json j;
  j["n"] = w.n;
  j["s"] = std::vector<double>(w.s.data(), w.s.data() + w.s.size());
  j["phi"] = std::vector<double>(w.phi.data(), w.phi.data() + w.phi.size());
  if (w.f)
    j["f"] = std::vector<double>(w.f->data(), w.f->data() + w.f->size());
  j["tip"] = w.tip;
  return j;
}

inline WarpedMetric warped_from_json(const json& j) {
  WarpedMetric w;
  if (!j.contains("n") || !j.contains("s") || !j.contains("phi"))
    throw ConfigError("warped file: missing 'n', 's' or 'phi'");
  w.n = j["n"].get<int>();
  const auto s = j["s"].get<std::vector<double>>();
  const auto p = j["phi"].get<std::vector<double>>();
  if (s.size() != p.size() || s.size() < 5)
    throw ConfigError("warped file: 's' and 'phi' must be equal-length (>= 5)");
  w.s = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<long>(s.size()));
  w.phi = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<long>(p.size()));
  for (int i = 0; i + 1 < w.nodes(); ++i)
    if (!(w.s[i + 1] > w.s[i]))
      throw ConfigError("warped file: 's' must be strictly increasing");
  if (j.contains("f") && !j["f"].is_null()) {
    const auto f = j["f"].get<std::vector<double>>();
    if (f.size() != s.size())
      throw ConfigError("warped file: 'f' length mismatch");
    w.f = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<long>(f.size()));
  }
  w.tip = j.value("tip", false);
  return w;
}

// ---------------------------------------------------------------------------
// Report serializers.
// ---------------------------------------------------------------------------

inline json frame_to_json(const Frame4& f) {
  json rows = json::array();
  for (int a = 0; a < 4; ++a) {
    json row = json::array();
    for (int i = 0; i < f.dim(); ++i) row.push_back(f.cols(i, a));
    rows.push_back(row);
  }
  return rows;
}

inline json isotropic_report_to_json(const IsotropicReport& r) {
  json j;
  j["mode"] = to_string(r.mode);
  j["minimum"] = r.minimum;
  j["frame"] = frame_to_json(r.argmin);
  j["lambda"] = r.lambda;
  j["mu"] = r.mu;
  j["budget"] = r.budget;
  j["converged"] = r.converged;
  return j;
}

inline json block_report_to_json(const PinchingReport& p) {
  json j;
  j["a"] = {p.blocks.a[0], p.blocks.a[1], p.blocks.a[2]};
  j["b"] = {p.blocks.b[0], p.blocks.b[1], p.blocks.b[2]};
  j["c"] = {p.blocks.c[0], p.blocks.c[1], p.blocks.c[2]};
  j["traces"] = {{"A", p.blocks.A.trace()}, {"C", p.blocks.C.trace()}};
  json ratios;
  auto put = [&](const char* key, double v, bool finite) {
    if (finite)
      ratios[key] = v;
    else
      ratios[key] = "inf";
  };
  put("lemma41_a", p.lemma41_a, p.lemma41_a_finite);
  put("lemma41_c", p.lemma41_c, p.lemma41_c_finite);
  put("lemma42", p.lemma42, p.lemma42_finite);
  put("lemma43", p.lemma43, p.lemma43_finite);
  j["ratios"] = ratios;
  j["flags"] = {{"restricted_ok", p.restricted_ok},
                {"lambda_finite", std::isfinite(p.lambda)}};
  if (std::isfinite(p.lambda)) j["lambda"] = p.lambda;
  return j;
}

inline json invariance_report_to_json(const InvarianceReport& r) {
  json j;
  j["cone"] = r.cone;
  j["n"] = r.n;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["horizon_scale"] = r.horizon_scale;
  j["violations"] = r.violations;
  j["min_margin"] = r.min_margin;
  j["scalar_monotone"] = r.scalar_monotone;
  j["tau_hat"] = nullptr;
  return j;
}

inline std::string invariance_report_csv(const InvarianceReport& r) {
  std::ostringstream os;
  os << "sample,margin0,min_margin,t_end,r0,r_end,steps,violation\n";
  for (const auto& row : r.rows)
    os << row.index << ',' << fmt17(row.margin0) << ',' << fmt17(row.min_margin)
       << ',' << fmt17(row.t_end) << ',' << fmt17(row.r0) << ','
       << fmt17(row.r_end) << ',' << row.steps << ',' << (row.violation ? 1 : 0)
       << '\n';
  return os.str();
}

inline json tau_report_to_json(const TauReport& r) {
  json j;
  j["cone"] = r.cone;
  j["n"] = r.n;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["violations"] = 0;
  j["min_margin"] = nullptr;
  j["tau_hat"] = r.tau_hat;
  return j;
}

inline std::string tau_report_csv(const TauReport& r) {
  std::ostringstream os;
  os << "sample,tau\n";
  for (std::size_t i = 0; i < r.per_sample.size(); ++i)
    os << i << ',' << fmt17(r.per_sample[i]) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Whole-file helpers.  Reports are assembled in memory and written in one
// shot so error paths never leave partial files behind.
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << body;
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

inline json load_json(const std::string& path) {
  return json::parse(read_text_file(path));
}

}  // namespace curv::io
