#pragma once

// JSON and CSV forms of spacetimes, regions, test functions, solutions, Weyl
// elements and reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "greens.hpp"
#include "report.hpp"
#include "spacetime.hpp"
#include "testfun.hpp"
#include "weyl.hpp"

namespace lcqft {

// ---------------------------------------------------------------------------
// Files

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// 17 significant digits: round-trips exactly and prints the same bytes on every run.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Config-style field access with path diagnostics

namespace detail {

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::ConfigError, path + "." + key + ": missing field");
  return *it;
}

inline double number(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_number()) throw Error(ErrorKind::ConfigError, path + "." + key + ": expected a number");
  return v.get<double>();
}

inline std::pair<double, double> interval(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw Error(ErrorKind::ConfigError, path + "." + key + ": expected [lo, hi]");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Spacetimes and regions

inline Json to_json(const Spacetime2D& M) {
  Json j;
  switch (M.kind()) {
    case SpacetimeKind::MinkowskiPlane:
      j["kind"] = "minkowski";
      break;
    case SpacetimeKind::Cylinder:
      j["kind"] = "cylinder";
      j["L"] = M.circumference();
      break;
    case SpacetimeKind::DoubleCone:
      j["kind"] = "double_cone";
      j["radius"] = M.radius();
      break;
  }
  j["m"] = M.mass();
  j["h"] = M.h();
  j["window"] = {{"t", {M.t_min(), M.t_max()}}, {"x", {M.x_min(), M.x_max()}}};
  return j;
}

/// Accepts {kind, h, m, L | radius, t: [lo, hi], x: [lo, hi]}; the time and
/// space ranges may also be given under "window".
inline Spacetime2D spacetime_from_json(const Json& j, const std::string& path = "spacetime") {
  const Json& kind = detail::field(j, "kind", path);
  if (!kind.is_string()) throw Error(ErrorKind::ConfigError, path + ".kind: expected a string");
  const double h = detail::number(j, "h", path);
  const double m = j.contains("m") ? detail::number(j, "m", path) : detail::number(j, "mass", path);
  const Json& win = j.contains("window") ? j["window"] : j;
  const std::string wpath = j.contains("window") ? path + ".window" : path;
  try {
    const auto k = kind.get<std::string>();
    if (k == "minkowski") {
      const auto [t0, t1] = detail::interval(win, "t", wpath);
      const auto [x0, x1] = detail::interval(win, "x", wpath);
      return Spacetime2D::minkowski(h, m, t0, t1, x0, x1);
    }
    if (k == "cylinder") {
      const auto [t0, t1] = detail::interval(win, "t", wpath);
      return Spacetime2D::cylinder(detail::number(j, "L", path), h, m, t0, t1);
    }
    if (k == "double_cone") return Spacetime2D::double_cone(detail::number(j, "radius", path), h, m);
    throw Error(ErrorKind::ConfigError, path + ".kind: unknown spacetime kind '" + k + "'");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    throw Error(ErrorKind::ConfigError, path + ": " + e.what());
  }
}

inline Json to_json(const Region& O) {
  Json j;
  if (const auto* c = std::get_if<DoubleConeShape>(&O.shape())) {
    j["shape"] = "double_cone";
    j["params"] = {{"center", {c->center.t, c->center.x}}, {"radius", c->radius}};
  } else if (const auto* s = std::get_if<SlabShape>(&O.shape())) {
    j["shape"] = "slab";
    j["params"] = {{"t", {s->t_lo, s->t_hi}}};
  } else {
    const auto& g = std::get<GridSetShape>(O.shape());
    Json nodes = Json::array();
    for (Node p : g.nodes) nodes.push_back({p.n, p.j});
    j["shape"] = "grid_set";
    j["params"] = {{"nodes", nodes}};
  }
  return j;
}

inline Region region_from_json(const Spacetime2D& M, const Json& j, const std::string& path = "region") {
  const Json& shape = detail::field(j, "shape", path);
  const Json& p = detail::field(j, "params", path);
  const std::string pp = path + ".params";
  if (shape == "double_cone") {
    const auto [t, x] = detail::interval(p, "center", pp);
    return Region::double_cone(M, Point{t, x}, detail::number(p, "radius", pp));
  }
  if (shape == "slab") {
    const auto [t0, t1] = detail::interval(p, "t", pp);
    return Region::slab(M, t0, t1);
  }
  if (shape == "grid_set") {
    std::set<Node> nodes;
    for (const Json& q : detail::field(p, "nodes", pp)) {
      if (!q.is_array() || q.size() != 2 || !q[0].is_number_integer() || !q[1].is_number_integer())
        throw Error(ErrorKind::ConfigError, pp + ".nodes: expected [n, j] integer pairs");
      nodes.insert(Node{q[0].get<int>(), q[1].get<int>()});
    }
    return Region::grid_set(M, std::move(nodes));
  }
  throw Error(ErrorKind::ConfigError, path + ".shape: unknown region shape");
}

/// {kind, L, m, h, window, regions: [{shape, params}]}.
inline Json spacetime_document(const Spacetime2D& M, const std::vector<Region>& regions) {
  Json j = to_json(M);
  j["regions"] = Json::array();
  for (const auto& O : regions) j["regions"].push_back(to_json(O));
  return j;
}

// ---------------------------------------------------------------------------
// Test functions and solutions

inline Json to_json(const TestFunction& f) {
  const auto& b = f.box();
  Json s = Json::array();
  for (double v : f.samples()) s.push_back(v);
  return Json{{"ambient_id", f.ambient().id()}, {"support_box", {{"n0", b.n0}, {"n1", b.n1}, {"j0", b.j0}, {"j1", b.j1}}},
              {"samples", s}};
}

/// t,x,value for every sample of the support box.
inline std::string to_csv(const TestFunction& f) {
  std::string out = "t,x,value\n";
  const auto& b = f.box();
  const double h = f.ambient().h();
  for (int n = b.n0; n <= b.n1; ++n)
    for (int j = b.j0; j <= b.j1; ++j) out += fmt(n * h) + "," + fmt(j * h) + "," + fmt(f.at({n, j})) + "\n";
  return out;
}

/// One line per grid row: t followed by the row's values.
inline std::string to_csv(const GridSolution& u) {
  const auto& M = u.ambient();
  std::string out = "t";
  for (int j = M.j_lo(); j <= M.j_hi(); ++j) out += ",x=" + fmt(j * M.h());
  out += "\n";
  for (int n = M.n_lo(); n <= M.n_hi(); ++n) {
    out += fmt(n * M.h());
    for (double v : u.row(n)) out += "," + fmt(v);
    out += "\n";
  }
  return out;
}

inline Json to_json(const GridSolution& u) {
  const auto& M = u.ambient();
  Json rows = Json::array();
  for (int n = M.n_lo(); n <= M.n_hi(); ++n) {
    const auto r = u.row(n);
    rows.push_back(Json(std::vector<double>(r.begin(), r.end())));
  }
  return Json{{"ambient_id", M.id()}, {"n_lo", M.n_lo()}, {"j_lo", M.j_lo()}, {"rows", rows}};
}

/// One line per grid point of the surface: x, phi, pi.
inline std::string to_csv(const CauchyData& d) {
  std::string out = "x,phi,pi\n";
  for (std::size_t k = 0; k < d.phi.size(); ++k)
    out += fmt((d.j_lo + static_cast<int>(k)) * d.h) + "," + fmt(d.phi[k]) + "," + fmt(d.pi[k]) + "\n";
  return out;
}

inline Json to_json(const CauchyData& d) {
  return Json{{"t0", d.t0}, {"h", d.h}, {"j_lo", d.j_lo}, {"phi", d.phi}, {"pi", d.pi}};
}

// ---------------------------------------------------------------------------
// Weyl elements

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// {ambient_id, terms: [{label_hash, coeff_re, coeff_im}]}; when sidecar_dir is
/// given, each label's Cauchy data go to <sidecar_dir>/<label_hash>.json.
inline Json to_json(const WeylElement& e, const std::filesystem::path& sidecar_dir = {}) {
  Json terms = Json::array();
  for (const auto& t : e.terms()) {
    const std::string id = hash_hex(t.label.hash());
    terms.push_back({{"label_hash", id}, {"coeff_re", t.coeff.real()}, {"coeff_im", t.coeff.imag()}});
    if (!sidecar_dir.empty()) write_text(sidecar_dir / (id + ".json"), to_json(t.label.data()).dump(1) + "\n");
  }
  return Json{{"ambient_id", e.ambient().id()}, {"terms", terms}};
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const Report& r) {
  return Json{{"check_id", r.check_id}, {"params", r.params},        {"n_samples", r.n_samples},
              {"max_deviation", r.max_deviation}, {"tolerance", r.tolerance}, {"pass", r.pass}};
}

inline std::string csv_header() { return "suite,check_id,n_samples,max_deviation,tolerance,pass\n"; }

inline std::string csv_row(const std::string& suite, const Report& r) {
  return suite + "," + r.check_id + "," + std::to_string(r.n_samples) + "," + fmt(r.max_deviation) + "," +
         fmt(r.tolerance) + "," + (r.pass ? "true" : "false") + "\n";
}

}  // namespace lcqft
