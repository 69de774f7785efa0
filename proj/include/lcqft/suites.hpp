#pragma once

// Batch runner: config parsing, the axiom suites, report files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "functor.hpp"
#include "io.hpp"
#include "modular.hpp"
#include "natfield.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "spacetime.hpp"

namespace lcqft {

inline const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names{"functor_laws", "isotony",    "covariance", "causality",
                                              "time_slice",   "naturality", "smatrix",    "modular"};
  return names;
}

struct Tolerances {
  double label = kLabelEpsilon;  // exact transports
  double causality = 1e-10;      // commutator coefficients
  double boost_c = 48.0;         // tol_boost(h) = boost_c * h^2
  double factorization = 1e-9;   // S-matrix identities
  double unitarity = 1e-14;      // S(0) = 1, S* S = 1
  double modular = 1e-12;        // Tomita-Takesaki identities, commutant, flow
  double kms = 1e-11;

  double boost(double h) const { return boost_c * h * h; }
};

struct SuiteConfig {
  std::vector<Spacetime2D> spacetimes;
  std::vector<std::string> suites;
  std::uint64_t seed = 0;
  int samples = 10;
  Tolerances tolerances;
  std::filesystem::path output_dir = "reports";

  std::vector<int> modular_dims{2, 3, 4};
  int modular_states = 20;
  std::optional<CMatrix> modular_rho;

  std::vector<double> convergence_h;
  std::vector<double> convergence_masses{0.0, 1.0};
  std::vector<double> smatrix_separations{0.2, 0.4, 0.6, 0.8, 1.0};
};

namespace detail {

inline std::string line_of(const std::string& text, std::size_t byte) {
  const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size())), '\n');
  return "line " + std::to_string(line);
}

inline void reject_unknown(const Json& j, const std::vector<std::string>& allowed, const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw Error(ErrorKind::ConfigError, path + "." + it.key() + ": unknown field");
}

inline std::vector<double> numbers(const Json& v, const std::string& path) {
  if (!v.is_array()) throw Error(ErrorKind::ConfigError, path + ": expected an array of numbers");
  std::vector<double> out;
  for (const Json& x : v) {
    if (!x.is_number()) throw Error(ErrorKind::ConfigError, path + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline int positive_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw Error(ErrorKind::ConfigError, path + ": expected a nonnegative integer");
  return v.get<int>();
}

}  // namespace detail

/// Parses a config document. Errors carry the line (syntax) or field path.
inline SuiteConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, detail::line_of(text, e.byte) + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config: expected an object");
  detail::reject_unknown(j,
                         {"spacetimes", "suites", "seed", "samples", "tolerances", "output_dir", "modular",
                          "convergence", "smatrix"},
                         "config");
  SuiteConfig c;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw Error(ErrorKind::ConfigError, "config.seed: expected an integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("samples")) c.samples = detail::positive_int(j["samples"], "config.samples");
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw Error(ErrorKind::ConfigError, "config.output_dir: expected a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("spacetimes")) {
    if (!j["spacetimes"].is_array()) throw Error(ErrorKind::ConfigError, "config.spacetimes: expected an array");
    for (std::size_t k = 0; k < j["spacetimes"].size(); ++k)
      c.spacetimes.push_back(
          spacetime_from_json(j["spacetimes"][k], "config.spacetimes[" + std::to_string(k) + "]"));
  }
  if (j.contains("suites")) {
    if (!j["suites"].is_array()) throw Error(ErrorKind::ConfigError, "config.suites: expected an array");
    for (std::size_t k = 0; k < j["suites"].size(); ++k) {
      const Json& s = j["suites"][k];
      const std::string path = "config.suites[" + std::to_string(k) + "]";
      if (!s.is_string()) throw Error(ErrorKind::ConfigError, path + ": expected a suite name");
      const auto name = s.get<std::string>();
      const auto& known = known_suites();
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw Error(ErrorKind::ConfigError, path + ": unknown suite '" + name + "'");
      c.suites.push_back(name);
    }
  }
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    if (!t.is_object()) throw Error(ErrorKind::ConfigError, "config.tolerances: expected an object");
    detail::reject_unknown(t, {"label", "causality", "boost_c", "factorization", "unitarity", "modular", "kms"},
                           "config.tolerances");
    auto get = [&](const char* key, double& out) {
      if (t.contains(key)) out = detail::number(t, key, "config.tolerances");
    };
    get("label", c.tolerances.label);
    get("causality", c.tolerances.causality);
    get("boost_c", c.tolerances.boost_c);
    get("factorization", c.tolerances.factorization);
    get("unitarity", c.tolerances.unitarity);
    get("modular", c.tolerances.modular);
    get("kms", c.tolerances.kms);
  }
  if (j.contains("modular")) {
    const Json& m = j["modular"];
    if (!m.is_object()) throw Error(ErrorKind::ConfigError, "config.modular: expected an object");
    detail::reject_unknown(m, {"n", "states", "rho"}, "config.modular");
    if (m.contains("n")) {
      c.modular_dims.clear();
      const Json& n = m["n"];
      if (n.is_number_integer()) {
        c.modular_dims.push_back(detail::positive_int(n, "config.modular.n"));
      } else if (n.is_array()) {
        for (const Json& x : n) c.modular_dims.push_back(detail::positive_int(x, "config.modular.n"));
      } else {
        throw Error(ErrorKind::ConfigError, "config.modular.n: expected an integer or a list");
      }
    }
    if (m.contains("states")) c.modular_states = detail::positive_int(m["states"], "config.modular.states");
    if (m.contains("rho")) {
      // Either eigenvalues [p_1, ..., p_n] or a real matrix [[...], ...].
      const Json& r = m["rho"];
      if (!r.is_array() || r.empty()) throw Error(ErrorKind::ConfigError, "config.modular.rho: expected a list");
      const auto n = static_cast<Eigen::Index>(r.size());
      CMatrix rho = CMatrix::Zero(n, n);
      if (r[0].is_array()) {
        for (Eigen::Index i = 0; i < n; ++i) {
          const auto row = detail::numbers(r[static_cast<std::size_t>(i)], "config.modular.rho");
          if (static_cast<Eigen::Index>(row.size()) != n)
            throw Error(ErrorKind::ConfigError, "config.modular.rho: matrix must be square");
          for (Eigen::Index k = 0; k < n; ++k) rho(i, k) = row[static_cast<std::size_t>(k)];
        }
      } else {
        const auto p = detail::numbers(r, "config.modular.rho");
        for (Eigen::Index i = 0; i < n; ++i) rho(i, i) = p[static_cast<std::size_t>(i)];
      }
      c.modular_rho = rho;
      c.modular_dims = {static_cast<int>(n)};
    }
  }
  if (j.contains("convergence")) {
    const Json& v = j["convergence"];
    if (!v.is_object()) throw Error(ErrorKind::ConfigError, "config.convergence: expected an object");
    detail::reject_unknown(v, {"h", "masses"}, "config.convergence");
    if (v.contains("h")) c.convergence_h = detail::numbers(v["h"], "config.convergence.h");
    if (v.contains("masses")) c.convergence_masses = detail::numbers(v["masses"], "config.convergence.masses");
  }
  if (j.contains("smatrix")) {
    const Json& v = j["smatrix"];
    if (!v.is_object()) throw Error(ErrorKind::ConfigError, "config.smatrix: expected an object");
    detail::reject_unknown(v, {"separations"}, "config.smatrix");
    if (v.contains("separations"))
      c.smatrix_separations = detail::numbers(v["separations"], "config.smatrix.separations");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Suites

namespace detail {

/// Spatial centre used for sampling: 0 on the plane, L/2 on the cylinder.
inline double centre_x(const Spacetime2D& M) { return M.periodic() ? 0.5 * M.circumference() : 0.0; }

inline double snap(double v, double h) { return std::round(v / h) * h; }

inline BumpBox central_box(const Spacetime2D& M) {
  const double c = centre_x(M);
  return BumpBox{-0.3, 0.3, c - 1.0, c + 1.0, 0.2, 0.4};
}

inline Embedding automorphism(const Spacetime2D& M, AffineMap map) { return validate_embedding({M, M, map}); }

inline bool full(const Spacetime2D& M) { return M.kind() != SpacetimeKind::DoubleCone; }

inline std::vector<Report> functor_laws(const SuiteConfig& c, Rng& rng) {
  std::vector<Report> out;
  const int n = c.samples;
  for (const auto& M : c.spacetimes) {
    if (!full(M)) continue;
    const double h = M.h();
    const BumpBox box = central_box(M);
    out.push_back(check_functor_identity(M, box, rng, n));
    const auto Tt = automorphism(M, AffineMap::translation(4 * h, 0));
    const auto Tx = automorphism(M, AffineMap::translation(0, 8 * h));
    out.push_back(check_functor_composition(Tt, Tx, box, rng, n, c.tolerances.label));
    out.push_back(check_homomorphism(Tx, box, rng, n, c.tolerances.label));
    out.push_back(check_injectivity(Tt, box, rng, n));
    if (M.kind() == SpacetimeKind::MinkowskiPlane) {
      const auto B = automorphism(M, AffineMap::boost(0.2));
      const double tol = c.tolerances.boost(h);
      out.push_back(check_functor_composition(B, Tx, box, rng, n, tol));
      out.push_back(check_functor_composition(Tx, B, box, rng, n, tol));
      out.push_back(check_functor_composition(Tt, B, box, rng, n, tol));
      out.push_back(check_functor_composition(B, Tt, box, rng, n, tol));
    }
  }
  return out;
}

inline std::vector<Report> isotony(const SuiteConfig& c, Rng& rng) {
  std::vector<Report> out;
  for (const auto& M : c.spacetimes) {
    const double r = full(M) ? 1.0 : M.radius();
    const Point o{0.0, centre_x(M)};
    out.push_back(check_isotony(M, {{o, 0.25 * r}, {o, 0.5 * r}, {{0.1 * r, o.x}, 0.75 * r}}, rng, c.samples));
  }
  return out;
}

inline std::vector<Report> covariance(const SuiteConfig& c, Rng& rng) {
  std::vector<Report> out;
  for (const auto& M : c.spacetimes) {
    if (!full(M)) continue;
    const double h = M.h(), x = centre_x(M);
    const std::vector<DoubleConeShape> regions{{{0.0, x}, 1.0}, {{0.1, x + 1.5}, 0.8}};
    std::vector<std::pair<AffineMap, double>> maps;
    if (M.periodic()) {
      maps = {{AffineMap::translation(h, 0), c.tolerances.label}, {AffineMap::translation(0, h), c.tolerances.label}};
    } else {
      maps = {{AffineMap::translation(4 * h, 8 * h), c.tolerances.label},
              {AffineMap::boost(0.2), c.tolerances.boost(h)}};
    }
    for (const auto& [map, tol] : maps) {
      auto [support, labels] = check_covariance(M, automorphism(M, map), regions, rng, c.samples, tol);
      out.push_back(support);
      out.push_back(labels);
    }
  }
  return out;
}

/// Three spacelike separated double-cone pairs, centred on the sampling centre.
inline std::vector<std::pair<DoubleConeShape, DoubleConeShape>> causality_pairs(const Spacetime2D& M) {
  const double x = centre_x(M);
  return {{{{0.0, x - 3.0}, 1.0}, {{0.0, x + 3.0}, 1.0}},
          {{{0.25, x - 1.0}, 0.6}, {{-0.25, x + 1.0}, 0.6}},
          {{{-0.5, x}, 0.7}, {{0.5, x + 2.5}, 0.7}}};
}

inline std::vector<Report> causality(const SuiteConfig& c, Rng& rng) {
  std::vector<Report> out;
  for (const auto& M : c.spacetimes) {
    if (!full(M)) continue;
    for (const auto& [a, b] : causality_pairs(M))
      out.push_back(check_causality(M, a, b, rng, c.samples, c.tolerances.causality));
  }
  return out;
}

inline std::vector<Report> time_slice(const SuiteConfig& c, Rng& rng) {
  std::vector<Report> out;
  for (const auto& M : c.spacetimes) {
    if (!full(M)) continue;
    const double h = M.h(), x = centre_x(M);
    const Region slab = Region::slab(M, -4 * h, 4 * h);
    out.push_back(check_time_slice(M, slab, {-0.9, 0.9, x - 3.0, x + 3.0, 0.2, 0.3}, rng, c.samples, c.tolerances.label));
  }
  return out;
}

inline std::vector<Report> naturality(const SuiteConfig& c, Rng& rng) {
  std::vector<Report> out;
  for (const auto& D : c.spacetimes) {
    if (D.kind() != SpacetimeKind::DoubleCone) continue;
    const DoubleConeShape whole{{0.0, 0.0}, D.radius()};
    for (const auto& M : c.spacetimes) {
      if (!full(M) || M.h() != D.h() || M.mass() != D.mass()) continue;
      const double h = M.h();
      const AffineMap map = AffineMap::translation(snap(0.1, h), snap(centre_x(M) + 0.5, h));
      const auto psi = validate_embedding({D, M, map});
      out.push_back(check_naturality(WeylField{}, psi, [&] { return random_bump_in(D, whole, rng); }, c.samples,
                                     c.tolerances.label));
    }
  }
  for (const auto& M : c.spacetimes) {
    if (M.kind() != SpacetimeKind::MinkowskiPlane) continue;
    const auto psi = automorphism(M, AffineMap::boost(0.2));
    const BumpBox box = central_box(M);
    out.push_back(check_naturality(WeylField{}, psi, [&] { return random_bump(M, rng, box); }, c.samples,
                                   c.tolerances.boost(M.h())));
  }
  return out;
}

/// Three bumps with time centres t_lambda, random in [-0.5, 0.5], t_nu.
struct SourceTriple {
  TestFunction lambda, mu, nu;
};

inline SourceTriple random_sources(const Spacetime2D& M, Rng& rng, double t_lambda, double t_nu, double rt_lo = 0.1,
                                   double rt_hi = 0.2) {
  const double x = centre_x(M);
  auto make = [&](double tc) {
    return bump(M, Point{tc, x + rng.uniform(-1.0, 1.0)}, rng.uniform(rt_lo, rt_hi), rng.uniform(0.1, 0.3),
                rng.sign() * rng.uniform(0.5, 2.0));
  };
  TestFunction lambda = make(t_lambda);
  TestFunction mu = make(rng.uniform(-0.5, 0.5));
  TestFunction nu = make(t_nu);
  return {std::move(lambda), std::move(mu), std::move(nu)};
}

inline std::vector<Report> smatrix(const SuiteConfig& c, Rng& rng) {
  std::vector<Report> out;
  for (const auto& M : c.spacetimes) {
    if (!full(M)) continue;
    const Json params{{"spacetime", M.id()}};
    Report axioms = make_report("smatrix_unit_unitarity", c.tolerances.unitarity, params);
    Report fact = make_report("smatrix_factorization", c.tolerances.factorization, params);
    Report rel = make_report("smatrix_relative_factorization", c.tolerances.factorization, params);
    Report cov = make_report("smatrix_covariance", c.tolerances.label, params);
    axioms.observe(coefficient_distance(s_matrix(M, TestFunction::zero(M)).value, WeylElement::unit(M)));
    const double h = M.h();
    const auto shift = automorphism(M, AffineMap::translation(2 * h, 4 * h));
    for (int s = 0; s < c.samples; ++s) {
      const auto src = random_sources(M, rng, rng.uniform(0.45, 0.8), rng.uniform(-0.8, -0.45));
      axioms.observe(unitarity_deviation(M, src.lambda + src.mu));
      fact.observe(factorization_deviation(M, src.lambda, src.mu, src.nu));
      rel.observe(relative_factorization_deviation(M, src.mu, src.lambda, src.nu));
      cov.observe(smatrix_covariance_deviation(shift, src.mu));
    }
    out.push_back(axioms.finish());
    out.push_back(fact.finish());
    out.push_back(rel.finish());
    out.push_back(cov.finish());
  }
  return out;
}

inline std::vector<Report> modular(const SuiteConfig& c, Rng& rng) {
  std::vector<Report> out;
  const std::vector<double> times{-1.0, 0.0, 0.5, 1.0, 2.5};
  for (int n : c.modular_dims) {
    const Json params{{"n", n}};
    Report ident = make_report("modular_identities", c.tolerances.modular, params);
    Report spec = make_report("modular_spectrum_inversion", c.tolerances.modular, params);
    Report com = make_report("commutant", c.tolerances.modular, params);
    Report flow = make_report("flow_invariance", c.tolerances.modular, params);
    Report kms = make_report("kms", c.tolerances.kms, params);
    const int states = c.modular_rho ? 1 : c.modular_states;
    for (int s = 0; s < states; ++s) {
      const StandardPair pair = StandardPair::from_density(c.modular_rho ? *c.modular_rho : random_density(n, rng));
      const ModularData d = tomita_operators(pair);
      ident.observe(modular_identity_deviation(pair, d));
      const auto ev = modular_spectrum(d);
      for (std::size_t k = 0; k < ev.size(); ++k) spec.observe(std::abs(ev[k] * ev[ev.size() - 1 - k] - 1.0));
      const auto rc = check_commutant(pair, d, rng, 2, c.tolerances.modular);
      const auto rf = check_flow_invariance(pair, d, rng, 2, times, c.tolerances.modular);
      const auto rk = check_kms(pair, d, rng, 2, times, c.tolerances.kms);
      com.observe(rc.max_deviation);
      flow.observe(rf.max_deviation);
      kms.observe(rk.max_deviation);
    }
    for (Report* r : {&ident, &spec, &com, &flow, &kms}) out.push_back(r->finish());
  }
  return out;
}

}  // namespace detail

/// Runs one suite with randomness derived from (seed, suite name).
inline std::vector<Report> run_suite(const std::string& name, const SuiteConfig& c) {
  Rng rng(c.seed, name);
  if (name == "functor_laws") return detail::functor_laws(c, rng);
  if (name == "isotony") return detail::isotony(c, rng);
  if (name == "covariance") return detail::covariance(c, rng);
  if (name == "causality") return detail::causality(c, rng);
  if (name == "time_slice") return detail::time_slice(c, rng);
  if (name == "naturality") return detail::naturality(c, rng);
  if (name == "smatrix") return detail::smatrix(c, rng);
  if (name == "modular") return detail::modular(c, rng);
  throw Error(ErrorKind::ConfigError, "unknown suite '" + name + "'");
}

struct RunResult {
  bool pass = true;
  std::vector<std::pair<std::string, std::vector<Report>>> suites;
};

/// Executes every configured suite and writes <suite>.json plus summary.csv.
inline RunResult run(const SuiteConfig& c) {
  RunResult result;
  std::string summary = csv_header();
  for (const auto& name : c.suites) {
    auto reports = run_suite(name, c);
    Json doc = Json::array();
    for (const auto& r : reports) {
      doc.push_back(to_json(r));
      summary += csv_row(name, r);
      result.pass = result.pass && r.pass;
    }
    write_text(c.output_dir / (name + ".json"), doc.dump(2) + "\n");
    result.suites.emplace_back(name, std::move(reports));
  }
  write_text(c.output_dir / "summary.csv", summary);
  return result;
}

}  // namespace lcqft
