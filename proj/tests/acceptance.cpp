// Acceptance runner: one PASS/FAIL line per criterion with the measured value,
// the pinned bound and the wall time.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lcqft/commands.hpp"
#include "lcqft/suites.hpp"
#include "oracles.hpp"

using namespace lcqft;
namespace fs = std::filesystem;

namespace {

struct Item {
  std::string name;
  double value;
  std::string bound;  // printed after the value
  bool ok;
};

struct Outcome {
  std::string title;
  std::vector<Item> items;
  std::string note;
};

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

Item at_most(std::string name, double value, double bound) {
  return {std::move(name), value, "<= " + sci(bound), value <= bound};
}

Item at_least(std::string name, double value, double bound) {
  return {std::move(name), value, ">= " + sci(bound), value >= bound};
}

Item ratio_in(std::string name, double coarse, double fine, double lo = 3.0, double hi = 5.0) {
  const double r = coarse / fine;
  return {std::move(name), r, "in [" + sci(lo) + "," + sci(hi) + "]", r >= lo && r <= hi};
}

/// The same spacetime at another spacing.
Spacetime2D respaced(const Spacetime2D& M, double h) {
  const double t0 = M.n_lo() * M.h(), t1 = M.n_hi() * M.h();
  switch (M.kind()) {
    case SpacetimeKind::MinkowskiPlane:
      return Spacetime2D::minkowski(h, M.mass(), t0, t1, M.j_lo() * M.h(), M.j_hi() * M.h());
    case SpacetimeKind::Cylinder:
      return Spacetime2D::cylinder(M.circumference(), h, M.mass(), t0, t1);
    default:
      return Spacetime2D::double_cone(M.radius(), h, M.mass());
  }
}

std::vector<Spacetime2D> full_spacetimes(const SuiteConfig& c) {
  std::vector<Spacetime2D> out;
  for (const auto& M : c.spacetimes)
    if (detail::full(M)) out.push_back(M);
  return out;
}

constexpr double kExact = 1e-12;  // "exact": rounding only
constexpr int kFunctorSamples = 50;

Outcome functor_laws(const SuiteConfig& c) {
  Outcome o{"functor laws", {}, ""};
  double ident = 0.0, trans = 0.0, boost = 0.0;
  for (const auto& M : full_spacetimes(c)) {
    Rng rng(c.seed, "acceptance_functor");
    const double h = M.h();
    const BumpBox box = detail::central_box(M);
    ident = std::max(ident, check_functor_identity(M, box, rng, kFunctorSamples).max_deviation);
    const auto Tt = detail::automorphism(M, AffineMap::translation(4 * h, 0));
    const auto Tx = detail::automorphism(M, AffineMap::translation(0, 8 * h));
    trans = std::max(trans, check_functor_composition(Tt, Tx, box, rng, kFunctorSamples, 0).max_deviation);
    trans = std::max(trans, check_functor_composition(Tx, Tt, box, rng, kFunctorSamples, 0).max_deviation);
    if (M.kind() != SpacetimeKind::MinkowskiPlane) continue;
    const auto B = detail::automorphism(M, AffineMap::boost(0.2));
    for (const auto& [a, b] : {std::pair{B, Tx}, {Tx, B}, {Tt, B}, {B, Tt}})
      boost = std::max(boost, check_functor_composition(a, b, box, rng, kFunctorSamples, 0).max_deviation);
  }
  o.items = {at_most("identity", ident, 0.0), at_most("translation_chains", trans, kExact),
             at_most("boost_chains", boost, 1e-6)};
  if (boost > 1e-6)
    o.note = "boost then time translation: lattice evolution of resampled data differs from resampling at O(h^2)";
  return o;
}

Outcome causality(const SuiteConfig& c) {
  Outcome o{"causality", {}, ""};
  double worst32 = 0.0, worst64 = 0.0;
  for (const auto& M64 : full_spacetimes(c))
    for (double h : {1.0 / 32, 1.0 / 64}) {
      const Spacetime2D M = respaced(M64, h);
      Rng rng(c.seed, "acceptance_causality");
      double worst = 0.0;
      for (const auto& [a, b] : detail::causality_pairs(M))
        worst = std::max(worst, check_causality(M, a, b, rng, 50, 1e-10).max_deviation);
      double& slot = h > 1.0 / 48 ? worst32 : worst64;
      slot = std::max(slot, worst);
    }
  o.items = {at_most("commutator_h1/32", worst32, 1e-10), at_most("commutator_h1/64", worst64, 1e-10),
             at_most("h_dependence", std::abs(worst32 - worst64), 1e-10)};
  return o;
}

Outcome time_slice(const SuiteConfig& c) {
  constexpr double kC = 1.0;
  constexpr double kFloor = 1e-13;  // below this a refinement ratio measures rounding, not h
  Outcome o{"time-slice", {}, ""};
  double d32 = 0.0, d64 = 0.0;
  for (const auto& M64 : full_spacetimes(c))
    for (double h : {1.0 / 32, 1.0 / 64}) {
      const Spacetime2D M = respaced(M64, h);
      const double x = detail::centre_x(M);
      Rng rng(c.seed, "acceptance_time_slice");
      const auto r = check_time_slice(M, Region::slab(M, -4 * h, 4 * h), {-0.9, 0.9, x - 3.0, x + 3.0, 0.2, 0.3},
                                      rng, 30, kC * h * h);
      double& slot = h > 1.0 / 48 ? d32 : d64;
      slot = std::max(slot, r.max_deviation);
    }
  Item ratio = ratio_in("refinement_ratio", d32, d64);
  ratio.ok = ratio.ok && d64 > kFloor;
  o.items = {at_most("label_h1/32", d32, kC / 1024), at_most("label_h1/64", d64, kC / 4096), ratio};
  if (!ratio.ok) o.note = "compression is exact on the lattice (deviation at rounding), so no h^2 ratio exists";
  return o;
}

Outcome isotony_covariance(const SuiteConfig& c) {
  Outcome o{"isotony + covariance", {}, ""};
  double iso = 0.0, support = 0.0, grid = 0.0;
  for (const auto& M : c.spacetimes) {
    Rng rng(c.seed, "acceptance_isotony");
    const double r = detail::full(M) ? 1.0 : M.radius();
    const Point p{0.0, detail::centre_x(M)};
    iso = std::max(iso, check_isotony(M, {{p, 0.25 * r}, {p, 0.5 * r}, {{0.1 * r, p.x}, 0.75 * r}}, rng, 50)
                            .max_deviation);
  }
  double boost32 = 0.0, boost64 = 0.0;
  for (const auto& M64 : full_spacetimes(c)) {
    const double x = detail::centre_x(M64);
    const std::vector<DoubleConeShape> regions{{{0.0, x}, 1.0}, {{0.1, x + 1.5}, 0.8}};
    const double h = M64.h();
    std::vector<AffineMap> maps{AffineMap::translation(h, 0), AffineMap::translation(0, h),
                                AffineMap::translation(4 * h, 8 * h)};
    for (const auto& map : maps) {
      Rng rng(c.seed, "acceptance_covariance");
      const auto [s, l] = check_covariance(M64, detail::automorphism(M64, map), regions, rng, 25, kExact);
      support = std::max(support, s.max_deviation);
      grid = std::max(grid, l.max_deviation);
    }
    if (M64.kind() != SpacetimeKind::MinkowskiPlane) continue;
    for (double hb : {1.0 / 32, 1.0 / 64}) {
      const Spacetime2D M = respaced(M64, hb);
      Rng rng(c.seed, "acceptance_boost");
      const auto [s, l] = check_covariance(M, detail::automorphism(M, AffineMap::boost(0.2)), regions, rng, 25, 1e-6);
      support = std::max(support, s.max_deviation);
      double& slot = hb > 1.0 / 48 ? boost32 : boost64;
      slot = std::max(slot, l.max_deviation);
    }
  }
  o.items = {at_most("isotony_support", iso, 0.0),         at_most("covariance_support", support, 0.0),
             at_most("grid_maps_label", grid, kExact),     at_most("boost_h1/64", boost64, 1e-6),
             ratio_in("boost_refinement_ratio", boost32, boost64)};
  if (boost64 > 1e-6)
    o.note = "boost deviation is the lattice's O(h^2) Lorentz breaking; 1e-6 would need h ~ 1/" +
             std::to_string(std::lround(64.0 * std::sqrt(boost64 / 1e-6)));
  return o;
}

Outcome naturality(const SuiteConfig& c) {
  Outcome o{"naturality", {}, ""};
  const Spacetime2D* cone = nullptr;
  for (const auto& M : c.spacetimes)
    if (M.kind() == SpacetimeKind::DoubleCone) cone = &M;
  if (!cone) throw Error(ErrorKind::ConfigError, "config has no double cone");
  const Spacetime2D& D = *cone;
  const double h = D.h();
  const Spacetime2D plane = Spacetime2D::minkowski(h, 0.5, -1.25, 1.25, -6.0, 6.0);
  const Spacetime2D cyl = Spacetime2D::cylinder(16.0, h, 0.5, -1.25, 1.25);
  const DoubleConeShape whole{{0.0, 0.0}, D.radius()};
  for (const auto& [T, name] : {std::pair{plane, std::string("into_minkowski")}, {cyl, std::string("into_cylinder")}}) {
    double worst = 0.0;
    const double x = detail::centre_x(T);
    for (const auto& [dt, dx] : {std::pair{0.0, 0.0}, {0.1, 0.5}, {-0.2, -1.25}}) {
      Rng rng(c.seed, "acceptance_naturality");
      const auto psi = validate_embedding({D, T, AffineMap::translation(detail::snap(dt, h), detail::snap(x + dx, h))});
      worst = std::max(worst, check_naturality(WeylField{}, psi, [&] { return random_bump_in(D, whole, rng); }, 20)
                                  .max_deviation);
    }
    o.items.push_back(at_most(name, worst, 1e-9));
  }
  return o;
}

Outcome smatrix(const SuiteConfig& c) {
  Outcome o{"S-matrix", {}, ""};
  double unit = 0.0, unitary = 0.0, fact = 0.0;
  for (const auto& M : full_spacetimes(c)) {
    Rng rng(c.seed, "acceptance_smatrix");
    unit = std::max(unit, coefficient_distance(s_matrix(M, TestFunction::zero(M)).value, WeylElement::unit(M)));
    for (int s = 0; s < 10; ++s) {
      const auto src = detail::random_sources(M, rng, rng.uniform(0.45, 0.8), rng.uniform(-0.8, -0.45));
      unitary = std::max(unitary, unitarity_deviation(M, src.lambda + src.mu + src.nu));
      fact = std::max(fact, factorization_deviation(M, src.lambda, src.mu, src.nu));
    }
  }
  o.items = {at_most("S(0)=1", unit, 0.0), at_most("unitarity", unitary, 1e-14),
             at_most("factorization", fact, 1e-9)};
  return o;
}

/// L2 error of E f against the closed-form kernel on the 1/4 evaluation grid.
double propagator_error(double h, double m) {
  const Spacetime2D M = Spacetime2D::minkowski(h, m, -1.0, 1.0, -3.0, 3.0);
  const oracle::Bump b{0.1, 0.2, 0.3, 0.35, 1.0};
  const GridSolution e = causal_propagator(M, bump(M, {b.tc, b.xc}, b.rt, b.rx, b.amp));
  double s = 0.0;
  for (int it = -3; it <= 3; ++it)
    for (int ix = -6; ix <= 6; ++ix) {
      const double t = 0.25 * it, x = 0.25 * ix;
      const double d = e.at(M.snap({t, x})) - oracle::causal_propagator_exact(b, m, t, x);
      s += d * d;
    }
  return std::sqrt(s) * 0.25;
}

Outcome greens(const SuiteConfig&) {
  Outcome o{"Green-operator convergence", {}, ""};
  for (double m : {0.0, 1.0}) {
    const double e16 = propagator_error(1.0 / 16, m), e32 = propagator_error(1.0 / 32, m),
                 e64 = propagator_error(1.0 / 64, m);
    const std::string tag = "m" + sci(m) + "_";
    o.items.push_back(ratio_in(tag + "ratio_16/32", e16, e32));
    o.items.push_back(ratio_in(tag + "ratio_32/64", e32, e64));
    o.note += tag + "L2 " + sci(e16) + " " + sci(e32) + " " + sci(e64) + "; ";
  }
  return o;
}

Outcome modular(const SuiteConfig& c) {
  Outcome o{"modular lab", {}, ""};
  const std::vector<double> times{-1.0, 0.0, 0.5, 1.0, 2.5};
  double ident = 0.0, com = 0.0, flow = 0.0, kms = 0.0;
  Rng rng(c.seed, "acceptance_modular");
  for (int n : {2, 3, 4})
    for (int s = 0; s < 100; ++s) {
      const auto pair = StandardPair::from_density(random_density(n, rng));
      const auto d = tomita_operators(pair);
      ident = std::max(ident, modular_identity_deviation(pair, d));
      com = std::max(com, check_commutant(pair, d, rng, 2).max_deviation);
      flow = std::max(flow, check_flow_invariance(pair, d, rng, 2, times).max_deviation);
      kms = std::max(kms, check_kms(pair, d, rng, 2, times).max_deviation);
    }
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = 0.3;
  rho(1, 1) = 0.7;
  const auto ev = modular_spectrum(tomita_operators(StandardPair::from_density(rho)));
  const std::vector<double> want{3.0 / 7, 1.0, 1.0, 7.0 / 3};
  double spec = 0.0;
  for (std::size_t k = 0; k < want.size(); ++k) spec = std::max(spec, std::abs(ev.at(k) - want[k]));
  o.items = {at_most("identities", ident, 1e-12), at_most("commutant", com, 1e-12),
             at_most("flow_invariance", flow, 1e-12), at_most("kms", kms, 1e-11),
             at_most("diag_spectrum", spec, 1e-12)};
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const std::string& lcqft, const std::string& config, const fs::path& work) {
  Outcome o{"determinism", {}, ""};
  const fs::path a = work / "run_a", b = work / "run_b";
  fs::remove_all(a);
  fs::remove_all(b);
  int codes = 0;
  for (const auto& dir : {a, b}) {
    const std::string cmd = lcqft + " run " + config + " --out " + dir.string() + " > " + (work / "run.log").string();
    codes = std::max(codes, WEXITSTATUS(std::system(cmd.c_str())));
  }
  double differing = 0.0, files = 0.0;
  for (const auto& entry : fs::directory_iterator(a)) {
    files += 1;
    const fs::path other = b / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) differing += 1;
  }
  for (const auto& entry : fs::directory_iterator(b))
    if (!fs::exists(a / entry.path().filename())) differing += 1;
  o.items = {at_most("differing_files", differing, 0.0), at_least("report_files", files, 1.0),
             at_most("exit_code", codes, 0.0)};
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int criterion = 0;
  std::string lcqft, config, work;
  app.add_option("--criterion", criterion)->required()->check(CLI::Range(1, 9));
  app.add_option("--lcqft", lcqft)->required();
  app.add_option("--config", config)->required()->check(CLI::ExistingFile);
  app.add_option("--work", work)->required();
  CLI11_PARSE(app, argc, argv);

  const double bounds[] = {0, 60, 120, 120, 60, 60, 120, 180, 30, 600};
  try {
    const SuiteConfig c = parse_config(read_text(config));
    fs::create_directories(work);
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    switch (criterion) {
      case 1: o = functor_laws(c); break;
      case 2: o = causality(c); break;
      case 3: o = time_slice(c); break;
      case 4: o = isotony_covariance(c); break;
      case 5: o = naturality(c); break;
      case 6: o = smatrix(c); break;
      case 7: o = greens(c); break;
      case 8: o = modular(c); break;
      default: o = determinism(lcqft, config, work); break;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.items.push_back(at_most("runtime_s", secs, bounds[criterion]));
    bool pass = true;
    std::ostringstream line;
    for (const auto& it : o.items) {
      pass = pass && it.ok;
      line << " " << (it.ok ? "" : "!") << it.name << "=" << sci(it.value) << " " << it.bound << ";";
    }
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << " (" << o.title << "):" << line.str();
    if (!o.note.empty()) std::cout << " note: " << o.note;
    std::cout << "\n";
    return pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cout << "FAIL criterion " << criterion << ": " << e.what() << "\n";
    return 1;
  }
}
