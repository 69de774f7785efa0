#pragma once

// Non-suite CLI commands: propagator export, S-matrix sweeps, the modular lab
// and refinement studies.

#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"
#include "greens.hpp"
#include "io.hpp"
#include "modular.hpp"
#include "natfield.hpp"
#include "suites.hpp"
#include "testfun.hpp"

namespace lcqft {

/// Smooth source centred on the sampling centre and scaled to fit M.
inline TestFunction reference_bump(const Spacetime2D& M) {
  if (M.kind() == SpacetimeKind::DoubleCone) {
    const double r = M.radius();
    return bump(M, Point{0.0, 0.0}, 0.3 * r, 0.3 * r, 1.0);
  }
  return bump(M, Point{0.1, detail::centre_x(M) + 0.2}, 0.3, 0.35, 1.0);
}

/// Writes E f for the reference bump on every configured spacetime.
inline std::vector<std::filesystem::path> emit_propagators(const SuiteConfig& c) {
  std::vector<std::filesystem::path> written;
  for (std::size_t k = 0; k < c.spacetimes.size(); ++k) {
    const auto& M = c.spacetimes[k];
    const GridSolution e = causal_propagator(M, reference_bump(M));
    const std::string stem = "propagator_" + std::to_string(k) + "_" + to_string(M.kind());
    write_text(c.output_dir / (stem + ".csv"), to_csv(e));
    write_text(c.output_dir / (stem + ".json"), to_json(e).dump() + "\n");
    written.push_back(c.output_dir / (stem + ".csv"));
  }
  return written;
}

/// Factorization deviations against the gap between supp lambda and supp nu.
inline std::string smatrix_sweep(const SuiteConfig& c) {
  Rng rng(c.seed, "smatrix_sweep");
  std::string csv = "spacetime,separation,n_samples,factorization,relative_factorization\n";
  for (const auto& M : c.spacetimes) {
    if (!detail::full(M)) continue;
    for (double gap : c.smatrix_separations) {
      if (gap < 2 * M.h())
        throw Error(ErrorKind::ConfigError, "config.smatrix.separations: " + fmt(gap) + " is below two grid rows");
      double fact = 0.0, rel = 0.0;
      const double rt = 0.1;
      for (int s = 0; s < c.samples; ++s) {
        const auto src = detail::random_sources(M, rng, 0.5 * gap + rt + M.h(), -(0.5 * gap + rt + M.h()), rt, rt);
        fact = std::max(fact, factorization_deviation(M, src.lambda, src.mu, src.nu));
        rel = std::max(rel, relative_factorization_deviation(M, src.mu, src.lambda, src.nu));
      }
      csv += M.id() + "," + fmt(gap) + "," + std::to_string(c.samples) + "," + fmt(fact) + "," + fmt(rel) + "\n";
    }
  }
  return csv;
}

struct ModularRun {
  std::vector<Report> reports;
  std::string spectrum_csv;
};

/// Modular-lab reports plus the spectrum of Delta for every sampled state.
inline ModularRun modular_lab(const SuiteConfig& c) {
  ModularRun out;
  out.reports = run_suite("modular", c);
  Rng rng(c.seed, "modular_spectrum");
  out.spectrum_csv = "n,state,index,eigenvalue\n";
  for (int n : c.modular_dims) {
    const int states = c.modular_rho ? 1 : c.modular_states;
    for (int s = 0; s < states; ++s) {
      const StandardPair pair = StandardPair::from_density(c.modular_rho ? *c.modular_rho : random_density(n, rng));
      const auto ev = modular_spectrum(tomita_operators(pair));
      for (std::size_t k = 0; k < ev.size(); ++k)
        out.spectrum_csv +=
            std::to_string(n) + "," + std::to_string(s) + "," + std::to_string(k) + "," + fmt(ev[k]) + "\n";
    }
  }
  return out;
}

namespace detail {

inline void require_refinement_family(const std::vector<double>& hs) {
  if (hs.size() < 2)
    throw Error(ErrorKind::ConfigError, "config.convergence.h: a refinement family needs at least two spacings");
  for (std::size_t k = 1; k < hs.size(); ++k)
    if (std::abs(hs[k] - 0.5 * hs[k - 1]) > 1e-12 * hs[k - 1])
      throw Error(ErrorKind::ConfigError, "config.convergence.h: each spacing must halve the previous one");
}

/// E f on the reference plane sampled at the 1/8 evaluation grid.
inline std::vector<double> propagator_samples(double h, double m) {
  const Spacetime2D M = Spacetime2D::minkowski(h, m, -1.0, 1.0, -3.0, 3.0);
  const GridSolution e = causal_propagator(M, reference_bump(M));
  const int step = static_cast<int>(std::lround(0.125 / h));
  std::vector<double> out;
  for (int n = M.n_lo(); n <= M.n_hi(); n += step)
    for (int j = M.j_lo(); j <= M.j_hi(); j += step) out.push_back(e.at({n, j}));
  return out;
}

}  // namespace detail

/// CSV {h, suite, max_deviation}. The propagator rows hold the L2 distance
/// between E at h and at h/2 on a fixed 1/8 grid; the causality rows hold the
/// commutator deviation of the causality pairs on the plane at h.
inline std::string emit_convergence(const SuiteConfig& c) {
  detail::require_refinement_family(c.convergence_h);
  for (double h : c.convergence_h)
    if (std::abs(0.125 / h - std::round(0.125 / h)) > 1e-9)
      throw Error(ErrorKind::ConfigError, "config.convergence.h: spacings must divide 1/8");
  std::string csv = "h,suite,max_deviation\n";
  for (double m : c.convergence_masses) {
    const std::string suite = "propagator_m" + fmt(m);
    for (double h : c.convergence_h) {
      const auto coarse = detail::propagator_samples(h, m), fine = detail::propagator_samples(0.5 * h, m);
      double sum = 0.0;
      for (std::size_t k = 0; k < coarse.size(); ++k) sum += (coarse[k] - fine[k]) * (coarse[k] - fine[k]);
      csv += fmt(h) + "," + suite + "," + fmt(std::sqrt(sum) * 0.125) + "\n";
    }
  }
  Rng rng(c.seed, "convergence");
  for (double h : c.convergence_h) {
    const Spacetime2D M = Spacetime2D::minkowski(h, 0.0, -1.25, 1.25, -6.0, 6.0);
    double worst = 0.0;
    for (const auto& [a, b] : detail::causality_pairs(M))
      worst = std::max(worst, check_causality(M, a, b, rng, c.samples, c.tolerances.causality).max_deviation);
    csv += fmt(h) + ",causality," + fmt(worst) + "\n";
  }
  return csv;
}

}  // namespace lcqft
