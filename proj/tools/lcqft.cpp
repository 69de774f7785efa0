// lcqft: batch runner for the axiom suites and the auxiliary studies.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "lcqft/commands.hpp"
#include "lcqft/suites.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> samples;
};

lcqft::SuiteConfig load(const Overrides& o) {
  auto c = lcqft::parse_config(lcqft::read_text(o.config));
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.output_dir = *o.out;
  if (o.samples) c.samples = *o.samples;
  return c;
}

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help, Overrides& o) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("config", o.config, "config JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "override config seed");
  sub->add_option("--out", o.out, "override output directory");
  sub->add_option("--samples", o.samples, "override sample count")->check(CLI::NonNegativeNumber);
  return sub;
}

int run(const Overrides& o) {
  const auto c = load(o);
  const auto result = lcqft::run(c);
  for (const auto& [suite, reports] : result.suites)
    for (const auto& r : reports)
      std::cout << (r.pass ? "PASS " : "FAIL ") << suite << "/" << r.check_id << " max=" << lcqft::fmt(r.max_deviation)
                << " tol=" << lcqft::fmt(r.tolerance) << "\n";
  std::cout << "summary: " << (c.output_dir / "summary.csv").string() << "\n";
  return result.pass ? 0 : 1;
}

int propagator(const Overrides& o) {
  for (const auto& p : lcqft::emit_propagators(load(o))) std::cout << p.string() << "\n";
  return 0;
}

int smatrix(const Overrides& o) {
  const auto c = load(o);
  const auto path = c.output_dir / "smatrix_sweep.csv";
  lcqft::write_text(path, lcqft::smatrix_sweep(c));
  std::cout << path.string() << "\n";
  return 0;
}

int modular(const Overrides& o) {
  const auto c = load(o);
  const auto lab = lcqft::modular_lab(c);
  lcqft::Json doc = lcqft::Json::array();
  bool pass = true;
  for (const auto& r : lab.reports) {
    doc.push_back(lcqft::to_json(r));
    pass = pass && r.pass;
  }
  lcqft::write_text(c.output_dir / "modular.json", doc.dump(2) + "\n");
  lcqft::write_text(c.output_dir / "modular_spectrum.csv", lab.spectrum_csv);
  std::cout << (c.output_dir / "modular.json").string() << "\n" << (c.output_dir / "modular_spectrum.csv").string() << "\n";
  return pass ? 0 : 1;
}

int convergence(const Overrides& o) {
  const auto c = load(o);
  const auto csv = lcqft::emit_convergence(c);
  lcqft::write_text(c.output_dir / "convergence.csv", csv);
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally covariant free-field lab"};
  app.require_subcommand(1);
  Overrides o;
  auto* run_cmd = add_command(app, "run", "run the configured axiom suites", o);
  auto* prop_cmd = add_command(app, "propagator", "export E f on every configured spacetime", o);
  auto* smat_cmd = add_command(app, "smatrix", "factorization sweep over support separations", o);
  auto* mod_cmd = add_command(app, "modular", "modular lab report and Delta spectrum", o);
  auto* conv_cmd = add_command(app, "convergence", "refinement study over the configured h family", o);
  CLI11_PARSE(app, argc, argv);
  try {
    if (run_cmd->parsed()) return run(o);
    if (prop_cmd->parsed()) return propagator(o);
    if (smat_cmd->parsed()) return smatrix(o);
    if (mod_cmd->parsed()) return modular(o);
    if (conv_cmd->parsed()) return convergence(o);
  } catch (const lcqft::Error& e) {
    std::cerr << "lcqft: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
