#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "emenc/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Time-domain enclosure method experiments"};
  app.require_subcommand(1);
  emenc::cli::Options opt;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config, "experiment config (key = value)");
    if (needs_config) c->required();
    sub->add_option("--out", opt.out, "output directory (overrides run.output_dir)");
    sub->add_option("--tau-min", opt.tau_min, "smallest tau");
    sub->add_option("--tau-max", opt.tau_max, "largest tau");
    sub->add_option("--tau-count", opt.tau_count, "number of tau values");
    sub->add_option("--mode", opt.mode, "scattered | total_pair | analytic_tilde");
    sub->add_option("--threads", opt.threads, "worker threads");
    sub->add_option("--seed", opt.seed, "seed for randomized checks");
  };

  auto* sim = app.add_subcommand("simulate", "run the FDTD solver and write traces plus a manifest");
  common(sim, true);
  auto* ind = app.add_subcommand("indicator", "Laplace-transform traces and write indicator curves");
  common(ind, true);
  auto* ext = app.add_subcommand("extract", "distance and sign class from indicator curves");
  common(ext, false);
  ext->add_option("curves", opt.curves, "curve CSV files ('-' reads stdin); default: from --out");
  auto* ver = app.add_subcommand("verify", "analytic and asymptotic invariant checks");
  common(ver, true);
  ver->add_option("--interior-scale", opt.interior_scale, "test hook: scales the interior potential constant")
      ->group("");
  auto* sca = app.add_subcommand("scaling", "energy integrals over D and their tau scaling");
  common(sca, true);
  sca->add_option("--quantity", opt.quantity, "J_full | J_perp | lemma32_upper_combo | lemma32_lower_combo");
  auto* ref = app.add_subcommand("reflector", "first-reflector points, curvatures and flags");
  common(ref, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sim) return emenc::cli::cmd_simulate(opt);
    if (*ind) return emenc::cli::cmd_indicator(opt);
    if (*ext) return emenc::cli::cmd_extract(opt);
    if (*ver) return emenc::cli::cmd_verify(opt);
    if (*sca) return emenc::cli::cmd_scaling(opt);
    if (*ref) return emenc::cli::cmd_reflector(opt);
  } catch (const emenc::Error& e) {
    std::cerr << "error (" << emenc::to_string(e.kind()) << "): " << e.what() << "\n";
    return emenc::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
