// qdent: driven two-exciton cavity simulator.
//
//   qdent run <config>           evolve, write CSV, print PeakReport
//   qdent verify [--quick]       invariant suite
//   qdent benchmark <config>     Laguerre vs RK4 timing at matched accuracy
//   qdent sweep <dir> [-j N]     run every *.cfg in a directory

#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "qdent/app.hpp"
#include "qdent/observables.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Entanglement dynamics of two driven excitons in a single-mode cavity"};
  cli.require_subcommand(1);

  std::string run_config;
  auto* run = cli.add_subcommand("run", "Run one evolution from a config file");
  run->add_option("config", run_config, "Config file")->required()->check(CLI::ExistingFile);

  bool quick = false;
  std::string fault;
  auto* verify = cli.add_subcommand("verify", "Check the invariant suite");
  verify->add_flag("--quick", quick, "Run the fast subset");
  verify->add_option("--inject-fault", fault, "Test hook: spin-flip-sign")
      ->check(CLI::IsMember({"spin-flip-sign"}))
      ->group("");

  std::string bench_config;
  double bench_t_end = 100.0;
  auto* bench = cli.add_subcommand("benchmark", "Compare Laguerre and RK4 wall time");
  bench->add_option("config", bench_config, "Config file")->required()->check(CLI::ExistingFile);
  bench->add_option("--t-end", bench_t_end, "Evolution horizon")->check(CLI::PositiveNumber);

  std::string sweep_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* sweep = cli.add_subcommand("sweep", "Run every *.cfg in a directory");
  sweep->add_option("dir", sweep_dir, "Directory of configs")->required();
  sweep->add_option("-j,--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : qdent::app::kConfigError;
  }

  if (*run) return qdent::app::run_command(run_config, std::cout, std::cerr);
  if (*verify) {
    if (fault == "spin-flip-sign") qdent::testing::set_spin_flip_fault(true);
    return qdent::app::verify_command(quick, std::cout, std::cerr);
  }
  if (*bench) return qdent::app::benchmark_command(bench_config, std::cout, std::cerr, bench_t_end);
  if (*sweep) return qdent::app::sweep_command(sweep_dir, jobs, std::cout, std::cerr);
  return qdent::app::kConfigError;
}
