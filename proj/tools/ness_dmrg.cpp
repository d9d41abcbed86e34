#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "nessdmrg/exact.hpp"
#include "nessdmrg/experiment.hpp"

namespace {

constexpr int kFailure = 1;
constexpr int kConfigError = 3;

void report(const nessdmrg::ExperimentOutcome& outcome) {
  for (const auto& run : outcome.runs) {
    const auto& r = run.result;
    std::cout << std::left << std::setw(14) << run.name << " energy " << std::setw(12)
              << std::setprecision(4) << r.final_energy << " bond " << std::setw(4)
              << r.final_state.max_bond() << " mean current " << std::setw(12)
              << run.mean_current() << (r.converged ? " converged" : " NOT converged") << " ("
              << r.reason << ")\n";
  }
  if (outcome.fit) std::cout << "transport exponent alpha = " << outcome.fit->alpha << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady states of boundary-driven spin chains by variational DMRG"};
  app.require_subcommand(1);

  std::string config_path, out_dir, scheme;
  std::uint64_t seed = 0;
  bool allow_unconverged = false;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  auto* out_opt = run->add_option("--out", out_dir, "Output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Seed recorded with the outputs");
  run->add_flag("--allow-unconverged", allow_unconverged, "Exit 0 even if a run did not converge");
  auto* scheme_opt = run->add_option("--scheme", scheme, "Superspace ordering")
                         ->check(CLI::IsMember({"rln", "rnln"}, CLI::ignore_case));

  std::string fixture_path;
  auto* oracle = app.add_subcommand("oracle", "Write exact small-chain reference values");
  oracle->add_option("--out", fixture_path, "Fixture JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*oracle) {
      std::vector<nessdmrg::OracleFixture> fixtures;
      for (std::size_t n : {2, 3, 4}) {
        for (double delta : {0.0, 0.5, 1.0}) {
          for (double gamma : {0.5, 1.0}) {
            std::ostringstream name;
            name << "N" << n << "_Delta" << delta << "_gamma" << gamma;
            fixtures.push_back(nessdmrg::make_fixture(
                name.str(), nessdmrg::ModelParams::uniform(n, delta, gamma, 1.0, 0.0)));
          }
        }
      }
      for (std::size_t n : {5, 6}) {
        fixtures.push_back(nessdmrg::make_fixture(
            "N" + std::to_string(n) + "_Delta1_gamma1",
            nessdmrg::ModelParams::uniform(n, 1.0, 1.0, 1.0, 0.0)));
      }
      nessdmrg::write_fixtures(fixture_path, fixtures);
      std::cout << "wrote " << fixtures.size() << " fixtures to " << fixture_path << '\n';
      return 0;
    }

    nessdmrg::ExperimentConfig config = nessdmrg::load_config(config_path);
    if (*out_opt) config.output = out_dir;
    if (*seed_opt) config.seed = seed;
    if (allow_unconverged) config.allow_unconverged = true;
    if (*scheme_opt) config.scheme = nessdmrg::parse_ordering(scheme);
    config.validate();

    const auto outcome = nessdmrg::run_experiment(config);
    report(outcome);
    return outcome.exit_code;
  } catch (const nessdmrg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
