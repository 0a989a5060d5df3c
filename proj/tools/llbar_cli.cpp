// Command line driver: llbar <subcommand> --config <file> [--out dir] [--assert] [--seed n]

#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "llbar/llbar.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kBlowUp = 3, kAssert = 4, kIo = 5 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw llbar::IoError("cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral LLBar / CH-AC solver and verification harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool assert_mode = false;
  std::uint64_t seed_value = 0;
  std::vector<CLI::Option*> seed_opts;

  for (auto e : {llbar::Experiment::Simulate, llbar::Experiment::Compare,
                 llbar::Experiment::SweepEps, llbar::Experiment::Steady,
                 llbar::Experiment::OracleCheck, llbar::Experiment::Audit}) {
    auto* sub = app.add_subcommand(llbar::to_string(e));
    sub->add_option("--config", config_path, "JSON experiment configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_flag("--assert", assert_mode, "exit 4 when an acceptance threshold fails");
    seed_opts.push_back(sub->add_option("--seed", seed_value, "override the random seed"));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  llbar::Experiment experiment{};
  for (auto* sub : app.get_subcommands())
    experiment = *llbar::experiment_from_string(sub->get_name());

  try {
    llbar::ExperimentConfig cfg = llbar::parse_config(read_file(config_path), experiment);
    llbar::RunOptions opts;
    opts.out_dir = out_dir;
    opts.assert_mode = assert_mode;
    for (const auto* o : seed_opts)
      if (o->count() > 0) opts.seed = seed_value;
    const auto outcome = llbar::run(cfg, opts);
    for (const auto& f : outcome.files) std::cout << "wrote " << f << "\n";
    for (const auto& f : outcome.failures) std::cerr << "threshold: " << f << "\n";
    if (assert_mode && !outcome.passed()) return kAssert;
    return kOk;
  } catch (const llbar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const llbar::BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << "\n";
    return kBlowUp;
  } catch (const llbar::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const llbar::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kConfig;
  }
}
