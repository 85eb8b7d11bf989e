#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gated/commands.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out, data, model;
  std::vector<std::string> sets;
};

gated::RunConfig assemble(const std::string& command, const Flags& f) {
  gated::RunConfig config;
  if (!f.config.empty()) {
    std::ifstream is(f.config);
    if (!is) throw gated::ConfigError("cannot read config file '" + f.config + "'");
    std::ostringstream text;
    text << is.rdbuf();
    try {
      config = gated::parse_config(text.str());
    } catch (const gated::ConfigError& e) {
      throw gated::ConfigError(f.config + ": " + e.what());
    }
  }
  if (config.command && *config.command != gated::parse_command(command)) {
    throw gated::ConfigError("config file command '" + std::string(gated::to_string(*config.command)) +
                             "' does not match '" + command + "'");
  }
  config.command = gated::parse_command(command);
  for (const std::string& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw gated::ConfigError("--set expects key=value, got '" + kv + "'");
    gated::set_value(config, kv.substr(0, eq), kv.substr(eq + 1), "--set");
  }
  if (f.seed) gated::set_value(config, "seed", std::to_string(*f.seed), "--seed");
  if (!f.out.empty()) config.out = f.out;
  if (!f.data.empty()) config.data = f.data;
  if (!f.model.empty()) config.model = f.model;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Factored gated autoencoders, clustering GAE and multiplicative RNN"};
  app.require_subcommand(1);
  Flags flags;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen-data", "Generate a synthetic dataset"},
      {"train", "Train a gated autoencoder"},
      {"train-cluster", "Train a clustering gated autoencoder"},
      {"train-mrnn", "Train a multiplicative RNN"},
      {"gradcheck", "Finite-difference gradient check over the configuration grid"},
      {"analogy", "Transfer transformations between pairs"},
      {"eval", "Evaluate a saved model on a dataset"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "key=value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "RNG seed");
    sub->add_option("--out", flags.out, "Output path");
    sub->add_option("--data", flags.data, "Dataset path");
    sub->add_option("--model", flags.model, "Model path");
    sub->add_option("--set", flags.sets, "Override a config key (key=value), repeatable");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  gated::RunConfig config;
  try {
    config = assemble(command, flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return gated::run(config, std::cout, std::cerr);
}
