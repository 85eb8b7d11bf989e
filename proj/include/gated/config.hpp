#pragma once
// Run configuration: a flat key=value file, one entry per line, '#' starts a
// comment. Command-line flags override file values. Unknown keys are errors.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gated {

enum class Command { GenData, Train, TrainCluster, TrainMRnn, GradCheck, Analogy, Eval };

std::string_view to_string(Command c);
Command parse_command(std::string_view name);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::optional<Command> command;
  std::uint64_t seed = 42;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> model;

  /// Validated raw values keyed by name, without defaults.
  std::map<std::string, std::string> values;

  bool has(std::string_view key) const;
  /// Throws ConfigError naming the key when it is absent and has no default.
  std::string text(std::string_view key) const;
  double real(std::string_view key) const;
  std::size_t count(std::string_view key) const;
  long integer(std::string_view key) const;
  bool flag(std::string_view key) const;
  std::vector<long> integer_list(std::string_view key) const;

  /// Throws ConfigError("missing required key ...") if the key is unset.
  void require(std::string_view key) const;
};

/// Parses file text; errors carry "line N".
RunConfig parse_config(std::string_view text);

/// Sets one key as if it came from `origin` (e.g. "--set"); validates it.
void set_value(RunConfig& config, std::string_view key, std::string_view value,
               std::string_view origin);

/// All recognised keys with their default values (empty = no default).
const std::map<std::string, std::string, std::less<>>& config_defaults();

}  // namespace gated
