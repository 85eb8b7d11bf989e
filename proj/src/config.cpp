#include "gated/config.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace gated {
namespace {

enum class ValueType { Real, Count, Integer, Bool, Text, IntegerList, Enum };

struct KeySpec {
  ValueType type;
  std::string default_value;
  std::vector<std::string> choices;  // Enum only
};

const std::map<std::string, KeySpec, std::less<>>& schema() {
  static const std::vector<std::string> acts = {"identity", "sigmoid", "relu", "softplus", "softmax"};
  static const std::map<std::string, KeySpec, std::less<>> keys = {
      {"command", {ValueType::Enum, "", {"gen-data", "train", "train-cluster", "train-mrnn", "gradcheck", "analogy", "eval"}}},
      {"seed", {ValueType::Count, "42", {}}},
      // data generation
      {"generator", {ValueType::Enum, "", {"shift", "multishift", "rotation", "blobs", "period"}}},
      {"n", {ValueType::Count, "500", {}}},
      {"width", {ValueType::Count, "16", {}}},
      {"shift", {ValueType::Integer, "1", {}}},
      {"shifts", {ValueType::IntegerList, "-1,0,1", {}}},
      {"density", {ValueType::Real, "0.3", {}}},
      {"side", {ValueType::Count, "4", {}}},
      {"angle", {ValueType::Integer, "90", {}}},
      {"dim", {ValueType::Count, "8", {}}},
      {"classes", {ValueType::Count, "2", {}}},
      {"separation", {ValueType::Real, "1.0", {}}},
      {"sigma", {ValueType::Real, "0.1", {}}},
      {"length", {ValueType::Count, "200", {}}},
      {"alphabet", {ValueType::Count, "4", {}}},
      {"pattern", {ValueType::IntegerList, "0,1,2,3", {}}},
      // model
      {"n_h", {ValueType::Count, "8", {}}},
      {"n_f", {ValueType::Count, "32", {}}},
      {"tying", {ValueType::Enum, "tied", {"tied", "untied"}}},
      {"act_x", {ValueType::Enum, "sigmoid", acts}},
      {"act_y", {ValueType::Enum, "sigmoid", acts}},
      {"act_h", {ValueType::Enum, "sigmoid", acts}},
      {"init_sigma", {ValueType::Real, "-1", {}}},
      // training
      {"loss", {ValueType::Enum, "symmetric", {"reconstruct_x", "reconstruct_y", "symmetric", "cross_entropy_x", "hybrid"}}},
      {"hybrid_weight", {ValueType::Real, "0.5", {}}},
      {"corruption", {ValueType::Enum, "none", {"none", "gaussian", "masking", "salt_pepper"}}},
      {"corruption_level", {ValueType::Real, "0", {}}},
      {"corruption_target", {ValueType::Enum, "both", {"input_x", "input_y", "both", "factors"}}},
      {"lr", {ValueType::Real, "0.05", {}}},
      {"momentum", {ValueType::Real, "0.9", {}}},
      {"epochs", {ValueType::Count, "50", {}}},
      {"batch_size", {ValueType::Count, "10", {}}},
      {"seq_len", {ValueType::Count, "20", {}}},
      {"mrnn_loss", {ValueType::Enum, "squared", {"squared", "cross_entropy"}}},
      // outputs
      {"metrics", {ValueType::Text, "", {}}},
      {"wall_clock", {ValueType::Bool, "true", {}}},
      {"gradcheck_seeds", {ValueType::Count, "5", {}}},
  };
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "1" || s == "yes") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "no") {
    out = false;
    return true;
  }
  return false;
}

bool parse_integer_list(std::string_view s, std::vector<long>& out) {
  out.clear();
  while (!s.empty()) {
    const auto comma = s.find(',');
    long v;
    if (!parse_number(trim(s.substr(0, comma)), v)) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return !out.empty();
}

const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::Real: return "a real number";
    case ValueType::Count: return "a non-negative integer";
    case ValueType::Integer: return "an integer";
    case ValueType::Bool: return "true or false";
    case ValueType::Text: return "text";
    case ValueType::IntegerList: return "a comma-separated integer list";
    case ValueType::Enum: return "one of the listed choices";
  }
  return "?";
}

void check_value(std::string_view key, std::string_view value, std::string_view where) {
  const auto& keys = schema();
  const auto it = keys.find(key);
  if (it == keys.end()) throw ConfigError(std::string(where) + ": unknown key '" + std::string(key) + "'");
  const KeySpec& spec = it->second;
  bool ok = true;
  switch (spec.type) {
    case ValueType::Real: {
      double v;
      ok = parse_number(value, v);
      break;
    }
    case ValueType::Count: {
      unsigned long long v;
      ok = parse_number(value, v);
      break;
    }
    case ValueType::Integer: {
      long v;
      ok = parse_number(value, v);
      break;
    }
    case ValueType::Bool: {
      bool v;
      ok = parse_bool(value, v);
      break;
    }
    case ValueType::Text:
      break;
    case ValueType::IntegerList: {
      std::vector<long> v;
      ok = parse_integer_list(value, v);
      break;
    }
    case ValueType::Enum:
      ok = std::find(spec.choices.begin(), spec.choices.end(), value) != spec.choices.end();
      if (!ok) {
        std::string list;
        for (const auto& c : spec.choices) list += (list.empty() ? "" : ", ") + c;
        throw ConfigError(std::string(where) + ": value '" + std::string(value) + "' for '" +
                          std::string(key) + "' must be one of: " + list);
      }
      break;
  }
  if (!ok) {
    throw ConfigError(std::string(where) + ": value '" + std::string(value) + "' for '" +
                      std::string(key) + "' is not " + type_name(spec.type));
  }
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::GenData: return "gen-data";
    case Command::Train: return "train";
    case Command::TrainCluster: return "train-cluster";
    case Command::TrainMRnn: return "train-mrnn";
    case Command::GradCheck: return "gradcheck";
    case Command::Analogy: return "analogy";
    case Command::Eval: return "eval";
  }
  return "?";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::GenData, Command::Train, Command::TrainCluster, Command::TrainMRnn,
                    Command::GradCheck, Command::Analogy, Command::Eval}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

const std::map<std::string, std::string, std::less<>>& config_defaults() {
  static const auto defaults = [] {
    std::map<std::string, std::string, std::less<>> out;
    for (const auto& [k, spec] : schema()) out[k] = spec.default_value;
    return out;
  }();
  return defaults;
}

void set_value(RunConfig& config, std::string_view key, std::string_view value,
               std::string_view origin) {
  check_value(key, value, origin);
  config.values[std::string(key)] = std::string(value);
  if (key == "seed") config.seed = config.count("seed");
  if (key == "command") config.command = parse_command(value);
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected key=value, got '" + std::string(line) + "'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    set_value(config, key, value, where);
  }
  return config;
}

bool RunConfig::has(std::string_view key) const { return values.find(std::string(key)) != values.end(); }

std::string RunConfig::text(std::string_view key) const {
  if (auto it = values.find(std::string(key)); it != values.end()) return it->second;
  const auto& defaults = config_defaults();
  const auto d = defaults.find(key);
  if (d == defaults.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
  if (d->second.empty()) throw ConfigError("missing required key '" + std::string(key) + "'");
  return d->second;
}

double RunConfig::real(std::string_view key) const {
  double v = 0.0;
  parse_number(std::string_view(text(key)), v);
  return v;
}

std::size_t RunConfig::count(std::string_view key) const {
  unsigned long long v = 0;
  parse_number(std::string_view(text(key)), v);
  return static_cast<std::size_t>(v);
}

long RunConfig::integer(std::string_view key) const {
  long v = 0;
  parse_number(std::string_view(text(key)), v);
  return v;
}

bool RunConfig::flag(std::string_view key) const {
  bool v = false;
  parse_bool(text(key), v);
  return v;
}

std::vector<long> RunConfig::integer_list(std::string_view key) const {
  std::vector<long> v;
  parse_integer_list(text(key), v);
  return v;
}

void RunConfig::require(std::string_view key) const {
  if (!has(key)) throw ConfigError("missing required key '" + std::string(key) + "'");
}

}  // namespace gated
