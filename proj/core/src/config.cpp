// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cbo/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cbo/error.hpp"

namespace cbo {
namespace {

using RawMap = std::map<std::string, std::string>;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ConfigError("key '" + key + "': '" + text + "' is not a finite number");
  }
  return value;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
  // Accepts 10000 as well as 1e4.
  const double value = to_double(key, text);
  if (value < 0.0 || value != std::floor(value) || value > 9007199254740992.0) {
    throw ConfigError("key '" + key + "': '" + text + "' is not a non-negative integer");
  }
  return static_cast<std::uint64_t>(value);
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(to_double(key, item));
  return out;
}

template <class T>
std::vector<T> to_unsigneds(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(static_cast<T>(to_unsigned(key, item)));
  return out;
}

// Settings that depend on d or on each other are resolved in finalize().
struct Pending {
  std::optional<double> horizon;
  std::optional<std::size_t> steps;
  std::optional<std::string> init_kind;
  std::optional<std::vector<double>> init_mean, init_var, init_low, init_high;
};

using Setter = std::function<void(RunConfig&, Pending&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto number = [](double CBOParams::*field) {
      return Setter([field](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
        c.params.*field = to_double(k, v);
      });
    };
    t["command"] = [](RunConfig& c, Pending&, const std::string&, const std::string& v) {
      if (parse_command(v) != c.command) {
        throw ConfigError("config declares command '" + v + "' but '" +
                          std::string(to_string(c.command)) + "' was requested");
      }
    };
    t["objective"] = [](RunConfig& c, Pending&, const std::string&, const std::string& v) {
      c.objective.name = v;
    };
    t["shift"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.objective.shift = to_double(k, v);
    };
    t["center"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.objective.center = to_doubles(k, v);
    };
    t["d"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.params.dimension = to_unsigned(k, v);
    };
    t["N"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.params.particles = to_unsigned(k, v);
    };
    t["lambda"] = number(&CBOParams::lambda);
    t["sigma"] = number(&CBOParams::sigma);
    t["alpha"] = number(&CBOParams::alpha);
    t["kappa"] = number(&CBOParams::kappa);
    t["delta"] = number(&CBOParams::delta);
    t["dt"] = number(&CBOParams::dt);
    t["T"] = [](RunConfig&, Pending& p, const std::string& k, const std::string& v) {
      p.horizon = to_double(k, v);
    };
    t["steps"] = [](RunConfig&, Pending& p, const std::string& k, const std::string& v) {
      p.steps = to_unsigned(k, v);
    };
    t["init"] = [](RunConfig&, Pending& p, const std::string&, const std::string& v) {
      p.init_kind = v;
    };
    t["init_mean"] = [](RunConfig&, Pending& p, const std::string& k, const std::string& v) {
      p.init_mean = to_doubles(k, v);
    };
    t["init_var"] = [](RunConfig&, Pending& p, const std::string& k, const std::string& v) {
      p.init_var = to_doubles(k, v);
    };
    t["init_low"] = [](RunConfig&, Pending& p, const std::string& k, const std::string& v) {
      p.init_low = to_doubles(k, v);
    };
    t["init_high"] = [](RunConfig&, Pending& p, const std::string& k, const std::string& v) {
      p.init_high = to_doubles(k, v);
    };
    t["n_list"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.n_list = to_unsigneds<std::size_t>(k, v);
    };
    t["seeds"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.seeds = to_unsigned(k, v);
    };
    t["m_ref"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.m_ref = to_unsigned(k, v);
    };
    t["p_list"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.p_list = to_unsigneds<int>(k, v);
    };
    t["stride"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.stride = to_unsigned(k, v);
    };
    t["trials"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.trials = to_unsigned(k, v);
    };
    t["oracle_size"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.oracle_size = to_unsigned(k, v);
    };
    t["level"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      if (v == "basic") c.level = ValidationLevel::basic;
      else if (v == "theorem") c.level = ValidationLevel::theorem;
      else throw ConfigError("key '" + k + "': expected basic or theorem, got '" + v + "'");
    };
    t["kappa_threshold"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.kappa_threshold = to_double(k, v);
    };
    t["seed"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.seed = to_unsigned(k, v);
    };
    t["out"] = [](RunConfig& c, Pending&, const std::string&, const std::string& v) {
      c.output = v;
    };
    t["workers"] = [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
      c.workers = to_unsigned(k, v);
      if (c.workers == 0) throw ConfigError("key 'workers' must be positive");
    };
    return t;
  }();
  return table;
}

std::vector<double> broadcast(const char* key, const std::vector<double>& v, std::size_t d) {
  if (v.size() == 1) return std::vector<double>(d, v.front());
  if (v.size() != d) {
    throw ConfigError(std::string("key '") + key + "' has " + std::to_string(v.size()) +
                      " entries but d = " + std::to_string(d));
  }
  return v;
}

void finalize(RunConfig& c, const Pending& p) {
  const std::size_t d = c.params.dimension;
  if (d == 0) throw ConfigError("d must be positive");
  c.objective.dimension = d;

  if (p.steps) {
    if (p.horizon && std::abs(static_cast<double>(*p.steps) * c.params.dt - *p.horizon) >
                         1e-9 * std::max(1.0, *p.horizon)) {
      throw ConfigError("keys 'T' and 'steps' disagree for the given dt");
    }
    c.params.steps = *p.steps;
  } else if (p.horizon) {
    if (!(c.params.dt > 0.0)) throw ConfigError("dt must be positive");
    const double steps = std::round(*p.horizon / c.params.dt);
    if (*p.horizon < 0.0 || std::abs(steps * c.params.dt - *p.horizon) >
                                1e-9 * std::max(1.0, *p.horizon)) {
      throw ConfigError("T must be a non-negative multiple of dt");
    }
    c.params.steps = static_cast<std::size_t>(steps);
  }

  const std::string kind =
      p.init_kind.value_or(c.init.kind == InitialDistribution::Kind::gaussian ? "gaussian"
                                                                              : "uniform");
  if (kind == "gaussian") {
    const auto mean = p.init_mean.value_or(
        c.init.kind == InitialDistribution::Kind::gaussian ? c.init.first : std::vector{0.0});
    const auto var = p.init_var.value_or(
        c.init.kind == InitialDistribution::Kind::gaussian ? c.init.second : std::vector{1.0});
    c.init = InitialDistribution::gaussian(broadcast("init_mean", mean, d),
                                           broadcast("init_var", var, d));
  } else if (kind == "uniform") {
    std::vector<std::string> missing;
    if (!p.init_low) missing.emplace_back("init_low");
    if (!p.init_high) missing.emplace_back("init_high");
    if (!missing.empty()) {
      std::string names;
      for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
      throw ConfigError("missing required keys for init = uniform: " + names);
    }
    c.init = InitialDistribution::uniform(broadcast("init_low", *p.init_low, d),
                                          broadcast("init_high", *p.init_high, d));
  } else {
    throw ConfigError("key 'init': expected gaussian or uniform, got '" + kind + "'");
  }

  if (c.objective.name == "shifted_quadratic" && c.objective.center.empty()) {
    throw ConfigError("missing required key for objective = shifted_quadratic: center");
  }
  make_objective(c.objective);

  if (c.command == Command::meanfield || c.command == Command::ratio) {
    if (c.n_list.empty()) throw ConfigError("n_list must not be empty");
    if (c.command == Command::meanfield) {
      c.params.particles = *std::max_element(c.n_list.begin(), c.n_list.end());
    }
  }
  if (c.command == Command::moments) {
    if (c.p_list.empty()) throw ConfigError("p_list must not be empty");
    for (int p : c.p_list) {
      if (p < 2 || p > 8 || p % 2 != 0) {
        throw ConfigError("p_list entries must be even and within [2, 8], got " +
                          std::to_string(p));
      }
    }
  }
  if (c.seeds == 0) throw ConfigError("seeds must be positive");
  validate_params(c.params, ValidationLevel::basic);
}

void apply(RunConfig& c, Pending& p, const RawMap& raw) {
  const auto& table = setters();
  for (const auto& [key, value] : raw) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown configuration key '" + key + "'");
    it->second(c, p, key, value);
  }
}

struct ParsedText {
  RawMap top;
  std::map<std::string, RawMap> sections;
};

void check_section(const std::string& name) {
  try {
    parse_command(name);
  } catch (const ConfigError&) {
    throw ConfigError("unknown configuration section '[" + name + "]'");
  }
}

ParsedText parse_key_value(std::string_view text) {
  ParsedText out;
  RawMap* target = &out.top;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": bad section");
      const std::string name = trim(std::string_view(s).substr(1, s.size() - 2));
      check_section(name);
      target = &out.sections[name];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(s).substr(0, eq));
    if (!setters().contains(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown configuration key '" +
                        key + "'");
    }
    (*target)[key] = trim(std::string_view(s).substr(eq + 1));
  }
  return out;
}

std::string json_scalar(const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) {
      if (!(item.is_number() || item.is_string())) {
        throw ConfigError("key '" + key + "': arrays may only hold numbers or strings");
      }
      joined += (joined.empty() ? "" : ",") + (item.is_string() ? item.get<std::string>()
                                                                 : item.dump());
    }
    return joined;
  }
  throw ConfigError("key '" + key + "': unsupported JSON value");
}

ParsedText parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON configuration: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("JSON configuration must be an object");
  ParsedText out;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) {
      check_section(key);
      RawMap& section = out.sections[key];
      for (const auto& [k, v] : value.items()) {
        if (!setters().contains(k)) throw ConfigError("unknown configuration key '" + k + "'");
        section[k] = json_scalar(k, v);
      }
      continue;
    }
    if (!setters().contains(key)) throw ConfigError("unknown configuration key '" + key + "'");
    out.top[key] = json_scalar(key, value);
  }
  return out;
}

}  // namespace

std::string_view to_string(Command command) noexcept {
  switch (command) {
    case Command::optimize: return "optimize";
    case Command::meanfield: return "meanfield";
    case Command::moments: return "moments";
    case Command::ratio: return "ratio";
    case Command::validate: return "validate";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::optimize, Command::meanfield, Command::moments, Command::ratio,
                    Command::validate}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("unknown command '" + std::string(name) +
                    "'; expected optimize, meanfield, moments, ratio or validate");
}

RunConfig default_config(Command command) {
  RunConfig c;
  c.command = command;
  c.init = InitialDistribution::gaussian({2.0}, {1.0});
  switch (command) {
    case Command::optimize:
    case Command::validate:
      // Ackley benchmark at desk scale.
      c.objective = {"ackley", 1, 3.0, {}};
      c.params = {1.0, 2.0, 1e15, 0.01, 0.0, 0.01, 10'000, 10'000, 1};
      c.stride = 100;
      break;
    case Command::meanfield:
    case Command::moments:
      c.objective = {"sphere", 2, 3.0, {}};
      c.params = {13.0, 2.0, 1.0, 0.01, 0.0, 0.005, 4'000, 2'000, 2};
      c.init = InitialDistribution::gaussian({2.0, 2.0}, {1.0, 1.0});
      c.seeds = 20;
      c.stride = 10;
      if (command == Command::meanfield) {
        c.n_list = {100, 200, 400, 800};
        c.params.particles = 800;
      } else {
        c.params.steps = 8'000;
      }
      break;
    case Command::ratio:
      c.objective = {"ackley", 1, 3.0, {}};
      c.params.alpha = 5.0;
      c.n_list = {100, 1'000, 10'000};
      break;
  }
  return c;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, setter] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

RunConfig parse_config_text(Command command, std::string_view text, const Overrides& overrides) {
  const std::string body = trim(text);
  const ParsedText parsed = !body.empty() && body.front() == '{' ? parse_json(body)
                                                                 : parse_key_value(body);
  RunConfig config = default_config(command);
  Pending pending;
  apply(config, pending, parsed.top);
  if (const auto it = parsed.sections.find(std::string(to_string(command)));
      it != parsed.sections.end()) {
    apply(config, pending, it->second);
  }
  for (const auto& [key, value] : overrides) {
    apply(config, pending, RawMap{{key, value}});
  }
  finalize(config, pending);
  return config;
}

RunConfig parse_config(Command command, const std::optional<std::filesystem::path>& file,
                       const Overrides& overrides) {
  if (!file) return parse_config_text(command, "", overrides);
  std::ifstream in(*file, std::ios::binary);
  if (!in) throw IoError("cannot read configuration file '" + file->string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(command, text.str(), overrides);
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = to_string(c.command);
  j["objective"] = c.objective.name;
  j["shift"] = c.objective.shift;
  j["center"] = c.objective.center;
  j["d"] = c.params.dimension;
  j["N"] = c.params.particles;
  j["lambda"] = c.params.lambda;
  j["sigma"] = c.params.sigma;
  j["alpha"] = c.params.alpha;
  j["kappa"] = c.params.kappa;
  j["delta"] = c.params.delta;
  j["dt"] = c.params.dt;
  j["steps"] = c.params.steps;
  j["T"] = c.params.horizon();
  j["init"] = c.init.kind == InitialDistribution::Kind::gaussian ? "gaussian" : "uniform";
  if (c.init.kind == InitialDistribution::Kind::gaussian) {
    j["init_mean"] = c.init.first;
    j["init_var"] = c.init.second;
  } else {
    j["init_low"] = c.init.first;
    j["init_high"] = c.init.second;
  }
  j["n_list"] = c.n_list;
  j["seeds"] = c.seeds;
  j["m_ref"] = c.m_ref;
  j["p_list"] = c.p_list;
  j["stride"] = c.stride;
  j["trials"] = c.trials;
  j["oracle_size"] = c.oracle_size;
  j["level"] = to_string(c.level);
  j["kappa_threshold"] = c.kappa_threshold;
  j["seed"] = c.seed;
  return j;
}

}  // namespace cbo
