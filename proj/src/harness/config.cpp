#include "roughcalib/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "roughcalib/binary_io.hpp"
#include "roughcalib/data/h_sampler.hpp"
#include "roughcalib/error.hpp"

namespace roughcalib::harness {

namespace {

const std::vector<std::pair<Command, std::string>>& command_table() {
  static const std::vector<std::pair<Command, std::string>> table{
      {Command::gen_data, "gen-data"},       {Command::train, "train"},
      {Command::eval, "eval"},               {Command::robust_eta, "robust-eta"},
      {Command::robust_random, "robust-random"}, {Command::robust_fbm, "robust-fbm"},
      {Command::learn_eta, "learn-eta"},     {Command::robust_ou, "robust-ou"},
      {Command::calibrate, "calibrate"},     {Command::gradcheck, "gradcheck"},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::size_t to_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto t = trim(v);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    throw ConfigError("option '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  try {
    return io::parse_double(trim(v));
  } catch (const std::invalid_argument&) {
    throw ConfigError("option '" + key + "' expects a number, got '" + v + "'");
  }
}

bool to_flag(const std::string& key, const std::string& v) {
  const auto t = trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("option '" + key + "' expects true/false, got '" + v + "'");
}

std::vector<std::string> to_words(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& w : to_words(v)) out.push_back(to_real(key, w));
  if (out.empty()) throw ConfigError("option '" + key + "' expects a nonempty list");
  return out;
}

template <class T>
std::string join(const std::vector<T>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, double>) {
      out += io::format_double(items[i]);
    } else {
      out += items[i];
    }
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Option {
  Setter set;
  Getter get;
};

const std::map<std::string, Option>& option_table() {
  using C = ExperimentConfig;
  const auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  const auto path = [](const std::optional<std::filesystem::path>& p) { return p ? p->string() : ""; };
  static const std::map<std::string, Option> table{
      {"run.command", {[](C& c, auto&, auto& v) { c.command = command_from_name(trim(v)); },
                       [](const C& c) { return command_name(c.command); }}},
      {"run.seed", {[](C& c, auto& k, auto& v) { c.seed = to_count(k, v); },
                    [](const C& c) { return c.seed ? std::to_string(*c.seed) : ""; }}},
      {"run.out", {[](C& c, auto&, auto& v) { c.out_dir = trim(v); },
                   [](const C& c) { return c.out_dir.string(); }}},
      {"data.input_length", {[](C& c, auto& k, auto& v) { c.input_length = to_count(k, v); },
                             [](const C& c) { return std::to_string(c.input_length); }}},
      {"data.horizon", {[](C& c, auto& k, auto& v) { c.horizon = to_real(k, v); },
                        [](const C& c) { return io::format_double(c.horizon); }}},
      {"data.sampler", {[](C& c, auto&, auto& v) { c.sampler = trim(v); },
                        [](const C& c) { return c.sampler; }}},
      {"data.eta", {[](C& c, auto& k, auto& v) {
                      const auto t = trim(v);
                      if (t != "random") to_real(k, t);
                      c.eta = t;
                    },
                    [](const C& c) { return c.eta; }}},
      {"data.eta_low", {[](C& c, auto& k, auto& v) { c.eta_low = to_real(k, v); },
                        [](const C& c) { return io::format_double(c.eta_low); }}},
      {"data.eta_high", {[](C& c, auto& k, auto& v) { c.eta_high = to_real(k, v); },
                         [](const C& c) { return io::format_double(c.eta_high); }}},
      {"data.paths_per_value", {[](C& c, auto& k, auto& v) { c.paths_per_value = to_count(k, v); },
                                [](const C& c) { return std::to_string(c.paths_per_value); }}},
      {"data.model", {[](C& c, auto&, auto& v) { c.model = trim(v); }, [](const C& c) { return c.model; }}},
      {"data.drift", {[](C& c, auto& k, auto& v) { c.drift = to_flag(k, v); },
                      [b](const C& c) { return b(c.drift); }}},
      {"train.epochs", {[](C& c, auto& k, auto& v) { c.epochs = to_count(k, v); },
                        [](const C& c) { return std::to_string(c.epochs); }}},
      {"train.batch_size", {[](C& c, auto& k, auto& v) { c.batch_size = to_count(k, v); },
                            [](const C& c) { return std::to_string(c.batch_size); }}},
      {"train.learning_rate", {[](C& c, auto& k, auto& v) { c.learning_rate = to_real(k, v); },
                               [](const C& c) { return io::format_double(c.learning_rate); }}},
      {"train.standardize", {[](C& c, auto& k, auto& v) { c.standardize = to_flag(k, v); },
                             [b](const C& c) { return b(c.standardize); }}},
      {"ls.q_grid", {[](C& c, auto& k, auto& v) { c.q_grid = to_reals(k, v); },
                     [](const C& c) { return join(c.q_grid); }}},
      {"ls.max_lag", {[](C& c, auto& k, auto& v) { c.max_lag = to_count(k, v); },
                      [](const C& c) { return std::to_string(c.max_lag); }}},
      {"robust.eta_values", {[](C& c, auto& k, auto& v) { c.eta_values = to_reals(k, v); },
                             [](const C& c) { return join(c.eta_values); }}},
      {"robust.fbm_samplers", {[](C& c, auto&, auto& v) { c.fbm_samplers = to_words(v); },
                               [](const C& c) { return join(c.fbm_samplers); }}},
      {"robust.ou_samplers", {[](C& c, auto&, auto& v) { c.ou_samplers = to_words(v); },
                              [](const C& c) { return join(c.ou_samplers); }}},
      {"robust.ou_c", {[](C& c, auto& k, auto& v) { c.ou_c = to_reals(k, v); },
                       [](const C& c) { return join(c.ou_c); }}},
      {"robust.ou_paths", {[](C& c, auto& k, auto& v) { c.ou_paths = to_count(k, v); },
                           [](const C& c) { return std::to_string(c.ou_paths); }}},
      {"robust.ou_x0", {[](C& c, auto& k, auto& v) { c.ou_x0 = to_real(k, v); },
                        [](const C& c) { return io::format_double(c.ou_x0); }}},
      {"robust.ou_a", {[](C& c, auto& k, auto& v) { c.ou_a = to_real(k, v); },
                       [](const C& c) { return io::format_double(c.ou_a); }}},
      {"robust.ou_b", {[](C& c, auto& k, auto& v) { c.ou_b = to_real(k, v); },
                       [](const C& c) { return io::format_double(c.ou_b); }}},
      {"calibrate.window", {[](C& c, auto& k, auto& v) { c.window = to_count(k, v); },
                            [](const C& c) { return std::to_string(c.window); }}},
      {"calibrate.total", {[](C& c, auto& k, auto& v) { c.window_total = to_count(k, v); },
                           [](const C& c) { return std::to_string(c.window_total); }}},
      {"calibrate.stride", {[](C& c, auto& k, auto& v) { c.window_stride = to_count(k, v); },
                            [](const C& c) { return std::to_string(c.window_stride); }}},
      {"calibrate.half_log", {[](C& c, auto& k, auto& v) { c.half_log = to_flag(k, v); },
                              [b](const C& c) { return b(c.half_log); }}},
      {"gradcheck.networks", {[](C& c, auto& k, auto& v) { c.gradcheck_networks = to_count(k, v); },
                              [](const C& c) { return std::to_string(c.gradcheck_networks); }}},
      {"gradcheck.tolerance", {[](C& c, auto& k, auto& v) { c.gradcheck_tolerance = to_real(k, v); },
                               [](const C& c) { return io::format_double(c.gradcheck_tolerance); }}},
      {"io.model", {[](C& c, auto&, auto& v) { c.model_file = std::filesystem::path(trim(v)); },
                    [path](const C& c) { return path(c.model_file); }}},
      {"io.data", {[](C& c, auto&, auto& v) { c.data_file = std::filesystem::path(trim(v)); },
                   [path](const C& c) { return path(c.data_file); }}},
  };
  return table;
}

}  // namespace

std::string command_name(Command c) {
  for (const auto& [cmd, name] : command_table()) {
    if (cmd == c) return name;
  }
  return "unknown";
}

Command command_from_name(const std::string& name) {
  for (const auto& [cmd, n] : command_table()) {
    if (n == name) return cmd;
  }
  throw ConfigError("unknown command '" + name + "'");
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : command_table()) out.push_back(entry.second);
    return out;
  }();
  return names;
}

void ExperimentConfig::validate() const {
  if (!seed) throw ConfigError("a seed is required (run.seed or --seed)");
  if (input_length < 12) throw ConfigError("data.input_length must be at least 12");
  if (!(horizon > 0.0)) throw ConfigError("data.horizon must be positive");
  data::sampler_from_name(sampler);
  for (const auto& s : fbm_samplers) data::sampler_from_name(s);
  for (const auto& s : ou_samplers) data::sampler_from_name(s);
  if (eta != "random" && !(io::parse_double(eta) > 0.0)) throw ConfigError("data.eta must be positive");
  if (!(eta_low >= 0.0 && eta_low < eta_high)) throw ConfigError("data.eta_low/eta_high must satisfy 0 <= low < high");
  if (paths_per_value == 0) throw ConfigError("data.paths_per_value must be positive");
  if (model != "rbergomi" && model != "fbm") throw ConfigError("data.model must be rbergomi or fbm");
  if (epochs == 0 || batch_size == 0) throw ConfigError("train.epochs and train.batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be positive");
  if (max_lag < 2 || max_lag >= input_length) throw ConfigError("ls.max_lag must lie in [2, input_length)");
  for (double v : eta_values) {
    if (!(v > 0.0)) throw ConfigError("robust.eta_values must be positive");
  }
  if (ou_paths == 0) throw ConfigError("robust.ou_paths must be positive");
  if (gradcheck_networks == 0) throw ConfigError("gradcheck.networks must be positive");
}

void set_option(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto& table = option_table();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second.set(config, key, value);
}

void apply_config_text(ExperimentConfig& config, std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("configuration key '" + section + "' must be inside a [section]");
    }
    for (const auto& [key, value] : body) set_option(config, section + "." + key, value.data());
  }
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file.string() + "'");
  apply_config_text(config, in);
}

std::string describe(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, option] : option_table()) out += key + " = " + option.get(config) + "\n";
  return out;
}

}  // namespace roughcalib::harness
