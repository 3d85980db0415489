#include "roughcalib/nn/model_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "roughcalib/binary_io.hpp"
#include "roughcalib/error.hpp"

namespace roughcalib::nn {

namespace {

const char* kMagic = "roughcalib-model";

std::string padding_word(bool same) { return same ? "same" : "valid"; }

bool parse_padding(const std::string& word) {
  if (word == "same") return true;
  if (word == "valid") return false;
  throw LoadError("bad padding value '" + word + "'");
}

std::size_t parse_size(const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw LoadError("bad integer '" + text + "'");
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw LoadError("bad integer '" + text + "'");
  }
}

double parse_real(const std::string& text) {
  try {
    return io::parse_double(text);
  } catch (const std::invalid_argument&) {
    throw LoadError("bad number '" + text + "'");
  }
}

using Fields = std::map<std::string, std::string>;

Fields parse_fields(std::istringstream& line) {
  Fields fields;
  std::string token;
  while (line >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw LoadError("expected key=value, got '" + token + "'");
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return fields;
}

const std::string& field(const Fields& fields, const std::string& key) {
  const auto it = fields.find(key);
  if (it == fields.end()) throw LoadError("missing field '" + key + "'");
  return it->second;
}

std::string layer_line(const LayerSpec& spec) {
  std::ostringstream out;
  out << "layer " << layer_name(spec);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Conv1DSpec>) {
          out << " filters=" << s.filters << " kernel=" << s.kernel_size
              << " padding=" << padding_word(s.same_padding);
        } else if constexpr (std::is_same_v<T, LeakyReLUSpec>) {
          out << " slope=" << io::format_double(s.slope);
        } else if constexpr (std::is_same_v<T, MaxPool1DSpec>) {
          out << " pool=" << s.pool_size << " stride=" << s.stride
              << " padding=" << padding_word(s.same_padding);
        } else if constexpr (std::is_same_v<T, DropoutSpec>) {
          out << " rate=" << io::format_double(s.rate);
        } else if constexpr (std::is_same_v<T, DenseSpec>) {
          out << " units=" << s.units;
        }
      },
      spec);
  return out.str();
}

LayerSpec parse_layer(std::istringstream& line) {
  std::string kind;
  if (!(line >> kind)) throw LoadError("layer line without a kind");
  const Fields f = parse_fields(line);
  if (kind == "conv1d") {
    return Conv1DSpec{parse_size(field(f, "filters")), parse_size(field(f, "kernel")),
                      parse_padding(field(f, "padding"))};
  }
  if (kind == "leaky_relu") return LeakyReLUSpec{parse_real(field(f, "slope"))};
  if (kind == "max_pool1d") {
    return MaxPool1DSpec{parse_size(field(f, "pool")), parse_size(field(f, "stride")),
                         parse_padding(field(f, "padding"))};
  }
  if (kind == "dropout") return DropoutSpec{parse_real(field(f, "rate"))};
  if (kind == "flatten") return FlattenSpec{};
  if (kind == "dense") return DenseSpec{parse_size(field(f, "units"))};
  throw LoadError("unknown layer kind '" + kind + "' for model format version " +
                  std::to_string(kModelFormatVersion));
}

// Consumes header lines up to and including "end"; returns what it parsed.
struct Header {
  NetworkConfig config;
  AdamSettings adam;
  std::uint64_t step = 0;
};

Header parse_header_lines(std::istream& in, bool expect_magic) {
  Header header;
  bool saw_length = false;
  std::string raw;
  if (expect_magic) {
    if (!std::getline(in, raw)) throw LoadError("empty model file");
    std::istringstream first(raw);
    std::string magic;
    int version = 0;
    if (!(first >> magic) || magic != kMagic) throw LoadError("not a roughcalib model file");
    if (!(first >> version)) throw LoadError("missing model format version");
    if (version != kModelFormatVersion) {
      throw LoadError("unsupported model format version " + std::to_string(version) +
                      " (expected " + std::to_string(kModelFormatVersion) + ")");
    }
  }
  bool ended = false;
  while (std::getline(in, raw)) {
    std::istringstream line(raw);
    std::string key;
    if (!(line >> key)) continue;
    if (key == "end") {
      ended = true;
      break;
    }
    if (key == "input_length") {
      std::string value;
      line >> value;
      header.config.input_length = parse_size(value);
      saw_length = true;
    } else if (key == "layer") {
      header.config.layers.push_back(parse_layer(line));
    } else if (key == "adam") {
      const Fields f = parse_fields(line);
      header.adam = {parse_real(field(f, "lr")), parse_real(field(f, "beta1")),
                     parse_real(field(f, "beta2")), parse_real(field(f, "epsilon"))};
    } else if (key == "step") {
      std::string value;
      line >> value;
      header.step = parse_size(value);
    } else {
      throw LoadError("unknown header key '" + key + "'");
    }
  }
  if (expect_magic && !ended) throw LoadError("model header is truncated");
  if (!saw_length) throw LoadError("model header lacks input_length");
  try {
    validate(header.config);
  } catch (const ConfigError& e) {
    throw LoadError(std::string("invalid network in model file: ") + e.what());
  }
  return header;
}

}  // namespace

std::string config_to_text(const NetworkConfig& config) {
  std::ostringstream out;
  out << "input_length " << config.input_length << '\n';
  for (const auto& layer : config.layers) out << layer_line(layer) << '\n';
  return out.str();
}

NetworkConfig config_from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_header_lines(in, false).config;
}

void save_model(std::ostream& out, const NetworkConfig& config, const ModelState& state) {
  validate(config);
  out << kMagic << ' ' << kModelFormatVersion << '\n';
  out << config_to_text(config);
  out << "adam lr=" << io::format_double(state.adam.learning_rate)
      << " beta1=" << io::format_double(state.adam.beta1)
      << " beta2=" << io::format_double(state.adam.beta2)
      << " epsilon=" << io::format_double(state.adam.epsilon) << '\n';
  out << "step " << state.step << '\n';
  out << "end\n";
  for (const auto& p : state.params) io::write_f64(out, p.value.values());
  if (!out) throw std::runtime_error("failed to write model");
}

void save_model(const std::filesystem::path& file, const NetworkConfig& config,
                const ModelState& state) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + file.string() + "' for writing");
  save_model(out, config, state);
}

LoadedModel load_model(std::istream& in) {
  const Header header = parse_header_lines(in, true);
  // Shapes come from a fresh initialization of the parsed config.
  LoadedModel model{header.config, initialize_model(header.config, 0, header.adam)};
  model.state.step = header.step;
  for (auto& p : model.state.params) io::read_f64(in, p.value.values());
  if (in.peek() != std::char_traits<char>::eof()) throw LoadError("trailing bytes after parameters");
  for (const auto& p : model.state.params) {
    if (!p.value.all_finite()) throw LoadError("non-finite parameter value in model file");
  }
  return model;
}

LoadedModel load_model(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw LoadError("cannot open model file '" + file.string() + "'");
  return load_model(in);
}

}  // namespace roughcalib::nn
