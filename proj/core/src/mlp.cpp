#include "artnav/mlp.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "artnav/errors.hpp"
#include "artnav/terrain_map.hpp"

namespace artnav {

namespace {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kLinear: return "linear";
  }
  return "linear";
}

std::string expect_word(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw FormatError(std::string("amc: unexpected end of file, expected ") + what);
  return tok;
}

int expect_int(std::istream& in, const char* what) {
  const std::string tok = expect_word(in, what);
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw FormatError("");
    return v;
  } catch (const std::exception&) {
    throw FormatError(std::string("amc: invalid integer for ") + what + ": '" + tok + "'");
  }
}

double expect_finite(std::istream& in, const char* what) {
  const std::string tok = expect_word(in, what);
  const double v = parse_double(tok);
  if (!std::isfinite(v)) throw FormatError(std::string("amc: non-finite ") + what);
  return v;
}

}  // namespace

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw FormatError("amc: network needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.inputs <= 0 || l.outputs <= 0) throw FormatError("amc: layer dims must be positive");
    if (l.weights.size() != static_cast<std::size_t>(l.inputs) * static_cast<std::size_t>(l.outputs) ||
        l.biases.size() != static_cast<std::size_t>(l.outputs)) {
      throw FormatError("amc: layer " + std::to_string(i) + " parameter count mismatch");
    }
    if (i > 0 && layers_[i - 1].outputs != l.inputs) {
      throw FormatError("amc: layer " + std::to_string(i) + " input size does not match previous output");
    }
    for (double w : l.weights) {
      if (!std::isfinite(w)) throw FormatError("amc: non-finite weight");
    }
    for (double b : l.biases) {
      if (!std::isfinite(b)) throw FormatError("amc: non-finite bias");
    }
  }
}

int Mlp::input_size() const { return layers_.empty() ? 0 : layers_.front().inputs; }
int Mlp::output_size() const { return layers_.empty() ? 0 : layers_.back().outputs; }

std::vector<double> Mlp::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_size()) {
    throw BackendError("mlp: input has " + std::to_string(input.size()) + " values, expected " +
                       std::to_string(input_size()));
  }
  std::vector<double> x(input.begin(), input.end());
  std::vector<double> y;
  for (const auto& l : layers_) {
    y.assign(static_cast<std::size_t>(l.outputs), 0.0);
    for (int o = 0; o < l.outputs; ++o) {
      double acc = l.biases[static_cast<std::size_t>(o)];
      const double* row = l.weights.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(l.inputs);
      for (int i = 0; i < l.inputs; ++i) acc += row[i] * x[static_cast<std::size_t>(i)];
      switch (l.activation) {
        case Activation::kTanh: acc = std::tanh(acc); break;
        case Activation::kRelu: acc = acc > 0.0 ? acc : 0.0; break;
        case Activation::kLinear: break;
      }
      y[static_cast<std::size_t>(o)] = acc;
    }
    x.swap(y);
  }
  return x;
}

Mlp read_mlp(std::istream& in) {
  if (expect_word(in, "magic") != "amc") throw FormatError("amc: missing 'amc' header");
  const std::string version = expect_word(in, "version");
  if (version != "1") throw FormatError("amc: unsupported version '" + version + "'");
  if (expect_word(in, "'layers'") != "layers") throw FormatError("amc: expected 'layers'");
  const int n = expect_int(in, "layer count");
  if (n <= 0) throw FormatError("amc: layer count must be positive");

  std::vector<DenseLayer> layers;
  for (int i = 0; i < n; ++i) {
    DenseLayer l;
    if (expect_word(in, "'dims'") != "dims") throw FormatError("amc: expected 'dims'");
    l.inputs = expect_int(in, "input dim");
    l.outputs = expect_int(in, "output dim");
    if (l.inputs <= 0 || l.outputs <= 0) throw FormatError("amc: layer dims must be positive");
    if (expect_word(in, "'act'") != "act") throw FormatError("amc: expected 'act'");
    const std::string act = expect_word(in, "activation");
    if (act == "tanh") l.activation = Activation::kTanh;
    else if (act == "relu") l.activation = Activation::kRelu;
    else if (act == "linear") l.activation = Activation::kLinear;
    else throw FormatError("amc: unknown activation '" + act + "'");
    l.weights.resize(static_cast<std::size_t>(l.inputs) * static_cast<std::size_t>(l.outputs));
    for (double& w : l.weights) w = expect_finite(in, "weight");
    l.biases.resize(static_cast<std::size_t>(l.outputs));
    for (double& b : l.biases) b = expect_finite(in, "bias");
    layers.push_back(std::move(l));
  }
  std::string trailing;
  if (in >> trailing) throw FormatError("amc: trailing data after last layer");
  return Mlp(std::move(layers));
}

void write_mlp(std::ostream& out, const Mlp& net) {
  out << "amc 1\nlayers " << net.layers().size() << '\n';
  for (const auto& l : net.layers()) {
    out << "dims " << l.inputs << ' ' << l.outputs << '\n';
    out << "act " << activation_name(l.activation) << '\n';
    for (int o = 0; o < l.outputs; ++o) {
      for (int i = 0; i < l.inputs; ++i) {
        if (i > 0) out << ' ';
        out << format_double(l.weights[static_cast<std::size_t>(o * l.inputs + i)]);
      }
      out << '\n';
    }
    for (int o = 0; o < l.outputs; ++o) {
      if (o > 0) out << ' ';
      out << format_double(l.biases[static_cast<std::size_t>(o)]);
    }
    out << '\n';
  }
}

Mlp load_mlp_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open weights '" + path.string() + "'");
  return read_mlp(in);
}

void save_mlp_file(const std::filesystem::path& path, const Mlp& net) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  write_mlp(out, net);
}

double softplus(double x) {
  // log(1 + e^x) without overflow for large x.
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace artnav
