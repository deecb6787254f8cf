#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace artnav {

enum class Activation { kTanh, kRelu, kLinear };

struct DenseLayer {
  int inputs = 0;
  int outputs = 0;
  Activation activation = Activation::kLinear;
  std::vector<double> weights;  // row-major, outputs x inputs
  std::vector<double> biases;   // outputs
};

/// Fully-connected feed-forward network stored in the `amc 1` text format:
///
///   amc 1
///   layers <n>
///   dims <in> <out>
///   act tanh|relu|linear
///   <out*in weights, row-major> <out biases>
///   ... repeated per layer
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  int input_size() const;
  int output_size() const;
  const std::vector<DenseLayer>& layers() const { return layers_; }

  /// Raw network output (activations applied per layer). Deterministic.
  std::vector<double> forward(std::span<const double> input) const;

 private:
  std::vector<DenseLayer> layers_;
};

Mlp read_mlp(std::istream& in);
void write_mlp(std::ostream& out, const Mlp& net);
Mlp load_mlp_file(const std::filesystem::path& path);
void save_mlp_file(const std::filesystem::path& path, const Mlp& net);

double softplus(double x);
double logistic(double x);

}  // namespace artnav
