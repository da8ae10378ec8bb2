#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace morphevo {

// Fixed-topology feedforward controller: one hidden layer, tanh everywhere,
// bias units on the input and hidden layers. Parameters live in a flat
// vector so they can be evolved directly.
struct NetworkTopology {
  int inputs = 0;
  int hidden = 0;
  int outputs = 0;

  int parameter_count() const {
    return (inputs + 1) * hidden + (hidden + 1) * outputs;
  }
  bool operator==(const NetworkTopology&) const = default;
};

// Throws std::invalid_argument unless all layer sizes are >= 1.
void validate(const NetworkTopology& topology);

// One entry of the flat-vector layout: parameter index `index` is the weight
// of the connection `source -> destination` in layer `layer`. source equal
// to the source-layer width denotes the bias unit.
struct ConnectionSlot {
  enum class Layer { kInputToHidden, kHiddenToOutput };
  int index;
  Layer layer;
  int destination;
  int source;
};

// The frozen bijection between vector indices and connections: row-major by
// destination neuron, bias last per destination, hidden layer block first.
// For (4,20,1): indices 0..99 are input->hidden, 100..120 hidden->output.
std::vector<ConnectionSlot> layout(const NetworkTopology& topology);

// Weight matrices decoded from a flat vector; row d holds destination
// neuron d's incoming weights, bias in the final column.
struct DecodedWeights {
  std::vector<std::vector<double>> input_to_hidden;   // hidden x (inputs+1)
  std::vector<std::vector<double>> hidden_to_output;  // outputs x (hidden+1)
};

DecodedWeights decode(const NetworkTopology& topology,
                      std::span<const double> params);
std::vector<double> encode(const NetworkTopology& topology,
                           const DecodedWeights& weights);

// Evaluates the network. Output components are tanh-activated and therefore
// strictly inside (-1, 1). Throws std::invalid_argument on any dimension
// mismatch or non-finite parameter.
void forward(const NetworkTopology& topology, std::span<const double> params,
             std::span<const double> observation, std::span<double> actions);

std::vector<double> forward(const NetworkTopology& topology,
                            std::span<const double> params,
                            std::span<const double> observation);

// Policy closure over (topology, params) in the observation->action form the
// environments consume. The parameter vector is copied.
using PolicyFn =
    std::function<void(std::span<const double>, std::span<double>)>;
PolicyFn make_network_policy(const NetworkTopology& topology,
                             std::vector<double> params);

}  // namespace morphevo
