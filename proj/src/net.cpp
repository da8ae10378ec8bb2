#include "morphevo/net.hpp"

#include <cmath>
#include <stdexcept>

namespace morphevo {

void validate(const NetworkTopology& t) {
  if (t.inputs < 1 || t.hidden < 1 || t.outputs < 1) {
    throw std::invalid_argument("network topology: all layer sizes must be >= 1");
  }
}

std::vector<ConnectionSlot> layout(const NetworkTopology& t) {
  validate(t);
  std::vector<ConnectionSlot> slots;
  slots.reserve(static_cast<std::size_t>(t.parameter_count()));
  int index = 0;
  for (int d = 0; d < t.hidden; ++d) {
    for (int s = 0; s <= t.inputs; ++s) {
      slots.push_back({index++, ConnectionSlot::Layer::kInputToHidden, d, s});
    }
  }
  for (int d = 0; d < t.outputs; ++d) {
    for (int s = 0; s <= t.hidden; ++s) {
      slots.push_back({index++, ConnectionSlot::Layer::kHiddenToOutput, d, s});
    }
  }
  return slots;
}

static void check_params(const NetworkTopology& t,
                         std::span<const double> params) {
  validate(t);
  if (static_cast<int>(params.size()) != t.parameter_count()) {
    throw std::invalid_argument("parameter vector length " +
                                std::to_string(params.size()) +
                                " does not match topology parameter count " +
                                std::to_string(t.parameter_count()));
  }
  for (double v : params) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("parameter vector contains non-finite value");
    }
  }
}

DecodedWeights decode(const NetworkTopology& t, std::span<const double> params) {
  check_params(t, params);
  DecodedWeights w;
  w.input_to_hidden.assign(t.hidden, std::vector<double>(t.inputs + 1));
  w.hidden_to_output.assign(t.outputs, std::vector<double>(t.hidden + 1));
  int index = 0;
  for (int d = 0; d < t.hidden; ++d)
    for (int s = 0; s <= t.inputs; ++s) w.input_to_hidden[d][s] = params[index++];
  for (int d = 0; d < t.outputs; ++d)
    for (int s = 0; s <= t.hidden; ++s) w.hidden_to_output[d][s] = params[index++];
  return w;
}

std::vector<double> encode(const NetworkTopology& t, const DecodedWeights& w) {
  validate(t);
  std::vector<double> params;
  params.reserve(static_cast<std::size_t>(t.parameter_count()));
  for (int d = 0; d < t.hidden; ++d)
    for (int s = 0; s <= t.inputs; ++s) params.push_back(w.input_to_hidden[d][s]);
  for (int d = 0; d < t.outputs; ++d)
    for (int s = 0; s <= t.hidden; ++s) params.push_back(w.hidden_to_output[d][s]);
  return params;
}

// tanh saturates to exactly +-1.0 in doubles for |x| above ~19; pin outputs
// to the widest representable value strictly inside (-1, 1).
static double bounded_tanh(double x) {
  static const double bound = std::nextafter(1.0, 0.0);
  const double y = std::tanh(x);
  if (y >= 1.0) return bound;
  if (y <= -1.0) return -bound;
  return y;
}

void forward(const NetworkTopology& t, std::span<const double> params,
             std::span<const double> observation, std::span<double> actions) {
  check_params(t, params);
  if (static_cast<int>(observation.size()) != t.inputs) {
    throw std::invalid_argument("observation length " +
                                std::to_string(observation.size()) +
                                " does not match topology inputs " +
                                std::to_string(t.inputs));
  }
  if (static_cast<int>(actions.size()) != t.outputs) {
    throw std::invalid_argument("action buffer length does not match outputs");
  }

  const int stride_h = t.inputs + 1;
  const int base_o = stride_h * t.hidden;
  const int stride_o = t.hidden + 1;

  double hidden_act[1024];
  std::vector<double> hidden_heap;
  double* hidden = hidden_act;
  if (t.hidden > 1024) {
    hidden_heap.resize(static_cast<std::size_t>(t.hidden));
    hidden = hidden_heap.data();
  }

  for (int d = 0; d < t.hidden; ++d) {
    const double* w = params.data() + d * stride_h;
    double sum = w[t.inputs];  // bias
    for (int s = 0; s < t.inputs; ++s) sum += w[s] * observation[s];
    hidden[d] = bounded_tanh(sum);
  }
  for (int d = 0; d < t.outputs; ++d) {
    const double* w = params.data() + base_o + d * stride_o;
    double sum = w[t.hidden];  // bias
    for (int s = 0; s < t.hidden; ++s) sum += w[s] * hidden[s];
    actions[d] = bounded_tanh(sum);
  }
}

std::vector<double> forward(const NetworkTopology& t,
                            std::span<const double> params,
                            std::span<const double> observation) {
  std::vector<double> actions(static_cast<std::size_t>(t.outputs));
  forward(t, params, observation, actions);
  return actions;
}

PolicyFn make_network_policy(const NetworkTopology& t,
                             std::vector<double> params) {
  check_params(t, params);
  return [t, p = std::move(params)](std::span<const double> obs,
                                    std::span<double> act) {
    forward(t, p, obs, act);
  };
}

}  // namespace morphevo
