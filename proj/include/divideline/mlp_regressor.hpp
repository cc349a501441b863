#pragma once

// Small feedforward regressor (lon, lat) -> scalar, trained by full-batch
// gradient descent on mean squared error with weight decay.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "divideline/error.hpp"
#include "divideline/geodata.hpp"
#include "divideline/hyperplane.hpp"
#include "divideline/random.hpp"

namespace divideline {

enum class activation { relu, tanh };

inline std::string to_string(activation a) { return a == activation::relu ? "relu" : "tanh"; }

inline activation parse_activation(const std::string& s) {
  if (s == "relu") return activation::relu;
  if (s == "tanh") return activation::tanh;
  throw error(errc::invalid_argument, "unknown activation '" + s + "'");
}

struct network_arch {
  std::vector<std::size_t> hidden_sizes{10};
  activation act = activation::relu;
};

/// Dense layer; weights are out x in, row-major.
struct dense_layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> biases;
};

struct network {
  network_arch arch;
  std::vector<dense_layer> layers;
  standardizer input_scale;
  /// Range used to clamp outputs for display; training never clamps.
  double output_lo = 0.0;
  double output_hi = 1.0;

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.biases.size();
    return n;
  }
};

struct train_config {
  double learning_rate = 0.05;
  std::size_t epochs = 2000;
  std::uint64_t seed = 0;
  /// Weight-decay strength; the penalty is l2/2 * sum of squared weights.
  double l2 = 1e-4;
  double target_loss = 1e-6;
  /// When false every ensemble member starts from the same initial weights.
  bool reseed_per_index = true;
};

struct sample_target {
  geo_point point;
  double target = 0.0;
};

inline void validate(const network_arch& arch) {
  for (const auto h : arch.hidden_sizes)
    if (h < 1) throw error(errc::invalid_argument, "hidden layer sizes must be >= 1");
}

/// Gaussian weights with variance 1/fan_in, zero biases.
inline network init_network(const network_arch& arch, std::uint64_t seed) {
  validate(arch);
  network net;
  net.arch = arch;
  auto gen = make_rng(seed, stream::init);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t fan_in = 2;
  auto sizes = arch.hidden_sizes;
  sizes.push_back(1);
  for (const auto out : sizes) {
    dense_layer l;
    l.in = fan_in;
    l.out = out;
    l.weights.resize(out * fan_in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (auto& w : l.weights) w = normal(gen) * scale;
    l.biases.assign(out, 0.0);
    net.layers.push_back(std::move(l));
    fan_in = out;
  }
  return net;
}

/// Flat parameter vector: per layer, weights then biases.
inline std::vector<double> get_parameters(const network& net) {
  std::vector<double> flat;
  flat.reserve(net.parameter_count());
  for (const auto& l : net.layers) {
    flat.insert(flat.end(), l.weights.begin(), l.weights.end());
    flat.insert(flat.end(), l.biases.begin(), l.biases.end());
  }
  return flat;
}

inline void set_parameters(network& net, std::span<const double> flat) {
  if (flat.size() != net.parameter_count()) throw error(errc::invalid_argument, "parameter count mismatch");
  std::size_t k = 0;
  for (auto& l : net.layers) {
    for (auto& w : l.weights) w = flat[k++];
    for (auto& b : l.biases) b = flat[k++];
  }
}

namespace detail {

inline double activate(activation a, double z) noexcept { return a == activation::relu ? std::max(z, 0.0) : std::tanh(z); }

/// Derivative expressed through the pre-activation z and output y.
inline double activate_slope(activation a, double z, double y) noexcept {
  return a == activation::relu ? (z > 0.0 ? 1.0 : 0.0) : 1.0 - y * y;
}

/// Per-layer buffers reused across samples: pre-activations and outputs.
struct workspace {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;
  std::vector<std::vector<double>> delta;

  explicit workspace(const network& net) {
    post.emplace_back(2);
    for (const auto& l : net.layers) {
      pre.emplace_back(l.out);
      post.emplace_back(l.out);
      delta.emplace_back(l.out);
    }
  }
};

inline double run_forward(const network& net, const geo_point& p, workspace& ws) noexcept {
  const vec2 z = net.input_scale.apply(p);
  ws.post[0][0] = z[0];
  ws.post[0][1] = z[1];
  const std::size_t last = net.layers.size() - 1;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const auto& l = net.layers[li];
    const auto& input = ws.post[li];
    auto& pre = ws.pre[li];
    auto& post = ws.post[li + 1];
    for (std::size_t o = 0; o < l.out; ++o) {
      double s = l.biases[o];
      const double* row = &l.weights[o * l.in];
      for (std::size_t i = 0; i < l.in; ++i) s += row[i] * input[i];
      pre[o] = s;
      post[o] = li == last ? s : activate(net.arch.act, s);
    }
  }
  return ws.post.back()[0];
}

}  // namespace detail

/// Standardizes the input, applies hidden layers and a linear output unit.
inline double forward(const network& net, const geo_point& p) {
  detail::workspace ws(net);
  return detail::run_forward(net, p, ws);
}

inline double forward_clamped(const network& net, const geo_point& p) {
  return std::clamp(forward(net, p), net.output_lo, net.output_hi);
}

struct loss_gradient {
  double loss = 0.0;  ///< mse + penalty
  double mse = 0.0;
  std::vector<double> grad;  ///< flat, same layout as get_parameters
};

/// Exact gradient of mean squared error plus l2/2 * |W|^2 by backpropagation.
inline loss_gradient gradient(const network& net, std::span<const sample_target> batch, double l2) {
  if (batch.empty()) throw error(errc::invalid_argument, "gradient of an empty batch");
  detail::workspace ws(net);
  std::vector<std::vector<double>> gw, gb;
  for (const auto& l : net.layers) {
    gw.emplace_back(l.weights.size(), 0.0);
    gb.emplace_back(l.biases.size(), 0.0);
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double sse = 0.0;
  const std::size_t depth = net.layers.size();
  for (const auto& s : batch) {
    const double err = detail::run_forward(net, s.point, ws) - s.target;
    sse += err * err;
    ws.delta[depth - 1][0] = 2.0 * err * inv_n;
    for (std::size_t li = depth; li-- > 0;) {
      const auto& l = net.layers[li];
      const auto& input = ws.post[li];
      const auto& delta = ws.delta[li];
      for (std::size_t o = 0; o < l.out; ++o) {
        gb[li][o] += delta[o];
        double* row = &gw[li][o * l.in];
        for (std::size_t i = 0; i < l.in; ++i) row[i] += delta[o] * input[i];
      }
      if (li == 0) break;
      auto& below = ws.delta[li - 1];
      for (std::size_t i = 0; i < l.in; ++i) {
        double back = 0.0;
        for (std::size_t o = 0; o < l.out; ++o) back += l.weights[o * l.in + i] * delta[o];
        below[i] = back * detail::activate_slope(net.arch.act, ws.pre[li - 1][i], ws.post[li][i]);
      }
    }
  }
  loss_gradient out;
  out.mse = sse * inv_n;
  double penalty = 0.0;
  out.grad.reserve(net.parameter_count());
  for (std::size_t li = 0; li < depth; ++li) {
    const auto& l = net.layers[li];
    for (std::size_t k = 0; k < l.weights.size(); ++k) {
      penalty += l.weights[k] * l.weights[k];
      out.grad.push_back(gw[li][k] + l2 * l.weights[k]);
    }
    out.grad.insert(out.grad.end(), gb[li].begin(), gb[li].end());
  }
  out.loss = out.mse + 0.5 * l2 * penalty;
  return out;
}

/// Loss alone, by forward passes only.
inline double loss(const network& net, std::span<const sample_target> batch, double l2) {
  if (batch.empty()) throw error(errc::invalid_argument, "loss of an empty batch");
  detail::workspace ws(net);
  double sse = 0.0;
  for (const auto& s : batch) {
    const double err = detail::run_forward(net, s.point, ws) - s.target;
    sse += err * err;
  }
  double penalty = 0.0;
  for (const auto& l : net.layers)
    for (const auto w : l.weights) penalty += w * w;
  return sse / static_cast<double>(batch.size()) + 0.5 * l2 * penalty;
}

struct train_report {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::size_t epochs_run = 0;
};

/// Full-batch gradient descent for cfg.epochs or until the loss drops below
/// cfg.target_loss. Returns the lowest-loss parameters visited.
inline network train(network net, std::span<const sample_target> data, const train_config& cfg,
                     train_report* report = nullptr) {
  if (data.empty()) throw error(errc::invalid_argument, "training data is empty");
  if (!(cfg.learning_rate > 0.0) || cfg.epochs < 1)
    throw error(errc::invalid_argument, "learning_rate must be > 0 and epochs >= 1");
  for (const auto& s : data)
    if (!std::isfinite(s.target)) throw error(errc::invalid_argument, "non-finite training target");

  std::vector<double> params = get_parameters(net);
  std::vector<double> best = params;
  double best_loss = std::numeric_limits<double>::infinity();
  double initial = 0.0;
  std::size_t epoch = 0;
  for (; epoch <= cfg.epochs; ++epoch) {
    const auto g = gradient(net, data, cfg.l2);
    if (!std::isfinite(g.loss))
      throw error(errc::divergence_detected, "loss became non-finite at epoch " + std::to_string(epoch) +
                                                 " (learning_rate=" + std::to_string(cfg.learning_rate) + ")");
    if (epoch == 0) initial = g.loss;
    if (g.loss < best_loss) {
      best_loss = g.loss;
      best = params;
    }
    if (g.loss < cfg.target_loss || epoch == cfg.epochs) break;
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= cfg.learning_rate * g.grad[k];
    set_parameters(net, params);
  }
  set_parameters(net, best);
  if (report) *report = {initial, best_loss, epoch};
  return net;
}

/// Predicts 1 when the output is >= 0.5, else 0.
inline double classify_accuracy(const network& net, std::span<const sample_target> test) {
  if (test.empty()) throw error(errc::test_set_empty, "classify_accuracy on empty test set");
  detail::workspace ws(net);
  std::size_t correct = 0;
  for (const auto& s : test) {
    const double predicted = detail::run_forward(net, s.point, ws) >= 0.5 ? 1.0 : 0.0;
    correct += predicted == s.target ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

inline nlohmann::json to_json(const network& net) {
  nlohmann::json j;
  j["arch"] = {{"hidden_sizes", net.arch.hidden_sizes}, {"activation", to_string(net.arch.act)}};
  j["standardizer"] = {{"mean", net.input_scale.mean}, {"sd", net.input_scale.sd}};
  j["output_range"] = {net.output_lo, net.output_hi};
  auto layers = nlohmann::json::array();
  for (const auto& l : net.layers)
    layers.push_back({{"in", l.in}, {"out", l.out}, {"weights", l.weights}, {"biases", l.biases}});
  j["layers"] = layers;
  return j;
}

inline network network_from_json(const nlohmann::json& j) {
  network net;
  net.arch.hidden_sizes = j.at("arch").at("hidden_sizes").get<std::vector<std::size_t>>();
  net.arch.act = parse_activation(j.at("arch").at("activation").get<std::string>());
  net.input_scale.mean = j.at("standardizer").at("mean").get<vec2>();
  net.input_scale.sd = j.at("standardizer").at("sd").get<vec2>();
  net.output_lo = j.at("output_range").at(0).get<double>();
  net.output_hi = j.at("output_range").at(1).get<double>();
  for (const auto& lj : j.at("layers")) {
    dense_layer l;
    l.in = lj.at("in").get<std::size_t>();
    l.out = lj.at("out").get<std::size_t>();
    l.weights = lj.at("weights").get<std::vector<double>>();
    l.biases = lj.at("biases").get<std::vector<double>>();
    if (l.weights.size() != l.in * l.out || l.biases.size() != l.out)
      throw error(errc::malformed_row, "layer shape mismatch in model JSON");
    net.layers.push_back(std::move(l));
  }
  return net;
}

}  // namespace divideline
