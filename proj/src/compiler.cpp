// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include "nvtwin/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "nvtwin/errors.hpp"

namespace nvtwin {

QuantizedGraph quantize(const LayeredGraph& graph, const QuantizeOptions& options) {
  QuantizedGraph q;
  q.input_count = graph.input_count;
  std::size_t prev_width = graph.input_count;
  double input_scale = 1.0;

  for (std::size_t l = 0; l < graph.layers.size(); ++l) {
    const auto& layer = graph.layers[l];
    double max_abs = 0.0;
    for (const auto& n : layer.neurons) {
      for (const auto& e : n.inputs) {
        if (e.source >= prev_width) {
          throw ContractError("layer " + std::to_string(l + 1) + " edge refers to missing source " +
                              std::to_string(e.source));
        }
        max_abs = std::max(max_abs, std::abs(e.weight));
      }
    }
    const double scale = options.scale.value_or(max_abs == 0.0 ? 1.0 : 127.0 / max_abs);
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("quantization scale must be finite and > 0");

    QuantizedLayer ql;
    ql.activation = layer.activation;
    ql.scale = scale;
    for (std::size_t i = 0; i < layer.neurons.size(); ++i) {
      const auto& n = layer.neurons[i];
      QuantizedNeuron qn;
      for (const auto& e : n.inputs) {
        const double r = std::round(e.weight * scale);
        if (r < -128.0 || r > 127.0) {
          throw ConfigError("layer " + std::to_string(l + 1) + " neuron " + std::to_string(i) +
                            ": weight " + std::to_string(e.weight) + " quantizes to " +
                            std::to_string(static_cast<long long>(r)) + ", outside s8");
        }
        qn.inputs.push_back({e.source, static_cast<Weight>(r)});
      }
      const double t = std::round(n.threshold * scale * input_scale);
      if (t < -32768.0 || t > 32767.0) {
        throw ConfigError("layer " + std::to_string(l + 1) + " neuron " + std::to_string(i) +
                          ": threshold does not fit 16 bits after scaling");
      }
      qn.threshold = static_cast<std::int16_t>(t);
      ql.neurons.push_back(std::move(qn));
    }
    ql.output_scale = layer.activation == Activation::Step ? 1.0 : scale * input_scale;
    input_scale = ql.output_scale;
    prev_width = layer.neurons.size();
    q.layers.push_back(std::move(ql));
  }
  return q;
}

namespace {

// Relay nodes needed to bring a fan-in down to kMaxFanIn, and the levels used.
std::pair<std::size_t, std::size_t> relay_cost(std::size_t fan_in) {
  std::size_t relays = 0;
  std::size_t levels = 0;
  while (fan_in > kMaxFanIn) {
    const std::size_t next = (fan_in + kMaxFanIn - 1) / kMaxFanIn;
    relays += next;
    fan_in = next;
    ++levels;
  }
  return {relays, levels};
}

}  // namespace

CompiledGraph compile_graph(const QuantizedGraph& graph, const SystemConfig& cfg) {
  // Size the network first so capacity errors carry the full requirement.
  std::size_t required = graph.input_count;
  std::size_t prev_width = graph.input_count;
  for (std::size_t l = 0; l < graph.layers.size(); ++l) {
    const auto& layer = graph.layers[l];
    required += layer.neurons.size();
    for (std::size_t i = 0; i < layer.neurons.size(); ++i) {
      const auto& n = layer.neurons[i];
      if (n.inputs.empty()) {
        throw ContractError("layer " + std::to_string(l + 1) + " neuron " + std::to_string(i) + " has no inputs");
      }
      std::set<std::size_t> sources;
      for (const auto& e : n.inputs) {
        if (e.source >= prev_width) {
          throw ContractError("layer " + std::to_string(l + 1) + " edge refers to missing source " +
                              std::to_string(e.source));
        }
        if (!sources.insert(e.source).second) {
          throw ContractError("layer " + std::to_string(l + 1) + " neuron " + std::to_string(i) +
                              " lists source " + std::to_string(e.source) + " twice");
        }
      }
      required += relay_cost(n.inputs.size()).first;
    }
    prev_width = layer.neurons.size();
  }
  if (required > kAddressSpace) throw CapacityError(required, kAddressSpace);
  if (cfg.nodes_per_chip == 0) throw ConfigError("nodes_per_chip must be >= 1");
  if (cfg.enforce_chip_limit && (required + cfg.nodes_per_chip - 1) / cfg.nodes_per_chip > kMaxChips) {
    throw CapacityError(required, kMaxChips * cfg.nodes_per_chip);
  }

  CompiledGraph out;
  out.total_nodes = required;
  std::size_t next_id = 0;
  auto alloc = [&]() { return NodeId(static_cast<std::uint16_t>(next_id++)); };

  for (std::size_t i = 0; i < graph.input_count; ++i) {
    const NodeId id = alloc();
    out.inputs.push_back(id);
    out.programs.push_back({id, Opcode::Const, 0, {}, false});
  }

  std::vector<NodeId> prev = out.inputs;
  for (const auto& layer : graph.layers) {
    std::vector<NodeId> current;
    current.reserve(layer.neurons.size());
    for (std::size_t i = 0; i < layer.neurons.size(); ++i) current.push_back(alloc());

    std::size_t deepest = 0;
    for (std::size_t i = 0; i < layer.neurons.size(); ++i) {
      const auto& n = layer.neurons[i];
      std::vector<ConnectionEntry> level;
      level.reserve(n.inputs.size());
      for (const auto& e : n.inputs) level.push_back({prev[e.source], e.weight});

      std::size_t depth = 0;
      while (level.size() > kMaxFanIn) {
        std::vector<ConnectionEntry> relays;
        for (std::size_t lo = 0; lo < level.size(); lo += kMaxFanIn) {
          const std::size_t hi = std::min(level.size(), lo + kMaxFanIn);
          const NodeId rid = alloc();
          out.programs.push_back({rid, Opcode::Acc, 0,
                                  AddressTable(std::vector<ConnectionEntry>(level.begin() + lo, level.begin() + hi)),
                                  false});
          relays.push_back({rid, 1});
          ++out.relay_count;
        }
        level = std::move(relays);
        ++depth;
      }
      deepest = std::max(deepest, depth);

      const bool step = layer.activation == Activation::Step;
      out.programs.push_back({current[i], step ? Opcode::Thresh : Opcode::Acc,
                              step ? n.threshold : std::int16_t{0}, AddressTable(std::move(level)), false});
    }
    out.latency_epochs += 1 + deepest;
    out.layer_scales.push_back(layer.scale);
    out.neuron_nodes.push_back(current);
    prev = std::move(current);
  }

  out.outputs = prev;
  std::sort(out.programs.begin(), out.programs.end(),
            [](const NodeProgram& a, const NodeProgram& b) { return a.id < b.id; });
  for (const NodeId id : out.outputs) out.programs[id.index()].is_output = true;
  out.chips = plan_chips(out.total_nodes, cfg.nodes_per_chip, cfg.enforce_chip_limit);
  return out;
}

CompiledGraph compile_graph(const LayeredGraph& graph, const SystemConfig& cfg, const QuantizeOptions& options) {
  return compile_graph(quantize(graph, options), cfg);
}

SystemConfig config_for(const CompiledGraph& compiled, const SystemConfig& base) {
  SystemConfig cfg = base;
  cfg.total_nodes = compiled.total_nodes;
  return cfg;
}

}  // namespace nvtwin
