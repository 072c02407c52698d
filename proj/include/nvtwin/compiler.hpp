// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Layered-graph to node-program compiler.
//
// Layer 0 is the input layer and becomes CONST nodes the host drives. Each
// neuron of a later layer becomes one THRESH (step activation) or ACC
// (linear) node. A neuron whose fan-in exceeds 256 is fed through a tree of
// ACC relays, each adding one epoch of latency. With inputs held constant
// every output settles after `latency_epochs` epochs.
//
// Ids are assigned layer-major: inputs first, then for each layer its
// neuron nodes in index order followed by that layer's relays.

#include <cstddef>
#include <optional>
#include <vector>

#include "nvtwin/config.hpp"
#include "nvtwin/core_model.hpp"
#include "nvtwin/interconnect.hpp"

namespace nvtwin {

enum class Activation {
  Linear,  ///< ACC: saturating weighted sum
  Step,    ///< THRESH: 1 if weighted sum >= threshold
};

struct GraphEdge {
  std::size_t source;  ///< index into the previous layer
  double weight;
};

struct GraphNeuron {
  std::vector<GraphEdge> inputs;
  double threshold{0.0};
};

struct GraphLayer {
  Activation activation{Activation::Step};
  std::vector<GraphNeuron> neurons;
};

struct LayeredGraph {
  std::size_t input_count{0};
  std::vector<GraphLayer> layers;
};

struct QuantizedEdge {
  std::size_t source;
  Weight weight;
};

struct QuantizedNeuron {
  std::vector<QuantizedEdge> inputs;
  std::int16_t threshold{0};
};

struct QuantizedLayer {
  Activation activation{Activation::Step};
  std::vector<QuantizedNeuron> neurons;
  /// Integer weight = round(real weight * scale).
  double scale{1.0};
  /// Factor between this layer's integer outputs and the real-valued ones.
  double output_scale{1.0};
};

struct QuantizedGraph {
  std::size_t input_count{0};
  std::vector<QuantizedLayer> layers;
};

struct QuantizeOptions {
  /// Fixed scale for every layer; default is per-layer symmetric 127/max|w|.
  std::optional<double> scale;
};

/// Symmetric s8 quantization. Throws ContractError for dangling edges and
/// ConfigError when a weight or threshold leaves its integer range.
QuantizedGraph quantize(const LayeredGraph& graph, const QuantizeOptions& options = {});

struct CompiledGraph {
  std::vector<NodeProgram> programs;
  std::vector<NodeId> inputs;
  /// Node carrying each neuron's result, per layer.
  std::vector<std::vector<NodeId>> neuron_nodes;
  std::vector<NodeId> outputs;
  std::size_t relay_count{0};
  std::size_t latency_epochs{0};
  std::size_t total_nodes{0};
  std::vector<ChipBridge> chips;
  std::vector<double> layer_scales;
};

/// Throws CapacityError when the split network does not fit the address
/// space (or the chip limit under cfg.enforce_chip_limit).
CompiledGraph compile_graph(const QuantizedGraph& graph, const SystemConfig& cfg);
CompiledGraph compile_graph(const LayeredGraph& graph, const SystemConfig& cfg,
                            const QuantizeOptions& options = {});

/// SystemConfig sized for a compiled graph and the given template.
SystemConfig config_for(const CompiledGraph& compiled, const SystemConfig& base);

}  // namespace nvtwin
