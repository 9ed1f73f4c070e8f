#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mockcheck/tensor.hpp"

namespace mockcheck {

enum class ActivationKind { none, linear, relu, sigmoid, tanh_act, softmax };
enum class LayerKind { dense, conv1d, flatten, activation };

std::string to_string(ActivationKind a);
std::string to_string(LayerKind k);

// Declarative layer description, the unit of model specs.
struct LayerDef {
  LayerKind kind = LayerKind::dense;
  int units = 0;        // dense only
  int filters = 0;      // conv1d only
  int kernel_size = 0;  // conv1d only
  ActivationKind activation = ActivationKind::none;

  static LayerDef dense(int units, ActivationKind act = ActivationKind::none);
  static LayerDef conv1d(int filters, int kernel_size,
                         ActivationKind act = ActivationKind::none);
  static LayerDef flatten();
  static LayerDef activation_only(ActivationKind act);
};

// A built layer: the def plus resolved geometry and parameters.
// Data flows as flat (batch, features) matrices; conv layers interpret the
// feature axis as (length, channels) row-major.
struct LayerState {
  LayerDef def;
  std::size_t in_len = 0, in_ch = 0;    // conv input geometry
  std::size_t out_len = 0, out_ch = 0;  // conv output geometry
  std::size_t in_dim = 0;               // flat input width
  std::size_t out_dim = 0;              // flat output width
  Tensor weights;  // dense: (in, out); conv1d: (kernel, in_ch, filters)
  Tensor bias;     // dense: (out); conv1d: (filters)

  bool has_params() const {
    return def.kind == LayerKind::dense || def.kind == LayerKind::conv1d;
  }
};

struct Model {
  std::size_t input_dim = 0;
  std::vector<LayerState> layers;

  std::size_t output_dim() const {
    return layers.empty() ? input_dim : layers.back().out_dim;
  }
  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  std::size_t parameter_count() const;
};

// Resolves geometry and initializes parameters (Glorot-uniform weights from
// the given seed, zero biases).  Throws ContractError on invalid composition:
// dense on unflattened conv output, kernel wider than its input, or softmax
// anywhere but the final layer.  A rank-1 input feeding conv1d is implicitly
// reshaped to (length, 1).
Model build_model(std::size_t input_dim, const std::vector<LayerDef>& defs,
                  std::uint64_t seed);

// Per-layer activations recorded during a forward pass.
struct ForwardTrace {
  Tensor input;
  std::vector<Tensor> pre;   // pre-activation (after the affine/identity map)
  std::vector<Tensor> post;  // layer output
};

ForwardTrace forward_trace(const Model& model, const Tensor& inputs);
Tensor forward(const Model& model, const Tensor& inputs);

Tensor apply_activation(ActivationKind act, const Tensor& pre);

}  // namespace mockcheck
