#include "mockcheck/nn.hpp"

#include <cmath>
#include <limits>

#include "mockcheck/errors.hpp"

namespace mockcheck {

std::string to_string(ActivationKind a) {
  switch (a) {
    case ActivationKind::none: return "none";
    case ActivationKind::linear: return "linear";
    case ActivationKind::relu: return "relu";
    case ActivationKind::sigmoid: return "sigmoid";
    case ActivationKind::tanh_act: return "tanh";
    case ActivationKind::softmax: return "softmax";
  }
  return "?";
}

std::string to_string(LayerKind k) {
  switch (k) {
    case LayerKind::dense: return "dense";
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::flatten: return "flatten";
    case LayerKind::activation: return "activation";
  }
  return "?";
}

LayerDef LayerDef::dense(int units, ActivationKind act) {
  LayerDef d;
  d.kind = LayerKind::dense;
  d.units = units;
  d.activation = act;
  return d;
}

LayerDef LayerDef::conv1d(int filters, int kernel_size, ActivationKind act) {
  LayerDef d;
  d.kind = LayerKind::conv1d;
  d.filters = filters;
  d.kernel_size = kernel_size;
  d.activation = act;
  return d;
}

LayerDef LayerDef::flatten() {
  LayerDef d;
  d.kind = LayerKind::flatten;
  return d;
}

LayerDef LayerDef::activation_only(ActivationKind act) {
  LayerDef d;
  d.kind = LayerKind::activation;
  d.activation = act;
  return d;
}

std::vector<Tensor*> Model::parameters() {
  std::vector<Tensor*> out;
  for (auto& l : layers) {
    if (!l.has_params()) continue;
    out.push_back(&l.weights);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<const Tensor*> Model::parameters() const {
  std::vector<const Tensor*> out;
  for (const auto& l : layers) {
    if (!l.has_params()) continue;
    out.push_back(&l.weights);
    out.push_back(&l.bias);
  }
  return out;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor* t : parameters()) n += t->size();
  return n;
}

namespace {

void glorot_fill(Tensor& w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w.values) v = rng.uniform(-limit, limit);
}

}  // namespace

Model build_model(std::size_t input_dim, const std::vector<LayerDef>& defs,
                  std::uint64_t seed) {
  if (input_dim == 0) throw ContractError("build_model: input_dim must be positive");
  Rng rng(seed);
  Model m;
  m.input_dim = input_dim;

  // Current data geometry: flat width, plus (len, ch) when rank 2.
  std::size_t cur_flat = input_dim;
  std::size_t cur_len = input_dim, cur_ch = 1;
  bool rank2 = false;

  for (std::size_t i = 0; i < defs.size(); ++i) {
    const LayerDef& def = defs[i];
    if (def.activation == ActivationKind::softmax && i + 1 != defs.size()) {
      throw ContractError("build_model: softmax is only allowed on the final layer");
    }
    LayerState s;
    s.def = def;
    s.in_dim = cur_flat;
    s.in_len = cur_len;
    s.in_ch = cur_ch;
    switch (def.kind) {
      case LayerKind::dense: {
        if (rank2) {
          throw ContractError(
              "build_model: dense layer requires a flat input; add a flatten layer first");
        }
        if (def.units < 1) throw ContractError("build_model: dense units must be >= 1");
        const std::size_t units = static_cast<std::size_t>(def.units);
        s.weights = Tensor::matrix(cur_flat, units);
        glorot_fill(s.weights, cur_flat, units, rng);
        s.bias = Tensor({units});
        cur_flat = units;
        cur_len = units;
        cur_ch = 1;
        break;
      }
      case LayerKind::conv1d: {
        if (def.filters < 1 || def.kernel_size < 1) {
          throw ContractError("build_model: conv1d filters and kernel_size must be >= 1");
        }
        // Rank-1 input is treated as a single-channel sequence.
        const std::size_t k = static_cast<std::size_t>(def.kernel_size);
        const std::size_t f = static_cast<std::size_t>(def.filters);
        if (cur_len < k) {
          throw ContractError("build_model: conv1d kernel is wider than its input");
        }
        s.weights = Tensor({k, cur_ch, f});
        glorot_fill(s.weights, k * cur_ch, k * f, rng);
        s.bias = Tensor({f});
        cur_len = cur_len - k + 1;
        cur_ch = f;
        cur_flat = cur_len * cur_ch;
        rank2 = true;
        break;
      }
      case LayerKind::flatten: {
        rank2 = false;
        cur_len = cur_flat;
        cur_ch = 1;
        break;
      }
      case LayerKind::activation: {
        if (def.activation == ActivationKind::none) {
          throw ContractError("build_model: activation layer needs an activation");
        }
        break;
      }
    }
    s.out_dim = cur_flat;
    s.out_len = cur_len;
    s.out_ch = cur_ch;
    m.layers.push_back(std::move(s));
  }
  return m;
}

Tensor apply_activation(ActivationKind act, const Tensor& pre) {
  Tensor out = pre;
  switch (act) {
    case ActivationKind::none:
    case ActivationKind::linear:
      return out;
    case ActivationKind::relu:
      for (double& v : out.values) {
        if (!std::isnan(v) && v < 0.0) v = 0.0;
      }
      return out;
    case ActivationKind::sigmoid:
      for (double& v : out.values) v = 1.0 / (1.0 + std::exp(-v));
      return out;
    case ActivationKind::tanh_act:
      for (double& v : out.values) v = std::tanh(v);
      return out;
    case ActivationKind::softmax: {
      // Row-wise, with max subtraction for stability.  NaN rows stay NaN.
      const std::size_t cols = out.cols();
      for (std::size_t r = 0; r < out.rows(); ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < cols; ++c) {
          if (out.at(r, c) > mx) mx = out.at(r, c);
        }
        double sum = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
          double& v = out.at(r, c);
          v = std::exp(v - mx);
          sum += v;
        }
        for (std::size_t c = 0; c < cols; ++c) out.at(r, c) /= sum;
      }
      return out;
    }
  }
  return out;
}

namespace {

Tensor dense_forward(const LayerState& l, const Tensor& x) {
  const std::size_t n = x.rows();
  const std::size_t in = l.in_dim, out_w = l.out_dim;
  Tensor out({n, out_w});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < out_w; ++c) {
      double acc = l.bias.values[c];
      for (std::size_t k = 0; k < in; ++k) {
        acc += x.values[r * in + k] * l.weights.values[k * out_w + c];
      }
      out.values[r * out_w + c] = acc;
    }
  }
  return out;
}

Tensor conv1d_forward(const LayerState& l, const Tensor& x) {
  const std::size_t n = x.rows();
  const std::size_t k = static_cast<std::size_t>(l.def.kernel_size);
  const std::size_t f = static_cast<std::size_t>(l.def.filters);
  const std::size_t in_len = l.in_len, in_ch = l.in_ch, out_len = l.out_len;
  Tensor out({n, out_len * f});
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = &x.values[r * in_len * in_ch];
    for (std::size_t t = 0; t < out_len; ++t) {
      for (std::size_t j = 0; j < f; ++j) {
        double acc = l.bias.values[j];
        for (std::size_t kk = 0; kk < k; ++kk) {
          for (std::size_t ch = 0; ch < in_ch; ++ch) {
            acc += row[(t + kk) * in_ch + ch] *
                   l.weights.values[(kk * in_ch + ch) * f + j];
          }
        }
        out.values[r * out_len * f + t * f + j] = acc;
      }
    }
  }
  return out;
}

}  // namespace

ForwardTrace forward_trace(const Model& model, const Tensor& inputs) {
  if (inputs.cols() != model.input_dim) {
    throw ContractError("forward: input width " + std::to_string(inputs.cols()) +
                        " does not match model input_dim " +
                        std::to_string(model.input_dim));
  }
  ForwardTrace tr;
  tr.input = inputs;
  tr.pre.reserve(model.layers.size());
  tr.post.reserve(model.layers.size());
  const Tensor* cur = &tr.input;
  for (const LayerState& l : model.layers) {
    Tensor pre;
    switch (l.def.kind) {
      case LayerKind::dense: pre = dense_forward(l, *cur); break;
      case LayerKind::conv1d: pre = conv1d_forward(l, *cur); break;
      case LayerKind::flatten:
      case LayerKind::activation: pre = *cur; break;
    }
    Tensor post = apply_activation(l.def.activation, pre);
    tr.pre.push_back(std::move(pre));
    tr.post.push_back(std::move(post));
    cur = &tr.post.back();
  }
  return tr;
}

Tensor forward(const Model& model, const Tensor& inputs) {
  if (model.layers.empty()) return inputs;
  ForwardTrace tr = forward_trace(model, inputs);
  return std::move(tr.post.back());
}

}  // namespace mockcheck
