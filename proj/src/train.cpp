#include "mockcheck/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mockcheck/errors.hpp"

namespace mockcheck {

std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::mse: return "mse";
    case LossKind::binary_crossentropy: return "binary_crossentropy";
    case LossKind::categorical_crossentropy: return "categorical_crossentropy";
  }
  return "?";
}

std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::sgd ? "sgd" : "adam";
}

std::string to_string(MetricKind k) {
  return k == MetricKind::mae ? "mae" : "accuracy";
}

namespace {

double clamp_prob(double p) {
  if (std::isnan(p)) return p;
  return std::clamp(p, kProbEps, 1.0 - kProbEps);
}

void require_same_shape(const Tensor& predictions, const Tensor& targets) {
  if (!predictions.same_shape(targets)) {
    throw ContractError("loss: predictions and targets must have the same shape");
  }
  if (predictions.size() == 0) {
    throw ContractError("loss: empty tensors");
  }
}

}  // namespace

double compute_loss(LossKind kind, const Tensor& predictions, const Tensor& targets) {
  require_same_shape(predictions, targets);
  const std::size_t n = predictions.size();
  double acc = 0.0;
  switch (kind) {
    case LossKind::mse:
      for (std::size_t i = 0; i < n; ++i) {
        const double d = predictions.values[i] - targets.values[i];
        acc += d * d;
      }
      return acc / static_cast<double>(n);
    case LossKind::binary_crossentropy:
      for (std::size_t i = 0; i < n; ++i) {
        const double p = clamp_prob(predictions.values[i]);
        const double t = targets.values[i];
        acc += -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
      }
      return acc / static_cast<double>(n);
    case LossKind::categorical_crossentropy: {
      // Mean over batch rows of -sum_c t log p.
      for (std::size_t i = 0; i < n; ++i) {
        const double p = clamp_prob(predictions.values[i]);
        const double t = targets.values[i];
        if (t != 0.0) acc += -t * std::log(p);
        else if (std::isnan(p)) acc += p - p;  // keep NaN rows NaN
      }
      return acc / static_cast<double>(predictions.rows());
    }
  }
  return acc;
}

double compute_metric(MetricKind kind, const Tensor& predictions, const Tensor& targets) {
  require_same_shape(predictions, targets);
  if (kind == MetricKind::mae) {
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      acc += std::abs(predictions.values[i] - targets.values[i]);
    }
    return acc / static_cast<double>(predictions.size());
  }
  // Accuracy.  Width-1 outputs are thresholded at 0.5; wider outputs use
  // argmax.  Rows with non-finite predictions count as wrong.
  const std::size_t cols = predictions.cols();
  const std::size_t rows = predictions.rows();
  std::size_t correct = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    bool finite = true;
    for (std::size_t c = 0; c < cols; ++c) {
      if (!std::isfinite(predictions.at(r, c))) { finite = false; break; }
    }
    if (!finite) continue;
    if (cols == 1) {
      const bool p = predictions.at(r, 0) >= 0.5;
      const bool t = targets.at(r, 0) >= 0.5;
      if (p == t) ++correct;
    } else {
      std::size_t pa = 0, ta = 0;
      for (std::size_t c = 1; c < cols; ++c) {
        if (predictions.at(r, c) > predictions.at(r, pa)) pa = c;
        if (targets.at(r, c) > targets.at(r, ta)) ta = c;
      }
      if (pa == ta) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(rows);
}

Tensor loss_gradient(LossKind kind, const Tensor& predictions, const Tensor& targets) {
  require_same_shape(predictions, targets);
  const std::size_t n = predictions.size();
  Tensor g(predictions.shape);
  const double nan = std::nan("");
  switch (kind) {
    case LossKind::mse: {
      const double scale = 2.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        g.values[i] = scale * (predictions.values[i] - targets.values[i]);
      }
      break;
    }
    case LossKind::binary_crossentropy: {
      const double scale = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double p = predictions.values[i];
        if (std::isnan(p)) { g.values[i] = nan; continue; }
        const double pc = clamp_prob(p);
        // Saturated entries sit on the clamp's flat region: zero gradient.
        if (p != pc) { g.values[i] = 0.0; continue; }
        const double t = targets.values[i];
        g.values[i] = scale * (-t / pc + (1.0 - t) / (1.0 - pc));
      }
      break;
    }
    case LossKind::categorical_crossentropy: {
      const double scale = 1.0 / static_cast<double>(predictions.rows());
      for (std::size_t i = 0; i < n; ++i) {
        const double p = predictions.values[i];
        if (std::isnan(p)) { g.values[i] = nan; continue; }
        const double t = targets.values[i];
        if (t == 0.0) { g.values[i] = 0.0; continue; }
        const double pc = clamp_prob(p);
        g.values[i] = (p != pc) ? 0.0 : scale * (-t / pc);
      }
      break;
    }
  }
  return g;
}

namespace {

// dLoss/dPre for one layer given dLoss/dPost.
Tensor activation_backward(ActivationKind act, const Tensor& pre, const Tensor& post,
                           const Tensor& dpost) {
  Tensor dpre = dpost;
  switch (act) {
    case ActivationKind::none:
    case ActivationKind::linear:
      return dpre;
    case ActivationKind::relu:
      for (std::size_t i = 0; i < dpre.size(); ++i) {
        if (!(pre.values[i] > 0.0)) dpre.values[i] = 0.0;
      }
      return dpre;
    case ActivationKind::sigmoid:
      for (std::size_t i = 0; i < dpre.size(); ++i) {
        const double s = post.values[i];
        dpre.values[i] *= s * (1.0 - s);
      }
      return dpre;
    case ActivationKind::tanh_act:
      for (std::size_t i = 0; i < dpre.size(); ++i) {
        const double s = post.values[i];
        dpre.values[i] *= 1.0 - s * s;
      }
      return dpre;
    case ActivationKind::softmax: {
      // dpre_i = s_i (g_i - sum_j g_j s_j), row-wise.
      const std::size_t cols = dpre.cols();
      for (std::size_t r = 0; r < dpre.rows(); ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < cols; ++c) dot += dpost.at(r, c) * post.at(r, c);
        for (std::size_t c = 0; c < cols; ++c) {
          dpre.at(r, c) = post.at(r, c) * (dpost.at(r, c) - dot);
        }
      }
      return dpre;
    }
  }
  return dpre;
}

struct LayerGrads {
  Tensor dweights, dbias;
};

// Returns dLoss/dInput and fills grads for parameterised layers.
Tensor layer_backward(const LayerState& l, const Tensor& x, const Tensor& dpre,
                      LayerGrads* out) {
  switch (l.def.kind) {
    case LayerKind::dense: {
      const std::size_t n = x.rows(), in = l.in_dim, ow = l.out_dim;
      out->dweights = Tensor({in, ow});
      out->dbias = Tensor({ow});
      Tensor dx({n, in});
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < ow; ++c) {
          const double d = dpre.values[r * ow + c];
          out->dbias.values[c] += d;
          for (std::size_t k = 0; k < in; ++k) {
            out->dweights.values[k * ow + c] += x.values[r * in + k] * d;
            dx.values[r * in + k] += d * l.weights.values[k * ow + c];
          }
        }
      }
      return dx;
    }
    case LayerKind::conv1d: {
      const std::size_t n = x.rows();
      const std::size_t k = static_cast<std::size_t>(l.def.kernel_size);
      const std::size_t f = static_cast<std::size_t>(l.def.filters);
      const std::size_t in_len = l.in_len, in_ch = l.in_ch, out_len = l.out_len;
      out->dweights = Tensor({k, in_ch, f});
      out->dbias = Tensor({f});
      Tensor dx({n, in_len * in_ch});
      for (std::size_t r = 0; r < n; ++r) {
        const double* row = &x.values[r * in_len * in_ch];
        double* drow = &dx.values[r * in_len * in_ch];
        for (std::size_t t = 0; t < out_len; ++t) {
          for (std::size_t j = 0; j < f; ++j) {
            const double d = dpre.values[r * out_len * f + t * f + j];
            out->dbias.values[j] += d;
            for (std::size_t kk = 0; kk < k; ++kk) {
              for (std::size_t ch = 0; ch < in_ch; ++ch) {
                out->dweights.values[(kk * in_ch + ch) * f + j] +=
                    row[(t + kk) * in_ch + ch] * d;
                drow[(t + kk) * in_ch + ch] += l.weights.values[(kk * in_ch + ch) * f + j] * d;
              }
            }
          }
        }
      }
      return dx;
    }
    case LayerKind::flatten:
    case LayerKind::activation:
      return dpre;
  }
  return dpre;
}

std::vector<Tensor> backward_from_trace(const Model& model, const ForwardTrace& tr,
                                        const Tensor& targets, LossKind loss) {
  std::vector<LayerGrads> per_layer(model.layers.size());
  Tensor g = loss_gradient(loss, tr.post.back(), targets);
  for (std::size_t i = model.layers.size(); i-- > 0;) {
    const LayerState& l = model.layers[i];
    const Tensor& x = (i == 0) ? tr.input : tr.post[i - 1];
    Tensor dpre = activation_backward(l.def.activation, tr.pre[i], tr.post[i], g);
    g = layer_backward(l, x, dpre, &per_layer[i]);
  }
  std::vector<Tensor> out;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    if (!model.layers[i].has_params()) continue;
    out.push_back(std::move(per_layer[i].dweights));
    out.push_back(std::move(per_layer[i].dbias));
  }
  return out;
}

}  // namespace

std::vector<Tensor> gradients(const Model& model, const Tensor& inputs,
                              const Tensor& targets, LossKind loss) {
  if (model.layers.empty()) throw ContractError("gradients: model has no layers");
  ForwardTrace tr = forward_trace(model, inputs);
  return backward_from_trace(model, tr, targets, loss);
}

std::vector<Tensor> finite_diff_gradients(const Model& model, const Tensor& inputs,
                                          const Tensor& targets, LossKind loss,
                                          double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ContractError("finite_diff_gradients: epsilon must be a positive real");
  }
  Model probe = model;
  std::vector<Tensor*> params = probe.parameters();
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (Tensor* p : params) {
    Tensor g(p->shape);
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double saved = p->values[i];
      p->values[i] = saved + eps;
      const double lp = compute_loss(loss, forward(probe, inputs), targets);
      p->values[i] = saved - eps;
      const double lm = compute_loss(loss, forward(probe, inputs), targets);
      p->values[i] = saved;
      g.values[i] = (lp - lm) / (2.0 * eps);
    }
    out.push_back(std::move(g));
  }
  return out;
}

namespace {

struct AdamState {
  std::vector<Tensor> m, v;
  int t = 0;
};

void optimizer_step(std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
                    const TrainConfig& cfg, AdamState& adam) {
  const double lr = cfg.learning_rate;
  if (cfg.optimizer == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      for (std::size_t j = 0; j < params[i]->size(); ++j) {
        params[i]->values[j] -= lr * grads[i].values[j];
      }
    }
    return;
  }
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  adam.t += 1;
  const double c1 = 1.0 - std::pow(b1, adam.t);
  const double c2 = 1.0 - std::pow(b2, adam.t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (std::size_t j = 0; j < params[i]->size(); ++j) {
      const double g = grads[i].values[j];
      double& m = adam.m[i].values[j];
      double& v = adam.v[i].values[j];
      m = b1 * m + (1.0 - b1) * g;
      v = b2 * v + (1.0 - b2) * g * g;
      params[i]->values[j] -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
    }
  }
}

Tensor gather_rows(const Tensor& src, const std::vector<std::size_t>& idx,
                   std::size_t begin, std::size_t end) {
  const std::size_t cols = src.cols();
  Tensor out({end - begin, cols});
  for (std::size_t r = begin; r < end; ++r) {
    const std::size_t s = idx[r];
    for (std::size_t c = 0; c < cols; ++c) {
      out.values[(r - begin) * cols + c] = src.values[s * cols + c];
    }
  }
  return out;
}

}  // namespace

TrainTrace train(Model& model, const Tensor& inputs, const Tensor& targets,
                 const TrainConfig& config) {
  const std::size_t n = inputs.rows();
  if (n == 0) throw ContractError("train: empty dataset");
  if (targets.rows() != n) throw ContractError("train: inputs/targets row mismatch");
  if (targets.cols() != model.output_dim()) {
    throw ContractError("train: target width " + std::to_string(targets.cols()) +
                        " does not match model output width " +
                        std::to_string(model.output_dim()));
  }
  if (config.epochs < 1 || config.batch_size < 1) {
    throw ContractError("train: epochs and batch_size must be >= 1");
  }

  TrainTrace trace;
  trace.loss = config.loss;
  trace.metric = config.metric;
  trace.initial_loss = compute_loss(config.loss, forward(model, inputs), targets);

  std::vector<Tensor*> params = model.parameters();
  AdamState adam;
  if (config.optimizer == OptimizerKind::adam) {
    for (Tensor* p : params) {
      adam.m.emplace_back(p->shape);
      adam.v.emplace_back(p->shape);
    }
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(config.seed);
  const std::size_t bs = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(idx);
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t end = std::min(start + bs, n);
      Tensor xb = gather_rows(inputs, idx, start, end);
      Tensor tb = gather_rows(targets, idx, start, end);
      ForwardTrace tr = forward_trace(model, xb);
      const double batch_loss = compute_loss(config.loss, tr.post.back(), tb);
      std::vector<Tensor> grads = backward_from_trace(model, tr, tb, config.loss);
      optimizer_step(params, grads, config, adam);
      total += batch_loss * static_cast<double>(end - start);
    }
    trace.epoch_loss.push_back(total / static_cast<double>(n));
    trace.epoch_metric.push_back(evaluate(model, inputs, targets, config.metric));
  }
  trace.final_loss = compute_loss(config.loss, forward(model, inputs), targets);
  return trace;
}

double evaluate(const Model& model, const Tensor& inputs, const Tensor& targets,
                MetricKind metric) {
  return compute_metric(metric, forward(model, inputs), targets);
}

}  // namespace mockcheck
