#include "nmfpool/train.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace nmfpool {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(seed ^ splitmix64(a + 1) ^ splitmix64((b + 1) << 20));
}

DenseMatrix glorot_uniform(std::size_t fan_in, std::size_t fan_out,
                           std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> unif(-limit, limit);
  DenseMatrix m(fan_in, fan_out);
  for (double& v : m.values()) v = unif(rng);
  return m;
}

}  // namespace

void LayerStack::zero_grads() {
  for_each_param([](DenseMatrix&, DenseMatrix& grad) {
    std::fill(grad.values().begin(), grad.values().end(), 0.0);
  });
}

void LayerStack::for_each_param(
    const std::function<void(DenseMatrix&, DenseMatrix&)>& fn) {
  for (Layer& layer : layers) {
    switch (layer.kind) {
      case LayerKind::kGc:
        fn(layer.gc.theta, layer.gc.grad_theta);
        break;
      case LayerKind::kCheb:
        for (std::size_t k = 0; k < layer.cheb.thetas.size(); ++k) {
          fn(layer.cheb.thetas[k], layer.cheb.grad_thetas[k]);
        }
        break;
      case LayerKind::kPool:
        break;  // no learnable parameters
    }
  }
  fn(cls_w, grad_cls_w);
  fn(cls_b, grad_cls_b);
}

std::size_t LayerStack::parameter_count() const {
  std::size_t count = 0;
  const_cast<LayerStack*>(this)->for_each_param(
      [&count](DenseMatrix& value, DenseMatrix&) { count += value.size(); });
  return count;
}

std::vector<DenseMatrix> LayerStack::snapshot() const {
  std::vector<DenseMatrix> snap;
  const_cast<LayerStack*>(this)->for_each_param(
      [&snap](DenseMatrix& value, DenseMatrix&) { snap.push_back(value); });
  return snap;
}

void LayerStack::restore(const std::vector<DenseMatrix>& snap) {
  std::size_t i = 0;
  for_each_param([&](DenseMatrix& value, DenseMatrix&) { value = snap[i++]; });
}

void validate_config(const ModelConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.conv_layers < 1 || cfg.conv_layers > 3) {
    problems.push_back("conv_layers must be in {1,2,3}");
  }
  if (cfg.pool_layers < 0 || cfg.pool_layers > 2) {
    problems.push_back("pool_layers must be in {0,1,2}");
  }
  if (cfg.pool_layers > 0 && cfg.conv_layers != cfg.pool_layers + 1) {
    problems.push_back("conv_layers must equal pool_layers + 1 when pooling");
  }
  if (cfg.hidden_dim != 16 && cfg.hidden_dim != 32 && cfg.hidden_dim != 64 &&
      cfg.hidden_dim != 128) {
    problems.push_back("hidden_dim must be one of {16,32,64,128}");
  }
  if (static_cast<int>(cfg.pool_ks.size()) != cfg.pool_layers) {
    problems.push_back("pool_ks length must equal pool_layers");
  }
  if (cfg.pool_ks.size() == 2 && cfg.pool_ks[0] <= cfg.pool_ks[1]) {
    problems.push_back("pool_ks must be strictly decreasing");
  }
  for (int k : cfg.pool_ks) {
    if (k < 1) problems.push_back("every pool size must be >= 1");
  }
  if (cfg.conv_kind == ModelConfig::ConvKind::kCheb && cfg.cheb_order < 1) {
    problems.push_back("cheb_order must be >= 1");
  }
  if (cfg.batch_size < 1) problems.push_back("batch_size must be >= 1");
  if (cfg.max_epochs < 1) problems.push_back("max_epochs must be >= 1");
  if (!problems.empty()) {
    std::string msg = "invalid model config:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw std::invalid_argument(msg);
  }
}

LayerStack build_model(const ModelConfig& cfg, int num_classes, int input_dim) {
  validate_config(cfg);
  if (num_classes < 2) throw std::invalid_argument("build_model: need >= 2 classes");
  if (input_dim < 1) throw std::invalid_argument("build_model: input_dim must be >= 1");

  std::mt19937_64 rng(cfg.seed);
  const std::size_t h = static_cast<std::size_t>(cfg.hidden_dim);

  LayerStack stack;
  stack.num_classes = num_classes;
  stack.input_dim = input_dim;

  auto make_conv = [&](std::size_t d_in, std::size_t d_out) {
    LayerStack::Layer layer;
    if (cfg.conv_kind == ModelConfig::ConvKind::kGcn) {
      layer.kind = LayerStack::LayerKind::kGc;
      layer.gc.theta = glorot_uniform(d_in, d_out, rng);
      layer.gc.grad_theta = DenseMatrix(d_in, d_out);
    } else {
      layer.kind = LayerStack::LayerKind::kCheb;
      for (int k = 0; k < cfg.cheb_order; ++k) {
        layer.cheb.thetas.push_back(glorot_uniform(d_in, d_out, rng));
        layer.cheb.grad_thetas.emplace_back(d_in, d_out);
      }
    }
    return layer;
  };

  stack.layers.push_back(make_conv(static_cast<std::size_t>(input_dim), h));
  for (int i = 1; i < cfg.conv_layers; ++i) {
    if (cfg.pool_layers > 0) {
      LayerStack::Layer pool;
      pool.kind = LayerStack::LayerKind::kPool;
      pool.pool_k = cfg.pool_ks[static_cast<std::size_t>(i - 1)];
      stack.layers.push_back(pool);
    }
    stack.layers.push_back(make_conv(h, h));
  }

  stack.cls_w = glorot_uniform(h, static_cast<std::size_t>(num_classes), rng);
  stack.cls_b = DenseMatrix(1, static_cast<std::size_t>(num_classes));
  stack.grad_cls_w = DenseMatrix(h, static_cast<std::size_t>(num_classes));
  stack.grad_cls_b = DenseMatrix(1, static_cast<std::size_t>(num_classes));
  return stack;
}

GraphForward forward_graph(const LayerStack& stack, const Graph& g,
                           const ModelConfig& cfg, int graph_id) {
  DenseMatrix a = normalize_adjacency(adjacency(g));
  DenseMatrix z = node_features(g, cfg.feature_spec);

  GraphForward fwd;
  for (std::size_t li = 0; li < stack.layers.size(); ++li) {
    const auto& layer = stack.layers[li];
    GraphForward::Activation act;
    act.kind = layer.kind;
    switch (layer.kind) {
      case LayerStack::LayerKind::kGc: {
        GcForward out = gc_forward(a, z, layer.gc);
        z = std::move(out.z_out);
        act.gc = std::move(out.cache);
        break;
      }
      case LayerStack::LayerKind::kCheb: {
        const ScaledLaplacianResult lap = scaled_laplacian(a);
        ChebForward out = cheb_forward(lap.l_hat, z, layer.cheb);
        z = std::move(out.z_out);
        act.cheb = std::move(out.cache);
        break;
      }
      case LayerStack::LayerKind::kPool: {
        NmfConfig nmf_cfg;
        nmf_cfg.max_iters = cfg.nmf_max_iters;
        nmf_cfg.rel_tol = cfg.nmf_rel_tol;
        nmf_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(graph_id), li);
        PoolForward out = nmfpool_forward(a, z, layer.pool_k, nmf_cfg);
        a = cfg.renormalize_pooled ? normalize_adjacency(out.a_next) : out.a_next;
        z = std::move(out.z_next);
        act.pool = std::move(out.trace);
        break;
      }
    }
    fwd.acts.push_back(std::move(act));
  }

  fwd.readout_nodes = z.rows();
  fwd.embedding = readout_mean(z);
  fwd.logits = add(matmul(fwd.embedding, stack.cls_w), stack.cls_b);
  return fwd;
}

void backward_graph(LayerStack& stack, const GraphForward& fwd,
                    const DenseMatrix& d_logits) {
  stack.grad_cls_w = add(stack.grad_cls_w, matmul(transpose(fwd.embedding), d_logits));
  stack.grad_cls_b = add(stack.grad_cls_b, d_logits);
  DenseMatrix d_emb = matmul(d_logits, transpose(stack.cls_w));
  DenseMatrix d_z = readout_backward(fwd.readout_nodes, d_emb);

  for (std::size_t li = stack.layers.size(); li-- > 0;) {
    auto& layer = stack.layers[li];
    const auto& act = fwd.acts[li];
    switch (layer.kind) {
      case LayerStack::LayerKind::kGc:
        d_z = gc_backward(act.gc, d_z, layer.gc).d_z;
        break;
      case LayerStack::LayerKind::kCheb:
        d_z = cheb_backward(act.cheb, d_z, layer.cheb);
        break;
      case LayerStack::LayerKind::kPool:
        d_z = nmfpool_backward(act.pool, d_z);
        break;
    }
  }
}

namespace {

double graph_loss_and_grads(LayerStack& stack, const Graph& g, const ModelConfig& cfg,
                            int graph_id, bool accumulate) {
  const GraphForward fwd = forward_graph(stack, g, cfg, graph_id);
  const SoftmaxResult sm = row_softmax_cross_entropy(
      fwd.logits, static_cast<std::size_t>(g.graph_label));
  if (accumulate) backward_graph(stack, fwd, sm.grad);
  return sm.loss;
}

double mean_loss(LayerStack& stack, const DatasetBundle& bundle,
                 const std::vector<int>& indices, const ModelConfig& cfg) {
  if (indices.empty()) return 0.0;
  double total = 0.0;
  for (int idx : indices) {
    total += graph_loss_and_grads(stack, bundle.graphs[static_cast<std::size_t>(idx)],
                                  cfg, idx, false);
  }
  return total / static_cast<double>(indices.size());
}

double accuracy(LayerStack& stack, const DatasetBundle& bundle,
                const std::vector<int>& indices, const ModelConfig& cfg) {
  if (indices.empty()) return 0.0;
  int correct = 0;
  for (int idx : indices) {
    const Graph& g = bundle.graphs[static_cast<std::size_t>(idx)];
    const GraphForward fwd = forward_graph(stack, g, cfg, idx);
    std::size_t best = 0;
    for (std::size_t c = 1; c < fwd.logits.cols(); ++c) {
      if (fwd.logits(0, c) > fwd.logits(0, best)) best = c;
    }
    if (static_cast<int>(best) == g.graph_label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

}  // namespace

FoldMetrics train_fold(const DatasetBundle& bundle, const FoldPlan& plan, int fold,
                       const ModelConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();

  const std::vector<int> train = fold_train_indices(bundle, plan, fold);
  const std::vector<int>& val = plan.val_holdout[static_cast<std::size_t>(fold)];
  const std::vector<int>& test = plan.folds[static_cast<std::size_t>(fold)];
  if (train.empty()) throw std::invalid_argument("train_fold: empty training split");

  const int input_dim = static_cast<int>(
      node_features(bundle.graphs[static_cast<std::size_t>(train[0])], cfg.feature_spec)
          .cols());
  ModelConfig fold_cfg = cfg;
  fold_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(fold), 3);
  LayerStack stack = build_model(fold_cfg, bundle.num_classes, input_dim);

  std::mt19937_64 shuffle_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(fold), 7));
  std::vector<int> order = train;

  FoldMetrics metrics;
  double lr = cfg.lr0;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<DenseMatrix> best_params = stack.snapshot();
  int stale_epochs = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      stack.zero_grads();
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        batch_loss += graph_loss_and_grads(
            stack, bundle.graphs[static_cast<std::size_t>(order[i])], fold_cfg,
            order[i], true);
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      stack.for_each_param([&](DenseMatrix& value, DenseMatrix& grad) {
        for (std::size_t j = 0; j < value.size(); ++j) {
          value.values()[j] -= lr * inv * grad.values()[j];
        }
      });
      epoch_loss += batch_loss;
    }
    metrics.train_curve.push_back(epoch_loss / static_cast<double>(order.size()));

    // Empty holdouts (tiny datasets) fall back to training loss as the signal.
    const double val_loss = val.empty() ? metrics.train_curve.back()
                                        : mean_loss(stack, bundle, val, fold_cfg);
    metrics.val_curve.push_back(val_loss);
    metrics.epochs_run = epoch + 1;

    if (val_loss < best_val - 1e-4) {
      best_val = val_loss;
      best_params = stack.snapshot();
      metrics.best_epoch = epoch + 1;
      stale_epochs = 0;
    } else {
      ++stale_epochs;
      if (stale_epochs >= cfg.patience) {
        lr *= cfg.lr_decay;
        stale_epochs = 0;
        if (lr < cfg.min_lr) break;
      }
    }
  }

  stack.restore(best_params);
  metrics.test_accuracy = accuracy(stack, bundle, test, fold_cfg);
  metrics.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();
  return metrics;
}

TrainReport cross_validate(const DatasetBundle& bundle, const ModelConfig& cfg,
                           int n_folds, int jobs) {
  validate_config(cfg);
  const FoldPlan plan = stratified_folds(bundle, n_folds, cfg.seed, cfg.val_fraction);

  TrainReport report;
  report.dataset = bundle.name;
  report.config_echo = cfg;
  report.per_fold.resize(static_cast<std::size_t>(n_folds));

  if (jobs <= 1) {
    for (int f = 0; f < n_folds; ++f) {
      report.per_fold[static_cast<std::size_t>(f)] = train_fold(bundle, plan, f, cfg);
    }
  } else {
    std::vector<std::thread> workers;
    std::atomic<int> next{0};
    for (int w = 0; w < std::min(jobs, n_folds); ++w) {
      workers.emplace_back([&] {
        for (int f = next.fetch_add(1); f < n_folds; f = next.fetch_add(1)) {
          report.per_fold[static_cast<std::size_t>(f)] = train_fold(bundle, plan, f, cfg);
        }
      });
    }
    for (auto& t : workers) t.join();
  }

  double mean = 0.0;
  for (const auto& fm : report.per_fold) mean += fm.test_accuracy;
  mean /= static_cast<double>(n_folds);
  double var = 0.0;
  for (const auto& fm : report.per_fold) {
    var += (fm.test_accuracy - mean) * (fm.test_accuracy - mean);
  }
  report.mean_accuracy = mean;
  report.std_accuracy = std::sqrt(var / static_cast<double>(n_folds));
  return report;
}

double gradcheck_model(const ModelConfig& cfg, const Graph& toy_graph, int num_classes,
                       double step, bool corrupt_grads) {
  const int input_dim =
      static_cast<int>(node_features(toy_graph, cfg.feature_spec).cols());
  LayerStack stack = build_model(cfg, num_classes, input_dim);

  stack.zero_grads();
  graph_loss_and_grads(stack, toy_graph, cfg, 0, true);

  std::vector<DenseMatrix*> values;
  std::vector<DenseMatrix*> grads;
  stack.for_each_param([&](DenseMatrix& value, DenseMatrix& grad) {
    values.push_back(&value);
    grads.push_back(&grad);
  });

  double max_err = 0.0;
  for (std::size_t p = 0; p < values.size(); ++p) {
    for (std::size_t j = 0; j < values[p]->size(); ++j) {
      double& slot = values[p]->values()[j];
      const double saved = slot;
      slot = saved + step;
      const double plus = graph_loss_and_grads(stack, toy_graph, cfg, 0, false);
      slot = saved - step;
      const double minus = graph_loss_and_grads(stack, toy_graph, cfg, 0, false);
      slot = saved;

      const double numeric = (plus - minus) / (2.0 * step);
      double analytic = grads[p]->values()[j];
      if (corrupt_grads) analytic *= 2.0;

      const double mag = std::max(std::abs(analytic), std::abs(numeric));
      // The central difference resolves the gradient to roughly
      // eps_machine * |loss| / step ~ 1e-10, so relative error is only
      // meaningful well above that floor; below it, compare absolutely.
      const double err = mag >= 1e-4 ? std::abs(analytic - numeric) / mag
                                     : std::abs(analytic - numeric);
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

}  // namespace nmfpool
