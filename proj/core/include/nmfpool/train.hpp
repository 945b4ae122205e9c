#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nmfpool/dataset.hpp"
#include "nmfpool/graph.hpp"
#include "nmfpool/layers.hpp"

namespace nmfpool {

struct ModelConfig {
  enum class ConvKind { kGcn, kCheb };

  int conv_layers = 1;   // 1..3
  int pool_layers = 0;   // 0..2; conv_layers == pool_layers + 1 when pooling
  int hidden_dim = 64;   // one of {16, 32, 64, 128}
  std::vector<int> pool_ks;
  ConvKind conv_kind = ConvKind::kGcn;
  int cheb_order = 3;  // K, used when conv_kind == kCheb
  FeatureSpec feature_spec;
  double lr0 = 0.1;
  double lr_decay = 0.1;
  int patience = 10;
  int max_epochs = 200;
  int batch_size = 32;
  std::uint64_t seed = 0;
  bool renormalize_pooled = false;
  double val_fraction = 0.1;
  double min_lr = 1e-4;
  int nmf_max_iters = 200;
  double nmf_rel_tol = 1e-4;
};

// Ordered alternation of convolutions and pooling layers, plus the linear
// classifier head (the only biased layer).
struct LayerStack {
  enum class LayerKind { kGc, kCheb, kPool };
  struct Layer {
    LayerKind kind = LayerKind::kGc;
    GcParams gc;
    ChebParams cheb;
    int pool_k = 0;
  };

  std::vector<Layer> layers;
  DenseMatrix cls_w;  // hidden x C
  DenseMatrix cls_b;  // 1 x C
  DenseMatrix grad_cls_w;
  DenseMatrix grad_cls_b;
  int num_classes = 0;
  int input_dim = 0;

  void zero_grads();
  void for_each_param(const std::function<void(DenseMatrix&, DenseMatrix&)>& fn);
  std::size_t parameter_count() const;
  std::vector<DenseMatrix> snapshot() const;
  void restore(const std::vector<DenseMatrix>& snap);
};

struct GraphForward {
  DenseMatrix logits;  // 1 x C
  struct Activation {
    LayerStack::LayerKind kind;
    GcCache gc;
    ChebCache cheb;
    PoolTrace pool;
  };
  std::vector<Activation> acts;
  DenseMatrix embedding;       // readout output, 1 x hidden
  std::size_t readout_nodes = 0;  // node count entering the readout
};

struct FoldMetrics {
  double test_accuracy = 0.0;
  int epochs_run = 0;
  int best_epoch = 0;
  double seconds = 0.0;
  std::vector<double> train_curve;
  std::vector<double> val_curve;
};

struct TrainReport {
  std::string dataset;
  ModelConfig config_echo;
  std::vector<FoldMetrics> per_fold;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population std over folds
};

// Holds cfg checks in one place; throws listing every violation.
void validate_config(const ModelConfig& cfg);

LayerStack build_model(const ModelConfig& cfg, int num_classes, int input_dim);

// Per-graph forward over the normalized adjacency; graph_id seeds the pooling
// factorizations so every pass over the same graph is reproducible.
GraphForward forward_graph(const LayerStack& stack, const Graph& g,
                           const ModelConfig& cfg, int graph_id);

// Accumulates parameter gradients from d_logits through the whole stack.
void backward_graph(LayerStack& stack, const GraphForward& fwd,
                    const DenseMatrix& d_logits);

FoldMetrics train_fold(const DatasetBundle& bundle, const FoldPlan& plan, int fold,
                       const ModelConfig& cfg);

TrainReport cross_validate(const DatasetBundle& bundle, const ModelConfig& cfg,
                           int n_folds = 3, int jobs = 1);

// Central finite differences over every learnable scalar; returns the worst
// relative error. corrupt_grads doubles the analytic gradients (self-test).
double gradcheck_model(const ModelConfig& cfg, const Graph& toy_graph,
                       int num_classes, double step = 1e-6,
                       bool corrupt_grads = false);

}  // namespace nmfpool
