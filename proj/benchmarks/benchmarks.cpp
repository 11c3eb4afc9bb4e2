// Microbenchmarks for the numeric kernels: loss evaluation, gradients,
// forward/backward passes, one SGD epoch, and metric aggregation.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "auxlearn/curation.hpp"
#include "auxlearn/loss.hpp"
#include "auxlearn/metrics.hpp"
#include "auxlearn/model.hpp"
#include "auxlearn/synthetic.hpp"

namespace {

using auxlearn::ClassWeights;
using auxlearn::LabeledExample;
using auxlearn::LossKind;
using auxlearn::Vector;

Vector make_probs(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.05, 1.0);
  Vector p(k);
  for (int i = 0; i < k; ++i) p[i] = uniform(rng);
  return p / p.sum();
}

ClassWeights make_weights(int k) {
  Vector ratios = Vector::Ones(k);
  ratios[k - 1] = 8.75;
  return auxlearn::compute_class_weights(ratios);
}

void BM_weighted_loss(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const Vector p = make_probs(k, rng);
  const Vector y = auxlearn::one_hot(0, k);
  const ClassWeights w = make_weights(k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(auxlearn::wcce_loss(p, y, w));
  }
}
BENCHMARK(BM_weighted_loss)->Arg(3)->Arg(16)->Arg(128);

void BM_weighted_grad(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  const Vector p = make_probs(k, rng);
  const Vector y = auxlearn::one_hot(0, k);
  const ClassWeights w = make_weights(k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(auxlearn::wcce_grad(p, y, w));
  }
}
BENCHMARK(BM_weighted_grad)->Arg(3)->Arg(16)->Arg(128);

void BM_softmax(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uniform(-4.0, 4.0);
  Vector logits(k);
  for (int i = 0; i < k; ++i) logits[i] = uniform(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(auxlearn::softmax(logits));
  }
}
BENCHMARK(BM_softmax)->Arg(3)->Arg(128)->Arg(1024);

void BM_forward(benchmark::State& state) {
  const auto model = auxlearn::init_model(
      {2, static_cast<int>(state.range(0)), 3}, auxlearn::Activation::Tanh, 7);
  Vector x(2);
  x << 0.4, -0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(auxlearn::forward(model, x));
  }
}
BENCHMARK(BM_forward)->Arg(32)->Arg(256);

void BM_backward(benchmark::State& state) {
  const auto model = auxlearn::init_model(
      {2, static_cast<int>(state.range(0)), 3}, auxlearn::Activation::Tanh, 7);
  Vector x(2);
  x << 0.4, -0.3;
  const Vector y = auxlearn::one_hot(1, 3);
  const ClassWeights w = make_weights(3);
  const auto cache = auxlearn::forward_cached(model, x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        auxlearn::backward(model, cache, y, LossKind::Wcce, &w));
  }
}
BENCHMARK(BM_backward)->Arg(32)->Arg(256);

void BM_train_epoch(benchmark::State& state) {
  auxlearn::SyntheticSpec spec;
  spec.feature_dim = 2;
  const auto centers = auxlearn::blob_circle_centers(2, 2, 0.6);
  spec.known = {auxlearn::BlobClassSpec{"cat", centers[0], 0.06, 128},
                auxlearn::BlobClassSpec{"dog", centers[1], 0.06, 128}};
  spec.others.count = 1120;
  const auto corpus = auxlearn::generate_synthetic_dataset(spec, 11);

  auxlearn::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.loss_kind = LossKind::Wcce;
  cfg.class_weights = make_weights(3);
  for (auto _ : state) {
    state.PauseTiming();
    auto model = auxlearn::init_model({2, 32, 3}, auxlearn::Activation::Tanh, 5);
    state.ResumeTiming();
    benchmark::DoNotOptimize(
        auxlearn::train(model, corpus.data.examples, cfg));
  }
}
BENCHMARK(BM_train_epoch)->Unit(benchmark::kMillisecond);

void BM_confusion_matrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(13);
  std::vector<int> truth(n), pred(n);
  for (int i = 0; i < n; ++i) {
    truth[i] = static_cast<int>(rng() % 5);
    pred[i] = static_cast<int>(rng() % 5);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(auxlearn::confusion_matrix(truth, pred, 5));
  }
}
BENCHMARK(BM_confusion_matrix)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
