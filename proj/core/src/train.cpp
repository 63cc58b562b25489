#include "pecs/train.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "pecs/autodiff.hpp"
#include "pecs/metrics.hpp"
#include "pecs/rng.hpp"
#include "pecs/solver.hpp"

namespace pecs {

namespace {

struct SampleGrad {
  double loss = 0.0;
  ModelBundle grads;
};

// Forward + backward for one training sample.
SampleGrad sample_gradient(const ComplexGrid& x0, const Mask1D& mask, const ReconConfig& rc,
                           const ModelBundle& model, const LossWeights& lw) {
  const ComplexGrid y_full = dft2d(x0);
  const ComplexGrid y = apply_mask(y_full, mask);
  ReconTape tape;
  const ComplexGrid xhat = recon_am(y, mask, rc, model, &tape);
  ComplexGrid gx;
  SampleGrad out;
  out.loss = loss_with_grad(x0, y_full, xhat, lw, gx);
  out.grads = backward(tape, rc, model, mask, gx);
  return out;
}

void run_indexed(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = std::min(threads, count);
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// Fisher-Yates with the epoch-specific shuffle stream.
void shuffle_indices(std::vector<int>& idx, std::uint64_t seed) {
  Xoshiro256ss rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
  if (loss.tau_k < 0.0 || loss.tau_p < 0.0 || loss.tau_f < 0.0) {
    throw std::invalid_argument("TrainConfig: loss weights must be >= 0");
  }
}

TrainResult train(const std::vector<ComplexGrid>& train_set,
                  const std::vector<ComplexGrid>& val_set, const std::vector<Mask1D>& masks,
                  const TrainConfig& tc, const ReconConfig& rc, const ModelBundle& init) {
  tc.validate();
  validate_model(rc, init);
  if (train_set.empty() || val_set.empty()) {
    throw std::invalid_argument("train: train and validation splits must be non-empty");
  }
  if (masks.empty()) throw std::invalid_argument("train: need at least one mask");

  TrainResult result;
  result.model = init;
  if (tc.epochs == 0) return result;

  ModelBundle model = init;
  ParamRefs params = trainable_params(model);
  AdamState state(params.size());
  AdamConfig adam{tc.learning_rate, tc.beta1, tc.beta2, tc.epsilon, tc.rho_min};

  auto mask_for = [&](int sample_index) -> const Mask1D& {
    return masks[static_cast<std::size_t>(sample_index) % masks.size()];
  };

  auto validate_pass = [&](double& vloss, double& vpsnr) {
    double loss_acc = 0.0, psnr_acc = 0.0;
    for (std::size_t i = 0; i < val_set.size(); ++i) {
      const ComplexGrid& x0 = val_set[i];
      const Mask1D& mask = mask_for(static_cast<int>(i));
      const ComplexGrid y_full = dft2d(x0);
      const ComplexGrid y = apply_mask(y_full, mask);
      const ComplexGrid xhat = recon_am(y, mask, rc, model);
      loss_acc += loss_value(x0, y_full, xhat, tc.loss);
      psnr_acc += psnr(x0, xhat);
    }
    vloss = loss_acc / static_cast<double>(val_set.size());
    vpsnr = psnr_acc / static_cast<double>(val_set.size());
  };

  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  bool have_best = false;
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    shuffle_indices(order, sub_seed(tc.seed, SeedPurpose::Shuffle, epoch));

    double epoch_loss = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const int count =
          static_cast<int>(std::min<std::size_t>(tc.batch_size, order.size() - start));
      std::vector<SampleGrad> per_sample(count);
      run_indexed(count, tc.threads, [&](int i) {
        const int sample = order[start + i];
        per_sample[i] = sample_gradient(train_set[sample], mask_for(sample), rc, model, tc.loss);
      });

      // fixed-order mean reduction keeps results thread-count independent
      ModelBundle batch_grads = zero_like(model);
      double batch_loss = 0.0;
      for (const auto& s : per_sample) {
        accumulate(batch_grads, s.grads, 1.0 / count);
        batch_loss += s.loss / count;
      }
      std::vector<double> flat = flatten_params(batch_grads);
      adam_step(params, flat, state, adam);
      epoch_loss += batch_loss;
      ++batches;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / std::max(1, batches);
    validate_pass(stats.val_loss, stats.val_psnr);
    result.history.push_back(stats);

    if (!have_best || stats.val_loss < result.best_val_loss) {
      have_best = true;
      result.best_val_loss = stats.val_loss;
      result.best_epoch = epoch;
      result.model = model;
    }
  }
  return result;
}

void save_checkpoint(const TrainResult& result, const TrainConfig& tc, const ReconConfig& rc,
                     const std::string& weights_path, const std::string& sidecar_path) {
  save_weights(result.model, rc, weights_path);

  nlohmann::json j;
  j["weights"] = weights_path;
  j["best_epoch"] = result.best_epoch;
  j["best_val_loss"] = result.best_val_loss;
  j["recon"] = {
      {"hybrid_iters", rc.hybrid_iters},
      {"image_iters", rc.image_iters},
      {"outer_steps", rc.outer_steps},
      {"sharing", rc.sharing == Sharing::Shared ? "shared" : "unshared"},
      {"regularizer_1d", rc.regularizer_1d == Reg1d::Cnn ? "cnn" : "tv"},
      {"regularizer_2d", rc.regularizer_2d == Reg2d::Cnn
                             ? "cnn"
                             : (rc.regularizer_2d == Reg2d::Tv ? "tv" : "none")},
      {"cnn2d_layers", rc.cnn2d_layers},
      {"cnn2d_features", rc.cnn2d_features},
  };
  j["train"] = {
      {"learning_rate", tc.learning_rate}, {"batch_size", tc.batch_size},
      {"epochs", tc.epochs},               {"beta1", tc.beta1},
      {"beta2", tc.beta2},                 {"epsilon", tc.epsilon},
      {"tau_k", tc.loss.tau_k},            {"tau_p", tc.loss.tau_p},
      {"tau_f", tc.loss.tau_f},            {"seed", tc.seed},
      {"rho_min", tc.rho_min},
  };
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& e : result.history) {
    hist.push_back({{"epoch", e.epoch},
                    {"train_loss", e.train_loss},
                    {"val_loss", e.val_loss},
                    {"val_psnr", e.val_psnr}});
  }
  j["history"] = hist;

  std::ofstream out(sidecar_path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + sidecar_path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + sidecar_path);
}

}  // namespace pecs
