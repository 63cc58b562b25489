#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pecs/adam.hpp"
#include "pecs/loss.hpp"
#include "pecs/mask.hpp"
#include "pecs/model.hpp"

namespace pecs {

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 10;
  int epochs = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  LossWeights loss;          // tau_k = 0.1, tau_p = 0.3, tau_f = 0.3
  std::uint64_t seed = 0;    // root seed; shuffling and init derive from it
  double rho_min = 1e-6;
  int threads = 1;           // batch samples processed concurrently

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;  // mean over the epoch's batches
  double val_loss = 0.0;
  double val_psnr = 0.0;    // mean magnitude PSNR on the validation split
};

struct TrainResult {
  ModelBundle model;  // checkpoint with the lowest validation loss
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_val_loss = 0.0;
};

// Mini-batch Adam over the multi-domain l1 objective. Sample i is paired
// with masks[i % masks.size()] (fixed before shuffling). Shuffling is
// deterministic per epoch from the seed; per-sample gradients are reduced in
// sample order, so results are identical for any thread count. epochs = 0
// returns the initial model and an empty history.
TrainResult train(const std::vector<ComplexGrid>& train_set,
                  const std::vector<ComplexGrid>& val_set, const std::vector<Mask1D>& masks,
                  const TrainConfig& tc, const ReconConfig& rc, const ModelBundle& init);

// Checkpoint = weight file + JSON sidecar (config, best epoch, history).
void save_checkpoint(const TrainResult& result, const TrainConfig& tc, const ReconConfig& rc,
                     const std::string& weights_path, const std::string& sidecar_path);

}  // namespace pecs
