#pragma once

#include <cstdint>
#include <vector>

#include "pecs/model.hpp"

namespace pecs {

// First/second moment accumulators, one pair per trainable scalar.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double rho_min = 1e-6;  // step sizes are clamped to stay positive
};

// Standard bias-corrected Adam update over the flat parameter view. Rho
// parameters are clamped to >= rho_min afterwards.
void adam_step(ParamRefs& params, const std::vector<double>& grads, AdamState& state,
               const AdamConfig& cfg);

}  // namespace pecs
