#include "pecs/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace pecs {

void adam_step(ParamRefs& params, const std::vector<double>& grads, AdamState& state,
               const AdamConfig& cfg) {
  const std::size_t n = params.size();
  if (grads.size() != n) throw std::invalid_argument("adam_step: gradient size disagrees");
  if (state.m.empty()) state = AdamState(n);
  if (state.m.size() != n) throw std::invalid_argument("adam_step: state size disagrees");

  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    *params.values[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    if (params.kinds[i] == ParamKind::Rho && *params.values[i] < cfg.rho_min) {
      *params.values[i] = cfg.rho_min;
    }
  }
}

}  // namespace pecs
