#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pecs/denoiser.hpp"

namespace pecs {

enum class Reg1d : std::uint8_t { Cnn = 0, Tv = 1 };
enum class Reg2d : std::uint8_t { Cnn = 0, Tv = 1, None = 2 };

// Reconstruction pipeline shape. Defaults follow the reference
// configuration: one hybrid-domain iteration, five image-domain iterations,
// five outer 2D steps, shared 1D modules.
struct ReconConfig {
  int hybrid_iters = 1;  // column recoveries in the row-transformed domain
  int image_iters = 5;   // column recoveries in the image domain
  int outer_steps = 5;   // alternating 1D/2D rounds
  Sharing sharing = Sharing::Shared;
  Reg1d regularizer_1d = Reg1d::Cnn;
  double tv_lambda = 0.05;
  Reg2d regularizer_2d = Reg2d::Cnn;
  double tv2d_lambda = 0.05;
  int cnn2d_layers = 5;
  int cnn2d_features = 32;

  void validate() const;  // throws std::invalid_argument
};

// One 1D recovery module: a gradient step of size `step` followed by either
// the learned residual denoiser or the exact TV prox.
struct Module1d {
  Reg1d kind = Reg1d::Cnn;
  Cnn1dWeights cnn;       // used when kind == Cnn (owns its step size rho)
  double tv_lambda = 0.05;  // used when kind == Tv
  double tv_step = 1.0;

  double step() const { return kind == Reg1d::Cnn ? cnn.rho : tv_step; }
};

// All weights of one reconstruction pipeline. Hybrid-domain and image-domain
// modules never share weights with each other. Shared mode stores
// hybrid_iters + image_iters modules reused across outer steps; unshared
// stores one set per outer step. 2D denoisers are always per outer step.
struct ModelBundle {
  std::vector<Module1d> hybrid;
  std::vector<Module1d> image;
  std::vector<Cnn2dWeights> planes;

  std::span<const Module1d> hybrid_for_step(const ReconConfig& cfg, int outer) const;
  std::span<const Module1d> image_for_step(const ReconConfig& cfg, int outer) const;
};

// Throws std::invalid_argument when the bundle's module counts or kinds do
// not match the configuration.
void validate_model(const ReconConfig& cfg, const ModelBundle& model);

// Seeded construction; CNN modules are initialised from per-module sub-seeds
// of `init_seed`, TV modules from the config's lambda.
ModelBundle make_model(const ReconConfig& cfg, std::uint64_t init_seed);

// Binary weight container. Layout (all little-endian):
//   magic "AWT1", u32 version,
//   u32 sharing, u32 hybrid_iters, u32 image_iters, u32 outer_steps,
//   u32 n_1d_modules, u32 n_2d_modules,
//   per 1D module (hybrid modules first, then image modules):
//     3 x { u32 out_ch, u32 in_ch, u32 ksize, f64 weights[out*in*k], f64 bias[out] },
//     f64 leaky_slope, f64 rho  (rho last),
//   per 2D module:
//     u32 n_layers, layers as above (f64 weights[out*in*k*k]), f64 leaky_slope.
// Round-trips are bit-exact. Only CNN-kind modules are serialisable; TV
// bundles are rebuilt from their config instead.
void save_weights(const ModelBundle& model, const ReconConfig& cfg, const std::string& path);

struct LoadedModel {
  ModelBundle model;
  ReconConfig cfg;  // structural fields recovered from the file
};
LoadedModel load_weights(const std::string& path);

// Flat views over every trainable scalar (kernels, biases, rho), in a fixed
// order: hybrid modules, image modules, then 2D planes. `kind` tags each
// scalar for class-wise reporting and the rho clamp.
enum class ParamKind : std::uint8_t { Kernel1d, Bias1d, Rho, Kernel2d, Bias2d };

struct ParamRefs {
  std::vector<double*> values;
  std::vector<ParamKind> kinds;
  std::size_t size() const { return values.size(); }
};

ParamRefs trainable_params(ModelBundle& model);
std::vector<double> flatten_params(const ModelBundle& model);

// Zero-valued bundle with the same shapes, used as a gradient accumulator.
ModelBundle zero_like(const ModelBundle& model);
void accumulate(ModelBundle& acc, const ModelBundle& delta, double scale = 1.0);

}  // namespace pecs
