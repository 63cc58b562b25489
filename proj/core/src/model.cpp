#include "pecs/model.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "pecs/rng.hpp"

namespace pecs {

namespace {

constexpr char kMagic[4] = {'A', 'W', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), 4);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint32_t read_u32(std::istream& in, const std::string& what) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw std::runtime_error("load_weights: truncated while reading " + what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in, const std::string& what) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw std::runtime_error("load_weights: truncated while reading " + what);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

void write_conv1d(std::ostream& out, const Conv1d& c) {
  write_u32(out, static_cast<std::uint32_t>(c.out_ch));
  write_u32(out, static_cast<std::uint32_t>(c.in_ch));
  write_u32(out, static_cast<std::uint32_t>(c.ksize));
  for (double v : c.w) write_f64(out, v);
  for (double v : c.b) write_f64(out, v);
}

Conv1d read_conv1d(std::istream& in) {
  const int out_ch = static_cast<int>(read_u32(in, "conv out_ch"));
  const int in_ch = static_cast<int>(read_u32(in, "conv in_ch"));
  const int ksize = static_cast<int>(read_u32(in, "conv ksize"));
  Conv1d c = make_conv1d(out_ch, in_ch, ksize);
  for (auto& v : c.w) v = read_f64(in, "conv weight");
  for (auto& v : c.b) v = read_f64(in, "conv bias");
  return c;
}

void write_conv2d(std::ostream& out, const Conv2d& c) {
  write_u32(out, static_cast<std::uint32_t>(c.out_ch));
  write_u32(out, static_cast<std::uint32_t>(c.in_ch));
  write_u32(out, static_cast<std::uint32_t>(c.ksize));
  for (double v : c.w) write_f64(out, v);
  for (double v : c.b) write_f64(out, v);
}

Conv2d read_conv2d(std::istream& in) {
  const int out_ch = static_cast<int>(read_u32(in, "conv2d out_ch"));
  const int in_ch = static_cast<int>(read_u32(in, "conv2d in_ch"));
  const int ksize = static_cast<int>(read_u32(in, "conv2d ksize"));
  Conv2d c = make_conv2d(out_ch, in_ch, ksize);
  for (auto& v : c.w) v = read_f64(in, "conv2d weight");
  for (auto& v : c.b) v = read_f64(in, "conv2d bias");
  return c;
}

int expected_1d_count(const ReconConfig& cfg) {
  const int per_step = cfg.hybrid_iters + cfg.image_iters;
  return cfg.sharing == Sharing::Shared ? per_step : per_step * cfg.outer_steps;
}

}  // namespace

void ReconConfig::validate() const {
  if (hybrid_iters < 0 || image_iters < 0 || outer_steps < 0) {
    throw std::invalid_argument("ReconConfig: iteration counts must be >= 0");
  }
  if (regularizer_1d == Reg1d::Tv && tv_lambda <= 0.0) {
    throw std::invalid_argument("ReconConfig: tv_lambda must be > 0");
  }
  if (regularizer_2d == Reg2d::Tv && tv2d_lambda <= 0.0) {
    throw std::invalid_argument("ReconConfig: tv2d_lambda must be > 0");
  }
  if (regularizer_2d == Reg2d::Cnn && (cnn2d_layers < 1 || cnn2d_features < 1)) {
    throw std::invalid_argument("ReconConfig: cnn2d shape must be positive");
  }
}

std::span<const Module1d> ModelBundle::hybrid_for_step(const ReconConfig& cfg,
                                                       int outer) const {
  if (cfg.sharing == Sharing::Shared) return {hybrid.data(), hybrid.size()};
  return {hybrid.data() + static_cast<std::size_t>(outer) * cfg.hybrid_iters,
          static_cast<std::size_t>(cfg.hybrid_iters)};
}

std::span<const Module1d> ModelBundle::image_for_step(const ReconConfig& cfg,
                                                      int outer) const {
  if (cfg.sharing == Sharing::Shared) return {image.data(), image.size()};
  return {image.data() + static_cast<std::size_t>(outer) * cfg.image_iters,
          static_cast<std::size_t>(cfg.image_iters)};
}

void validate_model(const ReconConfig& cfg, const ModelBundle& model) {
  cfg.validate();
  const int mult = cfg.sharing == Sharing::Shared ? 1 : cfg.outer_steps;
  const std::size_t want_hybrid = static_cast<std::size_t>(cfg.hybrid_iters) * mult;
  const std::size_t want_image = static_cast<std::size_t>(cfg.image_iters) * mult;
  if (model.hybrid.size() != want_hybrid || model.image.size() != want_image) {
    throw std::invalid_argument(
        "validate_model: bundle holds " + std::to_string(model.hybrid.size()) + "+" +
        std::to_string(model.image.size()) + " 1D modules, config wants " +
        std::to_string(want_hybrid) + "+" + std::to_string(want_image));
  }
  const std::size_t want_planes =
      cfg.regularizer_2d == Reg2d::Cnn ? static_cast<std::size_t>(cfg.outer_steps) : 0;
  if (model.planes.size() != want_planes) {
    throw std::invalid_argument("validate_model: bundle holds " +
                                std::to_string(model.planes.size()) +
                                " 2D denoisers, config wants " + std::to_string(want_planes));
  }
  for (const auto& mods : {model.hybrid, model.image}) {
    for (const auto& m : mods) {
      if (m.kind != cfg.regularizer_1d) {
        throw std::invalid_argument("validate_model: module kind disagrees with config");
      }
    }
  }
}

ModelBundle make_model(const ReconConfig& cfg, std::uint64_t init_seed) {
  cfg.validate();
  ModelBundle model;
  const int mult = cfg.sharing == Sharing::Shared ? 1 : cfg.outer_steps;
  std::uint64_t module_index = 0;
  auto next_module = [&](Reg1d kind) {
    Module1d m;
    m.kind = kind;
    if (kind == Reg1d::Cnn) {
      m.cnn = init_cnn1d(sub_seed(init_seed, SeedPurpose::Init, module_index));
    } else {
      m.tv_lambda = cfg.tv_lambda;
      m.tv_step = 1.0;
    }
    ++module_index;
    return m;
  };
  for (int i = 0; i < cfg.hybrid_iters * mult; ++i) {
    model.hybrid.push_back(next_module(cfg.regularizer_1d));
  }
  for (int i = 0; i < cfg.image_iters * mult; ++i) {
    model.image.push_back(next_module(cfg.regularizer_1d));
  }
  if (cfg.regularizer_2d == Reg2d::Cnn) {
    for (int i = 0; i < cfg.outer_steps; ++i) {
      model.planes.push_back(init_cnn2d(cfg.cnn2d_layers, cfg.cnn2d_features,
                                        sub_seed(init_seed, SeedPurpose::Init, module_index)));
      ++module_index;
    }
  }
  return model;
}

void save_weights(const ModelBundle& model, const ReconConfig& cfg, const std::string& path) {
  for (const auto& mods : {model.hybrid, model.image}) {
    for (const auto& m : mods) {
      if (m.kind != Reg1d::Cnn) {
        throw std::invalid_argument("save_weights: only CNN modules are serialisable");
      }
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_weights: cannot open " + path);
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(cfg.sharing));
  write_u32(out, static_cast<std::uint32_t>(cfg.hybrid_iters));
  write_u32(out, static_cast<std::uint32_t>(cfg.image_iters));
  write_u32(out, static_cast<std::uint32_t>(cfg.outer_steps));
  write_u32(out, static_cast<std::uint32_t>(model.hybrid.size() + model.image.size()));
  write_u32(out, static_cast<std::uint32_t>(model.planes.size()));
  auto write_module = [&](const Module1d& m) {
    write_conv1d(out, m.cnn.l1);
    write_conv1d(out, m.cnn.l2);
    write_conv1d(out, m.cnn.l3);
    write_f64(out, m.cnn.leaky_slope);
    write_f64(out, m.cnn.rho);
  };
  for (const auto& m : model.hybrid) write_module(m);
  for (const auto& m : model.image) write_module(m);
  for (const auto& plane : model.planes) {
    write_u32(out, static_cast<std::uint32_t>(plane.layers.size()));
    for (const auto& layer : plane.layers) write_conv2d(out, layer);
    write_f64(out, plane.leaky_slope);
  }
  if (!out) throw std::runtime_error("save_weights: write failed for " + path);
}

LoadedModel load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_weights: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("load_weights: bad magic in " + path);
  }
  const std::uint32_t version = read_u32(in, "version");
  if (version != kVersion) {
    throw std::runtime_error("load_weights: unsupported version " + std::to_string(version));
  }

  LoadedModel loaded;
  ReconConfig& cfg = loaded.cfg;
  cfg.sharing = static_cast<Sharing>(read_u32(in, "sharing"));
  cfg.hybrid_iters = static_cast<int>(read_u32(in, "hybrid_iters"));
  cfg.image_iters = static_cast<int>(read_u32(in, "image_iters"));
  cfg.outer_steps = static_cast<int>(read_u32(in, "outer_steps"));
  const std::uint32_t n1d = read_u32(in, "n_1d_modules");
  const std::uint32_t n2d = read_u32(in, "n_2d_modules");
  if (n1d != static_cast<std::uint32_t>(expected_1d_count(cfg))) {
    throw std::runtime_error("load_weights: module count disagrees with header shape");
  }

  const int mult = cfg.sharing == Sharing::Shared ? 1 : cfg.outer_steps;
  auto read_module = [&]() {
    Module1d m;
    m.kind = Reg1d::Cnn;
    m.cnn.l1 = read_conv1d(in);
    m.cnn.l2 = read_conv1d(in);
    m.cnn.l3 = read_conv1d(in);
    m.cnn.leaky_slope = read_f64(in, "leaky_slope");
    m.cnn.rho = read_f64(in, "rho");
    return m;
  };
  for (int i = 0; i < cfg.hybrid_iters * mult; ++i) loaded.model.hybrid.push_back(read_module());
  for (int i = 0; i < cfg.image_iters * mult; ++i) loaded.model.image.push_back(read_module());
  for (std::uint32_t i = 0; i < n2d; ++i) {
    Cnn2dWeights plane;
    const std::uint32_t n_layers = read_u32(in, "n_layers");
    for (std::uint32_t l = 0; l < n_layers; ++l) plane.layers.push_back(read_conv2d(in));
    plane.leaky_slope = read_f64(in, "2d leaky_slope");
    loaded.model.planes.push_back(std::move(plane));
  }
  cfg.regularizer_1d = Reg1d::Cnn;
  cfg.regularizer_2d = n2d > 0 ? Reg2d::Cnn : Reg2d::None;
  if (n2d > 0 && !loaded.model.planes.empty() && !loaded.model.planes[0].layers.empty()) {
    cfg.cnn2d_layers = static_cast<int>(loaded.model.planes[0].layers.size());
    cfg.cnn2d_features = loaded.model.planes[0].layers[0].out_ch;
  }
  return loaded;
}

ParamRefs trainable_params(ModelBundle& model) {
  ParamRefs refs;
  auto add = [&refs](double* p, ParamKind k) {
    refs.values.push_back(p);
    refs.kinds.push_back(k);
  };
  auto add_module = [&](Module1d& m) {
    if (m.kind != Reg1d::Cnn) return;  // TV modules carry no trainable scalars
    for (Conv1d* layer : {&m.cnn.l1, &m.cnn.l2, &m.cnn.l3}) {
      for (auto& v : layer->w) add(&v, ParamKind::Kernel1d);
      for (auto& v : layer->b) add(&v, ParamKind::Bias1d);
    }
    add(&m.cnn.rho, ParamKind::Rho);
  };
  for (auto& m : model.hybrid) add_module(m);
  for (auto& m : model.image) add_module(m);
  for (auto& plane : model.planes) {
    for (auto& layer : plane.layers) {
      for (auto& v : layer.w) add(&v, ParamKind::Kernel2d);
      for (auto& v : layer.b) add(&v, ParamKind::Bias2d);
    }
  }
  return refs;
}

std::vector<double> flatten_params(const ModelBundle& model) {
  ParamRefs refs = trainable_params(const_cast<ModelBundle&>(model));
  std::vector<double> out(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) out[i] = *refs.values[i];
  return out;
}

ModelBundle zero_like(const ModelBundle& model) {
  ModelBundle z = model;
  ParamRefs refs = trainable_params(z);
  for (double* p : refs.values) *p = 0.0;
  return z;
}

void accumulate(ModelBundle& acc, const ModelBundle& delta, double scale) {
  ParamRefs a = trainable_params(acc);
  ParamRefs d = trainable_params(const_cast<ModelBundle&>(delta));
  if (a.size() != d.size()) {
    throw std::invalid_argument("accumulate: bundle shapes disagree");
  }
  for (std::size_t i = 0; i < a.size(); ++i) *a.values[i] += scale * *d.values[i];
}

}  // namespace pecs
