#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "pecs/model.hpp"

using namespace pecs;

namespace {

ReconConfig small_cnn_cfg() {
  ReconConfig cfg;
  cfg.hybrid_iters = 1;
  cfg.image_iters = 2;
  cfg.outer_steps = 2;
  cfg.cnn2d_layers = 3;
  cfg.cnn2d_features = 4;
  return cfg;
}

}  // namespace

TEST_CASE("make_model produces counts matching the configuration") {
  ReconConfig cfg = small_cnn_cfg();
  ModelBundle shared = make_model(cfg, 11);
  CHECK(shared.hybrid.size() == 1);
  CHECK(shared.image.size() == 2);
  CHECK(shared.planes.size() == 2);
  validate_model(cfg, shared);

  cfg.sharing = Sharing::Unshared;
  ModelBundle unshared = make_model(cfg, 11);
  CHECK(unshared.hybrid.size() == 2);
  CHECK(unshared.image.size() == 4);
  validate_model(cfg, unshared);

  // distinct modules get distinct sub-seeded weights
  CHECK(unshared.hybrid[0].cnn.l1.w != unshared.hybrid[1].cnn.l1.w);
}

TEST_CASE("validate_model rejects mismatched bundles before any compute") {
  ReconConfig cfg = small_cnn_cfg();
  ModelBundle model = make_model(cfg, 3);
  model.image.pop_back();
  CHECK_THROWS_AS(validate_model(cfg, model), std::invalid_argument);

  ModelBundle wrong_kind = make_model(cfg, 3);
  wrong_kind.hybrid[0].kind = Reg1d::Tv;
  CHECK_THROWS_AS(validate_model(cfg, wrong_kind), std::invalid_argument);

  ReconConfig tv_cfg = small_cnn_cfg();
  tv_cfg.regularizer_1d = Reg1d::Tv;
  tv_cfg.regularizer_2d = Reg2d::None;
  ModelBundle tv_model = make_model(tv_cfg, 0);
  validate_model(tv_cfg, tv_model);
  CHECK(tv_model.planes.empty());
  CHECK(tv_model.hybrid[0].tv_lambda == tv_cfg.tv_lambda);
}

TEST_CASE("weight file round trip is bit-exact") {
  ReconConfig cfg = small_cnn_cfg();
  cfg.sharing = Sharing::Unshared;
  ModelBundle model = make_model(cfg, 20250101);
  // make rho and biases non-trivial so the round trip covers them
  model.hybrid[0].cnn.rho = 0.73125;
  model.image[1].cnn.l3.b[1] = -1.0 / 3.0;
  model.planes[1].layers[0].b[2] = 1e-17;

  const auto path = std::filesystem::temp_directory_path() / "pecs_model_roundtrip.awt";
  save_weights(model, cfg, path.string());
  LoadedModel loaded = load_weights(path.string());

  CHECK(loaded.cfg.hybrid_iters == cfg.hybrid_iters);
  CHECK(loaded.cfg.image_iters == cfg.image_iters);
  CHECK(loaded.cfg.outer_steps == cfg.outer_steps);
  CHECK(loaded.cfg.sharing == cfg.sharing);
  CHECK(loaded.cfg.cnn2d_layers == cfg.cnn2d_layers);
  CHECK(loaded.cfg.cnn2d_features == cfg.cnn2d_features);

  const std::vector<double> a = flatten_params(model);
  const std::vector<double> b = flatten_params(loaded.model);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK(loaded.model.hybrid[0].cnn.leaky_slope == model.hybrid[0].cnn.leaky_slope);

  std::filesystem::remove(path);
}

TEST_CASE("weight loader rejects corrupted containers") {
  ReconConfig cfg = small_cnn_cfg();
  ModelBundle model = make_model(cfg, 5);
  const auto path = std::filesystem::temp_directory_path() / "pecs_model_bad.awt";
  save_weights(model, cfg, path.string());

  // truncate
  {
    std::ifstream in(path, std::ios::binary);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ofstream out(path, std::ios::binary);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size() / 2));
  }
  CHECK_THROWS_AS(load_weights(path.string()), std::runtime_error);

  // bad magic
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE";
  }
  CHECK_THROWS_AS(load_weights(path.string()), std::runtime_error);
  std::filesystem::remove(path);

  ReconConfig tv_cfg = small_cnn_cfg();
  tv_cfg.regularizer_1d = Reg1d::Tv;
  tv_cfg.regularizer_2d = Reg2d::None;
  ModelBundle tv_model = make_model(tv_cfg, 0);
  CHECK_THROWS_AS(save_weights(tv_model, tv_cfg, path.string()), std::invalid_argument);
}

TEST_CASE("trainable parameter enumeration covers every scalar once") {
  ReconConfig cfg = small_cnn_cfg();
  ModelBundle model = make_model(cfg, 9);
  ParamRefs refs = trainable_params(model);
  // 3 modules x 883 + 2 planes x (2*4*9+4 + 4*4*9+4 + 4*2*9+2)
  const std::size_t plane_scalars = (2 * 4 * 9 + 4) + (4 * 4 * 9 + 4) + (4 * 2 * 9 + 2);
  CHECK(refs.size() == 3 * 883 + 2 * plane_scalars);

  int rho_count = 0;
  for (auto k : refs.kinds) {
    if (k == ParamKind::Rho) ++rho_count;
  }
  CHECK(rho_count == 3);

  // zero_like + accumulate round trip
  ModelBundle grads = zero_like(model);
  for (double v : flatten_params(grads)) CHECK(v == 0.0);
  accumulate(grads, model, 2.0);
  const auto got = flatten_params(grads);
  const auto want = flatten_params(model);
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i] == doctest::Approx(2.0 * want[i]).epsilon(1e-15));
  }
}
