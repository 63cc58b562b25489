// pecs: reconstruction experiments for phase-encode undersampled k-space.
// Subcommands cover mask generation, PSF inspection, reconstruction,
// dataset synthesis, training, and gradient verification. Every command is
// deterministic given its config and seed, and echoes its fully resolved
// configuration next to its primary output.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 check failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pecs/autodiff.hpp"
#include "pecs/io.hpp"
#include "pecs/mask.hpp"
#include "pecs/metrics.hpp"
#include "pecs/phantom.hpp"
#include "pecs/rng.hpp"
#include "pecs/solver.hpp"
#include "pecs/train.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitCheck = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

pecs::Sharing parse_sharing(const std::string& s) {
  if (s == "shared") return pecs::Sharing::Shared;
  if (s == "unshared") return pecs::Sharing::Unshared;
  throw ConfigError("sharing must be 'shared' or 'unshared', got '" + s + "'");
}

pecs::Reg1d parse_reg1d(const std::string& s) {
  if (s == "cnn") return pecs::Reg1d::Cnn;
  if (s == "tv") return pecs::Reg1d::Tv;
  throw ConfigError("regularizer_1d must be 'cnn' or 'tv', got '" + s + "'");
}

pecs::Reg2d parse_reg2d(const std::string& s) {
  if (s == "cnn") return pecs::Reg2d::Cnn;
  if (s == "tv") return pecs::Reg2d::Tv;
  if (s == "none") return pecs::Reg2d::None;
  throw ConfigError("regularizer_2d must be 'cnn', 'tv' or 'none', got '" + s + "'");
}

void apply_recon_json(const json& j, pecs::ReconConfig& cfg) {
  check_keys(j,
             {"hybrid_iters", "image_iters", "outer_steps", "sharing", "regularizer_1d",
              "tv_lambda", "regularizer_2d", "tv2d_lambda", "cnn2d_layers", "cnn2d_features"},
             "recon config");
  if (j.contains("hybrid_iters")) cfg.hybrid_iters = j["hybrid_iters"].get<int>();
  if (j.contains("image_iters")) cfg.image_iters = j["image_iters"].get<int>();
  if (j.contains("outer_steps")) cfg.outer_steps = j["outer_steps"].get<int>();
  if (j.contains("sharing")) cfg.sharing = parse_sharing(j["sharing"].get<std::string>());
  if (j.contains("regularizer_1d")) {
    cfg.regularizer_1d = parse_reg1d(j["regularizer_1d"].get<std::string>());
  }
  if (j.contains("tv_lambda")) cfg.tv_lambda = j["tv_lambda"].get<double>();
  if (j.contains("regularizer_2d")) {
    cfg.regularizer_2d = parse_reg2d(j["regularizer_2d"].get<std::string>());
  }
  if (j.contains("tv2d_lambda")) cfg.tv2d_lambda = j["tv2d_lambda"].get<double>();
  if (j.contains("cnn2d_layers")) cfg.cnn2d_layers = j["cnn2d_layers"].get<int>();
  if (j.contains("cnn2d_features")) cfg.cnn2d_features = j["cnn2d_features"].get<int>();
}

void apply_train_json(const json& j, pecs::TrainConfig& cfg) {
  check_keys(j,
             {"learning_rate", "batch_size", "epochs", "beta1", "beta2", "epsilon", "tau_k",
              "tau_p", "tau_f", "seed", "rho_min", "threads"},
             "train config");
  if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
  if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
  if (j.contains("beta1")) cfg.beta1 = j["beta1"].get<double>();
  if (j.contains("beta2")) cfg.beta2 = j["beta2"].get<double>();
  if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
  if (j.contains("tau_k")) cfg.loss.tau_k = j["tau_k"].get<double>();
  if (j.contains("tau_p")) cfg.loss.tau_p = j["tau_p"].get<double>();
  if (j.contains("tau_f")) cfg.loss.tau_f = j["tau_f"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("rho_min")) cfg.rho_min = j["rho_min"].get<double>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
}

struct RunConfig {
  pecs::ReconConfig recon;
  pecs::TrainConfig train;
  std::string mask_path;
};

RunConfig load_run_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  check_keys(j, {"recon", "train", "mask"}, path);
  if (j.contains("recon")) apply_recon_json(j["recon"], cfg.recon);
  if (j.contains("train")) apply_train_json(j["train"], cfg.train);
  if (j.contains("mask")) cfg.mask_path = j["mask"].get<std::string>();
  return cfg;
}

json recon_to_json(const pecs::ReconConfig& cfg) {
  return json{
      {"hybrid_iters", cfg.hybrid_iters},
      {"image_iters", cfg.image_iters},
      {"outer_steps", cfg.outer_steps},
      {"sharing", cfg.sharing == pecs::Sharing::Shared ? "shared" : "unshared"},
      {"regularizer_1d", cfg.regularizer_1d == pecs::Reg1d::Cnn ? "cnn" : "tv"},
      {"tv_lambda", cfg.tv_lambda},
      {"regularizer_2d", cfg.regularizer_2d == pecs::Reg2d::Cnn
                             ? "cnn"
                             : (cfg.regularizer_2d == pecs::Reg2d::Tv ? "tv" : "none")},
      {"tv2d_lambda", cfg.tv2d_lambda},
      {"cnn2d_layers", cfg.cnn2d_layers},
      {"cnn2d_features", cfg.cnn2d_features},
  };
}

json train_to_json(const pecs::TrainConfig& cfg) {
  return json{
      {"learning_rate", cfg.learning_rate},
      {"batch_size", cfg.batch_size},
      {"epochs", cfg.epochs},
      {"beta1", cfg.beta1},
      {"beta2", cfg.beta2},
      {"epsilon", cfg.epsilon},
      {"tau_k", cfg.loss.tau_k},
      {"tau_p", cfg.loss.tau_p},
      {"tau_f", cfg.loss.tau_f},
      {"seed", cfg.seed},
      {"rho_min", cfg.rho_min},
      {"threads", cfg.threads},
  };
}

// Provenance echo of the fully resolved parameters, next to the primary
// output (or inside it when the output is a directory).
void echo_config(const json& resolved, const std::string& primary_out) {
  fs::path p(primary_out);
  fs::path target = fs::is_directory(p) ? p / "resolved_config.json"
                                        : fs::path(primary_out + ".config.json");
  std::ofstream out(target);
  if (!out) throw std::runtime_error("cannot write config echo to " + target.string());
  out << resolved.dump(2) << "\n";
}

json number_or_inf(double v) {
  if (std::isinf(v)) return json("inf");
  return json(v);
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------

struct MaskArgs {
  int n = 64;
  double r = 4.0;
  double sigma = 0.0;  // 0 -> default n/6
  int acs = -1;        // -1 -> default max(1, round(n/32))
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_mask(const MaskArgs& a) {
  const double sigma = a.sigma > 0.0 ? a.sigma : pecs::default_density_sigma(a.n);
  const int acs = a.acs >= 0 ? a.acs : pecs::default_acs_lines(a.n);
  const std::uint64_t mask_seed = pecs::sub_seed(a.seed, pecs::SeedPurpose::Mask);
  const pecs::Mask1D mask = pecs::gen_gaussian_mask(a.n, a.r, sigma, acs, mask_seed);
  pecs::write_mask(mask, a.out);
  echo_config(json{{"command", "mask"},
                   {"n", a.n},
                   {"r", a.r},
                   {"sigma", sigma},
                   {"acs", acs},
                   {"seed", a.seed},
                   {"mask_seed", mask_seed},
                   {"out", a.out}},
              a.out);
  std::cout << "mask: " << mask.sampled_count << "/" << a.n
            << " lines, achieved R = " << mask.reduction << "\n";
  return kExitOk;
}

struct PsfArgs {
  std::string mask_path;
  int cols = 0;  // 0 -> square (cols = mask length)
  std::string out;
  std::string report;
  bool compare_2d = false;
  std::uint64_t seed = 0;
};

// Peak-to-sidelobe ratio along the nonzero column; infinity for a delta.
double peak_sidelobe_ratio(const pecs::ComplexGrid& img) {
  double sidelobe = 0.0;
  for (int r = 1; r < img.rows(); ++r) sidelobe = std::max(sidelobe, std::abs(img(r, 0)));
  const double peak = std::abs(img(0, 0));
  if (sidelobe == 0.0) return std::numeric_limits<double>::infinity();
  return peak / sidelobe;
}

int cmd_psf(const PsfArgs& a) {
  const pecs::Mask1D mask = pecs::read_mask(a.mask_path);
  const int cols = a.cols > 0 ? a.cols : mask.length;
  const pecs::ComplexGrid img = pecs::psf(mask, mask.length, cols);
  pecs::export_pgm(img, a.out, /*center_shift=*/true);

  double off_center = 0.0;
  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 1; c < img.cols(); ++c) off_center = std::max(off_center, std::abs(img(r, c)));
  }
  const double psr = peak_sidelobe_ratio(img);

  json report{{"command", "psf"},
              {"mask", a.mask_path},
              {"rows", mask.length},
              {"cols", cols},
              {"peak_sidelobe_ratio", number_or_inf(psr)},
              {"off_center_column_max", off_center},
              {"out", a.out}};

  if (a.compare_2d) {
    // Illustrative only: a 2D random pattern with the same sample budget,
    // rendered alongside for visual comparison of artefact structure.
    pecs::Xoshiro256ss rng(pecs::sub_seed(a.seed, pecs::SeedPurpose::Mask, 1));
    pecs::ComplexGrid pattern(mask.length, cols, pecs::Domain::KSpace);
    const std::size_t want = static_cast<std::size_t>(mask.sampled_count) * cols;
    std::size_t placed = 0;
    while (placed < want) {
      const int r = static_cast<int>(rng.next() % mask.length);
      const int c = static_cast<int>(rng.next() % cols);
      if (pattern(r, c).real() == 0.0) {
        pattern(r, c) = pecs::cdouble{1.0, 0.0};
        ++placed;
      }
    }
    pecs::ComplexGrid img2d = pecs::idft2d(pattern);
    const double peak = std::abs(img2d(0, 0));
    if (peak > 0) {
      for (auto& v : img2d.data()) v /= peak;
    }
    const std::string path2d = a.out + ".random2d.pgm";
    pecs::export_pgm(img2d, path2d, true);
    report["random2d_out"] = path2d;
  }

  if (!a.report.empty()) write_json_file(report, a.report);
  echo_config(report, a.out);
  std::cout << "psf: peak/sidelobe = " << psr << ", off-center column max = " << off_center
            << "\n";
  return kExitOk;
}

struct ReconArgs {
  std::string kspace;
  std::string mask_path;
  std::string model;
  std::string config;
  std::string out;
  std::string report;
  std::string reference;
  std::string pgm;
  int threads = 1;
};

int cmd_recon(const ReconArgs& a) {
  RunConfig run = load_run_config(a.config);
  pecs::ReconConfig cfg = run.recon;

  pecs::ModelBundle model;
  if (!a.model.empty()) {
    pecs::LoadedModel loaded = pecs::load_weights(a.model);
    // the weight file is authoritative for the pipeline structure
    const pecs::ReconConfig& mc = loaded.cfg;
    cfg.hybrid_iters = mc.hybrid_iters;
    cfg.image_iters = mc.image_iters;
    cfg.outer_steps = mc.outer_steps;
    cfg.sharing = mc.sharing;
    cfg.regularizer_1d = mc.regularizer_1d;
    cfg.regularizer_2d = mc.regularizer_2d;
    cfg.cnn2d_layers = mc.cnn2d_layers;
    cfg.cnn2d_features = mc.cnn2d_features;
    model = std::move(loaded.model);
  } else {
    if (cfg.regularizer_1d == pecs::Reg1d::Cnn && cfg.hybrid_iters + cfg.image_iters > 0) {
      throw ConfigError("recon: learned 1D regularizer requires --model");
    }
    if (cfg.regularizer_2d == pecs::Reg2d::Cnn) cfg.regularizer_2d = pecs::Reg2d::None;
    model = pecs::make_model(cfg, 0);
  }

  const pecs::Mask1D mask = pecs::read_mask(a.mask_path);
  pecs::ComplexGrid y = pecs::read_cks(a.kspace);
  if (y.domain() != pecs::Domain::KSpace) {
    throw std::runtime_error("recon: input grid is tagged " +
                             std::string(pecs::domain_name(y.domain())) + ", expected KSpace");
  }

  const pecs::ComplexGrid xhat = pecs::recon_am(y, mask, cfg, model, nullptr, a.threads);
  pecs::write_cks(xhat, a.out);
  if (!a.pgm.empty()) pecs::export_pgm(xhat, a.pgm, false);

  json report{{"command", "recon"}, {"kspace", a.kspace}, {"mask", a.mask_path},
              {"model", a.model},   {"out", a.out},       {"recon", recon_to_json(cfg)},
              {"threads", a.threads}};
  if (!a.reference.empty()) {
    const pecs::ComplexGrid ref = pecs::read_cks(a.reference);
    report["psnr_db"] = number_or_inf(pecs::psnr(ref, xhat));
    report["ssim"] = pecs::ssim(ref, xhat);
    report["reference"] = a.reference;
    std::cout << "recon: PSNR = " << report["psnr_db"].dump()
              << " dB, SSIM = " << report["ssim"].dump() << "\n";
  } else {
    std::cout << "recon: wrote " << a.out << "\n";
  }
  if (!a.report.empty()) write_json_file(report, a.report);
  echo_config(report, a.out);
  return kExitOk;
}

struct DatasetArgs {
  int count = 200;
  int rows = 64;
  int cols = 64;
  std::uint64_t seed = 0;
  double train_frac = 0.8;
  double val_frac = 0.1;
  std::string out;
};

int cmd_dataset(const DatasetArgs& a) {
  if (a.count < 1) throw ConfigError("dataset: count must be >= 1");
  if (a.train_frac <= 0 || a.val_frac < 0 || a.train_frac + a.val_frac >= 1.0 + 1e-12) {
    throw ConfigError("dataset: fractions must satisfy 0 < train, 0 <= val, train+val <= 1");
  }
  fs::create_directories(a.out);
  const int n_train = static_cast<int>(std::lround(a.count * a.train_frac));
  const int n_val = static_cast<int>(std::lround(a.count * a.val_frac));

  std::vector<pecs::ManifestItem> items;
  for (int i = 0; i < a.count; ++i) {
    const auto spec = pecs::random_phantom_spec(
        a.rows, a.cols, pecs::sub_seed(a.seed, pecs::SeedPurpose::Phantom, i));
    const pecs::ComplexGrid x = pecs::gen_phantom(spec);
    char name[32];
    std::snprintf(name, sizeof(name), "phantom_%04d.cks", i);
    const fs::path path = fs::path(a.out) / name;
    pecs::write_cks(x, path.string());
    const char* split = i < n_train ? "train" : (i < n_train + n_val ? "val" : "test");
    items.push_back({name, split});
  }
  const fs::path manifest = fs::path(a.out) / "manifest.json";
  pecs::write_manifest(items, manifest.string());
  echo_config(json{{"command", "dataset"},
                   {"count", a.count},
                   {"rows", a.rows},
                   {"cols", a.cols},
                   {"seed", a.seed},
                   {"train_frac", a.train_frac},
                   {"val_frac", a.val_frac},
                   {"out", a.out}},
              a.out);
  std::cout << "dataset: wrote " << a.count << " phantoms to " << a.out << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string config;
  std::string data;
  std::string out;
  std::string mask_path;
  int epochs = -1;
  std::int64_t seed = -1;
  int threads = 0;
};

int cmd_train(const TrainArgs& a) {
  RunConfig run = load_run_config(a.config);
  pecs::ReconConfig rc = run.recon;
  pecs::TrainConfig tc = run.train;
  if (a.epochs >= 0) tc.epochs = a.epochs;
  if (a.seed >= 0) tc.seed = static_cast<std::uint64_t>(a.seed);
  if (a.threads > 0) tc.threads = a.threads;
  const std::string mask_path = !a.mask_path.empty() ? a.mask_path : run.mask_path;
  if (mask_path.empty()) throw ConfigError("train: a mask is required (--mask or config)");
  if (rc.regularizer_1d != pecs::Reg1d::Cnn && rc.hybrid_iters + rc.image_iters > 0) {
    throw ConfigError("train: only the learned 1D regularizer is trainable");
  }

  const pecs::Mask1D mask = pecs::read_mask(mask_path);
  const auto items = pecs::read_manifest(a.data);
  const fs::path data_dir = fs::path(a.data).parent_path();
  std::vector<pecs::ComplexGrid> train_set, val_set;
  for (const auto& item : items) {
    fs::path p(item.path);
    if (p.is_relative()) p = data_dir / p;
    if (item.split == "train") {
      train_set.push_back(pecs::read_cks(p.string()));
    } else if (item.split == "val") {
      val_set.push_back(pecs::read_cks(p.string()));
    }
  }

  const pecs::ModelBundle init =
      pecs::make_model(rc, pecs::sub_seed(tc.seed, pecs::SeedPurpose::Init));
  const pecs::TrainResult result = pecs::train(train_set, val_set, {mask}, tc, rc, init);

  fs::create_directories(a.out);
  const fs::path weights = fs::path(a.out) / "model.awt";
  const fs::path sidecar = fs::path(a.out) / "checkpoint.json";
  pecs::save_checkpoint(result, tc, rc, weights.string(), sidecar.string());

  echo_config(json{{"command", "train"},
                   {"data", a.data},
                   {"mask", mask_path},
                   {"out", a.out},
                   {"recon", recon_to_json(rc)},
                   {"train", train_to_json(tc)}},
              a.out);
  if (result.history.empty()) {
    std::cout << "train: epochs = 0, wrote initial checkpoint\n";
  } else {
    std::cout << "train: best epoch " << result.best_epoch
              << ", val loss = " << result.best_val_loss
              << ", val PSNR = " << result.history[result.best_epoch].val_psnr << " dB\n";
  }
  return kExitOk;
}

struct GradCheckArgs {
  std::string config;
  std::uint64_t seed = 1;
  bool corrupt = false;
};

int cmd_gradcheck(const GradCheckArgs& a) {
  pecs::ReconConfig cfg;
  // small unrolled model unless a config overrides it
  cfg.hybrid_iters = 1;
  cfg.image_iters = 1;
  cfg.outer_steps = 1;
  cfg.cnn2d_layers = 3;
  cfg.cnn2d_features = 4;
  if (!a.config.empty()) {
    RunConfig run = load_run_config(a.config);
    cfg = run.recon;
  }
  pecs::GradCheckOptions opts;
  opts.corrupt = a.corrupt;

  const pecs::GradCheckReport report = pecs::grad_check(cfg, a.seed, opts);
  for (const auto& cls : report.classes) {
    if (cls.count == 0) continue;
    std::cout << "  " << cls.name << ": max rel err = " << cls.max_rel_err << " over "
              << cls.count << " params\n";
  }
  std::cout << "gradcheck: max rel err = " << report.max_rel_err
            << (report.pass ? " [ok]" : " [FAIL]") << "\n";
  return report.pass ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase-encode compressed-sensing reconstruction toolkit"};
  app.require_subcommand(1);

  MaskArgs mask_args;
  auto* mask_cmd = app.add_subcommand("mask", "generate a variable-density sampling mask");
  mask_cmd->add_option("--n", mask_args.n, "number of phase-encode lines")->required();
  mask_cmd->add_option("--r", mask_args.r, "reduction factor (>= 1)")->required();
  mask_cmd->add_option("--sigma", mask_args.sigma, "density sigma in lines (default n/6)");
  mask_cmd->add_option("--acs", mask_args.acs, "forced central lines (default round(n/32))");
  mask_cmd->add_option("--seed", mask_args.seed, "root seed");
  mask_cmd->add_option("--out", mask_args.out, "output mask file")->required();

  PsfArgs psf_args;
  auto* psf_cmd = app.add_subcommand("psf", "point spread function of a mask");
  psf_cmd->add_option("--mask", psf_args.mask_path, "mask file")->required();
  psf_cmd->add_option("--cols", psf_args.cols, "grid columns (default: mask length)");
  psf_cmd->add_option("--out", psf_args.out, "output PGM")->required();
  psf_cmd->add_option("--report", psf_args.report, "sidelobe report JSON");
  psf_cmd->add_flag("--compare-2d", psf_args.compare_2d,
                    "also render a 2D random pattern PSF for comparison");
  psf_cmd->add_option("--seed", psf_args.seed, "seed for --compare-2d");

  ReconArgs recon_args;
  auto* recon_cmd = app.add_subcommand("recon", "reconstruct an image from masked k-space");
  recon_cmd->add_option("--kspace", recon_args.kspace, "input CKS (KSpace)")->required();
  recon_cmd->add_option("--mask", recon_args.mask_path, "mask file")->required();
  recon_cmd->add_option("--model", recon_args.model, "trained weight file");
  recon_cmd->add_option("--config", recon_args.config, "run config JSON");
  recon_cmd->add_option("--out", recon_args.out, "output CKS image")->required();
  recon_cmd->add_option("--report", recon_args.report, "metrics report JSON");
  recon_cmd->add_option("--reference", recon_args.reference, "ground-truth CKS for metrics");
  recon_cmd->add_option("--pgm", recon_args.pgm, "also export a PGM preview");
  recon_cmd->add_option("--threads", recon_args.threads, "column-parallel solves");

  DatasetArgs dataset_args;
  auto* dataset_cmd = app.add_subcommand("dataset", "synthesise a phantom dataset");
  dataset_cmd->add_option("--count", dataset_args.count, "number of phantoms");
  dataset_cmd->add_option("--rows", dataset_args.rows, "grid rows");
  dataset_cmd->add_option("--cols", dataset_args.cols, "grid cols");
  dataset_cmd->add_option("--seed", dataset_args.seed, "root seed");
  dataset_cmd->add_option("--train-frac", dataset_args.train_frac, "train fraction");
  dataset_cmd->add_option("--val-frac", dataset_args.val_frac, "validation fraction");
  dataset_cmd->add_option("--out", dataset_args.out, "output directory")->required();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train the learned modules");
  train_cmd->add_option("--config", train_args.config, "run config JSON")->required();
  train_cmd->add_option("--data", train_args.data, "dataset manifest JSON")->required();
  train_cmd->add_option("--out", train_args.out, "checkpoint directory")->required();
  train_cmd->add_option("--mask", train_args.mask_path, "mask file (overrides config)");
  train_cmd->add_option("--epochs", train_args.epochs, "override epochs");
  train_cmd->add_option("--seed", train_args.seed, "override seed");
  train_cmd->add_option("--threads", train_args.threads, "batch-parallel workers");

  GradCheckArgs grad_args;
  auto* grad_cmd = app.add_subcommand("gradcheck", "verify gradients by finite differences");
  grad_cmd->add_option("--config", grad_args.config, "run config JSON");
  grad_cmd->add_option("--seed", grad_args.seed, "seed");
  grad_cmd->add_flag("--corrupt", grad_args.corrupt,
                     "perturb one analytic gradient (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (mask_cmd->parsed()) return cmd_mask(mask_args);
    if (psf_cmd->parsed()) return cmd_psf(psf_args);
    if (recon_cmd->parsed()) return cmd_recon(recon_args);
    if (dataset_cmd->parsed()) return cmd_dataset(dataset_args);
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (grad_cmd->parsed()) return cmd_gradcheck(grad_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const pecs::ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
