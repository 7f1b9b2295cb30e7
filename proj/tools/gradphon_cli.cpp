// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gradphon/gradphon.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int report(gp_status st) {
  if (st == GP_OK) return kExitOk;
  std::fprintf(stderr, "error: %s: %s\n", gp_status_name(st), gp_last_error());
  return st == GP_ERR_USAGE || st == GP_ERR_CONFIG ? kExitUsage : kExitRuntime;
}

std::string read_string(const std::function<gp_status(char*, size_t, size_t*)>& call, gp_status& st) {
  size_t len = 0;
  st = call(nullptr, 0, &len);
  if (st != GP_ERR_BUFFER_TOO_SMALL) return {};
  std::string out(len + 1, '\0');
  st = call(out.data(), out.size(), &len);
  out.resize(len);
  return out;
}

class Config {
 public:
  Config() { gp_config_create(&cfg_); }
  ~Config() { gp_config_destroy(cfg_); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;
  gp_config* get() const { return cfg_; }

 private:
  gp_config* cfg_ = nullptr;
};

class Model {
 public:
  ~Model() { gp_model_destroy(model_); }
  gp_status load(const std::string& path) { return gp_model_load(path.c_str(), &model_); }
  const gp_model* get() const { return model_; }

 private:
  gp_model* model_ = nullptr;
};

// Options shared by every subcommand, applied on top of --config.
struct Overrides {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<std::string> raw_sets;
};

void bind(CLI::App* cmd, Overrides& o, const std::string& flag, const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o.values.emplace_back(key, v); }, help);
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "key=value config file (flags override it)");
  cmd->add_option("--set", o.raw_sets, "extra key=value override, repeatable");
  bind(cmd, o, "--seed", "seed", "master random seed");
  bind(cmd, o, "--variant", "variant", "pos-indep | pos-dep | joint");
  bind(cmd, o, "--dim", "dim", "embedding and hidden size d");
  bind(cmd, o, "--out-dir", "out_dir", "output directory");
}

void add_training(CLI::App* cmd, Overrides& o) {
  bind(cmd, o, "--data", "data", "corpus file (UniMorph 3-column or weighted 4-column TSV)");
  bind(cmd, o, "--format", "format", "auto | unimorph | weighted");
  bind(cmd, o, "--dropout", "dropout", "dropout rate on embeddings");
  bind(cmd, o, "--lr", "lr", "initial learning rate");
  bind(cmd, o, "--min-lr", "min_lr", "stop once the learning rate falls below this");
  bind(cmd, o, "--patience", "patience", "non-improving dev epochs before halving the learning rate");
  bind(cmd, o, "--batch-size", "batch_size", "words per optimizer step");
  bind(cmd, o, "--max-epochs", "max_epochs", "epoch limit");
  bind(cmd, o, "--noise", "noise", "per-step | per-word (position-dependent variant)");
}

gp_status apply(const Overrides& o, gp_config* cfg) {
  if (!o.config_file.empty()) {
    if (gp_status st = gp_config_load_file(cfg, o.config_file.c_str()); st != GP_OK) return st;
  }
  for (const auto& [k, v] : o.values) {
    if (gp_status st = gp_config_set(cfg, k.c_str(), v.c_str()); st != GP_OK) return st;
  }
  for (const auto& kv : o.raw_sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return GP_ERR_USAGE;
    }
    if (gp_status st = gp_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()); st != GP_OK) {
      return st;
    }
  }
  return GP_OK;
}

void print_log_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

int run_predict(const gp_config* cfg, const std::vector<std::string>& specs, const std::string& input_file,
                bool with_surprisal, const std::string& beam) {
  gp_status st = GP_OK;
  const std::string checkpoint =
      read_string([&](char* b, size_t c, size_t* l) { return gp_config_get(cfg, "checkpoint", b, c, l); }, st);
  if (checkpoint.empty()) {
    std::fprintf(stderr, "error: usage error: predict needs --checkpoint\n");
    return kExitUsage;
  }
  Model model;
  if (gp_status ls = model.load(checkpoint); ls != GP_OK) return report(ls);

  std::vector<std::string> lines = specs;
  if (!input_file.empty()) {
    std::ifstream in(input_file);
    if (!in) {
      std::fprintf(stderr, "error: i/o error: cannot open '%s'\n", input_file.c_str());
      return kExitRuntime;
    }
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  if (lines.empty()) {
    std::fprintf(stderr, "error: usage error: give morpheme specs or --input\n");
    return kExitUsage;
  }
  const size_t beam_size = beam.empty() ? 1 : std::stoul(beam);

  for (const std::string& line : lines) {
    const auto tab = line.find('\t');
    const std::string spec = line.substr(0, tab);
    const std::string gold = tab == std::string::npos ? "" : line.substr(tab + 1);
    gp_status ps = GP_OK;
    const std::string form = read_string(
        [&](char* b, size_t c, size_t* l) { return gp_model_predict(model.get(), spec.c_str(), beam_size, b, c, l); },
        ps);
    if (ps == GP_ERR_UNKNOWN_MORPHEME) {
      std::printf("%s\tUNK-MORPHEME\t%s\n", spec.c_str(), gp_last_error());
      continue;
    }
    if (ps != GP_OK) {
      std::printf("%s\tERROR\t%s: %s\n", spec.c_str(), gp_status_name(ps), gp_last_error());
      continue;
    }
    if (with_surprisal && !gold.empty()) {
      double s = 0;
      if (gp_status ss = gp_model_surprisal(model.get(), spec.c_str(), gold.c_str(), &s); ss != GP_OK) {
        std::printf("%s\t%s\t%s\tERROR %s\n", spec.c_str(), form.c_str(), gold.c_str(), gp_last_error());
      } else {
        std::printf("%s\t%s\t%s\t%.6f\n", spec.c_str(), form.c_str(), gold.c_str(), s);
      }
    } else {
      std::printf("%s\t%s\n", spec.c_str(), form.c_str());
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn continuous underlying forms and generate surface forms"};
  app.require_subcommand(1);
  Overrides o;

  auto* train = app.add_subcommand("train", "split a corpus, train a model, write checkpoint and logs");
  add_common(train, o);
  add_training(train, o);
  bind(train, o, "--split-dir", "split_dir", "reuse a split manifest instead of splitting");
  bind(train, o, "--train-frac", "train_frac", "training fraction");
  bind(train, o, "--dev-frac", "dev_frac", "development fraction");
  bind(train, o, "--test-frac", "test_frac", "test fraction");
  bind(train, o, "--coverage", "coverage", "keep every held-out morpheme in train (true/false)");
  bool verbose = false;
  train->add_flag("-v,--verbose", verbose, "print one line per epoch to stderr");

  auto* predict = app.add_subcommand("predict", "generate forms for morpheme sequences");
  add_common(predict, o);
  bind(predict, o, "--checkpoint", "checkpoint", "trained model");
  std::vector<std::string> specs;
  std::string input_file, beam;
  bool with_surprisal = false;
  predict->add_option("specs", specs, "morpheme specs such as \"run + V;PST\"");
  predict->add_option("--input", input_file, "file with one spec per line, optionally <TAB> gold form");
  predict->add_flag("--with-surprisal", with_surprisal, "also print the surprisal of the gold column");
  predict->add_option("--beam", beam, "beam size (1 = greedy)");

  auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint (ACC, MLD, NLL)");
  add_common(evaluate, o);
  bind(evaluate, o, "--checkpoint", "checkpoint", "trained model");
  bind(evaluate, o, "--data", "data", "corpus file");
  bind(evaluate, o, "--format", "format", "auto | unimorph | weighted");
  bind(evaluate, o, "--split-dir", "split_dir", "directory holding the split manifest");
  bind(evaluate, o, "--part", "part", "train | dev | test");
  bind(evaluate, o, "--beam", "beam", "beam size (1 = greedy)");

  auto* exportc = app.add_subcommand("export-embeddings", "write morpheme embeddings, raw or PCA-projected");
  add_common(exportc, o);
  bind(exportc, o, "--checkpoint", "checkpoint", "trained model");
  bind(exportc, o, "--projection", "projection", "none | pca2");
  bind(exportc, o, "--output", "output", "output file");
  std::vector<std::string> similarity;
  exportc->add_option("--similarity", similarity, "print the cosine similarity of two morphemes instead")
      ->expected(2);

  auto* resample = app.add_subcommand("resample", "learning curves over weighted training samples");
  add_common(resample, o);
  add_training(resample, o);
  bind(resample, o, "--sizes", "sizes", "comma-separated training-set sizes");
  bind(resample, o, "--resamples", "resamples", "samples per size");
  bind(resample, o, "--variants", "variants", "comma-separated variants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  Config cfg;
  if (gp_status st = apply(o, cfg.get()); st != GP_OK) return report(st);

  if (train->parsed()) {
    if (verbose) gp_config_set_logger(cfg.get(), print_log_line, nullptr);
    gp_train_summary s{};
    if (gp_status st = gp_train(cfg.get(), &s); st != GP_OK) return report(st);
    std::printf("trained %zu epochs; best dev loss %.6f at epoch %zu (train %zu / dev %zu / test %zu)\n", s.epochs,
                s.best_dev_loss, s.best_epoch, s.train_size, s.dev_size, s.test_size);
    return kExitOk;
  }
  if (predict->parsed()) return run_predict(cfg.get(), specs, input_file, with_surprisal, beam);
  if (evaluate->parsed()) {
    gp_eval_summary s{};
    if (gp_status st = gp_evaluate(cfg.get(), &s); st != GP_OK) return report(st);
    std::printf("ACC %.1f  MLD %.3f  NLL %.3f  (%zu items, %zu with unknown morphemes)\n", s.accuracy,
                s.mean_edit_distance, s.mean_surprisal, s.items, s.unknown_morpheme_items);
    return kExitOk;
  }
  if (exportc->parsed()) {
    if (!similarity.empty()) {
      gp_status st = GP_OK;
      const std::string checkpoint =
          read_string([&](char* b, size_t c, size_t* l) { return gp_config_get(cfg.get(), "checkpoint", b, c, l); }, st);
      Model model;
      if (gp_status ls = model.load(checkpoint); ls != GP_OK) return report(ls);
      double sim = 0;
      if (gp_status ss = gp_model_similarity(model.get(), similarity[0].c_str(), similarity[1].c_str(), &sim);
          ss != GP_OK) {
        return report(ss);
      }
      std::printf("%.9f\n", sim);
      return kExitOk;
    }
    gp_status st = GP_OK;
    const std::string path =
        read_string([&](char* b, size_t c, size_t* l) { return gp_export_embeddings(cfg.get(), b, c, l); }, st);
    if (st != GP_OK) return report(st);
    std::printf("%s\n", path.c_str());
    return kExitOk;
  }
  if (resample->parsed()) {
    gp_status st = GP_OK;
    const std::string table = read_string([&](char* b, size_t c, size_t* l) { return gp_resample(cfg.get(), b, c, l); }, st);
    if (st != GP_OK) return report(st);
    std::fputs(table.c_str(), stdout);
    return kExitOk;
  }
  return kExitUsage;
}
