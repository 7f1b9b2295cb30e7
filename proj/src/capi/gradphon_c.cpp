#include "gradphon/gradphon.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <exception>
#include <new>
#include <string>

#include "app/commands.hpp"
#include "app/run_config.hpp"
#include "error.hpp"
#include "model/checkpoint.hpp"

struct gp_config {
  gradphon::RunConfig config;
  gp_log_fn log_fn = nullptr;
  void* log_user = nullptr;
};

struct gp_model {
  gradphon::Checkpoint checkpoint;
};

namespace {

thread_local std::string last_error;

// Runs `body`, translating exceptions into status codes.
template <class F>
gp_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return GP_OK;
  } catch (const gradphon::Error& e) {
    last_error = e.what();
    return static_cast<gp_status>(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return GP_ERR_INTERNAL;
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return GP_ERR_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
    return GP_ERR_INTERNAL;
  }
}

gp_status null_argument(const char* name) {
  last_error = std::string("null argument: ") + name;
  return GP_ERR_USAGE;
}

gp_status copy_out(const std::string& s, char* buf, size_t cap, size_t* len) {
  if (len) *len = s.size();
  if (!buf || cap <= s.size()) {
    last_error = "buffer of " + std::to_string(cap) + " bytes too small for " + std::to_string(s.size() + 1);
    return GP_ERR_BUFFER_TOO_SMALL;
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return GP_OK;
}

}  // namespace

extern "C" {

const char* gp_version(void) { return "1.0.0"; }

const char* gp_status_name(gp_status status) {
  switch (status) {
    case GP_OK: return "ok";
    case GP_ERR_USAGE: return "usage error";
    case GP_ERR_CONFIG: return "config error";
    case GP_ERR_DATA: return "data error";
    case GP_ERR_PARSE: return "parse error";
    case GP_ERR_FORMAT: return "format error";
    case GP_ERR_NUMERIC: return "numeric error";
    case GP_ERR_DIMENSION: return "dimension error";
    case GP_ERR_INDEX: return "index error";
    case GP_ERR_VOCABULARY: return "vocabulary error";
    case GP_ERR_UNKNOWN_MORPHEME: return "unknown morpheme";
    case GP_ERR_TRAINING: return "training error";
    case GP_ERR_SPLIT: return "split error";
    case GP_ERR_COMPATIBILITY: return "compatibility error";
    case GP_ERR_IO: return "i/o error";
    case GP_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case GP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* gp_last_error(void) { return last_error.c_str(); }

gp_status gp_config_create(gp_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new gp_config(); });
}

void gp_config_destroy(gp_config* config) { delete config; }

gp_status gp_config_set(gp_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return null_argument("config/key/value");
  return guarded([&] { config->config.set(key, value); });
}

gp_status gp_config_load_file(gp_config* config, const char* path) {
  if (!config || !path) return null_argument("config/path");
  return guarded([&] { config->config.load_file(path); });
}

gp_status gp_config_get(const gp_config* config, const char* key, char* buf, size_t cap, size_t* len) {
  if (!config || !key) return null_argument("config/key");
  std::string value;
  const gp_status st = guarded([&] { value = config->config.get(key); });
  return st == GP_OK ? copy_out(value, buf, cap, len) : st;
}

gp_status gp_config_dump(const gp_config* config, char* buf, size_t cap, size_t* len) {
  if (!config) return null_argument("config");
  return copy_out(config->config.dump(), buf, cap, len);
}

void gp_config_set_logger(gp_config* config, gp_log_fn fn, void* user) {
  if (!config) return;
  config->log_fn = fn;
  config->log_user = user;
}

gp_status gp_train(const gp_config* config, gp_train_summary* summary) {
  if (!config) return null_argument("config");
  return guarded([&] {
    gradphon::EpochCallback cb;
    if (config->log_fn) {
      cb = [config](const gradphon::EpochRecord& r) {
        char line[160];
        std::snprintf(line, sizeof line, "epoch %zu  train_loss %.6f  dev_loss %.6f  lr %.3g  (%.2fs)", r.epoch,
                      r.train_loss, r.dev_loss, r.learning_rate, r.wall_seconds);
        config->log_fn(line, config->log_user);
      };
    }
    const auto s = gradphon::cmd_train(config->config, cb);
    if (summary) {
      *summary = {s.epochs, s.best_epoch, s.best_dev_loss, s.train_size, s.dev_size, s.test_size};
    }
  });
}

gp_status gp_evaluate(const gp_config* config, gp_eval_summary* summary) {
  if (!config) return null_argument("config");
  return guarded([&] {
    const auto r = gradphon::cmd_evaluate(config->config);
    if (summary) *summary = {r.accuracy, r.mean_edit_distance, r.mean_surprisal, r.items, r.unknown_morpheme_items};
  });
}

gp_status gp_export_embeddings(const gp_config* config, char* buf, size_t cap, size_t* len) {
  if (!config) return null_argument("config");
  std::string path;
  const gp_status st = guarded([&] { path = gradphon::cmd_export_embeddings(config->config); });
  return st == GP_OK ? copy_out(path, buf, cap, len) : st;
}

gp_status gp_resample(const gp_config* config, char* buf, size_t cap, size_t* len) {
  if (!config) return null_argument("config");
  std::string table;
  const gp_status st =
      guarded([&] { table = gradphon::format_resample_table(gradphon::cmd_resample(config->config)); });
  return st == GP_OK ? copy_out(table, buf, cap, len) : st;
}

gp_status gp_model_load(const char* path, gp_model** out) {
  if (!path || !out) return null_argument("path/out");
  return guarded([&] { *out = new gp_model{gradphon::Checkpoint::load(path)}; });
}

void gp_model_destroy(gp_model* model) { delete model; }

gp_status gp_model_info_get(const gp_model* model, gp_model_info* info) {
  if (!model || !info) return null_argument("model/info");
  const auto& c = model->checkpoint;
  info->variant = gradphon::variant_tag(c.variant).data();
  info->dim = c.params.dims().dim;
  info->symbols = c.alphabet.size();
  info->morphemes = c.morphemes.size();
  info->max_decode_len = c.max_decode_len;
  return GP_OK;
}

gp_status gp_model_predict(const gp_model* model, const char* spec, size_t beam, char* buf, size_t cap, size_t* len) {
  if (!model || !spec) return null_argument("model/spec");
  std::string form;
  const gp_status st = guarded([&] { form = gradphon::predict_form(model->checkpoint, spec, beam); });
  return st == GP_OK ? copy_out(form, buf, cap, len) : st;
}

gp_status gp_model_surprisal(const gp_model* model, const char* spec, const char* gold, double* out) {
  if (!model || !spec || !gold || !out) return null_argument("model/spec/gold/out");
  return guarded([&] { *out = gradphon::gold_surprisal(model->checkpoint, spec, gold); });
}

gp_status gp_model_similarity(const gp_model* model, const char* a, const char* b, double* out) {
  if (!model || !a || !b || !out) return null_argument("model/a/b/out");
  return guarded([&] { *out = gradphon::morpheme_similarity(model->checkpoint, a, b); });
}

}  // extern "C"
