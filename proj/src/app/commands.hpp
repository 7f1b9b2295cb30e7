#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "app/run_config.hpp"
#include "eval/metrics.hpp"
#include "model/checkpoint.hpp"
#include "training/trainer.hpp"

namespace gradphon {

// Each command echoes the effective configuration to <out_dir>/config.txt.

struct TrainSummary {
  std::size_t epochs = 0;
  std::size_t best_epoch = 0;
  double best_dev_loss = 0;
  std::size_t train_size = 0, dev_size = 0, test_size = 0;
};

/// Splits (or reads split_dir), trains and writes model.ckpt, train_log.tsv,
/// the split manifest and config.txt to out_dir.
TrainSummary cmd_train(const RunConfig& config, const EpochCallback& on_epoch = {});

/// Evaluates `checkpoint` on the `part` rows of split_dir (or on every row of
/// `data` when no split_dir is given); writes report.tsv and report.json.
EvalReport cmd_evaluate(const RunConfig& config);

/// Writes one row per morpheme: identifier then d values, or 2 values with
/// projection=pca2. Returns the output path.
std::string cmd_export_embeddings(const RunConfig& config);

/// Learning-curve data for every size and variant; writes resample.tsv.
std::vector<ResampleRow> cmd_resample(const RunConfig& config);

/// "lemma + features" -> {"lemma", "features"}.
std::vector<std::string> parse_morpheme_spec(std::string_view spec);

/// Decodes the form for a morpheme spec. Throws Error(UnknownMorpheme)
/// listing the unknown identifiers.
std::string predict_form(const Checkpoint& checkpoint, std::string_view spec, std::size_t beam = 1);

/// Surprisal of `gold` given the morphemes of `spec`.
double gold_surprisal(const Checkpoint& checkpoint, std::string_view spec, std::string_view gold);

double morpheme_similarity(const Checkpoint& checkpoint, std::string_view a, std::string_view b);

std::string format_report_table(const std::string& run, Variant variant, const EvalReport& report);
std::string format_report_json(const std::string& run, Variant variant, const EvalReport& report);
std::string format_resample_table(const std::vector<ResampleRow>& rows);

}  // namespace gradphon
