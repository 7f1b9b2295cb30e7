#include "app/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "app/embeddings.hpp"
#include "data/corpus.hpp"
#include "error.hpp"
#include "json.hpp"
#include "model/network.hpp"
#include "text.hpp"

namespace gradphon {
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void check_indices(const std::vector<std::size_t>& idx, std::size_t n, const char* part) {
  for (std::size_t i : idx) {
    if (i >= n) {
      fail(ErrorKind::Data, std::string("split manifest (") + part + ") references row " + std::to_string(i) +
                                " but the corpus has " + std::to_string(n) + " rows");
    }
  }
}

std::vector<std::size_t> lookup_morphemes(const Checkpoint& checkpoint, std::string_view spec) {
  std::vector<std::size_t> idx;
  std::string unknown;
  for (const auto& m : parse_morpheme_spec(spec)) {
    if (auto i = checkpoint.morphemes.find(m)) {
      idx.push_back(*i);
    } else {
      unknown += (unknown.empty() ? "" : ",") + m;
    }
  }
  if (!unknown.empty()) fail(ErrorKind::UnknownMorpheme, "unknown morpheme(s): " + unknown);
  if (idx.empty()) fail(ErrorKind::Usage, "empty morpheme specification");
  return idx;
}

}  // namespace

TrainSummary cmd_train(const RunConfig& config, const EpochCallback& on_epoch) {
  const std::string& data = config.require("data");
  const fs::path out_dir = config.get("out_dir");
  const TrainConfig train_cfg = config.train_config();
  const Corpus corpus = load_corpus(data, config.corpus_format(data));

  Split split;
  std::uint64_t split_seed = config.split_spec().seed;
  if (config.has("split_dir")) {
    split = read_split_manifest(config.get("split_dir"));
    check_indices(split.train, corpus.size(), "train");
    check_indices(split.dev, corpus.size(), "dev");
    check_indices(split.test, corpus.size(), "test");
  } else {
    split = split_paradigms(corpus, config.split_spec());
  }
  const Vocabulary vocab = build_vocab(corpus);
  const auto train_set = encode_all(corpus, split.train, vocab);
  const auto dev_set = encode_all(corpus, split.dev, vocab);

  config.write_echo(out_dir.string());
  TrainResult result = train(train_cfg, vocab.alphabet, vocab.morphemes, train_set, dev_set, on_epoch);

  result.checkpoint.save((out_dir / "model.ckpt").string());
  write_text(out_dir / "train_log.tsv", result.log.to_text());
  write_split_manifest(out_dir.string(), split, split_seed);

  TrainSummary s;
  s.epochs = result.log.epochs.size();
  s.best_epoch = result.log.best_epoch;
  s.best_dev_loss = result.log.best_dev_loss;
  s.train_size = split.train.size();
  s.dev_size = split.dev.size();
  s.test_size = split.test.size();
  return s;
}

EvalReport cmd_evaluate(const RunConfig& config) {
  const Checkpoint checkpoint = Checkpoint::load(config.require("checkpoint"));
  const std::string& data = config.require("data");
  const fs::path out_dir = config.get("out_dir");
  const Corpus corpus = load_corpus(data, config.corpus_format(data));

  Corpus test;
  if (config.has("split_dir")) {
    const Split split = read_split_manifest(config.get("split_dir"));
    const std::string& part = config.get("part");
    const std::vector<std::size_t>* idx = part == "test" ? &split.test
                                         : part == "dev" ? &split.dev
                                         : part == "train" ? &split.train
                                                           : nullptr;
    if (!idx) fail(ErrorKind::Config, "config key 'part': '" + part + "' is not one of train, dev, test");
    if (idx->empty()) fail(ErrorKind::Data, "split manifest lists no " + part + " rows");
    check_indices(*idx, corpus.size(), part.c_str());
    for (std::size_t i : *idx) test.push_back(corpus[i]);
  } else {
    test = corpus;
  }

  config.write_echo(out_dir.string());
  const EvalReport report = evaluate(checkpoint, test, {static_cast<std::size_t>(config.get_u64("beam"))});
  const std::string run = fs::path(data).stem().string();
  write_text(out_dir / "report.tsv", format_report_table(run, checkpoint.variant, report));
  write_text(out_dir / "report.json", format_report_json(run, checkpoint.variant, report));
  return report;
}

std::string cmd_export_embeddings(const RunConfig& config) {
  const Checkpoint checkpoint = Checkpoint::load(config.require("checkpoint"));
  const std::string& projection = config.get("projection");
  if (projection != "none" && projection != "pca2") {
    fail(ErrorKind::Config, "config key 'projection': '" + projection + "' is not none or pca2");
  }
  const fs::path out_dir = config.get("out_dir");
  config.write_echo(out_dir.string());
  const fs::path path = config.has("output") ? fs::path(config.get("output"))
                                             : out_dir / (projection == "pca2" ? "embeddings_pca2.tsv" : "embeddings.tsv");

  const auto& table = checkpoint.params.morpheme_embedding;
  const std::size_t rows = table.shape[0], d = table.shape[1];
  std::string out;
  char buf[64];
  if (projection == "pca2") {
    const auto projected = pca2(table.value, rows, d);
    for (std::size_t r = 0; r < rows; ++r) {
      std::snprintf(buf, sizeof buf, "\t%.9g\t%.9g\n", projected[r][0], projected[r][1]);
      out += checkpoint.morphemes.identifier(r) + buf;
    }
  } else {
    for (std::size_t r = 0; r < rows; ++r) {
      out += checkpoint.morphemes.identifier(r);
      for (std::size_t j = 0; j < d; ++j) {
        std::snprintf(buf, sizeof buf, "\t%.9g", table.value[r * d + j]);
        out += buf;
      }
      out += '\n';
    }
  }
  write_text(path, out);
  return path.string();
}

std::vector<ResampleRow> cmd_resample(const RunConfig& config) {
  const std::string& data = config.require("data");
  const fs::path out_dir = config.get("out_dir");
  const Corpus corpus = load_corpus(data, config.corpus_format(data));
  ResampleProtocol protocol;
  protocol.sizes = config.get_sizes("sizes");
  protocol.variants = config.variants();
  protocol.resamples = config.get_u64("resamples");
  protocol.seed = derive_seed(config.get_u64("seed"), "resample");
  protocol.train = config.train_config();
  config.write_echo(out_dir.string());
  auto rows = resample_eval(corpus, protocol);
  write_text(out_dir / "resample.tsv", format_resample_table(rows));
  return rows;
}

std::vector<std::string> parse_morpheme_spec(std::string_view spec) {
  std::vector<std::string> out;
  for (auto part : split(spec, '+')) {
    part = trim(part);
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

std::string predict_form(const Checkpoint& checkpoint, std::string_view spec, std::size_t beam) {
  const auto morphemes = lookup_morphemes(checkpoint, spec);
  const auto symbols = beam_decode(checkpoint.variant, morphemes, checkpoint.params, checkpoint.max_decode_len, beam);
  return checkpoint.alphabet.decode(symbols);
}

double gold_surprisal(const Checkpoint& checkpoint, std::string_view spec, std::string_view gold) {
  LexiconEntry entry;
  entry.morphemes = lookup_morphemes(checkpoint, spec);
  entry.surface = checkpoint.alphabet.encode(gold);
  if (entry.surface.empty()) fail(ErrorKind::Data, "empty gold form");
  return surprisal(checkpoint.variant, entry, checkpoint.params);
}

double morpheme_similarity(const Checkpoint& checkpoint, std::string_view a, std::string_view b) {
  const auto& table = checkpoint.params.morpheme_embedding;
  const std::size_t d = table.shape[1];
  const std::size_t ia = checkpoint.morphemes.index(a), ib = checkpoint.morphemes.index(b);
  const std::span<const double> all(table.value);
  return cosine_similarity(all.subspan(ia * d, d), all.subspan(ib * d, d));
}

std::string format_report_table(const std::string& run, Variant variant, const EvalReport& report) {
  std::string out =
      "# ACC: exact-match percent; MLD: mean edit distance per item; NLL: nats per symbol, EOS counted in sum and "
      "length\n"
      "run\tvariant\tACC\tMLD\tNLL\titems\tunknown_morpheme\n";
  out += run + "\t" + std::string(variant_tag(variant)) + "\t" + fixed(report.accuracy, 1) + "\t" +
         fixed(report.mean_edit_distance, 3) + "\t" + fixed(report.mean_surprisal, 3) + "\t" +
         std::to_string(report.items) + "\t" + std::to_string(report.unknown_morpheme_items) + "\n";
  return out;
}

std::string format_report_json(const std::string& run, Variant variant, const EvalReport& report) {
  nlohmann::ordered_json j;
  j["run"] = run;
  j["variant"] = variant_tag(variant);
  j["conventions"] = {{"nll", "nats per symbol; EOS included in sum and length"},
                      {"mld", "mean over items"},
                      {"unknown_morpheme", "scored as miss with edit distance |gold|; excluded from NLL"}};
  j["accuracy"] = report.accuracy;
  j["mean_edit_distance"] = report.mean_edit_distance;
  j["mean_surprisal"] = report.mean_surprisal;
  j["items"] = report.items;
  j["unknown_morpheme_items"] = report.unknown_morpheme_items;
  auto& records = j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    nlohmann::ordered_json rec;
    rec["item"] = r.item;
    rec["morphemes"] = r.morphemes;
    rec["gold"] = r.gold;
    rec["predicted"] = r.predicted;
    rec["correct"] = r.correct;
    rec["edit_distance"] = r.edit_distance;
    rec["unknown_morpheme"] = r.unknown_morpheme;
    if (!r.unknown_morpheme) rec["surprisal"] = r.surprisal;
    records.push_back(std::move(rec));
  }
  return j.dump(2) + "\n";
}

std::string format_resample_table(const std::vector<ResampleRow>& rows) {
  std::string out = "k\tvariant\tacc_mean\tacc_sd\tmld_mean\tmld_sd\tnll_mean\tnll_sd\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "\t" + std::string(variant_tag(r.variant)) + "\t" + fixed(r.accuracy.mean, 3) + "\t" +
           fixed(r.accuracy.sd, 3) + "\t" + fixed(r.edit_distance.mean, 4) + "\t" + fixed(r.edit_distance.sd, 4) +
           "\t" + fixed(r.surprisal.mean, 4) + "\t" + fixed(r.surprisal.sd, 4) + "\n";
  }
  return out;
}

}  // namespace gradphon
