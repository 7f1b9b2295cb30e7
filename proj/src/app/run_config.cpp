#include "app/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>

#include "error.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace gradphon {
namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"batch_size", "20"},
      {"beam", "1"},
      {"checkpoint", ""},
      {"clip_norm", "5"},
      {"coverage", "true"},
      {"data", ""},
      {"dev_frac", "0.1"},
      {"dim", "200"},
      {"dropout", "0.2"},
      {"format", "auto"},
      {"lr", "0.001"},
      {"max_epochs", "100"},
      {"min_lr", "1e-05"},
      {"noise", "per-step"},
      {"out_dir", "out"},
      {"output", ""},
      {"part", "test"},
      {"patience", "1"},
      {"projection", "none"},
      {"resamples", "10"},
      {"seed", "0"},
      {"sizes", "200,400,600,800"},
      {"split_dir", ""},
      {"test_frac", "0.1"},
      {"train_frac", "0.8"},
      {"variant", "pos-indep"},
      {"variants", "pos-indep,pos-dep,joint"},
  };
  return d;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  fail(ErrorKind::Config, "config key '" + key + "': '" + value + "' is not " + what);
}

}  // namespace

RunConfig::RunConfig() : values_(defaults()) {}

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [key, _] : defaults()) k.push_back(key);
    return k;
  }();
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!defaults().count(key)) fail(ErrorKind::Usage, "unknown config key '" + key + "'");
  values_[key] = value;
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    set(std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))));
  }
}

bool RunConfig::has(const std::string& key) const {
  auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorKind::Usage, "unknown config key '" + key + "'");
  return it->second;
}

const std::string& RunConfig::require(const std::string& key) const {
  const std::string& v = get(key);
  if (v.empty()) fail(ErrorKind::Usage, "missing required setting '" + key + "'");
  return v;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a nonnegative integer");
  return out;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) bad_value(key, v, "a number");
    return d;
  } catch (const std::logic_error&) {
    bad_value(key, v, "a number");
  }
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<std::size_t> RunConfig::get_sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  for (auto part : split(get(key), ',')) {
    part = trim(part);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) bad_value(key, get(key), "a list of sizes");
    out.push_back(v);
  }
  return out;
}

Variant RunConfig::variant() const {
  const auto v = parse_variant(get("variant"));
  if (!v) bad_value("variant", get("variant"), "one of pos-indep, pos-dep, joint");
  return *v;
}

std::vector<Variant> RunConfig::variants() const {
  std::vector<Variant> out;
  for (auto part : split(get("variants"), ',')) {
    const auto v = parse_variant(trim(part));
    if (!v) bad_value("variants", get("variants"), "a list of pos-indep, pos-dep, joint");
    out.push_back(*v);
  }
  return out;
}

CorpusFormat RunConfig::corpus_format(const std::string& path) const {
  const std::string& f = get("format");
  if (f == "unimorph") return CorpusFormat::UniMorph;
  if (f == "weighted") return CorpusFormat::Weighted;
  if (f != "auto") bad_value("format", f, "one of auto, unimorph, weighted");
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    return split(line, '\t').size() == 4 ? CorpusFormat::Weighted : CorpusFormat::UniMorph;
  }
  fail(ErrorKind::Data, path + ": empty file");
}

TrainConfig RunConfig::train_config() const {
  TrainConfig c;
  c.variant = variant();
  c.dim = get_u64("dim");
  c.dropout = get_double("dropout");
  c.learning_rate = get_double("lr");
  c.min_learning_rate = get_double("min_lr");
  c.patience = get_u64("patience");
  c.batch_size = get_u64("batch_size");
  c.max_epochs = get_u64("max_epochs");
  c.clip_norm = get_double("clip_norm");
  c.seed = derive_seed(get_u64("seed"), "model");
  const std::string& noise = get("noise");
  if (noise == "per-step") c.noise_per_step = true;
  else if (noise == "per-word") c.noise_per_step = false;
  else bad_value("noise", noise, "per-step or per-word");
  c.validate();
  return c;
}

SplitSpec RunConfig::split_spec() const {
  SplitSpec s;
  s.train = get_double("train_frac");
  s.dev = get_double("dev_frac");
  s.test = get_double("test_frac");
  s.coverage = get_bool("coverage");
  s.seed = derive_seed(get_u64("seed"), "split");
  return s;
}

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

void RunConfig::write_echo(const std::string& out_dir) const {
  std::filesystem::create_directories(out_dir);
  const auto path = (std::filesystem::path(out_dir) / "config.txt").string();
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << dump();
}

}  // namespace gradphon
