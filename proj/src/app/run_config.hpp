#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "data/corpus.hpp"
#include "eval/metrics.hpp"
#include "training/trainer.hpp"

namespace gradphon {

/// Flat key=value run configuration: built-in defaults, then a config file,
/// then explicit overrides. The effective map is echoed into every output
/// directory so a run can be repeated exactly.
class RunConfig {
 public:
  RunConfig();

  void set(const std::string& key, const std::string& value);
  /// Reads key=value lines; '#' starts a comment line.
  void load_file(const std::string& path);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  /// Required keys: missing or empty is a usage error.
  const std::string& require(const std::string& key) const;

  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::size_t> get_sizes(const std::string& key) const;

  Variant variant() const;
  std::vector<Variant> variants() const;
  CorpusFormat corpus_format(const std::string& path) const;
  TrainConfig train_config() const;
  SplitSpec split_spec() const;

  /// Sorted key=value lines.
  std::string dump() const;
  void write_echo(const std::string& out_dir) const;

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace gradphon
