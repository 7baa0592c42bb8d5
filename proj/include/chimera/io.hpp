#pragma once

#include "chimera/factorization.hpp"
#include "chimera/synthetic.hpp"
#include "chimera/tuner.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chimera {

/// Parse failure pointing at a file, a 1-based line (0 when not line specific)
/// and the offending token.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::filesystem::path file, std::size_t line, std::string token, const std::string& reason);

  const std::filesystem::path& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& token() const noexcept { return token_; }

 private:
  std::filesystem::path file_;
  std::size_t line_;
  std::string token_;
};

// ---------------------------------------------------------------------------
// Dataset directories
//
// A dataset is a directory holding `manifest.txt` (key=value lines) and one
// tab-separated triplet file per timestamp and matrix:
//
//   edges_<t>.tsv    src<TAB>dst<TAB>weight     (0-based node indices)
//   content_<t>.tsv  node<TAB>term<TAB>weight   (0-based indices)
//   labels_<t>.tsv   node<TAB>label             (optional ground truth)
//
// Timestamps t in file names run from 1 to T. Undirected datasets may list
// each edge once; edges are mirrored on load. Lines starting with '#' and
// blank lines are ignored.
// ---------------------------------------------------------------------------

using Labels = std::vector<std::vector<int>>;  // labels[t][node]

struct Dataset {
  TemporalNetwork network;
  std::optional<Labels> labels;
  std::vector<std::string> node_names;  // empty when absent
  std::vector<std::string> term_names;
};

Dataset load_dataset(const std::filesystem::path& directory);
void write_dataset(const std::filesystem::path& directory, const TemporalNetwork& network,
                   const Labels* labels = nullptr);

// ---------------------------------------------------------------------------
// Model checkpoints: a versioned text format with exact (shortest round-trip)
// decimal encodings of every matrix entry.
// ---------------------------------------------------------------------------

struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  Hyperparameters hp;
  double mask_ratio = 0.0;
  std::uint64_t mask_seed = 0;
  double alpha_used = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  FactorModel model;
};

Checkpoint make_checkpoint(const FitResult& fit, const Hyperparameters& hp);
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(const std::string& text, const std::filesystem::path& origin = "<memory>");
void save_model(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Flat key=value configuration files.
// ---------------------------------------------------------------------------

using ConfigMap = std::map<std::string, std::string>;

ConfigMap read_config(const std::filesystem::path& path);
ConfigMap parse_config(const std::string& text, const std::filesystem::path& origin = "<memory>");

/// Each consumes the keys it knows from `config` and leaves the rest.
void apply_config(ConfigMap& config, Hyperparameters& hp);
void apply_config(ConfigMap& config, SyntheticConfig& synthetic);
void apply_config(ConfigMap& config, SearchSpace& space);
/// Throws std::invalid_argument naming any key left unconsumed.
void require_consumed(const ConfigMap& config, const std::filesystem::path& origin);

std::string to_config(const Hyperparameters& hp);
std::string to_config(const SyntheticConfig& synthetic);

// ---------------------------------------------------------------------------
// Label files: timestamp<TAB>node<TAB>label, timestamps numbered from `first`.
// ---------------------------------------------------------------------------

std::string format_labels(const Labels& labels, int first_timestamp = 1);
void write_labels(const std::filesystem::path& path, const Labels& labels, int first_timestamp = 1);
/// Timestamp -> per-node labels. Every timestamp must list every node once.
std::map<int, std::vector<int>> read_labels(const std::filesystem::path& path);

/// Embedding matrix as node<TAB>v_1<TAB>...<TAB>v_k with `precision` significant digits.
std::string format_matrix(const Matrix& m, int precision = 6);

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

/// `precision` significant digits, e.g. 0.333333 for 1/3 at precision 6.
std::string format_number(double value, int precision = 6);
/// Shortest decimal that parses back to exactly `value`.
std::string format_exact(double value);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace chimera
