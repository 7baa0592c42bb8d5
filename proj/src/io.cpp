#include "chimera/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace chimera {
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool skippable(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t.front() == '#';
}

template <typename T>
bool parse_int(const std::string& token, T& out) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_real(const std::string& token, double& out) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

Index parse_index(const std::string& token, Index bound, const fs::path& file, std::size_t line,
                  const char* what) {
  Index v = 0;
  if (!parse_int(token, v)) throw FormatError(file, line, token, std::string("malformed ") + what);
  if (v < 0 || v >= bound) {
    throw FormatError(file, line, token,
                      std::string(what) + " " + token + " out of range [0, " + std::to_string(bound) + ")");
  }
  return v;
}

double parse_weight(const std::string& token, const fs::path& file, std::size_t line) {
  double v = 0.0;
  if (!parse_real(token, v)) throw FormatError(file, line, token, "malformed weight");
  if (!std::isfinite(v) || v < 0.0) throw FormatError(file, line, token, "weight must be finite and non-negative");
  return v;
}

std::vector<Triplet> read_triplets(const fs::path& file, Index rows, Index cols, const char* col_name) {
  std::ifstream in(file);
  if (!in) throw FormatError(file, 0, file.string(), "cannot open file");
  std::vector<Triplet> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (skippable(line)) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto parts = split(line, '\t');
    if (parts.size() != 3) throw FormatError(file, number, line, "expected three tab-separated fields");
    const Index r = parse_index(parts[0], rows, file, number, "node index");
    const Index c = parse_index(parts[1], cols, file, number, col_name);
    out.emplace_back(r, c, parse_weight(parts[2], file, number));
  }
  return out;
}

std::vector<std::string> read_names(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw FormatError(file, 0, file.string(), "cannot open file");
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    names.push_back(line);
  }
  return names;
}

std::string get(const ConfigMap& m, const std::string& key, const fs::path& origin) {
  auto it = m.find(key);
  if (it == m.end()) throw FormatError(origin, 0, key, "missing key '" + key + "'");
  return it->second;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config key '" + key + "' expects a boolean, got '" + v + "'");
}

template <typename T>
T config_int(const std::string& key, const std::string& v) {
  T out{};
  if (!parse_int(v, out)) throw std::invalid_argument("config key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

double config_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!parse_real(v, out)) throw std::invalid_argument("config key '" + key + "' expects a number, got '" + v + "'");
  return out;
}

template <typename T, typename Parse>
std::vector<T> config_list(const std::string& key, const std::string& v, Parse parse) {
  std::vector<T> out;
  for (const auto& part : split(v, ',')) {
    const std::string t = trim(part);
    if (t.empty()) continue;
    out.push_back(parse(key, t));
  }
  if (out.empty()) throw std::invalid_argument("config key '" + key + "' expects a non-empty list");
  return out;
}

// Removes `key` from the map and hands its value to `set`.
template <typename Set>
void consume(ConfigMap& m, const std::string& key, Set set) {
  auto it = m.find(key);
  if (it == m.end()) return;
  set(it->second);
  m.erase(it);
}

}  // namespace

FormatError::FormatError(fs::path file, std::size_t line, std::string token, const std::string& reason)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << file.string();
        if (line > 0) msg << ":" << line;
        msg << ": " << reason << " (token '" << token << "')";
        return msg.str();
      }()),
      file_(std::move(file)),
      line_(line),
      token_(std::move(token)) {}

// ----------------------------------------------------------------- helpers

std::string format_number(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, value);
  return buf;
}

std::string format_exact(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path, 0, path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ----------------------------------------------------------------- config

ConfigMap parse_config(const std::string& text, const fs::path& origin) {
  ConfigMap m;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (skippable(line)) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(origin, number, trim(line), "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw FormatError(origin, number, trim(line), "empty key");
    if (m.count(key)) throw FormatError(origin, number, key, "duplicate key");
    m[key] = trim(line.substr(eq + 1));
  }
  return m;
}

ConfigMap read_config(const fs::path& path) { return parse_config(read_file(path), path); }

void apply_config(ConfigMap& m, Hyperparameters& hp) {
  consume(m, "alpha", [&](const std::string& v) { hp.alpha = config_real("alpha", v); });
  consume(m, "beta", [&](const std::string& v) { hp.beta = config_real("beta", v); });
  consume(m, "lambda1", [&](const std::string& v) { hp.lambda1 = config_real("lambda1", v); });
  consume(m, "lambda2", [&](const std::string& v) { hp.lambda2 = config_real("lambda2", v); });
  consume(m, "rank", [&](const std::string& v) { hp.rank = config_int<Index>("rank", v); });
  consume(m, "max_iters", [&](const std::string& v) { hp.max_iters = config_int<int>("max_iters", v); });
  consume(m, "tol", [&](const std::string& v) { hp.tol = config_real("tol", v); });
  consume(m, "neg_sample_ratio", [&](const std::string& v) { hp.neg_sample_ratio = config_real("neg_sample_ratio", v); });
  consume(m, "seed", [&](const std::string& v) { hp.seed = config_int<std::uint64_t>("seed", v); });
  consume(m, "gradient_mode", [&](const std::string& v) { hp.gradient_mode = gradient_mode_from_string(v); });
  consume(m, "max_halvings", [&](const std::string& v) { hp.max_halvings = config_int<int>("max_halvings", v); });
  consume(m, "threads", [&](const std::string& v) { hp.threads = config_int<int>("threads", v); });
}

void apply_config(ConfigMap& m, SyntheticConfig& c) {
  consume(m, "nodes", [&](const std::string& v) { c.nodes = config_int<Index>("nodes", v); });
  consume(m, "edges", [&](const std::string& v) { c.edges = config_int<Index>("edges", v); });
  consume(m, "groups", [&](const std::string& v) { c.groups = config_int<int>("groups", v); });
  consume(m, "words_per_group", [&](const std::string& v) { c.words_per_group = config_int<Index>("words_per_group", v); });
  consume(m, "timestamps", [&](const std::string& v) { c.timestamps = config_int<Index>("timestamps", v); });
  consume(m, "p", [&](const std::string& v) { c.p = config_real("p", v); });
  consume(m, "word_crossover", [&](const std::string& v) { c.word_crossover = config_real("word_crossover", v); });
  consume(m, "transition_probability",
          [&](const std::string& v) { c.transition_probability = config_real("transition_probability", v); });
  consume(m, "max_transition_fraction",
          [&](const std::string& v) { c.max_transition_fraction = config_real("max_transition_fraction", v); });
  consume(m, "tokens_per_node", [&](const std::string& v) { c.tokens_per_node = config_int<Index>("tokens_per_node", v); });
  consume(m, "seed", [&](const std::string& v) { c.seed = config_int<std::uint64_t>("seed", v); });
}

void apply_config(ConfigMap& m, SearchSpace& s) {
  consume(m, "alpha", [&](const std::string& v) { s.alpha = config_list<double>("alpha", v, config_real); });
  consume(m, "beta", [&](const std::string& v) { s.beta = config_list<double>("beta", v, config_real); });
  consume(m, "lambda1", [&](const std::string& v) { s.lambda1 = config_list<double>("lambda1", v, config_real); });
  consume(m, "lambda2", [&](const std::string& v) { s.lambda2 = config_list<double>("lambda2", v, config_real); });
  consume(m, "rank", [&](const std::string& v) { s.rank = config_list<Index>("rank", v, config_int<Index>); });
  consume(m, "clusters", [&](const std::string& v) { s.clusters = config_list<int>("clusters", v, config_int<int>); });
  consume(m, "budget", [&](const std::string& v) { s.budget = config_int<int>("budget", v); });
  consume(m, "strategy", [&](const std::string& v) { s.strategy = search_strategy_from_string(v); });
  consume(m, "seed", [&](const std::string& v) { s.seed = config_int<std::uint64_t>("seed", v); });
}

void require_consumed(const ConfigMap& m, const fs::path& origin) {
  if (m.empty()) return;
  std::string keys;
  for (const auto& [k, v] : m) keys += (keys.empty() ? "" : ", ") + k;
  throw std::invalid_argument(origin.string() + ": unknown config key(s): " + keys);
}

std::string to_config(const Hyperparameters& hp) {
  std::ostringstream o;
  o << "alpha=" << format_exact(hp.alpha) << "\n"
    << "beta=" << format_exact(hp.beta) << "\n"
    << "lambda1=" << format_exact(hp.lambda1) << "\n"
    << "lambda2=" << format_exact(hp.lambda2) << "\n"
    << "rank=" << hp.rank << "\n"
    << "max_iters=" << hp.max_iters << "\n"
    << "tol=" << format_exact(hp.tol) << "\n"
    << "neg_sample_ratio=" << format_exact(hp.neg_sample_ratio) << "\n"
    << "seed=" << hp.seed << "\n"
    << "gradient_mode=" << to_string(hp.gradient_mode) << "\n"
    << "max_halvings=" << hp.max_halvings << "\n";
  return o.str();
}

std::string to_config(const SyntheticConfig& c) {
  std::ostringstream o;
  o << "nodes=" << c.nodes << "\n"
    << "edges=" << c.edges << "\n"
    << "groups=" << c.groups << "\n"
    << "words_per_group=" << c.words_per_group << "\n"
    << "timestamps=" << c.timestamps << "\n"
    << "p=" << format_exact(c.p) << "\n"
    << "word_crossover=" << format_exact(c.word_crossover) << "\n"
    << "transition_probability=" << format_exact(c.transition_probability) << "\n"
    << "max_transition_fraction=" << format_exact(c.max_transition_fraction) << "\n"
    << "tokens_per_node=" << c.tokens_per_node << "\n"
    << "seed=" << c.seed << "\n";
  return o.str();
}

// ----------------------------------------------------------------- datasets

Dataset load_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.txt";
  if (!fs::exists(manifest_path)) throw FormatError(manifest_path, 0, manifest_path.string(), "manifest not found");
  const ConfigMap manifest = read_config(manifest_path);

  auto number = [&](const std::string& key) {
    Index v = 0;
    const std::string s = get(manifest, key, manifest_path);
    if (!parse_int(s, v) || v < 0) throw FormatError(manifest_path, 0, s, "'" + key + "' must be a non-negative integer");
    return v;
  };
  const Index n = number("nodes");
  const Index d = number("terms");
  const Index T = number("timestamps");
  if (n < 1 || T < 1) throw FormatError(manifest_path, 0, std::to_string(n < 1 ? n : T), "nodes and timestamps must be positive");
  bool directed = false;
  bool has_labels = false;
  try {
    directed = parse_bool(get(manifest, "directed", manifest_path), "directed");
    auto it = manifest.find("labels");
    has_labels = it != manifest.end() && parse_bool(it->second, "labels");
  } catch (const std::invalid_argument& e) {
    throw FormatError(manifest_path, 0, "directed/labels", e.what());
  }

  auto file_for = [&](const std::string& kind, Index t) {
    const std::string key = kind + "." + std::to_string(t + 1);
    auto it = manifest.find(key);
    return dir / (it != manifest.end() ? it->second : kind + "_" + std::to_string(t + 1) + ".tsv");
  };

  std::vector<std::vector<Triplet>> edges;
  std::vector<std::vector<Triplet>> content;
  for (Index t = 0; t < T; ++t) {
    edges.push_back(read_triplets(file_for("edges", t), n, n, "node index"));
    const fs::path content_file = file_for("content", t);
    if (d == 0 && !fs::exists(content_file)) {
      content.emplace_back();
    } else {
      content.push_back(read_triplets(content_file, n, d, "term index"));
    }
  }

  std::optional<Labels> labels;
  if (has_labels) {
    Labels all;
    for (Index t = 0; t < T; ++t) {
      const fs::path file = file_for("labels", t);
      std::ifstream in(file);
      if (!in) throw FormatError(file, 0, file.string(), "cannot open file");
      std::vector<int> row(static_cast<std::size_t>(n), -1);
      std::string line;
      std::size_t ln = 0;
      while (std::getline(in, line)) {
        ++ln;
        if (skippable(line)) continue;
        if (line.back() == '\r') line.pop_back();
        const auto parts = split(line, '\t');
        if (parts.size() != 2) throw FormatError(file, ln, line, "expected node<TAB>label");
        const Index node = parse_index(parts[0], n, file, ln, "node index");
        int label = 0;
        if (!parse_int(parts[1], label) || label < 0) throw FormatError(file, ln, parts[1], "malformed label");
        row[static_cast<std::size_t>(node)] = label;
      }
      for (Index i = 0; i < n; ++i) {
        if (row[static_cast<std::size_t>(i)] < 0) throw FormatError(file, 0, std::to_string(i), "node has no label");
      }
      all.push_back(std::move(row));
    }
    labels = std::move(all);
  }

  Dataset ds{[&] {
               try {
                 return TemporalNetwork::from_triplets(n, d, edges, content, directed);
               } catch (const std::invalid_argument& e) {
                 throw FormatError(dir, 0, dir.string(), e.what());
               }
             }(),
             std::move(labels), {}, {}};
  if (auto it = manifest.find("node_names"); it != manifest.end()) ds.node_names = read_names(dir / it->second);
  if (auto it = manifest.find("term_names"); it != manifest.end()) ds.term_names = read_names(dir / it->second);
  return ds;
}

void write_dataset(const fs::path& dir, const TemporalNetwork& network, const Labels* labels) {
  fs::create_directories(dir);
  const Index T = network.timestamps();
  std::ostringstream manifest;
  manifest << "format=chimera-dataset\n"
           << "version=1\n"
           << "nodes=" << network.nodes() << "\n"
           << "terms=" << network.terms() << "\n"
           << "timestamps=" << T << "\n"
           << "directed=" << (network.directed() ? "true" : "false") << "\n"
           << "labels=" << (labels ? "true" : "false") << "\n";
  for (Index t = 0; t < T; ++t) {
    const std::string s = std::to_string(t + 1);
    manifest << "edges." << s << "=edges_" << s << ".tsv\n"
             << "content." << s << "=content_" << s << ".tsv\n";
    if (labels) manifest << "labels." << s << "=labels_" << s << ".tsv\n";

    std::ostringstream edges;
    const SparseMatrix& a = network.adjacency(t);
    for (Index r = 0; r < a.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
        if (!network.directed() && it.col() < it.row()) continue;  // mirrored on load
        edges << it.row() << '\t' << it.col() << '\t' << format_exact(it.value()) << '\n';
      }
    }
    write_file_atomic(dir / ("edges_" + s + ".tsv"), edges.str());

    std::ostringstream content;
    const SparseMatrix& c = network.content(t);
    for (Index r = 0; r < c.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(c, r); it; ++it) {
        content << it.row() << '\t' << it.col() << '\t' << format_exact(it.value()) << '\n';
      }
    }
    write_file_atomic(dir / ("content_" + s + ".tsv"), content.str());

    if (labels) {
      std::ostringstream lab;
      const auto& row = labels->at(static_cast<std::size_t>(t));
      for (std::size_t i = 0; i < row.size(); ++i) lab << i << '\t' << row[i] << '\n';
      write_file_atomic(dir / ("labels_" + s + ".tsv"), lab.str());
    }
  }
  write_file_atomic(dir / "manifest.txt", manifest.str());
}

// ----------------------------------------------------------------- checkpoints

Checkpoint make_checkpoint(const FitResult& fit, const Hyperparameters& hp) {
  Checkpoint c;
  c.hp = hp;
  c.mask_ratio = fit.mask.ratio;
  c.mask_seed = fit.mask.seed;
  c.alpha_used = fit.alpha_used;
  c.final_objective = fit.final_objective;
  c.iterations = fit.iterations;
  c.model = fit.model;
  return c;
}

namespace {

void emit_matrix(std::ostringstream& o, const std::string& name, const Matrix& m) {
  o << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) o << (j ? " " : "") << format_exact(m(i, j));
    o << '\n';
  }
}

class CheckpointReader {
 public:
  CheckpointReader(const std::string& text, fs::path origin) : in_(text), origin_(std::move(origin)) {}

  std::vector<std::string> next_line() {
    std::string line;
    if (!std::getline(in_, line)) throw FormatError(origin_, line_ + 1, "<eof>", "truncated checkpoint");
    ++line_;
    std::vector<std::string> out;
    for (auto& tok : split(line, ' ')) {
      if (!tok.empty()) out.push_back(tok);
    }
    return out;
  }

  std::string field(const std::string& name) {
    const auto parts = next_line();
    if (parts.size() != 2 || parts[0] != name) {
      throw FormatError(origin_, line_, parts.empty() ? "" : parts[0], "expected field '" + name + "'");
    }
    return parts[1];
  }

  double real(const std::string& name) {
    const std::string v = field(name);
    double out = 0.0;
    if (!parse_real(v, out)) throw FormatError(origin_, line_, v, "malformed number for '" + name + "'");
    return out;
  }

  template <typename T>
  T integer(const std::string& name) {
    const std::string v = field(name);
    T out{};
    if (!parse_int(v, out)) throw FormatError(origin_, line_, v, "malformed integer for '" + name + "'");
    return out;
  }

  Matrix matrix(const std::string& name) {
    const auto head = next_line();
    Index rows = 0;
    Index cols = 0;
    if (head.size() != 4 || head[0] != "matrix" || head[1] != name || !parse_int(head[2], rows) ||
        !parse_int(head[3], cols) || rows < 0 || cols < 0) {
      throw FormatError(origin_, line_, head.empty() ? "" : head[0], "expected matrix header for " + name);
    }
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      const auto row = next_line();
      if (static_cast<Index>(row.size()) != cols) {
        throw FormatError(origin_, line_, std::to_string(row.size()), "wrong number of values in " + name);
      }
      for (Index j = 0; j < cols; ++j) {
        double v = 0.0;
        if (!parse_real(row[static_cast<std::size_t>(j)], v)) {
          throw FormatError(origin_, line_, row[static_cast<std::size_t>(j)], "malformed value in " + name);
        }
        m(i, j) = v;
      }
    }
    return m;
  }

  std::size_t line() const noexcept { return line_; }
  const fs::path& origin() const noexcept { return origin_; }

 private:
  std::istringstream in_;
  fs::path origin_;
  std::size_t line_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& c) {
  std::ostringstream o;
  o << "chimera-checkpoint " << c.format_version << '\n'
    << "alpha " << format_exact(c.hp.alpha) << '\n'
    << "beta " << format_exact(c.hp.beta) << '\n'
    << "lambda1 " << format_exact(c.hp.lambda1) << '\n'
    << "lambda2 " << format_exact(c.hp.lambda2) << '\n'
    << "rank " << c.hp.rank << '\n'
    << "max_iters " << c.hp.max_iters << '\n'
    << "tol " << format_exact(c.hp.tol) << '\n'
    << "neg_sample_ratio " << format_exact(c.hp.neg_sample_ratio) << '\n'
    << "seed " << c.hp.seed << '\n'
    << "gradient_mode " << to_string(c.hp.gradient_mode) << '\n'
    << "max_halvings " << c.hp.max_halvings << '\n'
    << "mask_ratio " << format_exact(c.mask_ratio) << '\n'
    << "mask_seed " << c.mask_seed << '\n'
    << "alpha_used " << format_exact(c.alpha_used) << '\n'
    << "final_objective " << format_exact(c.final_objective) << '\n'
    << "iterations " << c.iterations << '\n'
    << "timestamps " << c.model.timestamps() << '\n';
  for (Index t = 0; t < c.model.timestamps(); ++t) {
    emit_matrix(o, "U" + std::to_string(t + 1), c.model.U[static_cast<std::size_t>(t)]);
  }
  emit_matrix(o, "V", c.model.V);
  emit_matrix(o, "W", c.model.W);
  o << "end\n";
  return o.str();
}

Checkpoint parse_checkpoint(const std::string& text, const fs::path& origin) {
  CheckpointReader r(text, origin);
  Checkpoint c;
  const auto magic = r.next_line();
  if (magic.size() != 2 || magic[0] != "chimera-checkpoint") {
    throw FormatError(origin, 1, magic.empty() ? "" : magic[0], "not a chimera checkpoint");
  }
  if (!parse_int(magic[1], c.format_version)) throw FormatError(origin, 1, magic[1], "malformed format version");
  if (c.format_version != Checkpoint::kFormatVersion) {
    throw FormatError(origin, 1, magic[1],
                      "unsupported checkpoint format version " + magic[1] + " (this build reads version " +
                          std::to_string(Checkpoint::kFormatVersion) + ")");
  }
  c.hp.alpha = r.real("alpha");
  c.hp.beta = r.real("beta");
  c.hp.lambda1 = r.real("lambda1");
  c.hp.lambda2 = r.real("lambda2");
  c.hp.rank = r.integer<Index>("rank");
  c.hp.max_iters = r.integer<int>("max_iters");
  c.hp.tol = r.real("tol");
  c.hp.neg_sample_ratio = r.real("neg_sample_ratio");
  c.hp.seed = r.integer<std::uint64_t>("seed");
  try {
    c.hp.gradient_mode = gradient_mode_from_string(r.field("gradient_mode"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(origin, r.line(), "gradient_mode", e.what());
  }
  c.hp.max_halvings = r.integer<int>("max_halvings");
  c.mask_ratio = r.real("mask_ratio");
  c.mask_seed = r.integer<std::uint64_t>("mask_seed");
  c.alpha_used = r.real("alpha_used");
  c.final_objective = r.real("final_objective");
  c.iterations = r.integer<int>("iterations");
  const auto T = r.integer<Index>("timestamps");
  if (T < 1) throw FormatError(origin, r.line(), std::to_string(T), "timestamps must be positive");
  for (Index t = 0; t < T; ++t) c.model.U.push_back(r.matrix("U" + std::to_string(t + 1)));
  c.model.V = r.matrix("V");
  c.model.W = r.matrix("W");
  const auto tail = r.next_line();
  if (tail.size() != 1 || tail[0] != "end") throw FormatError(origin, r.line(), tail.empty() ? "" : tail[0], "expected 'end'");

  for (const auto& u : c.model.U) {
    if (u.rows() != c.model.V.rows() || u.cols() != c.model.V.cols()) {
      throw FormatError(origin, 0, "U", "U and V shapes disagree");
    }
  }
  if (c.model.W.cols() != c.model.V.cols() || c.model.V.cols() != c.hp.rank) {
    throw FormatError(origin, 0, "W", "factor ranks disagree with the stored rank");
  }
  return c;
}

void save_model(const fs::path& path, const Checkpoint& checkpoint) {
  write_file_atomic(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_model(const fs::path& path) { return parse_checkpoint(read_file(path), path); }

// ----------------------------------------------------------------- labels

std::string format_labels(const Labels& labels, int first_timestamp) {
  std::ostringstream o;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    for (std::size_t i = 0; i < labels[t].size(); ++i) {
      o << (static_cast<int>(t) + first_timestamp) << '\t' << i << '\t' << labels[t][i] << '\n';
    }
  }
  return o.str();
}

void write_labels(const fs::path& path, const Labels& labels, int first_timestamp) {
  write_file_atomic(path, format_labels(labels, first_timestamp));
}

std::map<int, std::vector<int>> read_labels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, 0, path.string(), "cannot open file");
  std::map<int, std::map<Index, int>> raw;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (skippable(line)) continue;
    if (line.back() == '\r') line.pop_back();
    const auto parts = split(line, '\t');
    if (parts.size() != 3) throw FormatError(path, ln, line, "expected timestamp<TAB>node<TAB>label");
    int t = 0;
    Index node = 0;
    int label = 0;
    if (!parse_int(parts[0], t)) throw FormatError(path, ln, parts[0], "malformed timestamp");
    if (!parse_int(parts[1], node) || node < 0) throw FormatError(path, ln, parts[1], "malformed node index");
    if (!parse_int(parts[2], label) || label < 0) throw FormatError(path, ln, parts[2], "malformed label");
    if (!raw[t].emplace(node, label).second) throw FormatError(path, ln, parts[1], "duplicate node");
  }
  std::map<int, std::vector<int>> out;
  for (const auto& [t, nodes] : raw) {
    std::vector<int> row(nodes.size());
    Index expect = 0;
    for (const auto& [node, label] : nodes) {
      if (node != expect) throw FormatError(path, 0, std::to_string(expect), "node missing at timestamp " + std::to_string(t));
      row[static_cast<std::size_t>(node)] = label;
      ++expect;
    }
    out.emplace(t, std::move(row));
  }
  return out;
}

std::string format_matrix(const Matrix& m, int precision) {
  std::ostringstream o;
  for (Index i = 0; i < m.rows(); ++i) {
    o << i;
    for (Index j = 0; j < m.cols(); ++j) o << '\t' << format_number(m(i, j), precision);
    o << '\n';
  }
  return o.str();
}

}  // namespace chimera
