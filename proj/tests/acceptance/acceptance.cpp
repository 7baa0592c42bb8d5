// Acceptance suite: prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails.

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

using namespace chimera;
namespace fs = std::filesystem;
using chimera::testing::median;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const Outcome& o, Clock::time_point start) {
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("%s %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <class F>
void criterion(const std::string& name, double budget_seconds, F body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (secs > budget_seconds) {
    o.pass = false;
    o.detail += "; exceeded runtime budget of " + std::to_string(static_cast<int>(budget_seconds)) + "s";
  }
  report(name, o, start);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// The first `count` snapshots of a network.
TemporalNetwork prefix(const TemporalNetwork& net, Index count) {
  std::vector<SparseMatrix> a;
  std::vector<SparseMatrix> c;
  for (Index t = 0; t < count; ++t) {
    a.push_back(net.adjacency(t));
    c.push_back(net.content(t));
  }
  return TemporalNetwork(std::move(a), std::move(c), net.directed());
}

Hyperparameters synthetic_settings(std::uint64_t seed) {
  Hyperparameters hp;
  hp.alpha = 1e-5;
  hp.beta = 1000;
  hp.lambda1 = 0.1;
  hp.lambda2 = 1e-4;
  hp.rank = 5;
  hp.max_iters = 1000;
  hp.seed = seed;
  return hp;
}

SyntheticConfig desk_config(double p, Index timestamps, std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.nodes = 500;
  cfg.edges = 2000;
  cfg.groups = 5;
  cfg.timestamps = timestamps;
  cfg.p = p;
  cfg.seed = seed;
  return cfg;
}

// ------------------------------------------------------------------ criteria

Outcome gradient_correctness() {
  std::mt19937_64 rng(2024);
  int instances = 0;
  int entries = 0;
  int bad = 0;
  double worst = 0.0;
  for (; instances < 60; ++instances) {
    const Index n = 2 + static_cast<Index>(rng() % 5);
    const Index d = 1 + static_cast<Index>(rng() % 4);
    const Index T = 1 + static_cast<Index>(rng() % 3);
    const Index k = 1 + static_cast<Index>(rng() % 3);
    const auto inst = chimera::testing::random_instance(n, d, T, k, rng(), rng() % 2 == 0);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    Hyperparameters hp;
    hp.beta = 2.0 * w(rng);
    hp.lambda1 = w(rng);
    hp.lambda2 = w(rng);
    hp.rank = k;
    const ActiveMask mask = sample_active_mask(inst.network, 0.0, 0);
    const auto g = compute_gradients(inst.network, inst.model, hp, compute_residuals(inst.network, inst.model, mask));
    const auto analytic = chimera::testing::flatten(g);
    const auto numeric = chimera::testing::finite_difference_gradient(inst.network, inst.model, hp, mask);
    for (std::size_t e = 0; e < analytic.size(); ++e) {
      ++entries;
      if (!chimera::testing::gradient_close(analytic[e], numeric[e])) ++bad;
      const double scale = std::max({std::abs(analytic[e]), std::abs(numeric[e]), 1e-300});
      worst = std::max(worst, std::abs(analytic[e] - numeric[e]) / scale);
    }
  }
  return {bad == 0, std::to_string(instances) + " instances, " + std::to_string(entries) + " entries, " +
                        std::to_string(bad) + " mismatches, worst relative error " + fmt("%.2e", worst)};
}

Outcome descent_property() {
  int ok = 0;
  std::ostringstream detail;
  double worst_ratio = 0.0;
  int max_halvings = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SyntheticConfig cfg;
    cfg.nodes = 300;
    cfg.edges = 1200;
    cfg.timestamps = 3;
    cfg.seed = seed;
    const auto data = generate(cfg);
    Hyperparameters hp;
    hp.alpha = 0.005;
    hp.beta = 1.0;
    hp.lambda1 = 1e-3;
    hp.lambda2 = 1e-3;
    hp.rank = 5;
    hp.max_iters = 300;
    hp.tol = 0.0;
    hp.max_halvings = 3;
    hp.neg_sample_ratio = 0.0;
    hp.seed = seed;
    const FitResult r = fit(data.network, hp);
    bool monotone = true;
    for (std::size_t i = 1; i < r.trace.size(); ++i) monotone = monotone && r.trace[i] <= r.trace[i - 1];
    const double ratio = r.final_objective / r.trace.front();
    worst_ratio = std::max(worst_ratio, ratio);
    max_halvings = std::max(max_halvings, r.halvings);
    if (monotone && ratio <= 0.5 && r.halvings <= 3) ++ok;
  }
  detail << ok << "/10 instances monotone with final/initial <= 0.5; worst ratio " << fmt("%.4f", worst_ratio)
         << ", most halvings " << max_halvings;
  return {ok == 10, detail.str()};
}

struct Recovery {
  std::vector<std::vector<double>> purity;   // [timestamp][seed]
  std::vector<std::vector<double>> jaccard;
};

Recovery recovery(double p) {
  Recovery rec;
  rec.purity.assign(3, {});
  rec.jaccard.assign(3, {});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = generate(desk_config(p, 3, seed));
    const FitResult r = fit(data.network, synthetic_settings(seed));
    const auto found = detect_communities(r.model, 5, {.seed = seed});
    for (std::size_t t = 0; t < 3; ++t) {
      rec.purity[t].push_back(purity(found.labels[t], data.truth[t]));
      rec.jaccard[t].push_back(jaccard(found.labels[t], data.truth[t]));
    }
  }
  return rec;
}

Outcome synthetic_recovery() {
  const Recovery easy = recovery(0.75);
  const Recovery hard = recovery(0.55);
  bool pass = true;
  std::ostringstream detail;
  detail << "p=0.75 median purity/jaccard per timestamp:";
  for (std::size_t t = 0; t < 3; ++t) {
    const double mp = median(easy.purity[t]);
    const double mj = median(easy.jaccard[t]);
    pass = pass && mp >= 0.95 && mj >= 0.90;
    detail << " t" << t + 1 << "=" << fmt("%.4f", mp) << "/" << fmt("%.4f", mj);
  }
  detail << "; p=0.55 median purity:";
  for (std::size_t t = 0; t < 3; ++t) {
    const double mp = median(hard.purity[t]);
    pass = pass && mp >= 0.90;
    detail << " t" << t + 1 << "=" << fmt("%.4f", mp);
  }
  return {pass, detail.str()};
}

Outcome prediction_consistency() {
  std::vector<double> gaps;
  std::vector<double> predicted;
  std::vector<double> detected;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = generate(desk_config(0.75, 4, seed));
    const Hyperparameters hp = synthetic_settings(seed);
    const FitResult past = fit(prefix(data.network, 3), hp);
    const auto forecast = predict_communities(past.model, 1, default_ar_order(3), 5, {.seed = seed});
    const FitResult all = fit(data.network, hp);
    const auto found = detect_communities(all.model, 5, {.seed = seed});
    const double pp = purity(forecast.labels, data.truth[3]);
    const double pd = purity(found.labels[3], data.truth[3]);
    predicted.push_back(pp);
    detected.push_back(pd);
    gaps.push_back(std::abs(pp - pd));
  }
  const double gap = median(gaps);
  return {gap <= 0.15, "median |predicted - detected| purity at t=4 " + fmt("%.4f", gap) + " (median predicted " +
                           fmt("%.4f", median(predicted)) + ", median detected " + fmt("%.4f", median(detected)) +
                           ")"};
}

Outcome metric_oracles() {
  long pairs = 0;
  long bad = 0;
  for (int m = 1; m <= 8; ++m) {
    const auto parts = chimera::testing::all_partitions(m);
    for (const auto& a : parts) {
      for (const auto& b : parts) {
        ++pairs;
        if (std::abs(purity(a, b) - chimera::testing::brute_purity(a, b)) > 1e-12) ++bad;
        if (m >= 2 && std::abs(jaccard(a, b) - chimera::testing::brute_jaccard(a, b)) > 1e-12) ++bad;
      }
    }
  }
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(-5.0, 5.0);
  int sets = 0;
  double worst = 0.0;
  for (; sets < 2000; ++sets) {
    const int m = 3 + sets % 8;
    const int groups = 2 + static_cast<int>(rng() % 3);
    std::vector<double> x(static_cast<std::size_t>(m));
    std::vector<int> labels(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      x[static_cast<std::size_t>(i)] = unit(rng);
      labels[static_cast<std::size_t>(i)] = i < 2 ? i : static_cast<int>(rng() % static_cast<unsigned>(groups));
    }
    Matrix pts(m, 1);
    for (int i = 0; i < m; ++i) pts(i, 0) = x[static_cast<std::size_t>(i)];
    worst = std::max(worst, std::abs(silhouette(pts, labels) - chimera::testing::brute_silhouette_1d(x, labels)));
  }
  return {bad == 0 && worst <= 1e-10, std::to_string(pairs) + " partition pairs (m<=8), " + std::to_string(bad) +
                                          " mismatches; " + std::to_string(sets) +
                                          " silhouette sets, worst error " + fmt("%.2e", worst)};
}

Outcome complexity_scaling() {
  const BenchReport r = run_bench(BenchOptions{});
  const double n = 2000.0;
  const double quad = r.fit.c2 * n * n;
  const double rest = std::abs(r.fit.c1 * n) + std::abs(r.fit.c0);
  std::ostringstream detail;
  detail << "times";
  for (const auto& p : r.points) detail << " n=" << p.nodes << ":" << fmt("%.2fs", p.seconds);
  detail << "; R^2=" << fmt("%.5f", r.fit.r_squared) << ", c2*n^2=" << fmt("%.2f", quad)
         << " vs |c1*n|+|c0|=" << fmt("%.2f", rest) << " at n=2000";
  return {r.fit.r_squared >= 0.98 && quad > rest, detail.str()};
}

Outcome tuner_sanity() {
  int hits = 0;
  std::ostringstream picks;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SyntheticConfig cfg;
    cfg.nodes = 300;
    cfg.edges = 1500;
    cfg.timestamps = 3;
    cfg.p = 0.9;
    cfg.seed = seed;
    const auto data = generate(cfg);
    SearchSpace space;
    space.alpha = {1e-5};
    space.beta = {1000};
    space.lambda1 = {0.1};
    space.lambda2 = {1e-4};
    space.rank = {5};
    space.clusters = {2, 5, 10};
    space.strategy = SearchStrategy::grid;
    space.budget = 3;
    space.seed = seed;
    TuneOptions options;
    options.base = synthetic_settings(seed);
    options.kmeans.seed = seed;
    const TuneResult r = tune(data.network, space, options);
    hits += r.best.clusters == 5 ? 1 : 0;
    picks << (seed > 1 ? "," : "") << r.best.clusters;
  }
  return {hits >= 4, std::to_string(hits) + "/5 seeds selected 5 clusters (picks " + picks.str() + ")"};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("chimera-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream cfg(root / "syn.cfg");
    cfg << "nodes=200\nedges=800\ntimestamps=3\n";
  }
  auto run = [&](const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    if (code != 0) throw std::runtime_error("pipeline step failed: " + err.str());
  };
  const std::vector<std::string> threads{"1", "1", "4"};
  for (std::size_t run_id = 0; run_id < threads.size(); ++run_id) {
    const fs::path dir = root / ("run" + std::to_string(run_id));
    const std::vector<std::string> common{"--seed", "17", "--deterministic", "--threads", threads[run_id]};
    auto with = [&](std::vector<std::string> a) {
      a.insert(a.end(), common.begin(), common.end());
      return a;
    };
    run(with({"generate", "--config", (root / "syn.cfg").string(), "--out", (dir / "data").string()}));
    run(with({"fit", "--dataset", (dir / "data").string(), "--rank", "5", "--iters", "200", "--alpha", "1e-5",
              "--beta", "1000", "--lambda1", "0.1", "--lambda2", "1e-4", "--out", (dir / "model.ckpt").string()}));
    run(with({"detect", "--model", (dir / "model.ckpt").string(), "-c", "5", "--out", (dir / "labels.tsv").string()}));
    run(with({"predict", "--model", (dir / "model.ckpt").string(), "-r", "1", "-c", "5", "--out",
              (dir / "future.tsv").string()}));
  }
  bool same = true;
  std::ostringstream detail;
  for (const char* f : {"model.ckpt", "labels.tsv", "future.tsv", "data/edges_2.tsv"}) {
    const std::string a = read_file(root / "run0" / f);
    const bool eq = !a.empty() && a == read_file(root / "run1" / f) && a == read_file(root / "run2" / f);
    same = same && eq;
    detail << f << (eq ? " identical; " : " DIFFERS; ");
  }
  detail << "three runs (threads 1, 1, 4)";
  fs::remove_all(root);
  return {same, detail.str()};
}

}  // namespace

int main() {
  criterion("gradient-correctness", 60, gradient_correctness);
  criterion("descent-property", 120, descent_property);
  criterion("synthetic-recovery", 300, synthetic_recovery);
  criterion("prediction-consistency", 300, prediction_consistency);
  criterion("metric-oracles", 600, metric_oracles);
  criterion("complexity-scaling", 600, complexity_scaling);
  criterion("tuner-sanity", 600, tuner_sanity);
  criterion("determinism", 600, determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
