#include "chimera/cli.hpp"

#include "chimera/bench.hpp"
#include "chimera/communities.hpp"
#include "chimera/io.hpp"
#include "chimera/metrics.hpp"
#include "chimera/prediction.hpp"
#include "chimera/synthetic.hpp"
#include "chimera/tuner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

namespace chimera {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Common {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool deterministic = true;
  int precision = 6;
};

// Rounds to `precision` significant digits so JSON output carries the same
// digits as the text formats.
double rounded(double x, int precision) { return std::strtod(format_number(x, precision).c_str(), nullptr); }

json rounded_list(const std::vector<double>& xs, int precision) {
  json a = json::array();
  for (double x : xs) a.push_back(rounded(x, precision));
  return a;
}

struct FitOverrides {
  std::optional<double> alpha, beta, lambda1, lambda2, tol, neg_ratio;
  std::optional<Index> rank;
  std::optional<int> iters, max_halvings;
  std::optional<std::string> gradient_mode;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "Step size");
    cmd->add_option("--beta", beta, "Content weight");
    cmd->add_option("--lambda1", lambda1, "Norm regularizer");
    cmd->add_option("--lambda2", lambda2, "Temporal smoothness regularizer");
    cmd->add_option("--rank", rank, "Embedding rank k");
    cmd->add_option("--iters", iters, "Maximum gradient steps");
    cmd->add_option("--tol", tol, "Relative objective change that stops the fit");
    cmd->add_option("--neg-ratio", neg_ratio, "Sampled zeros per nonzero of A_t (0 = dense)");
    cmd->add_option("--max-halvings", max_halvings, "Automatic step-size halvings on divergence");
    cmd->add_option("--gradient-mode", gradient_mode, "exact or paper-compat");
  }

  void apply(Hyperparameters& hp) const {
    if (alpha) hp.alpha = *alpha;
    if (beta) hp.beta = *beta;
    if (lambda1) hp.lambda1 = *lambda1;
    if (lambda2) hp.lambda2 = *lambda2;
    if (rank) hp.rank = *rank;
    if (iters) hp.max_iters = *iters;
    if (tol) hp.tol = *tol;
    if (neg_ratio) hp.neg_sample_ratio = *neg_ratio;
    if (max_halvings) hp.max_halvings = *max_halvings;
    if (gradient_mode) hp.gradient_mode = gradient_mode_from_string(*gradient_mode);
  }
};

Hyperparameters load_hyperparameters(const std::string& config_path, const FitOverrides& overrides,
                                     const Common& common) {
  Hyperparameters hp;
  if (!config_path.empty()) {
    ConfigMap m = read_config(config_path);
    apply_config(m, hp);
    require_consumed(m, config_path);
  }
  overrides.apply(hp);
  if (common.seed) hp.seed = *common.seed;
  hp.threads = common.threads;
  validate(hp);
  return hp;
}

KMeansOptions kmeans_options(const Common& common, int restarts, bool normalize) {
  KMeansOptions o;
  o.seed = common.seed.value_or(0);
  o.restarts = restarts;
  o.normalize_rows = normalize;
  return o;
}

json trial_json(const TrialRecord& r, int precision) {
  json j;
  j["trial"] = r.index;
  j["alpha"] = r.hp.alpha;
  j["beta"] = r.hp.beta;
  j["lambda1"] = r.hp.lambda1;
  j["lambda2"] = r.hp.lambda2;
  j["rank"] = r.hp.rank;
  j["clusters"] = r.clusters;
  j["degenerate"] = r.degenerate;
  if (r.degenerate) {
    j["score"] = nullptr;
    j["error"] = r.error;
  } else {
    j["score"] = rounded(r.score, precision);
  }
  j["alpha_used"] = r.alpha_used;
  j["iterations"] = r.iterations;
  j["objective_tail"] = rounded_list(r.objective_tail, precision);
  j["seconds"] = rounded(r.seconds, precision);
  return j;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shared temporal factorization of dynamic attributed networks"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "Seed for every random choice");
  app.add_option("--threads", common.threads, "Worker threads inside the factorization")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic,!--fast", common.deterministic,
               "Bit-reproducible results (the default; --fast is accepted for compatibility)");
  app.add_option("--precision", common.precision, "Significant digits in numeric output")->check(CLI::Range(1, 17));

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic planted-community dataset");
  std::string gen_config;
  std::string gen_out;
  gen->add_option("--config", gen_config, "key=value synthetic settings")->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "Output dataset directory")->required();

  // fit
  auto* fitc = app.add_subcommand("fit", "Fit the factor model to a dataset");
  std::string fit_dataset;
  std::string fit_config;
  std::string fit_out;
  std::string fit_trace;
  FitOverrides fit_overrides;
  fitc->add_option("--dataset", fit_dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  fitc->add_option("--config", fit_config, "key=value hyperparameters")->check(CLI::ExistingFile);
  fitc->add_option("--out", fit_out, "Checkpoint path")->required();
  fitc->add_option("--trace", fit_trace, "Objective trace output (iteration<TAB>objective)");
  fit_overrides.add_to(fitc);

  // detect
  auto* det = app.add_subcommand("detect", "Temporal community detection from a checkpoint");
  std::string det_model;
  std::string det_out;
  int det_clusters = 0;
  int det_restarts = 10;
  bool det_normalize = false;
  det->add_option("--model", det_model, "Checkpoint path")->required()->check(CLI::ExistingFile);
  det->add_option("--clusters,-c", det_clusters, "Number of communities")->required()->check(CLI::PositiveNumber);
  det->add_option("--out", det_out, "Label file (timestamp<TAB>node<TAB>label)")->required();
  det->add_option("--restarts", det_restarts, "k-means restarts")->check(CLI::PositiveNumber);
  det->add_flag("--normalize", det_normalize, "Cluster unit-length embedding rows");

  // predict
  auto* pred = app.add_subcommand("predict", "Forecast embeddings and communities at T + horizon");
  std::string pred_model;
  std::string pred_out;
  std::string pred_embedding;
  std::string pred_dataset;
  std::string pred_policy = "embedding-support";
  std::string pred_fallback = "last-value";
  int pred_horizon = 1;
  int pred_order = 0;
  int pred_clusters = 0;
  int pred_restarts = 10;
  bool pred_allow_explosive = false;
  pred->add_option("--model", pred_model, "Checkpoint path")->required()->check(CLI::ExistingFile);
  pred->add_option("--horizon,-r", pred_horizon, "Steps ahead")->check(CLI::PositiveNumber);
  pred->add_option("--order,-p", pred_order, "AR order (default: chosen from T)")->check(CLI::NonNegativeNumber);
  pred->add_option("--clusters,-c", pred_clusters, "Number of communities")->required()->check(CLI::PositiveNumber);
  pred->add_option("--out", pred_out, "Label file for timestamp T + horizon")->required();
  pred->add_option("--embedding-out", pred_embedding, "Forecast embedding output");
  pred->add_option("--track-policy", pred_policy, "embedding-support or adjacency-support");
  pred->add_option("--fallback", pred_fallback, "last-value or mean");
  pred->add_option("--dataset", pred_dataset, "Dataset (required for adjacency-support)")->check(CLI::ExistingDirectory);
  pred->add_option("--restarts", pred_restarts, "k-means restarts")->check(CLI::PositiveNumber);
  pred->add_flag("--allow-explosive", pred_allow_explosive, "Keep AR fits whose recursion is not stationary");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Purity and Jaccard index of labels against ground truth");
  std::string eval_labels;
  std::string eval_truth;
  std::string eval_dataset;
  eval->add_option("--labels", eval_labels, "Predicted label file")->required()->check(CLI::ExistingFile);
  auto* truth_opt = eval->add_option("--truth", eval_truth, "Ground-truth label file")->check(CLI::ExistingFile);
  auto* ds_opt = eval->add_option("--dataset", eval_dataset, "Dataset with ground-truth labels")->check(CLI::ExistingDirectory);
  truth_opt->excludes(ds_opt);
  ds_opt->excludes(truth_opt);

  // tune
  auto* tun = app.add_subcommand("tune", "Unsupervised hyperparameter search scored by silhouette");
  std::string tune_dataset;
  std::string tune_space;
  std::string tune_config;
  std::string tune_out;
  std::string tune_log;
  std::string tune_direction = "maximize";
  FitOverrides tune_overrides;
  tun->add_option("--dataset", tune_dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  tun->add_option("--space", tune_space, "key=value search space (comma-separated candidates)")->check(CLI::ExistingFile);
  tun->add_option("--config", tune_config, "Base hyperparameters for non-searched fields")->check(CLI::ExistingFile);
  tun->add_option("--direction", tune_direction, "maximize or minimize the mean silhouette");
  tun->add_option("--out", tune_out, "Best configuration output (key=value)");
  tun->add_option("--log", tune_log, "Trial log output (one JSON record per line)");
  tune_overrides.add_to(tun);

  // bench
  auto* ben = app.add_subcommand("bench", "Fixed-iteration timing over network sizes with a quadratic fit");
  std::vector<Index> bench_sizes{250, 500, 1000, 2000};
  int bench_iters = 1000;
  Index bench_timestamps = 3;
  Index bench_rank = 2;
  double bench_ratio = 0.0;
  std::string bench_out;
  ben->add_option("--sizes", bench_sizes, "Node counts")->delimiter(',');
  ben->add_option("--iterations", bench_iters, "Gradient steps per size")->check(CLI::PositiveNumber);
  ben->add_option("--timestamps", bench_timestamps, "Snapshots per dataset")->check(CLI::PositiveNumber);
  ben->add_option("--rank", bench_rank, "Embedding rank")->check(CLI::PositiveNumber);
  ben->add_option("--neg-ratio", bench_ratio, "Sampled zeros per nonzero (0 = dense)")->check(CLI::NonNegativeNumber);
  ben->add_option("--out", bench_out, "Also write the records to this file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const int prec = common.precision;
  try {
    if (*gen) {
      SyntheticConfig cfg;
      if (!gen_config.empty()) {
        ConfigMap m = read_config(gen_config);
        apply_config(m, cfg);
        require_consumed(m, gen_config);
      }
      if (common.seed) cfg.seed = *common.seed;
      validate(cfg);
      const SyntheticDataset data = generate(cfg);
      write_dataset(gen_out, data.network, &data.truth);
      write_file_atomic(fs::path(gen_out) / "synthetic.cfg", to_config(cfg));
      json j{{"command", "generate"},     {"out", gen_out}, {"nodes", data.network.nodes()},
             {"terms", data.network.terms()}, {"timestamps", data.network.timestamps()}};
      out << j.dump() << '\n';
      return 0;
    }

    if (*fitc) {
      const Hyperparameters hp = load_hyperparameters(fit_config, fit_overrides, common);
      const Dataset ds = load_dataset(fit_dataset);
      const FitResult result = fit(ds.network, hp);
      save_model(fit_out, make_checkpoint(result, hp));
      if (!fit_trace.empty()) {
        std::ostringstream t;
        for (std::size_t i = 0; i < result.trace.size(); ++i) t << i << '\t' << format_number(result.trace[i], prec) << '\n';
        write_file_atomic(fit_trace, t.str());
      }
      json j{{"command", "fit"},
             {"iterations", result.iterations},
             {"converged", result.converged},
             {"initial_objective", rounded(result.trace.front(), prec)},
             {"final_objective", rounded(result.final_objective, prec)},
             {"alpha_used", result.alpha_used},
             {"halvings", result.halvings},
             {"gradient_mode", to_string(hp.gradient_mode)}};
      out << j.dump() << '\n';
      return 0;
    }

    if (*det) {
      const Checkpoint ck = load_model(det_model);
      const CommunityAssignment ca =
          detect_communities(ck.model, det_clusters, kmeans_options(common, det_restarts, det_normalize));
      write_labels(det_out, ca.labels);
      json sizes = json::array();
      for (std::size_t t = 0; t < ca.labels.size(); ++t) {
        std::vector<int> counts(static_cast<std::size_t>(det_clusters), 0);
        for (int l : ca.labels[t]) ++counts[static_cast<std::size_t>(l)];
        sizes.push_back(counts);
      }
      json j{{"command", "detect"}, {"clusters", det_clusters}, {"inertia", rounded(ca.inertia, prec)},
             {"cluster_sizes", sizes}};
      out << j.dump() << '\n';
      return 0;
    }

    if (*pred) {
      const TrackPolicy policy = track_policy_from_string(pred_policy);
      ArOptions ar;
      ar.fallback = fallback_policy_from_string(pred_fallback);
      ar.stationary_only = !pred_allow_explosive;
      if (policy == TrackPolicy::adjacency_support && pred_dataset.empty()) {
        throw std::invalid_argument("--track-policy adjacency-support needs --dataset");
      }
      const Checkpoint ck = load_model(pred_model);
      std::optional<Dataset> ds;
      if (!pred_dataset.empty()) ds.emplace(load_dataset(pred_dataset));
      const int order = pred_order > 0 ? pred_order : default_ar_order(ck.model.timestamps());
      const ForecastModel fm =
          fit_forecast_model(ck.model, order, ar, policy, ds ? &ds->network : nullptr);
      const PredictedCommunities pc =
          predict_communities(fm, pred_horizon, pred_clusters, kmeans_options(common, pred_restarts, false));
      const int target = static_cast<int>(ck.model.timestamps()) + pred_horizon;
      write_labels(pred_out, Labels{pc.labels}, target);
      if (!pred_embedding.empty()) write_file_atomic(pred_embedding, format_matrix(pc.embedding, prec));
      std::size_t fallbacks = 0;
      for (const auto& m : fm.models) fallbacks += m.uses_fallback ? 1 : 0;
      json j{{"command", "predict"},
             {"timestamp", target},
             {"horizon", pred_horizon},
             {"order", order},
             {"track_policy", to_string(policy)},
             {"fallback_policy", to_string(ar.fallback)},
             {"tracked_entries", fm.models.size()},
             {"fallback_entries", fallbacks},
             {"stationary_only", ar.stationary_only},
             {"clusters", pred_clusters}};
      out << j.dump() << '\n';
      return 0;
    }

    if (*eval) {
      const auto predicted = read_labels(eval_labels);
      std::map<int, std::vector<int>> truth;
      if (!eval_truth.empty()) {
        truth = read_labels(eval_truth);
      } else if (!eval_dataset.empty()) {
        const Dataset ds = load_dataset(eval_dataset);
        if (!ds.labels) throw std::invalid_argument(eval_dataset + " has no ground-truth labels");
        for (std::size_t t = 0; t < ds.labels->size(); ++t) truth.emplace(static_cast<int>(t) + 1, (*ds.labels)[t]);
      } else {
        throw std::invalid_argument("evaluate needs --truth or --dataset");
      }
      double sum_p = 0.0;
      double sum_j = 0.0;
      for (const auto& [t, labels] : predicted) {
        auto it = truth.find(t);
        if (it == truth.end()) throw std::invalid_argument("no ground truth for timestamp " + std::to_string(t));
        if (it->second.size() != labels.size()) {
          throw std::invalid_argument("node count differs from the ground truth at timestamp " + std::to_string(t));
        }
        const double p = purity(labels, it->second);
        const double jac = jaccard(labels, it->second);
        sum_p += p;
        sum_j += jac;
        out << json{{"timestamp", t}, {"purity", rounded(p, prec)}, {"jaccard", rounded(jac, prec)}}.dump() << '\n';
      }
      const auto count = static_cast<double>(predicted.size());
      out << json{{"timestamp", "mean"}, {"purity", rounded(sum_p / count, prec)}, {"jaccard", rounded(sum_j / count, prec)}}
                 .dump()
          << '\n';
      return 0;
    }

    if (*tun) {
      SearchSpace space;
      if (!tune_space.empty()) {
        ConfigMap m = read_config(tune_space);
        apply_config(m, space);
        require_consumed(m, tune_space);
      }
      if (common.seed) space.seed = *common.seed;
      validate(space);
      TuneOptions options;
      options.base = load_hyperparameters(tune_config, tune_overrides, common);
      options.direction = direction_from_string(tune_direction);
      options.kmeans = kmeans_options(common, 10, false);
      const Dataset ds = load_dataset(tune_dataset);

      std::ostringstream log;
      auto emit_log = [&](const std::vector<TrialRecord>& trials) {
        for (const auto& r : trials) log << trial_json(r, prec).dump() << '\n';
        if (!tune_log.empty()) write_file_atomic(tune_log, log.str());
      };
      TuneResult result;
      try {
        result = tune(ds.network, space, options);
      } catch (const TuneError& e) {
        emit_log(e.trials());
        throw;
      }
      emit_log(result.trials);
      if (!tune_out.empty()) {
        std::string cfg = to_config(result.best.hp);
        cfg += "clusters=" + std::to_string(result.best.clusters) + "\n";
        write_file_atomic(tune_out, "# best of " + std::to_string(result.trials.size()) + " trials, silhouette " +
                                        format_number(result.best.score, prec) + " (" + to_string(result.direction) +
                                        ")\n" + cfg);
      }
      json j = trial_json(result.best, prec);
      j["command"] = "tune";
      j["direction"] = to_string(result.direction);
      j["note"] = "silhouette is conventionally maximized; pass --direction minimize for the literal reading";
      j["trials"] = result.trials.size();
      out << j.dump() << '\n';
      return 0;
    }

    if (*ben) {
      BenchOptions options;
      options.sizes = bench_sizes;
      options.iterations = bench_iters;
      options.timestamps = bench_timestamps;
      options.hp.rank = bench_rank;
      options.hp.threads = common.threads;
      options.neg_sample_ratio = bench_ratio;
      options.seed = common.seed.value_or(0);
      const BenchReport report = run_bench(options);
      std::ostringstream records;
      for (const auto& p : report.points) {
        records << json{{"nodes", p.nodes},
                        {"seconds", rounded(p.seconds, prec)},
                        {"iterations", p.iterations},
                        {"alpha_used", p.alpha_used}}
                       .dump()
                << '\n';
      }
      const double top = static_cast<double>(bench_sizes.back());
      records << json{{"fit", "quadratic"},
                      {"c0", rounded(report.fit.c0, prec)},
                      {"c1", rounded(report.fit.c1, prec)},
                      {"c2", rounded(report.fit.c2, prec)},
                      {"r_squared", rounded(report.fit.r_squared, prec)},
                      {"quadratic_share_at_max", rounded(report.fit.c2 * top * top / report.fit(top), prec)}}
                     .dump()
              << '\n';
      out << records.str();
      if (!bench_out.empty()) write_file_atomic(bench_out, records.str());
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace chimera
