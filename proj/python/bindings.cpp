#include "chimera/chimera.hpp"
#include "chimera/cli.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace chimera;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Shared temporal factorization of dynamic attributed networks";

  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::enum_<GradientMode>(m, "GradientMode")
      .value("exact", GradientMode::exact)
      .value("paper_compat", GradientMode::paper_compat);

  py::class_<TemporalNetwork>(m, "TemporalNetwork")
      .def(py::init<std::vector<SparseMatrix>, std::vector<SparseMatrix>, bool>(), py::arg("adjacency"),
           py::arg("content"), py::arg("directed") = false)
      .def_property_readonly("nodes", &TemporalNetwork::nodes)
      .def_property_readonly("terms", &TemporalNetwork::terms)
      .def_property_readonly("timestamps", &TemporalNetwork::timestamps)
      .def_property_readonly("directed", &TemporalNetwork::directed)
      .def("adjacency", &TemporalNetwork::adjacency, py::arg("t"))
      .def("content", &TemporalNetwork::content, py::arg("t"));

  py::class_<Hyperparameters>(m, "Hyperparameters")
      .def(py::init<>())
      .def_readwrite("alpha", &Hyperparameters::alpha)
      .def_readwrite("beta", &Hyperparameters::beta)
      .def_readwrite("lambda1", &Hyperparameters::lambda1)
      .def_readwrite("lambda2", &Hyperparameters::lambda2)
      .def_readwrite("rank", &Hyperparameters::rank)
      .def_readwrite("max_iters", &Hyperparameters::max_iters)
      .def_readwrite("tol", &Hyperparameters::tol)
      .def_readwrite("neg_sample_ratio", &Hyperparameters::neg_sample_ratio)
      .def_readwrite("seed", &Hyperparameters::seed)
      .def_readwrite("gradient_mode", &Hyperparameters::gradient_mode)
      .def_readwrite("max_halvings", &Hyperparameters::max_halvings)
      .def_readwrite("threads", &Hyperparameters::threads);

  py::class_<FactorModel>(m, "FactorModel")
      .def(py::init<>())
      .def_readwrite("U", &FactorModel::U)
      .def_readwrite("V", &FactorModel::V)
      .def_readwrite("W", &FactorModel::W)
      .def_property_readonly("rank", &FactorModel::rank)
      .def_property_readonly("nodes", &FactorModel::nodes)
      .def_property_readonly("timestamps", &FactorModel::timestamps);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("model", &FitResult::model)
      .def_readonly("trace", &FitResult::trace)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("alpha_used", &FitResult::alpha_used)
      .def_readonly("halvings", &FitResult::halvings)
      .def_readonly("final_objective", &FitResult::final_objective);

  m.def("fit", &fit, py::arg("network"), py::arg("hp"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "evaluate_objective",
      [](const TemporalNetwork& network, const FactorModel& model, const Hyperparameters& hp, double ratio,
         std::uint64_t seed) { return evaluate_objective(network, model, hp, sample_active_mask(network, ratio, seed)); },
      py::arg("network"), py::arg("model"), py::arg("hp"), py::arg("neg_sample_ratio") = 0.0, py::arg("seed") = 0);
  m.def("initialize_model", &initialize_model, py::arg("nodes"), py::arg("terms"), py::arg("timestamps"),
        py::arg("rank"), py::arg("seed") = 0);

  py::class_<CommunityAssignment>(m, "CommunityAssignment")
      .def_readonly("labels", &CommunityAssignment::labels)
      .def_readonly("centroids", &CommunityAssignment::centroids)
      .def_readonly("clusters", &CommunityAssignment::clusters)
      .def_readonly("inertia", &CommunityAssignment::inertia);

  py::class_<KMeansResult>(m, "KMeansResult")
      .def_readonly("labels", &KMeansResult::labels)
      .def_readonly("centroids", &KMeansResult::centroids)
      .def_readonly("inertia", &KMeansResult::inertia);

  auto kopts = [](std::uint64_t seed, int restarts) {
    KMeansOptions o;
    o.seed = seed;
    o.restarts = restarts;
    return o;
  };
  m.def(
      "kmeans", [kopts](const Matrix& points, int clusters, std::uint64_t seed, int restarts) {
        return kmeans(points, clusters, kopts(seed, restarts));
      },
      py::arg("points"), py::arg("clusters"), py::arg("seed") = 0, py::arg("restarts") = 10);
  m.def(
      "detect_communities", [kopts](const FactorModel& model, int clusters, std::uint64_t seed, int restarts) {
        return detect_communities(model, clusters, kopts(seed, restarts));
      },
      py::arg("model"), py::arg("clusters"), py::arg("seed") = 0, py::arg("restarts") = 10);
  m.def(
      "stack_embeddings", [](const FactorModel& model) { return stack_embeddings(model).rows; }, py::arg("model"));

  py::class_<ArModel>(m, "ArModel")
      .def_readonly("coefficients", &ArModel::coefficients)
      .def_readonly("intercept", &ArModel::intercept)
      .def_readonly("uses_fallback", &ArModel::uses_fallback);
  m.def(
      "fit_ar", [](const std::vector<double>& series, int order, bool intercept, bool stationary_only) {
        ArOptions o;
        o.intercept = intercept;
        o.stationary_only = stationary_only;
        return fit_ar(series, order, o);
      },
      py::arg("series"), py::arg("order"), py::arg("intercept") = true, py::arg("stationary_only") = true);
  m.def(
      "forecast", [](const ArModel& ar, const std::vector<double>& history, int horizon) {
        return forecast(ar, history, horizon);
      },
      py::arg("ar"), py::arg("history"), py::arg("horizon") = 1);
  m.def("default_ar_order", &default_ar_order, py::arg("timestamps"));
  m.def(
      "predict_embedding", [](const FactorModel& model, int horizon, int order) {
        return predict_embedding(model, horizon, order > 0 ? order : default_ar_order(model.timestamps()));
      },
      py::arg("model"), py::arg("horizon") = 1, py::arg("order") = 0);
  m.def(
      "predict_communities",
      [kopts](const FactorModel& model, int horizon, int order, int clusters, std::uint64_t seed) {
        const int p = order > 0 ? order : default_ar_order(model.timestamps());
        return predict_communities(model, horizon, p, clusters, kopts(seed, 10)).labels;
      },
      py::arg("model"), py::arg("horizon"), py::arg("order"), py::arg("clusters"), py::arg("seed") = 0);

  m.def("purity", [](const std::vector<int>& p, const std::vector<int>& t) { return purity(p, t); },
        py::arg("predicted"), py::arg("truth"));
  m.def("jaccard", [](const std::vector<int>& p, const std::vector<int>& t) { return jaccard(p, t); },
        py::arg("predicted"), py::arg("truth"));
  m.def("silhouette", [](const Matrix& x, const std::vector<int>& l) { return silhouette(x, l); }, py::arg("points"),
        py::arg("labels"));

  py::class_<SyntheticConfig>(m, "SyntheticConfig")
      .def(py::init<>())
      .def_readwrite("nodes", &SyntheticConfig::nodes)
      .def_readwrite("edges", &SyntheticConfig::edges)
      .def_readwrite("groups", &SyntheticConfig::groups)
      .def_readwrite("words_per_group", &SyntheticConfig::words_per_group)
      .def_readwrite("timestamps", &SyntheticConfig::timestamps)
      .def_readwrite("p", &SyntheticConfig::p)
      .def_readwrite("word_crossover", &SyntheticConfig::word_crossover)
      .def_readwrite("transition_probability", &SyntheticConfig::transition_probability)
      .def_readwrite("max_transition_fraction", &SyntheticConfig::max_transition_fraction)
      .def_readwrite("tokens_per_node", &SyntheticConfig::tokens_per_node)
      .def_readwrite("seed", &SyntheticConfig::seed);
  m.def(
      "generate", [](const SyntheticConfig& c) {
        SyntheticDataset d = generate(c);
        return py::make_tuple(std::move(d.network), std::move(d.truth));
      },
      py::arg("config"));

  m.def(
      "load_dataset", [](const std::filesystem::path& dir) {
        Dataset d = load_dataset(dir);
        return py::make_tuple(std::move(d.network), std::move(d.labels));
      },
      py::arg("directory"));
  m.def(
      "write_dataset", [](const std::filesystem::path& dir, const TemporalNetwork& n, std::optional<Labels> labels) {
        write_dataset(dir, n, labels ? &*labels : nullptr);
      },
      py::arg("directory"), py::arg("network"), py::arg("labels") = py::none());

  py::class_<Checkpoint>(m, "Checkpoint")
      .def_readonly("hp", &Checkpoint::hp)
      .def_readonly("model", &Checkpoint::model)
      .def_readonly("final_objective", &Checkpoint::final_objective)
      .def_readonly("iterations", &Checkpoint::iterations)
      .def_readonly("alpha_used", &Checkpoint::alpha_used);
  m.def("load_model", &load_model, py::arg("path"));
  m.def(
      "save_model", [](const std::filesystem::path& path, const FitResult& r, const Hyperparameters& hp) {
        save_model(path, make_checkpoint(r, hp));
      },
      py::arg("path"), py::arg("result"), py::arg("hp"));

  m.def(
      "run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
