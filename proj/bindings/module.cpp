#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fusionlab/analysis.hpp"
#include "fusionlab/evaluation.hpp"
#include "fusionlab/harness.hpp"
#include "fusionlab/models.hpp"
#include "fusionlab/training.hpp"

namespace py = pybind11;
using namespace fusionlab;

namespace {

numerics::Matrix matrix_from_rows(const std::vector<numerics::Vec>& rows) {
    if (rows.empty()) return {};
    numerics::Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols) {
            throw std::invalid_argument("rows must have equal length");
        }
        std::copy(rows[i].begin(), rows[i].end(), m.row(i));
    }
    return m;
}

std::vector<numerics::Vec> matrix_to_rows(const numerics::Matrix& m) {
    std::vector<numerics::Vec> rows;
    rows.reserve(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) rows.push_back(m.row_vec(i));
    return rows;
}

}  // namespace

PYBIND11_MODULE(_fusionlab, m) {
    m.doc() = "user-embedding fusion models, training and PDC evaluation";

    py::class_<models::ModelDims>(m, "ModelDims")
        .def(py::init([](std::size_t n_features, std::size_t n_users) {
                 models::ModelDims d;
                 d.n_features = n_features;
                 d.n_users = n_users;
                 return d;
             }),
             py::arg("n_features"), py::arg("n_users"))
        .def_readonly("n_features", &models::ModelDims::n_features)
        .def_readonly("n_users", &models::ModelDims::n_users)
        .def_readonly("z", &models::ModelDims::z);

    py::class_<models::Model>(m, "Model")
        .def_property_readonly("kind",
                               [](const models::Model& mm) { return models::to_string(mm.kind); })
        .def_property_readonly("z", [](const models::Model& mm) { return mm.dims.z; })
        .def_property_readonly("n_features",
                               [](const models::Model& mm) { return mm.dims.n_features; })
        .def_property_readonly("n_users", [](const models::Model& mm) { return mm.dims.n_users; })
        .def_property_readonly(
            "activation", [](const models::Model& mm) { return models::to_string(mm.act); })
        .def("forward",
             [](const models::Model& mm, const numerics::Vec& x, std::size_t u) {
                 return models::forward(mm, x, u);
             })
        .def("embedding_of",
             [](const models::Model& mm, std::size_t u) { return models::embedding_of(mm, u); })
        .def("embedding_table",
             [](const models::Model& mm) { return matrix_to_rows(harness::embedding_table(mm)); })
        .def("sensitivity",
             [](const models::Model& mm, std::size_t u, std::optional<numerics::Vec> x) {
                 return models::sensitivity(mm, u, x ? &*x : nullptr);
             },
             py::arg("u"), py::arg("x") = std::nullopt)
        .def("save", [](const models::Model& mm, const std::string& path) {
            models::save_model_file(mm, path, "");
        });

    m.def("param_count",
          [](const std::string& kind, std::size_t z, std::size_t n_features,
             std::size_t n_users) {
              return models::param_count(models::kind_from_string(kind), z, n_features, n_users);
          },
          py::arg("kind"), py::arg("z"), py::arg("n_features") = 1128,
          py::arg("n_users") = 943);

    m.def("init_model",
          [](const std::string& kind, std::size_t z, std::size_t n_features, std::size_t n_users,
             std::uint64_t seed, const std::string& activation) {
              models::ModelDims dims;
              dims.n_features = n_features;
              dims.n_users = n_users;
              numerics::SeededRng rng(seed);
              return models::init_model(models::kind_from_string(kind), z, dims, rng,
                                        models::activation_from_string(activation));
          },
          py::arg("kind"), py::arg("z"), py::arg("n_features"), py::arg("n_users"),
          py::arg("seed") = 0, py::arg("activation") = "relu");

    m.def("load_model", [](const std::string& path) { return models::load_model_file(path); });

    m.def("train",
          [](models::Model& model, const std::vector<std::tuple<std::size_t, std::size_t, double>>& examples,
             const std::vector<numerics::Vec>& features, double learning_rate,
             std::size_t epochs, std::size_t batch_size, std::uint64_t seed,
             const std::string& optimizer, double l2_weights, double l2_embeddings) {
              std::vector<models::Example> batch;
              for (const auto& [u, i, r] : examples) batch.push_back({u, i, r});
              training::HyperParams hp;
              hp.learning_rate = learning_rate;
              hp.epochs = epochs;
              hp.batch_size = batch_size;
              hp.seed = seed;
              hp.optimizer = training::optimizer_from_string(optimizer);
              hp.activation = model.act;
              hp.l2_weights = l2_weights;
              hp.l2_embeddings = l2_embeddings;
              const training::TrainTrace trace =
                  training::train(model, batch, matrix_from_rows(features), hp);
              return trace.epoch_loss;
          },
          py::arg("model"), py::arg("examples"), py::arg("features"),
          py::arg("learning_rate") = 1e-3, py::arg("epochs") = 10, py::arg("batch_size") = 64,
          py::arg("seed") = 0, py::arg("optimizer") = "sgd", py::arg("l2_weights") = 0.0,
          py::arg("l2_embeddings") = 0.0);

    m.def("mae", &evaluation::mae);
    m.def("rmse", &evaluation::rmse);
    m.def("pearson", &evaluation::pearson);

    m.def("pdc",
          [](const std::vector<numerics::Vec>& embeddings,
             const std::vector<std::tuple<std::size_t, std::size_t, double>>& ratings,
             std::size_t threshold, const std::string& distance) {
              const numerics::Matrix table = matrix_from_rows(embeddings);
              std::vector<std::pair<std::size_t, std::size_t>> pairs;
              numerics::Vec values;
              for (const auto& [u, i, r] : ratings) {
                  pairs.emplace_back(u, i);
                  values.push_back(r);
              }
              const auto by_user = evaluation::group_ratings(pairs, values, table.rows);
              const auto result = evaluation::pdc(
                  table, by_user,
                  {threshold, evaluation::user_distance_from_string(distance)});
              return std::make_pair(result.score, result.pair_count);
          },
          py::arg("embeddings"), py::arg("ratings"), py::arg("threshold") = 4,
          py::arg("distance") = "mean_squared_difference");

    m.def("kmeans",
          [](const std::vector<numerics::Vec>& points, std::size_t k, std::uint64_t seed) {
              numerics::SeededRng rng(seed);
              const auto result = analysis::kmeans(matrix_from_rows(points), k, rng);
              return std::make_tuple(result.assignments, matrix_to_rows(result.centroids),
                                     result.inertia);
          },
          py::arg("points"), py::arg("k"), py::arg("seed") = 0);

    m.attr("__version__") = harness::kVersion;
}
