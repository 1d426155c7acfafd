#include "fusionlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace fusionlab::harness {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

training::HyperParams hp_from_json(const json& j, training::HyperParams base) {
    if (j.contains("learning_rate")) base.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("epochs")) base.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("batch_size")) base.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("l2_weights")) base.l2_weights = j["l2_weights"].get<double>();
    if (j.contains("l2_embeddings")) base.l2_embeddings = j["l2_embeddings"].get<double>();
    if (j.contains("optimizer")) {
        base.optimizer = training::optimizer_from_string(j["optimizer"].get<std::string>());
    }
    if (j.contains("activation")) {
        base.activation = models::activation_from_string(j["activation"].get<std::string>());
    }
    if (j.contains("l2_on_neural")) base.l2_on_neural = j["l2_on_neural"].get<bool>();
    return base;
}

json hp_to_json(const training::HyperParams& hp) {
    json j;
    j["learning_rate"] = hp.learning_rate;
    j["epochs"] = hp.epochs;
    j["batch_size"] = hp.batch_size;
    j["l2_weights"] = hp.l2_weights;
    j["l2_embeddings"] = hp.l2_embeddings;
    j["optimizer"] = training::to_string(hp.optimizer);
    j["activation"] = models::to_string(hp.activation);
    j["l2_on_neural"] = hp.l2_on_neural;
    return j;
}

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;  // sample stddev; 0 when n < 2
};

Stats stats_of(const std::vector<double>& xs) {
    Stats s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() >= 2) {
        double acc = 0.0;
        for (double x : xs) acc += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return s;
}

}  // namespace

training::HyperParams ExperimentConfig::hyper_for(models::ModelKind kind, std::size_t z) const {
    training::HyperParams result = hp;
    const auto kind_it = hp_overrides.find(models::to_string(kind));
    if (kind_it != hp_overrides.end()) result = kind_it->second;
    const auto exact_it = hp_overrides.find(models::to_string(kind) + ":" + std::to_string(z));
    if (exact_it != hp_overrides.end()) result = exact_it->second;
    return result;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    in >> j;

    static const std::set<std::string> known{
        "cache_dir", "out_dir",           "kinds",         "z",
        "thresholds", "folds",            "seed",          "clamp_predictions",
        "user_distance", "hyper",         "hyper_overrides"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw std::runtime_error("config: unknown key '" + key + "'");
        }
    }

    ExperimentConfig config;
    config.cache_dir = j.value("cache_dir", "");
    config.out_dir = j.value("out_dir", "");
    if (j.contains("kinds")) {
        for (const auto& k : j["kinds"]) {
            config.kinds.push_back(models::kind_from_string(k.get<std::string>()));
        }
    }
    if (j.contains("z")) config.z_values = j["z"].get<std::vector<std::size_t>>();
    if (j.contains("thresholds")) {
        config.thresholds = j["thresholds"].get<std::vector<std::size_t>>();
    }
    if (j.contains("folds")) config.folds = j["folds"].get<std::vector<int>>();
    config.seed = j.value("seed", std::uint64_t{0});
    config.clamp_predictions = j.value("clamp_predictions", false);
    if (j.contains("user_distance")) {
        config.d_u = evaluation::user_distance_from_string(j["user_distance"].get<std::string>());
    }
    if (j.contains("hyper")) config.hp = hp_from_json(j["hyper"], config.hp);
    if (j.contains("hyper_overrides")) {
        for (const auto& [key, value] : j["hyper_overrides"].items()) {
            config.hp_overrides[key] = hp_from_json(value, config.hp);
        }
    }
    return config;
}

void save_config(const ExperimentConfig& config, const std::string& path) {
    json j;
    j["cache_dir"] = config.cache_dir;
    j["out_dir"] = config.out_dir;
    std::vector<std::string> kinds;
    for (auto k : config.kinds) kinds.push_back(models::to_string(k));
    j["kinds"] = kinds;
    j["z"] = config.z_values;
    j["thresholds"] = config.thresholds;
    j["folds"] = config.folds;
    j["seed"] = config.seed;
    j["clamp_predictions"] = config.clamp_predictions;
    j["user_distance"] = evaluation::to_string(config.d_u);
    j["hyper"] = hp_to_json(config.hp);
    json overrides = json::object();
    for (const auto& [key, hp] : config.hp_overrides) overrides[key] = hp_to_json(hp);
    j["hyper_overrides"] = overrides;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    out << j.dump(2) << "\n";
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    char out[20];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::string hash_dataset(const std::string& cache_dir) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(cache_dir)) {
        if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const std::string& s) {
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
    };
    for (const std::string& name : names) {
        feed(name);
        feed(hash_file((fs::path(cache_dir) / name).string()));
    }
    char out[20];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

PrepareResult cmd_prepare(const std::string& ml100k_dir, const std::string& ml20m_dir,
                          const std::string& out_dir) {
    // validates u.data before touching the split files
    const auto all_ratings = dataio::load_ratings(ml100k_dir);
    (void)all_ratings;

    auto raw_folds = dataio::load_official_folds(ml100k_dir);
    const auto genome =
        dataio::load_genome((fs::path(ml20m_dir) / "genome-scores.csv").string(),
                            (fs::path(ml20m_dir) / "genome-tags.csv").string());
    auto linked = dataio::link_movies((fs::path(ml100k_dir) / "u.item").string(),
                                      (fs::path(ml20m_dir) / "movies.csv").string(), genome);

    dataio::DatasetBundle bundle;
    bundle.folds = dataio::build_folds(raw_folds, linked.catalog);
    bundle.catalog = std::move(linked.catalog);
    bundle.titles = std::move(linked.titles);

    fs::create_directories(out_dir);
    dataio::save_dataset(bundle, out_dir);
    dataio::write_link_report(linked.report, (fs::path(out_dir) / "link_report.csv").string());

    PrepareResult result;
    result.link_report = std::move(linked.report);
    result.n_users = bundle.folds[0].user_index.size();
    result.n_items = bundle.folds[0].item_index.size();
    for (const auto& fold : bundle.folds) {
        result.fold_sizes.emplace_back(fold.train.size(), fold.test.size());
    }
    return result;
}

FlatFold flatten_fold(const dataio::Fold& fold, const dataio::FeatureCatalog& catalog,
                      const std::map<int, std::string>& titles) {
    FlatFold flat;
    flat.n_users = fold.user_index.size();
    flat.tag_names = catalog.tag_names;
    flat.features = numerics::Matrix(fold.item_index.size(), catalog.tag_names.size());
    flat.titles.resize(fold.item_index.size());
    flat.user_ids.resize(fold.user_index.size());
    for (const auto& [id, idx] : fold.user_index) flat.user_ids[idx] = id;
    for (const auto& [id, idx] : fold.item_index) {
        const auto& vec = catalog.features.at(id);
        std::copy(vec.begin(), vec.end(), flat.features.row(idx));
        const auto it = titles.find(id);
        flat.titles[idx] = it == titles.end() ? std::to_string(id) : it->second;
    }
    auto convert = [&](const std::vector<dataio::RatingRecord>& records,
                       std::vector<models::Example>& out) {
        out.reserve(records.size());
        for (const auto& r : records) {
            models::Example ex;
            ex.user = static_cast<std::size_t>(fold.user_index.at(r.user_id));
            ex.item = static_cast<std::size_t>(fold.item_index.at(r.item_id));
            ex.rating = static_cast<double>(r.rating);
            out.push_back(ex);
        }
    };
    convert(fold.train, flat.train);
    convert(fold.test, flat.test);
    return flat;
}

numerics::Matrix embedding_table(const models::Model& model) {
    const std::size_t dim = models::embedding_dim(model);
    numerics::Matrix table(model.dims.n_users, dim);
    for (std::size_t u = 0; u < model.dims.n_users; ++u) {
        const numerics::Vec e = models::embedding_of(model, u);
        std::copy(e.begin(), e.end(), table.row(u));
    }
    return table;
}

std::vector<evaluation::UserRatings> test_ratings_by_user(const dataio::Fold& fold) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    numerics::Vec ratings;
    pairs.reserve(fold.test.size());
    for (const auto& r : fold.test) {
        pairs.emplace_back(static_cast<std::size_t>(fold.user_index.at(r.user_id)),
                           static_cast<std::size_t>(fold.item_index.at(r.item_id)));
        ratings.push_back(static_cast<double>(r.rating));
    }
    return evaluation::group_ratings(pairs, ratings, fold.user_index.size());
}

namespace {

struct CellContext {
    const ExperimentConfig* config;
    std::string config_hash;
    std::string dataset_hash;
};

// Trains one (kind, z, fold) cell and writes model.txt, trace.csv and
// report.json into its run directory.
void run_cell(const CellContext& ctx, models::ModelKind kind, std::size_t z,
              const dataio::Fold& fold, const FlatFold& flat,
              const std::vector<evaluation::UserRatings>& test_by_user) {
    const ExperimentConfig& config = *ctx.config;
    const std::string run_name = models::to_string(kind) + "_" + std::to_string(z) + "_fold" +
                                 std::to_string(fold.fold_id);
    const fs::path run_dir = fs::path(config.out_dir) / "runs" / run_name;
    fs::create_directories(run_dir);

    training::HyperParams hp = config.hyper_for(kind, z);
    const std::uint64_t cell_salt =
        static_cast<std::uint64_t>(z) * 1009 + static_cast<std::uint64_t>(kind) * 131071;
    const std::uint64_t run_seed =
        numerics::mix_seed(numerics::mix_seed(config.seed, cell_salt),
                           static_cast<std::uint64_t>(fold.fold_id));
    hp.seed = run_seed;

    models::ModelDims dims;
    dims.n_features = flat.features.cols;
    dims.n_users = flat.n_users;
    numerics::SeededRng init_rng(run_seed);
    models::Model model = models::init_model(kind, z, dims, init_rng, hp.activation);

    const training::TrainTrace trace = training::train(model, flat.train, flat.features, hp);

    numerics::Vec pred, target;
    pred.reserve(flat.test.size());
    for (const auto& ex : flat.test) {
        double p = models::forward(model, flat.features.row_vec(ex.item), ex.user);
        if (config.clamp_predictions) p = std::clamp(p, 1.0, 5.0);
        pred.push_back(p);
        target.push_back(ex.rating);
    }

    const numerics::Matrix table = embedding_table(model);
    const auto sweep = evaluation::pdc_sweep(table, test_by_user, config.thresholds, config.d_u);

    models::save_model_file(model, (run_dir / "model.txt").string(), ctx.dataset_hash);
    {
        std::ofstream out((run_dir / "trace.csv").string());
        out << "epoch,loss,seconds\n";
        for (std::size_t e = 0; e < trace.epoch_loss.size(); ++e) {
            // wall time is for the whole run; per-epoch timing is not tracked
            out << e << "," << fmt_double(trace.epoch_loss[e]) << ","
                << (e + 1 == trace.epoch_loss.size() ? fmt_double(trace.wall_seconds) : "")
                << "\n";
        }
    }
    json report;
    report["kind"] = models::to_string(kind);
    report["z"] = z;
    report["fold"] = fold.fold_id;
    report["seed"] = run_seed;
    report["mae"] = evaluation::mae(pred, target);
    report["rmse"] = evaluation::rmse(pred, target);
    report["param_count"] = models::param_count(kind, z, dims.n_features, dims.n_users);
    report["train_size"] = flat.train.size();
    report["test_size"] = flat.test.size();
    report["clamp_predictions"] = config.clamp_predictions;
    report["user_distance"] = evaluation::to_string(config.d_u);
    report["hyper"] = hp_to_json(hp);
    report["rng"] = numerics::SeededRng::kAlgorithm;
    report["config_hash"] = ctx.config_hash;
    report["dataset_hash"] = ctx.dataset_hash;
    report["version"] = kVersion;
    json pdc_scores = json::object(), pair_counts = json::object();
    for (const auto& entry : sweep) {
        const std::string key = std::to_string(entry.threshold);
        if (entry.available) {
            pdc_scores[key] = entry.score;
            pair_counts[key] = entry.pair_count;
        } else {
            pdc_scores[key] = nullptr;
            pair_counts[key] = nullptr;
        }
    }
    report["pdc"] = pdc_scores;
    report["pair_counts"] = pair_counts;
    std::ofstream out((run_dir / "report.json").string());
    out << report.dump(2) << "\n";
}

}  // namespace

ResultsTable cmd_run(const ExperimentConfig& config) {
    if (config.kinds.empty()) throw std::invalid_argument("run: no model kinds configured");
    if (config.cache_dir.empty() || config.out_dir.empty()) {
        throw std::invalid_argument("run: cache_dir and out_dir are required");
    }
    const dataio::DatasetBundle bundle = dataio::load_dataset(config.cache_dir);

    CellContext ctx;
    ctx.config = &config;
    ctx.dataset_hash = hash_dataset(config.cache_dir);
    fs::create_directories(config.out_dir);
    save_config(config, (fs::path(config.out_dir) / "config.json").string());
    ctx.config_hash = hash_file((fs::path(config.out_dir) / "config.json").string());

    for (int fold_id : config.folds) {
        const auto fold_it =
            std::find_if(bundle.folds.begin(), bundle.folds.end(),
                         [&](const dataio::Fold& f) { return f.fold_id == fold_id; });
        if (fold_it == bundle.folds.end()) {
            throw std::runtime_error("run: fold " + std::to_string(fold_id) + " not in cache");
        }
        const FlatFold flat = flatten_fold(*fold_it, bundle.catalog, bundle.titles);
        const auto test_by_user = test_ratings_by_user(*fold_it);

        for (models::ModelKind kind : config.kinds) {
            const std::vector<std::size_t> zs =
                models::is_fusion_kind(kind) ? config.z_values : std::vector<std::size_t>{0};
            for (std::size_t z : zs) {
                const std::string run_name = models::to_string(kind) + "_" + std::to_string(z) +
                                             "_fold" + std::to_string(fold_id);
                try {
                    run_cell(ctx, kind, z, *fold_it, flat, test_by_user);
                } catch (const std::exception& e) {
                    const fs::path run_dir = fs::path(config.out_dir) / "runs" / run_name;
                    fs::create_directories(run_dir);
                    std::ofstream err((run_dir / "error.txt").string());
                    err << e.what() << "\n";
                }
            }
        }
    }
    return cmd_report(config.out_dir);
}

ResultsTable cmd_report(const std::string& results_dir) {
    const fs::path runs_dir = fs::path(results_dir) / "runs";
    if (!fs::is_directory(runs_dir)) {
        throw std::runtime_error("report: no runs directory under " + results_dir);
    }

    struct Group {
        std::vector<json> reports;
        std::vector<std::string> errors;
    };
    std::map<std::pair<std::string, std::size_t>, Group> groups;

    std::vector<std::string> run_names;
    for (const auto& entry : fs::directory_iterator(runs_dir)) {
        if (entry.is_directory()) run_names.push_back(entry.path().filename().string());
    }
    std::sort(run_names.begin(), run_names.end());
    if (run_names.empty()) throw std::runtime_error("report: results directory is empty");

    for (const std::string& name : run_names) {
        const fs::path dir = runs_dir / name;
        if (fs::exists(dir / "report.json")) {
            std::ifstream in((dir / "report.json").string());
            json j;
            in >> j;
            groups[{j["kind"].get<std::string>(), j["z"].get<std::size_t>()}].reports.push_back(j);
        } else if (fs::exists(dir / "error.txt")) {
            // run name: <kind>_<z>_fold<i>
            const auto first = name.find('_');
            const auto second = name.find('_', first + 1);
            const std::string kind = name.substr(0, first);
            const std::size_t z = std::stoull(name.substr(first + 1, second - first - 1));
            std::ifstream in((dir / "error.txt").string());
            std::string msg((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
            groups[{kind, z}].errors.push_back(msg);
        }
    }

    // rows keyed by (kind order of first appearance is fine; map gives
    // alphabetical which is stable for golden runs)
    ResultsTable table;
    std::set<std::size_t> all_thresholds;
    for (auto& [key, group] : groups) {
        RunRow row;
        row.kind = key.first;
        row.z = key.second;
        row.n_folds = group.reports.size();
        if (group.reports.empty()) {
            row.ok = false;
            row.error = group.errors.empty() ? "no reports" : group.errors.front();
            table.rows.push_back(row);
            continue;
        }
        row.ok = true;
        if (!group.errors.empty()) row.error = "partial: " + group.errors.front();
        row.params = group.reports.front()["param_count"].get<std::size_t>();

        std::vector<double> maes, rmses;
        std::map<std::size_t, std::vector<double>> pdcs, counts;
        for (const json& r : group.reports) {
            maes.push_back(r["mae"].get<double>());
            rmses.push_back(r["rmse"].get<double>());
            for (const auto& [t, score] : r["pdc"].items()) {
                if (!score.is_null()) pdcs[std::stoull(t)].push_back(score.get<double>());
            }
            for (const auto& [t, c] : r["pair_counts"].items()) {
                if (!c.is_null()) counts[std::stoull(t)].push_back(c.get<double>());
            }
        }
        const Stats mae_s = stats_of(maes), rmse_s = stats_of(rmses);
        row.mae_mean = mae_s.mean;
        row.mae_std = mae_s.stddev;
        row.rmse_mean = rmse_s.mean;
        row.rmse_std = rmse_s.stddev;
        for (const auto& [t, xs] : pdcs) {
            const Stats s = stats_of(xs);
            row.pdc_mean[t] = s.mean;
            row.pdc_std[t] = s.stddev;
            all_thresholds.insert(t);
        }
        for (const auto& [t, xs] : counts) row.pair_count_mean[t] = stats_of(xs).mean;
        table.rows.push_back(row);
    }

    // results.csv
    {
        std::ofstream out((fs::path(results_dir) / "results.csv").string());
        out << "kind,z,params,folds,mae_mean,mae_std,rmse_mean,rmse_std,pdc4_mean,pdc4_std,error\n";
        for (const RunRow& row : table.rows) {
            out << row.kind << "," << row.z << "," << row.params << "," << row.n_folds << ",";
            if (row.ok) {
                const bool single = row.n_folds < 2;
                out << fmt_double(row.mae_mean) << "," << (single ? "" : fmt_double(row.mae_std))
                    << "," << fmt_double(row.rmse_mean) << ","
                    << (single ? "" : fmt_double(row.rmse_std)) << ",";
                if (row.pdc_mean.count(4)) {
                    out << fmt_double(row.pdc_mean.at(4)) << ","
                        << (single ? "" : fmt_double(row.pdc_std.at(4)));
                } else {
                    out << ",";
                }
                out << ",";
            } else {
                out << ",,,,,," << "run failed";
            }
            out << "\n";
        }
    }
    // sweep.csv (one row per kind, z, threshold)
    {
        std::ofstream out((fs::path(results_dir) / "sweep.csv").string());
        out << "kind,z,threshold,score_mean,score_std,pair_count_mean\n";
        for (const RunRow& row : table.rows) {
            for (const auto& [t, mean] : row.pdc_mean) {
                out << row.kind << "," << row.z << "," << t << "," << fmt_double(mean) << ","
                    << (row.n_folds < 2 ? "" : fmt_double(row.pdc_std.at(t))) << ","
                    << fmt_double(row.pair_count_mean.at(t)) << "\n";
            }
        }
    }
    // results.txt (aligned, best value per column marked)
    {
        double best_mae = 1e300, best_rmse = 1e300, best_pdc = -1e300;
        for (const RunRow& row : table.rows) {
            if (!row.ok) continue;
            best_mae = std::min(best_mae, row.mae_mean);
            best_rmse = std::min(best_rmse, row.rmse_mean);
            if (row.pdc_mean.count(4)) best_pdc = std::max(best_pdc, row.pdc_mean.at(4));
        }
        std::ofstream out((fs::path(results_dir) / "results.txt").string());
        char line[256];
        std::snprintf(line, sizeof(line), "%-10s %4s  %-16s %-16s %-16s %10s\n", "fusion", "z",
                      "MAE", "RMSE", "PDC(t=4)", "params");
        out << line;
        for (const RunRow& row : table.rows) {
            if (!row.ok) {
                std::snprintf(line, sizeof(line), "%-10s %4zu  %s\n", row.kind.c_str(), row.z,
                              "FAILED");
                out << line;
                continue;
            }
            auto cell = [&](double mean, double sd, bool best) {
                std::string s = fmt4(mean);
                if (row.n_folds >= 2) s += "+-" + std::string(fmt4(sd));
                if (best) s += "*";
                return s;
            };
            const bool has_pdc = row.pdc_mean.count(4) != 0;
            std::snprintf(line, sizeof(line), "%-10s %4zu  %-16s %-16s %-16s %10zu\n",
                          row.kind.c_str(), row.z,
                          cell(row.mae_mean, row.mae_std, row.mae_mean == best_mae).c_str(),
                          cell(row.rmse_mean, row.rmse_std, row.rmse_mean == best_rmse).c_str(),
                          has_pdc ? cell(row.pdc_mean.at(4), row.pdc_std.at(4),
                                         row.pdc_mean.at(4) == best_pdc)
                                        .c_str()
                                  : "-",
                          row.params);
            out << line;
        }
    }
    return table;
}

AnalyzeResult cmd_analyze(const std::string& model_path, const std::string& cache_dir,
                          std::size_t clusters, std::size_t sample, std::uint64_t seed,
                          const std::string& out_dir) {
    const models::Model model = models::load_model_file(model_path);
    if (model.kind != models::ModelKind::TensorFusion) {
        throw std::runtime_error("analyze requires a tensor-fusion model; this file holds '" +
                                 models::to_string(model.kind) +
                                 "' (use the sensitivity operation for mask models)");
    }
    const dataio::DatasetBundle bundle = dataio::load_dataset(cache_dir);
    const FlatFold flat = flatten_fold(bundle.folds.at(0), bundle.catalog, bundle.titles);
    if (flat.features.cols != model.dims.n_features || flat.n_users != model.dims.n_users) {
        throw std::runtime_error("analyze: model dimensions do not match the dataset cache");
    }

    AnalyzeResult result;
    const numerics::Matrix table = embedding_table(model);
    numerics::SeededRng rng(seed);
    result.clustering = analysis::kmeans(table, clusters, rng);
    const auto picked = analysis::sample_clusters(result.clustering, sample, rng);
    for (std::size_t c : picked) {
        result.profiles.push_back(analysis::centroid_profile(
            model, result.clustering.centroids.row_vec(c), flat.features, flat.tag_names,
            flat.titles));
        result.profiles.back().cluster = c;
    }

    fs::create_directories(out_dir);
    {
        std::ofstream out((fs::path(out_dir) / "profiles.csv").string());
        out << "cluster,bias,rank,top_feature,top_feature_score,bottom_feature,"
               "bottom_feature_score,top_movie,top_movie_score,bottom_movie,bottom_movie_score\n";
        auto q = [](const std::string& s) {
            std::string r = "\"";
            for (char c : s) r += (c == '"') ? "\"\"" : std::string(1, c);
            return r + "\"";
        };
        for (const auto& p : result.profiles) {
            const std::size_t n = std::max(p.top_features.size(), p.top_movies.size());
            for (std::size_t i = 0; i < n; ++i) {
                out << p.cluster << "," << fmt_double(p.bias) << "," << i;
                auto emit = [&](const std::vector<analysis::RankedItem>& v) {
                    if (i < v.size()) {
                        out << "," << q(v[i].name) << "," << fmt_double(v[i].score);
                    } else {
                        out << ",,";
                    }
                };
                emit(p.top_features);
                emit(p.bottom_features);
                emit(p.top_movies);
                emit(p.bottom_movies);
                out << "\n";
            }
        }
    }
    {
        std::ofstream out((fs::path(out_dir) / "profiles.txt").string());
        for (const auto& p : result.profiles) {
            out << "cluster " << p.cluster << "  bias " << fmt4(p.bias) << "\n";
            auto dump = [&](const char* label, const std::vector<analysis::RankedItem>& v) {
                out << "  " << label << ":";
                for (const auto& item : v) out << " " << item.name << " (" << fmt4(item.score) << ");";
                out << "\n";
            };
            dump("top features   ", p.top_features);
            dump("bottom features", p.bottom_features);
            dump("top movies     ", p.top_movies);
            dump("bottom movies  ", p.bottom_movies);
        }
    }
    return result;
}

std::vector<evaluation::PdcSweepEntry> cmd_pdc(const std::string& embeddings_csv,
                                               const std::string& ratings_path,
                                               const std::vector<std::size_t>& thresholds,
                                               evaluation::UserDistance d_u,
                                               const std::string& out_csv) {
    // embeddings: header user_id,dim_0..dim_{d-1}
    std::ifstream in(embeddings_csv);
    if (!in) throw std::runtime_error("cannot open embeddings CSV: " + embeddings_csv);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("embeddings CSV is empty");
    const auto header = dataio::split_csv(line);
    if (header.empty() || header[0] != "user_id") {
        throw std::runtime_error("embeddings CSV: expected header starting with user_id");
    }
    const std::size_t dim = header.size() - 1;
    std::map<int, numerics::Vec> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = dataio::split_csv(line);
        if (f.size() != dim + 1) {
            throw std::runtime_error("embeddings CSV: row with wrong field count");
        }
        numerics::Vec v;
        for (std::size_t i = 1; i < f.size(); ++i) v.push_back(std::stod(f[i]));
        rows[std::stoi(f[0])] = std::move(v);
    }
    if (rows.size() < 2) throw std::runtime_error("embeddings CSV: need at least 2 users");

    std::map<int, std::size_t> user_pos;
    numerics::Matrix table(rows.size(), dim);
    for (const auto& [id, v] : rows) {
        const std::size_t idx = user_pos.size();
        user_pos[id] = idx;
        std::copy(v.begin(), v.end(), table.row(idx));
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    numerics::Vec ratings;
    {
        std::ifstream rin(ratings_path);
        if (!rin) throw std::runtime_error("cannot open ratings file: " + ratings_path);
        std::size_t lineno = 0;
        while (std::getline(rin, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::istringstream ss(line);
            int user, item;
            double rating;
            if (!(ss >> user >> item >> rating)) {
                throw std::runtime_error(ratings_path + ":" + std::to_string(lineno) +
                                         ": expected user item rating");
            }
            const auto it = user_pos.find(user);
            if (it == user_pos.end()) {
                throw std::runtime_error(ratings_path + ":" + std::to_string(lineno) +
                                         ": user " + std::to_string(user) +
                                         " has no embedding row");
            }
            pairs.emplace_back(it->second, static_cast<std::size_t>(item));
            ratings.push_back(rating);
        }
    }
    const auto by_user = evaluation::group_ratings(pairs, ratings, rows.size());
    const auto sweep = evaluation::pdc_sweep(table, by_user, thresholds, d_u);

    if (!out_csv.empty()) {
        std::ofstream out(out_csv);
        if (!out) throw std::runtime_error("cannot write " + out_csv);
        out << "threshold,score,pair_count\n";
        for (const auto& e : sweep) {
            out << e.threshold << ",";
            if (e.available) {
                out << fmt_double(e.score) << "," << e.pair_count;
            } else {
                out << ",";
            }
            out << "\n";
        }
    }
    return sweep;
}

}  // namespace fusionlab::harness
