#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fusionlab/harness.hpp"

using namespace fusionlab;

namespace {

int run_prepare(const std::string& ml100k, const std::string& ml20m, const std::string& out) {
    const harness::PrepareResult result = harness::cmd_prepare(ml100k, ml20m, out);
    std::cout << "linked " << result.link_report.matched << " movies, dropped "
              << result.link_report.dropped << "\n";
    std::cout << "users " << result.n_users << ", items " << result.n_items << "\n";
    for (std::size_t i = 0; i < result.fold_sizes.size(); ++i) {
        std::cout << "fold " << (i + 1) << ": train " << result.fold_sizes[i].first << ", test "
                  << result.fold_sizes[i].second << "\n";
    }
    std::cout << "cache written to " << out << "\n";
    return 0;
}

void print_table(const harness::ResultsTable& table) {
    for (const auto& row : table.rows) {
        std::printf("%-10s z=%-3zu ", row.kind.c_str(), row.z);
        if (row.ok) {
            std::printf("MAE %.4f RMSE %.4f", row.mae_mean, row.rmse_mean);
            if (row.pdc_mean.count(4)) std::printf(" PDC(4) %.4f", row.pdc_mean.at(4));
            std::printf(" params %zu (%zu folds)\n", row.params, row.n_folds);
        } else {
            std::printf("FAILED: %s\n", row.error.c_str());
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fusionlab: user-embedding fusion experiments on MovieLens"};
    app.require_subcommand(1);

    // prepare
    auto* prepare = app.add_subcommand("prepare", "link datasets and build the fold cache");
    std::string ml100k_dir, ml20m_dir, prep_out;
    prepare->add_option("--ml100k", ml100k_dir, "MovieLens-100k directory")->required();
    prepare->add_option("--ml20m", ml20m_dir, "MovieLens-20M directory")->required();
    prepare->add_option("--out", prep_out, "cache output directory")->required();

    // run
    auto* run = app.add_subcommand("run", "train and evaluate the configured grid");
    std::string config_path, run_cache, run_out;
    std::vector<std::string> run_kinds;
    std::vector<std::size_t> run_z;
    std::vector<int> run_folds;
    std::uint64_t run_seed = 0;
    bool run_seed_set = false;
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--cache-dir", run_cache, "override cache directory");
    run->add_option("--out-dir", run_out, "override output directory");
    run->add_option("--kinds", run_kinds, "override model kinds");
    run->add_option("--z", run_z, "override embedding sizes");
    run->add_option("--folds", run_folds, "override folds");
    run->add_option("--seed", run_seed, "override seed")->each([&](const std::string&) {
        run_seed_set = true;
    });

    // analyze
    auto* analyze = app.add_subcommand("analyze", "cluster user embeddings and profile centroids");
    std::string model_path, analyze_cache, analyze_out;
    std::size_t clusters = 20, sample = 3;
    std::uint64_t analyze_seed = 0;
    analyze->add_option("--model", model_path, "trained tensor-fusion model file")->required();
    analyze->add_option("--cache", analyze_cache, "dataset cache directory")->required();
    analyze->add_option("--clusters", clusters, "number of k-means clusters");
    analyze->add_option("--sample", sample, "number of clusters to profile");
    analyze->add_option("--seed", analyze_seed, "clustering seed");
    analyze->add_option("--out", analyze_out, "output directory")->required();

    // report
    auto* report = app.add_subcommand("report", "re-aggregate per-run reports");
    std::string results_dir;
    report->add_option("--results", results_dir, "results directory (holding runs/)")->required();

    // pdc
    auto* pdc = app.add_subcommand("pdc", "standalone PDC sweep over an embeddings CSV");
    std::string embeddings_path, ratings_path, pdc_out, distance = "mean_squared_difference";
    std::vector<std::size_t> thresholds{1, 2, 4, 8};
    pdc->add_option("--embeddings", embeddings_path, "CSV with header user_id,dim_0..")
        ->required();
    pdc->add_option("--ratings", ratings_path, "tab-separated user item rating file")->required();
    pdc->add_option("--thresholds", thresholds, "common-item thresholds");
    pdc->add_option("--distance", distance, "mean_squared_difference|mean_absolute_difference");
    pdc->add_option("--out", pdc_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (prepare->parsed()) {
            return run_prepare(ml100k_dir, ml20m_dir, prep_out);
        }
        if (run->parsed()) {
            harness::ExperimentConfig config = harness::load_config(config_path);
            if (!run_cache.empty()) config.cache_dir = run_cache;
            if (!run_out.empty()) config.out_dir = run_out;
            if (!run_kinds.empty()) {
                config.kinds.clear();
                for (const auto& k : run_kinds) config.kinds.push_back(models::kind_from_string(k));
            }
            if (!run_z.empty()) config.z_values = run_z;
            if (!run_folds.empty()) config.folds = run_folds;
            if (run_seed_set) config.seed = run_seed;
            const harness::ResultsTable table = harness::cmd_run(config);
            print_table(table);
            return 0;
        }
        if (analyze->parsed()) {
            const harness::AnalyzeResult result = harness::cmd_analyze(
                model_path, analyze_cache, clusters, sample, analyze_seed, analyze_out);
            std::cout << "k-means: " << result.clustering.k << " clusters, inertia "
                      << result.clustering.inertia << ", " << result.clustering.iterations
                      << " iterations\n";
            std::cout << result.profiles.size() << " profiles written to " << analyze_out << "\n";
            return 0;
        }
        if (report->parsed()) {
            print_table(harness::cmd_report(results_dir));
            return 0;
        }
        if (pdc->parsed()) {
            const auto sweep = harness::cmd_pdc(embeddings_path, ratings_path, thresholds,
                                                evaluation::user_distance_from_string(distance),
                                                pdc_out);
            for (const auto& e : sweep) {
                if (e.available) {
                    std::printf("t=%zu  pdc %.4f  (%zu pairs)\n", e.threshold, e.score,
                                e.pair_count);
                } else {
                    std::printf("t=%zu  unavailable: %s\n", e.threshold, e.error.c_str());
                }
            }
            return 0;
        }
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::cerr << err.dump() << std::endl;
        return 1;
    }
    return 0;
}
