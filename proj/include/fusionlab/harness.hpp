#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fusionlab/analysis.hpp"
#include "fusionlab/dataio.hpp"
#include "fusionlab/evaluation.hpp"
#include "fusionlab/models.hpp"
#include "fusionlab/training.hpp"

namespace fusionlab::harness {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
    std::string cache_dir;
    std::string out_dir;
    std::vector<models::ModelKind> kinds;
    std::vector<std::size_t> z_values{2, 4, 8, 16, 32, 64};
    std::vector<std::size_t> thresholds{1, 2, 4, 8};
    std::vector<int> folds{1, 2, 3, 4, 5};
    training::HyperParams hp;
    // most-specific wins: "kind:z" over "kind" over the default hp
    std::map<std::string, training::HyperParams> hp_overrides;
    std::uint64_t seed = 0;
    bool clamp_predictions = false;  // clamp to [1,5] at evaluation time
    evaluation::UserDistance d_u = evaluation::UserDistance::MeanSquaredDifference;

    training::HyperParams hyper_for(models::ModelKind kind, std::size_t z) const;
};

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);

// FNV-1a of a file / of all cache files, rendered as hex.
std::string hash_file(const std::string& path);
std::string hash_dataset(const std::string& cache_dir);

struct PrepareResult {
    dataio::LinkReport link_report;
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    std::vector<std::pair<std::size_t, std::size_t>> fold_sizes;  // train/test after filtering
};

PrepareResult cmd_prepare(const std::string& ml100k_dir, const std::string& ml20m_dir,
                          const std::string& out_dir);

struct RunRow {
    std::string kind;
    std::size_t z = 0;
    std::size_t params = 0;
    bool ok = false;
    std::string error;
    std::size_t n_folds = 0;
    double mae_mean = 0, mae_std = 0;
    double rmse_mean = 0, rmse_std = 0;
    std::map<std::size_t, double> pdc_mean, pdc_std;
    std::map<std::size_t, double> pair_count_mean;
};

struct ResultsTable {
    std::vector<RunRow> rows;
};

// Trains and evaluates every (kind, z, fold) cell, persisting per-run
// model/trace/report artifacts under out_dir/runs/, then aggregates.
// Failures of single cells are recorded; the grid continues.
ResultsTable cmd_run(const ExperimentConfig& config);

// Re-aggregates the per-run reports found under results_dir/runs and
// rewrites results.csv, results.txt and sweep.csv.
ResultsTable cmd_report(const std::string& results_dir);

struct AnalyzeResult {
    analysis::Clustering clustering;
    std::vector<analysis::CentroidProfile> profiles;
};

// k-means over a trained tensor-fusion model's embedding table plus
// Table-II-style profiles for `sample` randomly chosen clusters.
AnalyzeResult cmd_analyze(const std::string& model_path, const std::string& cache_dir,
                          std::size_t clusters, std::size_t sample, std::uint64_t seed,
                          const std::string& out_dir);

// Standalone PDC sweep over an embeddings CSV (header user_id,dim_0..) and a
// tab-separated ratings file; writes threshold,score,pair_count CSV.
std::vector<evaluation::PdcSweepEntry> cmd_pdc(const std::string& embeddings_csv,
                                               const std::string& ratings_path,
                                               const std::vector<std::size_t>& thresholds,
                                               evaluation::UserDistance d_u,
                                               const std::string& out_csv);

// --- shared helpers ---

// Flattens a fold against the catalog: examples carry contiguous indices and
// the feature matrix rows follow the fold's item_index order.
struct FlatFold {
    numerics::Matrix features;
    std::vector<models::Example> train, test;
    std::size_t n_users = 0;
    std::vector<int> user_ids;  // index -> original id
    std::vector<std::string> titles;
    std::vector<std::string> tag_names;
};
FlatFold flatten_fold(const dataio::Fold& fold, const dataio::FeatureCatalog& catalog,
                      const std::map<int, std::string>& titles);

numerics::Matrix embedding_table(const models::Model& model);

std::vector<evaluation::UserRatings> test_ratings_by_user(const dataio::Fold& fold);

}  // namespace fusionlab::harness
