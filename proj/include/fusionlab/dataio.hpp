#pragma once

#include <map>
#include <string>
#include <vector>

#include "fusionlab/numerics.hpp"

namespace fusionlab::dataio {

using numerics::Vec;

struct RatingRecord {
    int user_id = 0;  // original ML-100k identifiers
    int item_id = 0;
    int rating = 0;  // 1..5
};

// Genome tag features. Keyed by ML-20M movie ids when freshly loaded, by
// ML-100k ids after linking.
struct FeatureCatalog {
    std::vector<std::string> tag_names;
    std::map<int, Vec> features;
    std::size_t excluded_incomplete = 0;  // movies with partial tag coverage
};

struct LinkEntry {
    int ml100k_id = 0;
    std::string title;
    std::string status;  // matched | no_title_match | no_genome | ambiguous
    int ml20m_id = 0;    // 0 when unmatched
};

struct LinkReport {
    std::size_t matched = 0;
    std::size_t dropped = 0;
    std::vector<std::string> dropped_titles;
    std::vector<LinkEntry> entries;
};

struct Fold {
    int fold_id = 0;
    std::vector<RatingRecord> train;
    std::vector<RatingRecord> test;
    std::map<int, int> user_index;  // original id -> 0-based contiguous index
    std::map<int, int> item_index;

    std::size_t n_users() const { return user_index.size(); }
};

// Everything the experiment needs, after linking and filtering: the five
// folds (sharing index maps), per-item features keyed by ML-100k id, titles.
struct DatasetBundle {
    std::vector<Fold> folds;
    FeatureCatalog catalog;
    std::map<int, std::string> titles;
};

// --- raw file loaders ---

// dir/u.data, tab-separated: user, item, rating, timestamp. Ratings must be
// integers in 1..5; malformed lines are reported with their line number.
std::vector<RatingRecord> load_ratings(const std::string& dir);

// dir/u{1..5}.base + u{1..5}.test. Verifies base/test (user,item)
// disjointness per fold. Index maps are left empty at this stage.
std::vector<Fold> load_official_folds(const std::string& dir);

// genome-scores.csv (movieId,tagId,relevance) + genome-tags.csv (tagId,tag).
// Movies missing any tag are excluded and counted. Relevance must be in
// [0,1]; duplicate (movieId,tagId) rows are an error.
FeatureCatalog load_genome(const std::string& scores_path, const std::string& tags_path);

// --- linking ---

struct NormalizedTitle {
    std::string title;  // lowercased, article moved to front, parens stripped
    int year = 0;       // 0 when no year could be parsed
};
NormalizedTitle normalize_title(const std::string& raw);

struct LinkResult {
    FeatureCatalog catalog;  // features re-keyed by ML-100k id
    LinkReport report;
    std::map<int, std::string> titles;  // ml100k id -> display title
};

// Matches ML-100k movies (u.item) against ML-20M (movies.csv) on
// (normalized title, year); movies without a match or without full genome
// coverage are dropped. Two ML-100k movies resolving to the same ML-20M
// movie is an error.
LinkResult link_movies(const std::string& u_item_path, const std::string& movies_csv_path,
                       const FeatureCatalog& ml20m_catalog);

// Removes ratings of dropped movies and installs contiguous index maps
// (shared across folds). A fold whose test set would become empty is an
// error.
std::vector<Fold> build_folds(const std::vector<Fold>& raw_folds,
                              const FeatureCatalog& linked_catalog);

void write_link_report(const LinkReport& report, const std::string& path);

// --- dataset cache (plain-text, versioned) ---

void save_dataset(const DatasetBundle& bundle, const std::string& dir);
DatasetBundle load_dataset(const std::string& dir);

// Field-aware CSV line splitter (handles quoted fields with embedded commas).
std::vector<std::string> split_csv(const std::string& line);

}  // namespace fusionlab::dataio
