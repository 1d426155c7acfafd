#include "fusionlab/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace fusionlab::dataio {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

int parse_int(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(context + ": not an integer: '" + s + "'");
    }
}

double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(context + ": not a number: '" + s + "'");
    }
}

std::vector<RatingRecord> parse_ratings_file(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    std::vector<RatingRecord> records;
    records.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::string where = path + ":" + std::to_string(i + 1);
        const auto fields = split(lines[i], '\t');
        if (fields.size() != 4) {
            throw std::runtime_error(where + ": expected 4 tab-separated fields, got " +
                                     std::to_string(fields.size()));
        }
        RatingRecord rec;
        rec.user_id = parse_int(fields[0], where);
        rec.item_id = parse_int(fields[1], where);
        rec.rating = parse_int(fields[2], where);
        if (rec.rating < 1 || rec.rating > 5) {
            throw std::runtime_error(where + ": rating " + std::to_string(rec.rating) +
                                     " out of range [1,5]");
        }
        if (rec.user_id <= 0 || rec.item_id <= 0) {
            throw std::runtime_error(where + ": non-positive user or item id");
        }
        records.push_back(rec);
    }
    return records;
}

std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<RatingRecord> load_ratings(const std::string& dir) {
    return parse_ratings_file((fs::path(dir) / "u.data").string());
}

std::vector<Fold> load_official_folds(const std::string& dir) {
    std::vector<Fold> folds;
    for (int i = 1; i <= 5; ++i) {
        const std::string base = (fs::path(dir) / ("u" + std::to_string(i) + ".base")).string();
        const std::string test = (fs::path(dir) / ("u" + std::to_string(i) + ".test")).string();
        Fold fold;
        fold.fold_id = i;
        fold.train = parse_ratings_file(base);
        fold.test = parse_ratings_file(test);

        std::set<std::pair<int, int>> train_pairs;
        for (const RatingRecord& r : fold.train) train_pairs.emplace(r.user_id, r.item_id);
        for (const RatingRecord& r : fold.test) {
            if (train_pairs.count({r.user_id, r.item_id})) {
                throw std::runtime_error("fold " + std::to_string(i) + ": (user " +
                                         std::to_string(r.user_id) + ", item " +
                                         std::to_string(r.item_id) +
                                         ") appears in both base and test");
            }
        }
        folds.push_back(std::move(fold));
    }
    return folds;
}

FeatureCatalog load_genome(const std::string& scores_path, const std::string& tags_path) {
    FeatureCatalog catalog;

    // tags: header tagId,tag — tag order follows ascending tagId
    const auto tag_lines = read_lines(tags_path);
    if (tag_lines.empty()) throw std::runtime_error(tags_path + ": empty file");
    std::map<int, std::string> tags_by_id;
    for (std::size_t i = 1; i < tag_lines.size(); ++i) {
        if (tag_lines[i].empty()) continue;
        const auto f = split_csv(tag_lines[i]);
        const std::string where = tags_path + ":" + std::to_string(i + 1);
        if (f.size() != 2) throw std::runtime_error(where + ": expected tagId,tag");
        const int id = parse_int(f[0], where);
        if (!tags_by_id.emplace(id, f[1]).second) {
            throw std::runtime_error(where + ": duplicate tagId " + std::to_string(id));
        }
    }
    std::map<int, std::size_t> tag_pos;
    for (const auto& [id, name] : tags_by_id) {
        tag_pos[id] = catalog.tag_names.size();
        catalog.tag_names.push_back(name);
    }
    const std::size_t n_tags = catalog.tag_names.size();

    // scores: header movieId,tagId,relevance
    const auto score_lines = read_lines(scores_path);
    if (score_lines.empty()) throw std::runtime_error(scores_path + ": empty file");
    std::map<int, std::pair<Vec, std::vector<bool>>> partial;
    for (std::size_t i = 1; i < score_lines.size(); ++i) {
        if (score_lines[i].empty()) continue;
        const auto f = split_csv(score_lines[i]);
        const std::string where = scores_path + ":" + std::to_string(i + 1);
        if (f.size() != 3) throw std::runtime_error(where + ": expected movieId,tagId,relevance");
        const int movie = parse_int(f[0], where);
        const int tag = parse_int(f[1], where);
        const double rel = parse_double(f[2], where);
        if (rel < 0.0 || rel > 1.0) {
            throw std::runtime_error(where + ": relevance " + fmt_double(rel) +
                                     " outside [0,1]");
        }
        const auto pos_it = tag_pos.find(tag);
        if (pos_it == tag_pos.end()) {
            throw std::runtime_error(where + ": unknown tagId " + std::to_string(tag));
        }
        auto& [vec, seen] = partial[movie];
        if (vec.empty()) {
            vec.assign(n_tags, 0.0);
            seen.assign(n_tags, false);
        }
        if (seen[pos_it->second]) {
            throw std::runtime_error(where + ": duplicate (movieId,tagId) = (" +
                                     std::to_string(movie) + "," + std::to_string(tag) + ")");
        }
        seen[pos_it->second] = true;
        vec[pos_it->second] = rel;
    }
    for (auto& [movie, entry] : partial) {
        auto& [vec, seen] = entry;
        const bool complete =
            std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
        if (complete) {
            catalog.features.emplace(movie, std::move(vec));
        } else {
            catalog.excluded_incomplete += 1;
        }
    }
    return catalog;
}

NormalizedTitle normalize_title(const std::string& raw) {
    NormalizedTitle out;
    std::string s = raw;

    // year: last "(NNNN)" group
    for (std::size_t i = s.size(); i >= 6; --i) {
        if (s[i - 1] == ')' && i >= 6 && s[i - 6] == '(') {
            bool digits = true;
            for (std::size_t k = i - 5; k < i - 1; ++k) {
                digits = digits && std::isdigit(static_cast<unsigned char>(s[k]));
            }
            if (digits) {
                out.year = std::stoi(s.substr(i - 5, 4));
                s = s.substr(0, i - 6) + s.substr(i);
                break;
            }
        }
    }

    // strip remaining parenthesized groups (alternate titles)
    std::string stripped;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        else if (c == ')' && depth > 0) --depth;
        else if (depth == 0) stripped.push_back(c);
    }
    s = stripped;

    // lowercase, collapse whitespace, trim
    std::string norm;
    bool in_space = true;
    for (char c : s) {
        const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (std::isspace(static_cast<unsigned char>(lc))) {
            if (!in_space && !norm.empty()) norm.push_back(' ');
            in_space = true;
        } else {
            norm.push_back(lc);
            in_space = false;
        }
    }
    while (!norm.empty() && norm.back() == ' ') norm.pop_back();

    // trailing article: "title, the" -> "the title"
    for (const std::string art : {"the", "a", "an"}) {
        const std::string suffix = ", " + art;
        if (norm.size() > suffix.size() &&
            norm.compare(norm.size() - suffix.size(), suffix.size(), suffix) == 0) {
            norm = art + " " + norm.substr(0, norm.size() - suffix.size());
            break;
        }
    }
    out.title = norm;
    return out;
}

LinkResult link_movies(const std::string& u_item_path, const std::string& movies_csv_path,
                       const FeatureCatalog& ml20m_catalog) {
    // ML-20M side: normalized (title, year) -> movie id, ambiguous keys removed
    const auto movie_lines = read_lines(movies_csv_path);
    if (movie_lines.empty()) throw std::runtime_error(movies_csv_path + ": empty file");
    std::map<std::pair<std::string, int>, int> ml20m_by_key;
    std::set<std::pair<std::string, int>> ambiguous;
    for (std::size_t i = 1; i < movie_lines.size(); ++i) {
        if (movie_lines[i].empty()) continue;
        const auto f = split_csv(movie_lines[i]);
        const std::string where = movies_csv_path + ":" + std::to_string(i + 1);
        if (f.size() < 2) throw std::runtime_error(where + ": expected movieId,title,...");
        const int id = parse_int(f[0], where);
        const NormalizedTitle nt = normalize_title(f[1]);
        const auto key = std::make_pair(nt.title, nt.year);
        if (ambiguous.count(key)) continue;
        auto [it, inserted] = ml20m_by_key.emplace(key, id);
        if (!inserted) {
            ml20m_by_key.erase(it);
            ambiguous.insert(key);
        }
    }

    LinkResult result;
    result.catalog.tag_names = ml20m_catalog.tag_names;

    std::map<int, int> used_ml20m;  // ml20m id -> ml100k id, collision guard
    const auto item_lines = read_lines(u_item_path);
    for (std::size_t i = 0; i < item_lines.size(); ++i) {
        if (item_lines[i].empty()) continue;
        const std::string where = u_item_path + ":" + std::to_string(i + 1);
        const auto f = split(item_lines[i], '|');
        if (f.size() < 2) throw std::runtime_error(where + ": expected id|title|...");
        LinkEntry entry;
        entry.ml100k_id = parse_int(f[0], where);
        entry.title = f[1];
        result.titles[entry.ml100k_id] = f[1];

        const NormalizedTitle nt = normalize_title(f[1]);
        const auto key = std::make_pair(nt.title, nt.year);
        if (ambiguous.count(key)) {
            entry.status = "ambiguous";
        } else {
            const auto it = ml20m_by_key.find(key);
            if (it == ml20m_by_key.end()) {
                entry.status = "no_title_match";
            } else if (!ml20m_catalog.features.count(it->second)) {
                entry.status = "no_genome";
                entry.ml20m_id = it->second;
            } else {
                entry.status = "matched";
                entry.ml20m_id = it->second;
                const auto [uit, fresh] = used_ml20m.emplace(it->second, entry.ml100k_id);
                if (!fresh) {
                    throw std::runtime_error(
                        "link collision: ML-100k movies " + std::to_string(uit->second) +
                        " and " + std::to_string(entry.ml100k_id) +
                        " both map to ML-20M movie " + std::to_string(it->second) + " ('" +
                        f[1] + "')");
                }
                result.catalog.features.emplace(entry.ml100k_id,
                                                ml20m_catalog.features.at(it->second));
            }
        }
        if (entry.status == "matched") {
            result.report.matched += 1;
        } else {
            result.report.dropped += 1;
            result.report.dropped_titles.push_back(f[1]);
        }
        result.report.entries.push_back(std::move(entry));
    }
    return result;
}

std::vector<Fold> build_folds(const std::vector<Fold>& raw_folds,
                              const FeatureCatalog& linked_catalog) {
    if (linked_catalog.features.empty()) {
        throw std::runtime_error("build_folds: no linked items with features");
    }
    // shared contiguous indices: users from all fold ratings, items from the
    // linked catalog
    std::set<int> user_ids;
    for (const Fold& fold : raw_folds) {
        for (const RatingRecord& r : fold.train) user_ids.insert(r.user_id);
        for (const RatingRecord& r : fold.test) user_ids.insert(r.user_id);
    }
    std::map<int, int> user_index, item_index;
    for (int id : user_ids) {
        const int next = static_cast<int>(user_index.size());
        user_index.emplace(id, next);
    }
    for (const auto& [id, vec] : linked_catalog.features) {
        const int next = static_cast<int>(item_index.size());
        item_index.emplace(id, next);
    }

    std::vector<Fold> out;
    for (const Fold& fold : raw_folds) {
        Fold filtered;
        filtered.fold_id = fold.fold_id;
        filtered.user_index = user_index;
        filtered.item_index = item_index;
        for (const RatingRecord& r : fold.train) {
            if (item_index.count(r.item_id)) filtered.train.push_back(r);
        }
        for (const RatingRecord& r : fold.test) {
            if (item_index.count(r.item_id)) filtered.test.push_back(r);
        }
        if (filtered.test.empty()) {
            throw std::runtime_error("build_folds: fold " + std::to_string(fold.fold_id) +
                                     " has an empty test set after filtering");
        }
        out.push_back(std::move(filtered));
    }
    return out;
}

void write_link_report(const LinkReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "ml100k_id,title,status,ml20m_id\n";
    for (const LinkEntry& e : report.entries) {
        out << e.ml100k_id << "," << quote_csv(e.title) << "," << e.status << ","
            << e.ml20m_id << "\n";
    }
}

void save_dataset(const DatasetBundle& bundle, const std::string& dir) {
    fs::create_directories(dir);
    const auto& first = bundle.folds.at(0);

    {
        std::ofstream meta((fs::path(dir) / "meta.txt").string());
        if (!meta) throw std::runtime_error("cannot write dataset meta in " + dir);
        meta << "fusionlab-dataset v1\n";
        meta << "n_tags " << bundle.catalog.tag_names.size() << "\n";
        meta << "n_items " << first.item_index.size() << "\n";
        meta << "n_users " << first.user_index.size() << "\n";
        meta << "folds " << bundle.folds.size() << "\n";
    }
    {
        std::ofstream out((fs::path(dir) / "tags.csv").string());
        out << "tag_index,tag\n";
        for (std::size_t i = 0; i < bundle.catalog.tag_names.size(); ++i) {
            out << i << "," << quote_csv(bundle.catalog.tag_names[i]) << "\n";
        }
    }
    {
        std::ofstream out((fs::path(dir) / "users.csv").string());
        out << "user_id\n";
        for (const auto& [id, idx] : first.user_index) out << id << "\n";
    }
    {
        std::ofstream out((fs::path(dir) / "items.csv").string());
        out << "item_id,title\n";
        for (const auto& [id, idx] : first.item_index) {
            const auto it = bundle.titles.find(id);
            out << id << "," << quote_csv(it == bundle.titles.end() ? "" : it->second) << "\n";
        }
    }
    {
        std::ofstream out((fs::path(dir) / "features.csv").string());
        out << "item_id,values\n";
        for (const auto& [id, idx] : first.item_index) {
            out << id;
            for (double v : bundle.catalog.features.at(id)) out << "," << fmt_double(v);
            out << "\n";
        }
    }
    for (const Fold& fold : bundle.folds) {
        for (const bool is_train : {true, false}) {
            const std::string name = "fold" + std::to_string(fold.fold_id) +
                                     (is_train ? "_train.csv" : "_test.csv");
            std::ofstream out((fs::path(dir) / name).string());
            out << "user_id,item_id,rating\n";
            for (const RatingRecord& r : is_train ? fold.train : fold.test) {
                out << r.user_id << "," << r.item_id << "," << r.rating << "\n";
            }
        }
    }
}

DatasetBundle load_dataset(const std::string& dir) {
    const auto meta_lines = read_lines((fs::path(dir) / "meta.txt").string());
    if (meta_lines.empty() || meta_lines[0] != "fusionlab-dataset v1") {
        throw std::runtime_error("dataset cache at " + dir +
                                 ": unsupported format or version ('" +
                                 (meta_lines.empty() ? "" : meta_lines[0]) + "')");
    }
    std::map<std::string, std::size_t> meta;
    for (std::size_t i = 1; i < meta_lines.size(); ++i) {
        if (meta_lines[i].empty()) continue;
        const auto f = split(meta_lines[i], ' ');
        if (f.size() != 2) throw std::runtime_error("dataset meta: bad line '" + meta_lines[i] + "'");
        meta[f[0]] = std::stoull(f[1]);
    }
    for (const char* key : {"n_tags", "n_items", "n_users", "folds"}) {
        if (!meta.count(key)) throw std::runtime_error(std::string("dataset meta: missing ") + key);
    }

    DatasetBundle bundle;

    const auto tag_lines = read_lines((fs::path(dir) / "tags.csv").string());
    for (std::size_t i = 1; i < tag_lines.size(); ++i) {
        if (tag_lines[i].empty()) continue;
        const auto f = split_csv(tag_lines[i]);
        if (f.size() != 2) throw std::runtime_error("tags.csv: bad line " + std::to_string(i + 1));
        bundle.catalog.tag_names.push_back(f[1]);
    }
    if (bundle.catalog.tag_names.size() != meta["n_tags"]) {
        throw std::runtime_error("dataset cache corrupted: tag count mismatch");
    }

    std::map<int, int> user_index, item_index;
    {
        const auto lines = read_lines((fs::path(dir) / "users.csv").string());
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (lines[i].empty()) continue;
            const int id = parse_int(lines[i], "users.csv");
            const int next = static_cast<int>(user_index.size());
            user_index.emplace(id, next);
        }
        if (user_index.size() != meta["n_users"]) {
            throw std::runtime_error("dataset cache corrupted: user count mismatch");
        }
    }
    {
        const auto lines = read_lines((fs::path(dir) / "items.csv").string());
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (lines[i].empty()) continue;
            const auto f = split_csv(lines[i]);
            if (f.size() != 2) throw std::runtime_error("items.csv: bad line " + std::to_string(i + 1));
            const int id = parse_int(f[0], "items.csv");
            const int next = static_cast<int>(item_index.size());
            item_index.emplace(id, next);
            bundle.titles[id] = f[1];
        }
        if (item_index.size() != meta["n_items"]) {
            throw std::runtime_error("dataset cache corrupted: item count mismatch");
        }
    }
    {
        const auto lines = read_lines((fs::path(dir) / "features.csv").string());
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (lines[i].empty()) continue;
            const auto f = split_csv(lines[i]);
            if (f.size() != meta["n_tags"] + 1) {
                throw std::runtime_error("features.csv: row " + std::to_string(i + 1) +
                                         " has wrong field count");
            }
            const int id = parse_int(f[0], "features.csv");
            Vec vec;
            vec.reserve(meta["n_tags"]);
            for (std::size_t k = 1; k < f.size(); ++k) {
                vec.push_back(parse_double(f[k], "features.csv"));
            }
            bundle.catalog.features.emplace(id, std::move(vec));
        }
        if (bundle.catalog.features.size() != meta["n_items"]) {
            throw std::runtime_error("dataset cache corrupted: feature row count mismatch");
        }
    }
    for (std::size_t i = 1; i <= meta["folds"]; ++i) {
        Fold fold;
        fold.fold_id = static_cast<int>(i);
        fold.user_index = user_index;
        fold.item_index = item_index;
        for (const bool is_train : {true, false}) {
            const std::string name = "fold" + std::to_string(i) +
                                     (is_train ? "_train.csv" : "_test.csv");
            const auto lines = read_lines((fs::path(dir) / name).string());
            auto& dst = is_train ? fold.train : fold.test;
            for (std::size_t k = 1; k < lines.size(); ++k) {
                if (lines[k].empty()) continue;
                const auto f = split_csv(lines[k]);
                if (f.size() != 3) {
                    throw std::runtime_error(name + ": bad line " + std::to_string(k + 1));
                }
                RatingRecord r;
                r.user_id = parse_int(f[0], name);
                r.item_id = parse_int(f[1], name);
                r.rating = parse_int(f[2], name);
                if (r.rating < 1 || r.rating > 5) {
                    throw std::runtime_error(name + ": rating out of range at line " +
                                             std::to_string(k + 1));
                }
                dst.push_back(r);
            }
        }
        bundle.folds.push_back(std::move(fold));
    }
    return bundle;
}

}  // namespace fusionlab::dataio
