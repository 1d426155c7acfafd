// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
// Criteria 5-7 (and the fold-1 band of criterion 4) need the real MovieLens
// inputs, which are not redistributable with this repository. Point
// FUSIONLAB_ML100K_DIR and FUSIONLAB_ML20M_DIR at local copies (or place
// them under ./data/ml-100k and ./data/ml-20m) to enable them; otherwise
// those lines report SKIP and the suite still exits 0.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "fusionlab/harness.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace fusionlab;
namespace fs = std::filesystem;
using models::Activation;
using models::Example;
using models::Model;
using models::ModelDims;
using models::ModelKind;
using numerics::Matrix;
using numerics::SeededRng;
using numerics::Vec;

namespace {

int g_failures = 0;

void report(int n, const std::string& name, bool pass, const std::string& detail = "") {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << n << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!pass) ++g_failures;
}

void report_skip(int n, const std::string& name, const std::string& why) {
    std::cout << "SKIP criterion " << n << ": " << name << " (" << why << ")\n";
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct DataDirs {
    std::string ml100k, ml20m;
    bool present = false;
};

DataDirs locate_data() {
    DataDirs d;
    const char* e100k = std::getenv("FUSIONLAB_ML100K_DIR");
    const char* e20m = std::getenv("FUSIONLAB_ML20M_DIR");
    d.ml100k = e100k ? e100k : "data/ml-100k";
    d.ml20m = e20m ? e20m : "data/ml-20m";
    d.present = fs::exists(fs::path(d.ml100k) / "u.data") &&
                fs::exists(fs::path(d.ml20m) / "genome-scores.csv");
    return d;
}

fs::path scratch_dir() {
    const fs::path p =
        fs::temp_directory_path() / ("fusionlab_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
}

// ---- criterion 1 -----------------------------------------------------------

void criterion_1() {
    // every published Params cell for the three fusion strategies and FM
    const std::map<std::size_t, std::size_t> mask{{2, 4147},   {4, 8293},   {8, 16585},
                                                  {16, 33169}, {32, 66337}, {64, 132673}};
    const std::map<std::size_t, std::size_t> tensor{{2, 5273},   {4, 9417},   {8, 17705},
                                                    {16, 34281}, {32, 67433}, {64, 133737}};
    const std::map<std::size_t, std::size_t> fm{{2, 6214},   {4, 10356},  {8, 18640},
                                                {16, 35208}, {32, 68344}, {64, 134616}};
    bool ok = true;
    for (const auto& [z, n] : mask) {
        ok &= models::param_count(ModelKind::AdditiveMask, z) == n;
        ok &= models::param_count(ModelKind::MultiplicativeMask, z) == n;
    }
    for (const auto& [z, n] : tensor) ok &= models::param_count(ModelKind::TensorFusion, z) == n;
    for (const auto& [z, n] : fm) ok &= models::param_count(ModelKind::FactorizationMachine, z) == n;
    report(1, "parameter-count goldens (24 table cells)", ok);
}

// ---- criterion 2 -----------------------------------------------------------

void criterion_2() {
    const ModelDims dims{/*n_features*/ 5, /*n_users*/ 4, 0};
    Matrix feats(6, 5);
    SeededRng data_rng(1000);
    feats.v = data_rng.sample_uniform(0.0, 1.0, 30);

    double worst = 0.0;
    for (ModelKind kind : {ModelKind::Linear, ModelKind::AdditiveMask,
                           ModelKind::MultiplicativeMask, ModelKind::TensorFusion,
                           ModelKind::FactorizationMachine}) {
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t z = std::vector<std::size_t>{1, 2, 4}[trial % 3];
            SeededRng rng(numerics::mix_seed(static_cast<std::uint64_t>(trial),
                                             static_cast<std::uint64_t>(kind)));
            // tanh keeps the loss smooth at the finite-difference scale; relu's
            // kink makes h=1e-5 differences ill-defined near zero activations
            Model m = models::init_model(kind, z, dims, rng, Activation::Tanh);
            if (!m.user_mean.empty()) m.user_mean.assign(dims.n_users, 3.0);
            const std::vector<Example> batch{
                {static_cast<std::size_t>(rng.next_u64() % 4),
                 static_cast<std::size_t>(rng.next_u64() % 6), 1.0 + rng.uniform(0.0, 4.0)}};
            const Vec analytic = models::gradients(m, feats, batch);
            const Vec numeric = test_support::finite_difference_gradient(m, feats, batch, 1e-5);
            for (std::size_t i = 0; i < analytic.size(); ++i) {
                const double scale =
                    std::max({std::fabs(analytic[i]), std::fabs(numeric[i]), 1e-8});
                worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / scale);
            }
        }
    }
    report(2, "gradient oracle, 100 instances per kind at z in {1,2,4}", worst < 1e-4,
           "max relative error " + fmt(worst));
}

// ---- criterion 3 -----------------------------------------------------------

void criterion_3() {
    bool ok = true;
    std::string detail;
    SeededRng rng(2026);

    // (a) additive mask == single layer over the concatenation
    {
        const std::size_t n = 8, users = 4, z = 3;
        const ModelDims dims{n, users, 0};
        Model m = models::init_model(ModelKind::AdditiveMask, z, dims, rng,
                                     Activation::Identity);
        const Vec x = rng.sample_uniform(-1.0, 1.0, n);
        for (std::size_t u = 0; u < users; ++u) {
            Matrix big(z, n + users);
            for (std::size_t i = 0; i < z; ++i) {
                for (std::size_t j = 0; j < n; ++j) big.at(i, j) = m.theta[i * n + j];
                for (std::size_t v = 0; v < users; ++v) {
                    big.at(i, n + v) = m.theta[z * n + z + v * z + i];
                }
            }
            Vec concat(x);
            for (std::size_t v = 0; v < users; ++v) concat.push_back(v == u ? 1.0 : 0.0);
            const Vec hidden = numerics::matvec(big, concat);
            double expected = m.theta[models::layout(m).size - 1];
            for (std::size_t i = 0; i < z; ++i) {
                expected += m.theta[z * n + z + users * z + i] * (hidden[i] + m.theta[z * n + i]);
            }
            if (std::fabs(models::forward(m, x, u) - expected) > 1e-12) {
                ok = false;
                detail = "concatenation equivalence violated";
            }
        }
    }

    // (b) + (c): FM_T identities at n <= 10
    for (int trial = 0; trial < 20 && ok; ++trial) {
        const std::size_t n = 2 + trial % 6, users = 3, z = 1 + trial % 4;
        const ModelDims dims{n, users, 0};
        const Model m = models::init_model(ModelKind::FactorizationMachine, z, dims, rng);
        const std::size_t nt = n + users;
        Matrix v(nt, z);
        for (std::size_t i = 0; i < nt; ++i) {
            for (std::size_t f = 0; f < z; ++f) v.at(i, f) = m.theta[1 + nt + i * z + f];
        }
        const std::size_t u = trial % users;
        const Vec x = rng.sample_uniform(-1.0, 1.0, n);
        Vec full(x);
        for (std::size_t k = 0; k < users; ++k) full.push_back(k == u ? 1.0 : 0.0);
        double linear = m.theta[0];
        for (std::size_t i = 0; i < nt; ++i) linear += m.theta[1 + i] * full[i];

        const double fm = models::forward(m, x, u);
        const double fmt = models::fm_t_forward(m, full);
        double diag = 0.0;
        for (std::size_t i = 0; i < nt; ++i) {
            double norm2 = 0.0;
            for (std::size_t f = 0; f < z; ++f) norm2 += v.at(i, f) * v.at(i, f);
            diag += full[i] * full[i] * norm2;
        }
        if (std::fabs((fmt - linear) - (2.0 * (fm - linear) + diag)) > 1e-10) {
            ok = false;
            detail = "fm_t / fm bridge identity violated";
        }
        // two evaluation paths for the full double sum
        const double pairwise_path = linear + test_support::brute_force_fm_full(v, full);
        if (std::fabs(fmt - pairwise_path) > 1e-10) {
            ok = false;
            detail = "double-sum evaluation paths disagree";
        }
    }

    // (d) tensor decomposition
    for (int trial = 0; trial < 20 && ok; ++trial) {
        const ModelDims dims{7, 5, 0};
        const Model m = models::init_model(ModelKind::TensorFusion, 1 + trial % 4, dims, rng);
        const Vec x = rng.sample_uniform(-1.0, 1.0, 7);
        const std::size_t u = trial % 5;
        const auto parts = models::tensor_forward_parts(m, x, u);
        if (std::fabs(parts.total() - models::forward(m, x, u)) > 1e-12) {
            ok = false;
            detail = "tensor decomposition not exact";
        }
    }

    report(3, "algebraic identities (concat, fm_t bridge, double-sum paths, tensor parts)", ok,
           detail);
}

// ---- criterion 4 -----------------------------------------------------------

bool criterion_4_synthetic() {
    SeededRng rng(404);
    bool ok = true;

    // brute-force agreement on <=10 users
    const std::size_t n_users = 9, dim = 3;
    Matrix emb(n_users, dim);
    emb.v = rng.sample_uniform(-1.0, 1.0, n_users * dim);
    std::vector<Vec> rows;
    for (std::size_t u = 0; u < n_users; ++u) rows.push_back(emb.row_vec(u));
    std::vector<std::tuple<std::size_t, std::size_t, double>> triples;
    std::vector<std::pair<std::size_t, std::size_t>> ui;
    Vec rvals;
    for (std::size_t u = 0; u < n_users; ++u) {
        for (std::size_t i = 0; i < 11; ++i) {
            if (rng.uniform(0.0, 1.0) < 0.6) {
                const double r = std::floor(rng.uniform(1.0, 6.0));
                triples.emplace_back(u, i, r);
                ui.emplace_back(u, i);
                rvals.push_back(r);
            }
        }
    }
    const auto groups = evaluation::group_ratings(ui, rvals, n_users);
    for (std::size_t t : {1, 2, 4}) {
        const auto oracle = test_support::brute_force_pdc(rows, triples, t);
        if (!oracle.ok) continue;
        evaluation::PdcConfig cfg;
        cfg.threshold = t;
        const auto got = evaluation::pdc(emb, groups, cfg);
        ok &= got.pair_count == oracle.pair_count;
        ok &= std::fabs(got.score - oracle.score) < 1e-12;
    }

    // isometry + scaling invariance
    evaluation::PdcConfig cfg;
    cfg.threshold = 1;
    const double base = evaluation::pdc(emb, groups, cfg).score;
    const double c = std::cos(1.1), s = std::sin(1.1);
    Matrix moved(n_users, dim);
    for (std::size_t u = 0; u < n_users; ++u) {
        moved.at(u, 0) = 3.0 * (c * emb.at(u, 0) - s * emb.at(u, 1)) + 5.0;
        moved.at(u, 1) = 3.0 * (s * emb.at(u, 0) + c * emb.at(u, 1)) - 2.0;
        moved.at(u, 2) = 3.0 * emb.at(u, 2) + 1.0;
    }
    ok &= std::fabs(evaluation::pdc(moved, groups, cfg).score - base) < 1e-12;

    // perfect distance preservation scores 1.0
    {
        Matrix line(4, 1);
        std::vector<std::pair<std::size_t, std::size_t>> pui;
        Vec pr;
        for (std::size_t u = 0; u < 4; ++u) {
            line.at(u, 0) = static_cast<double>(u);
            for (std::size_t i = 0; i < 3; ++i) {
                pui.emplace_back(u, i);
                pr.push_back(1.0 + static_cast<double>(u));
            }
        }
        evaluation::PdcConfig pcfg;
        pcfg.threshold = 1;
        pcfg.d_u = evaluation::UserDistance::MeanAbsoluteDifference;
        const auto perfect =
            evaluation::pdc(line, evaluation::group_ratings(pui, pr, 4), pcfg);
        ok &= std::fabs(perfect.score - 1.0) < 1e-12;
    }
    return ok;
}

// ---- criteria 8 & 9 (synthetic end-to-end) ---------------------------------

void criterion_8(const std::string& cache, const fs::path& scratch) {
    harness::ExperimentConfig cfg;
    cfg.cache_dir = cache;
    cfg.out_dir = (scratch / "det_run").string();
    cfg.kinds = {ModelKind::UserBias, ModelKind::Linear, ModelKind::TensorFusion,
                 ModelKind::FactorizationMachine};
    cfg.z_values = {2};
    cfg.folds = {1, 2};
    cfg.thresholds = {1, 2};
    cfg.hp.epochs = 6;
    cfg.hp.learning_rate = 0.03;
    cfg.hp.batch_size = 16;
    cfg.hp.activation = Activation::Tanh;
    cfg.seed = 7;

    harness::cmd_run(cfg);
    // collect everything except the timing column carrier (trace.csv)
    std::map<std::string, std::string> before;
    for (const auto& entry : fs::recursive_directory_iterator(cfg.out_dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename() == "trace.csv") continue;
        before[entry.path().string()] = slurp(entry.path());
    }
    harness::cmd_run(cfg);
    bool ok = !before.empty();
    std::string detail = std::to_string(before.size()) + " files compared";
    for (const auto& [path, bytes] : before) {
        if (slurp(path) != bytes) {
            ok = false;
            detail = "mismatch in " + fs::path(path).filename().string();
            break;
        }
    }
    report(8, "byte-identical reports across rerun (timing fields excluded)", ok, detail);
}

void criterion_9(const std::string& cache, const fs::path& scratch) {
    harness::ExperimentConfig cfg;
    cfg.cache_dir = cache;
    cfg.out_dir = (scratch / "analyze_run").string();
    cfg.kinds = {ModelKind::TensorFusion};
    cfg.z_values = {4};
    cfg.folds = {1};
    cfg.thresholds = {1};
    cfg.hp.epochs = 30;
    cfg.hp.learning_rate = 0.05;
    cfg.hp.batch_size = 16;
    cfg.hp.activation = Activation::Tanh;
    cfg.seed = 21;
    harness::cmd_run(cfg);

    const std::string model_path =
        (fs::path(cfg.out_dir) / "runs" / "tensor_4_fold1" / "model.txt").string();
    const auto res = harness::cmd_analyze(model_path, cache, 6, 3, 11,
                                          (scratch / "analysis").string());
    bool ok = res.profiles.size() == 3;
    std::string detail;
    for (const auto& p : res.profiles) {
        ok &= p.top_features.size() == 5 && p.bottom_features.size() == 5;
        ok &= p.top_movies.size() == 3 && p.bottom_movies.size() == 3;
        for (const auto& top : p.top_features) {
            for (const auto& bottom : p.bottom_features) {
                if (top.name == bottom.name) {
                    ok = false;
                    detail = "top/bottom tag sets overlap";
                }
            }
        }
    }

    // neutral-centroid property: centroid 0 ranks movies by the
    // user-independent score b + W.x alone
    const Model model = models::load_model_file(model_path);
    const dataio::DatasetBundle bundle = dataio::load_dataset(cache);
    const auto flat =
        harness::flatten_fold(bundle.folds.at(0), bundle.catalog, bundle.titles);
    const Vec zero(model.dims.z, 0.0);
    const auto profile = analysis::centroid_profile(model, zero, flat.features,
                                                    flat.tag_names, flat.titles);
    ok &= profile.bias == 0.0;
    for (const auto& f : profile.top_features) ok &= f.score == 0.0;
    // recompute the user-independent winner by hand
    double best = -1e300;
    std::string best_title;
    for (std::size_t i = 0; i < flat.features.rows; ++i) {
        const double score = models::tensor_score_with_embedding(
            model, flat.features.row_vec(i), zero);
        if (score > best + 1e-15 ||
            (std::fabs(score - best) <= 1e-15 && flat.titles[i] < best_title)) {
            best = score;
            best_title = flat.titles[i];
        }
    }
    ok &= !profile.top_movies.empty() && profile.top_movies.front().name == best_title;
    report(9, "analysis smoke: 3 profiles, 5+5 tags, 3+3 movies, neutral centroid", ok, detail);
}

// ---- data-dependent criteria (5, 6, 7, 4 fold-1 band) ----------------------

const harness::RunRow* find_row(const harness::ResultsTable& t, const std::string& kind,
                                std::size_t z) {
    for (const auto& r : t.rows) {
        if (r.kind == kind && r.z == z) return &r;
    }
    return nullptr;
}

training::HyperParams real_data_hp() {
    training::HyperParams hp;
    hp.optimizer = training::Optimizer::Adam;
    hp.learning_rate = 1e-3;
    hp.epochs = 15;
    hp.batch_size = 64;
    hp.activation = Activation::Relu;
    return hp;
}

void data_criteria(const DataDirs& data, const fs::path& scratch) {
    const std::string why = "MovieLens inputs not found; set FUSIONLAB_ML100K_DIR and "
                            "FUSIONLAB_ML20M_DIR to enable";
    if (!data.present) {
        std::cout << "NOTE criterion 4: fold-1 random-embedding band skipped (" << why << ")\n";
        report_skip(5, "baseline reproduction on the full data", why);
        report_skip(6, "fusion reproduction (mul z=8, add z=32)", why);
        report_skip(7, "qualitative grid trends (tensor/add PDC, FM overfitting)", why);
        return;
    }

    const std::string cache = (scratch / "real_cache").string();
    harness::cmd_prepare(data.ml100k, data.ml20m, cache);
    const dataio::DatasetBundle bundle = dataio::load_dataset(cache);

    // criterion 4, fold-1 band: random embeddings score ~0 at t=4
    {
        const auto& fold1 = bundle.folds.at(0);
        const auto groups = harness::test_ratings_by_user(fold1);
        bool ok = true;
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            SeededRng rng(seed);
            Matrix emb(fold1.n_users(), 8);
            emb.v = rng.sample_uniform(-1.0, 1.0, emb.rows * emb.cols);
            evaluation::PdcConfig cfg;
            cfg.threshold = 4;
            const double score = evaluation::pdc(emb, groups, cfg).score;
            worst = std::max(worst, std::fabs(score));
            ok &= std::fabs(score) < 0.05;
        }
        report(4, "PDC fold-1 band: 10 random-embedding seeds at t=4", ok,
               "max |score| " + fmt(worst));
    }

    // criterion 5: baselines over 5 folds
    {
        harness::ExperimentConfig cfg;
        cfg.cache_dir = cache;
        cfg.out_dir = (scratch / "baselines").string();
        cfg.kinds = {ModelKind::UserBias, ModelKind::Linear};
        cfg.hp = real_data_hp();
        cfg.seed = 1;
        const auto table = harness::cmd_run(cfg);
        const auto* ub = find_row(table, "user-bias", 0);
        const auto* lin = find_row(table, "linear", 0);
        bool ok = ub && lin && ub->ok && lin->ok;
        std::string detail;
        if (ok) {
            ok &= std::fabs(ub->mae_mean - 0.87) <= 0.02;
            ok &= std::fabs(ub->rmse_mean - 1.06) <= 0.02;
            ok &= std::fabs(lin->mae_mean - 0.76) <= 0.03;
            ok &= std::fabs(lin->rmse_mean - 0.95) <= 0.03;
            const std::map<std::size_t, double> fig4{{1, 0.12}, {2, 0.19}, {4, 0.29}, {8, 0.42}};
            for (const auto& [t, expected] : fig4) {
                ok &= lin->pdc_mean.count(t) && std::fabs(lin->pdc_mean.at(t) - expected) <= 0.05;
            }
            detail = "user-bias " + fmt(ub->mae_mean) + "/" + fmt(ub->rmse_mean) + ", linear " +
                     fmt(lin->mae_mean) + "/" + fmt(lin->rmse_mean);
        }
        report(5, "baseline reproduction on the full data", ok, detail);
    }

    // criterion 6: mul z=8 prediction, add z=32 embedding quality
    {
        harness::ExperimentConfig cfg;
        cfg.cache_dir = cache;
        cfg.out_dir = (scratch / "fusion_pair").string();
        cfg.kinds = {ModelKind::MultiplicativeMask, ModelKind::AdditiveMask};
        cfg.z_values = {8, 32};
        cfg.hp = real_data_hp();
        cfg.seed = 2;
        const auto table = harness::cmd_run(cfg);
        const auto* mul = find_row(table, "mul", 8);
        const auto* add = find_row(table, "add", 32);
        bool ok = mul && add && mul->ok && add->ok;
        std::string detail;
        if (ok) {
            ok &= mul->mae_mean <= 0.74 && mul->rmse_mean <= 0.94;
            ok &= add->pdc_mean.count(4) && add->pdc_mean.at(4) >= 0.30;
            detail = "mul " + fmt(mul->mae_mean) + "/" + fmt(mul->rmse_mean) + ", add pdc " +
                     fmt(add->pdc_mean.count(4) ? add->pdc_mean.at(4) : -9);
        }
        report(6, "fusion reproduction (mul z=8, add z=32)", ok, detail);
    }

    // criterion 7: grid trends
    {
        harness::ExperimentConfig cfg;
        cfg.cache_dir = cache;
        cfg.out_dir = (scratch / "grid").string();
        cfg.kinds = {ModelKind::TensorFusion, ModelKind::AdditiveMask,
                     ModelKind::FactorizationMachine};
        cfg.hp = real_data_hp();
        cfg.seed = 3;
        const auto table = harness::cmd_run(cfg);
        bool ok = true;
        std::string detail;
        const std::vector<std::size_t> zs{2, 4, 8, 16, 32, 64};
        // (a) tensor PDC(t=4) non-increasing up to one inversion <= 0.02
        int inversions = 0;
        double prev = 1e9;
        for (std::size_t z : zs) {
            const auto* row = find_row(table, "tensor", z);
            if (!row || !row->ok || !row->pdc_mean.count(4)) { ok = false; break; }
            const double v = row->pdc_mean.at(4);
            if (v > prev + 1e-12) {
                ++inversions;
                if (v - prev > 0.02) ok = false;
            }
            prev = v;
        }
        if (inversions > 1) ok = false;
        // (b) additive-mask PDC(t=4) range < 0.04
        double lo = 1e9, hi = -1e9;
        for (std::size_t z : zs) {
            const auto* row = find_row(table, "add", z);
            if (!row || !row->ok || !row->pdc_mean.count(4)) { ok = false; break; }
            lo = std::min(lo, row->pdc_mean.at(4));
            hi = std::max(hi, row->pdc_mean.at(4));
        }
        if (hi - lo >= 0.04) { ok = false; detail = "add pdc range " + fmt(hi - lo); }
        // (c) FM overfits: RMSE degrades by >= 0.08 from z=8 to z=64
        const auto* fm8 = find_row(table, "fm", 8);
        const auto* fm64 = find_row(table, "fm", 64);
        if (!fm8 || !fm64 || !fm8->ok || !fm64->ok ||
            fm64->rmse_mean - fm8->rmse_mean < 0.08) {
            ok = false;
        }
        report(7, "qualitative grid trends (tensor/add PDC, FM overfitting)", ok, detail);
    }
}

}  // namespace

int main() {
    const fs::path scratch = scratch_dir();

    criterion_1();
    criterion_2();
    criterion_3();

    const DataDirs data = locate_data();
    const bool pdc_core = criterion_4_synthetic();
    if (data.present) {
        report(4, "PDC oracle + invariances (core)", pdc_core);
    } else {
        report(4, "PDC oracle + invariances (core; fold-1 band reported separately)", pdc_core);
    }

    // synthetic inputs drive the pipeline-level criteria; enough tags that
    // top-5 and bottom-5 feature lists can be disjoint
    test_support::SyntheticSpec spec;
    spec.n_tags = 12;
    const auto paths =
        test_support::write_synthetic_movielens((scratch / "synth").string(), spec);
    const std::string synth_cache = (scratch / "synth_cache").string();
    harness::cmd_prepare(paths.ml100k, paths.ml20m, synth_cache);

    data_criteria(data, scratch);
    criterion_8(synth_cache, scratch);
    criterion_9(synth_cache, scratch);

    fs::remove_all(scratch);
    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all evaluated criteria passed\n";
    return 0;
}
