// Acceptance suite: one pass/fail line per criterion, exit 0 only when all
// hard criteria hold.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "mcca/baselines.hpp"
#include "mcca/covariance.hpp"
#include "mcca/ingest.hpp"
#include "mcca/metrics.hpp"
#include "mcca/serialize.hpp"
#include "mcca/solver.hpp"
#include "mcca/synth.hpp"
#include "test_util.hpp"

using namespace mcca;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail = "") {
    std::printf("%s %2d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++failures;
}

struct RandomInstance {
    std::vector<std::size_t> shape;
    std::vector<std::size_t> ranks;
    ModeCovariances cov;
};

RandomInstance random_instance(std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t g = 1 + static_cast<std::size_t>(rng.uniform() * 3.0);
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 3.0);
    RandomInstance inst;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t p = 2 + static_cast<std::size_t>(rng.uniform() * 7.0);
        inst.shape.push_back(p);
        inst.ranks.push_back(1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(p)));
    }
    inst.cov.shape = inst.shape;
    inst.cov.covs.resize(g);
    for (auto& per_group : inst.cov.covs)
        for (std::size_t k = 0; k < m; ++k)
            per_group.push_back(test_util::random_psd(rng, inst.shape[k]));
    return inst;
}

DenseMatrix orthonormal_columns(Rng& rng, std::size_t dim, std::size_t cols) {
    const auto eig = sym_eig(test_util::random_psd(rng, dim));
    DenseMatrix out(dim, cols);
    std::copy(eig.vectors.data.begin(), eig.vectors.data.begin() + dim * cols,
              out.data.begin());
    return out;
}

std::size_t matched_linear_rank(double target_cr, std::size_t dim, std::size_t n) {
    const double raw = static_cast<double>(n) * static_cast<double>(dim);
    const double r = target_cr * raw / static_cast<double>(dim + n);
    const auto rounded = static_cast<long long>(std::llround(r));
    return static_cast<std::size_t>(
        std::clamp<long long>(rounded, 1, static_cast<long long>(dim)));
}

// Criteria 1-3 share the 100-instance random suite.
void criteria_1_2_3() {
    bool monotone = true, upper = true, alpha_range = true, alpha_full = true;
    std::size_t lower_hits = 0, lower_total = 0;
    std::string why1, why2, why3;
    const auto t0 = std::chrono::steady_clock::now();

    for (std::uint64_t i = 0; i < 100; ++i) {
        const RandomInstance inst = random_instance(1000 + i);
        FitConfig cfg;
        cfg.ranks = inst.ranks;
        const auto [model, rep] = fit(inst.cov, cfg);

        for (std::size_t s = 1; s < rep.objective.size(); ++s)
            if (rep.objective[s] <
                rep.objective[s - 1] - 1e-10 * std::fabs(rep.objective[s - 1])) {
                monotone = false;
                why1 = "instance " + std::to_string(i);
            }
        const double final_obj = rep.objective.back();
        for (std::size_t k = 0; k < inst.shape.size(); ++k) {
            if (final_obj > rep.upper_bound[k] * (1.0 + 1e-8)) {
                upper = false;
                why2 = "instance " + std::to_string(i) + " mode " + std::to_string(k + 1);
            }
            ++lower_total;
            if (final_obj >= rep.lower_bound[k] * (1.0 - 1e-10)) ++lower_hits;
            const double a = rep.alpha[k];
            if (!(a >= 0.0 && a <= 1.0)) {
                alpha_range = false;
                why3 = "alpha out of range, instance " + std::to_string(i);
            }
            if (inst.ranks[k] == inst.shape[k] && std::fabs(a - 1.0) > 1e-12) {
                alpha_full = false;
                why3 = "alpha != 1 at full rank, instance " + std::to_string(i);
            }
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.1f s over 100 instances", secs);
    report(1, monotone && secs < 30.0,
           "objective trace non-decreasing (1e-10 relative slack)",
           monotone ? buf : why1);
    std::snprintf(buf, sizeof(buf), "lower-bound fraction %zu/%zu (reported, not gated)",
                  lower_hits, lower_total);
    report(2, upper, "final objective within the per-mode upper bound (1e-8 relative)",
           upper ? buf : why2);
    report(3, alpha_range && alpha_full,
           "contraction ratio in [0,1], equal to 1 at full rank (1e-12)", why3);
}

void criterion_4() {
    Rng rng(41);
    bool ok = true;
    std::string why;

    // explicit Kronecker oracle on small shapes
    const std::vector<std::vector<std::size_t>> shapes{{8, 8}, {4, 4, 4}, {2, 3, 4}, {6}};
    for (const auto& shape : shapes) {
        ModeCovariances cov;
        cov.shape = shape;
        cov.covs.resize(2);
        for (auto& per_group : cov.covs)
            for (std::size_t p : shape) per_group.push_back(test_util::random_psd(rng, p));

        MccaModel model;
        model.latent.assign(cov.group_count(),
                            std::vector<SymmetricMatrix>(cov.mode_count()));
        std::vector<std::size_t> ranks;
        for (std::size_t p : shape) ranks.push_back(std::max<std::size_t>(1, p / 2));
        model.ranks = ranks;
        for (std::size_t k = 0; k < shape.size(); ++k)
            model.basis.push_back(orthonormal_columns(rng, shape[k], ranks[k]));
        for (std::size_t g = 0; g < cov.group_count(); ++g)
            for (std::size_t k = 0; k < shape.size(); ++k) {
                const DenseMatrix t = matmul(
                    matmul(model.basis[k].transposed(), cov.covs[g][k].as_matrix()),
                    model.basis[k]);
                model.latent[g][k] = SymmetricMatrix::symmetrize(t);
            }

        const double got = objective_total(model, cov);
        double want = 0.0;
        for (std::size_t g = 0; g < cov.group_count(); ++g) {
            DenseMatrix vstar = model.basis[0];
            for (std::size_t k = 1; k < shape.size(); ++k)
                vstar = kronecker(vstar, model.basis[k]);
            const DenseMatrix sv = matmul(full_covariance(cov, g).as_matrix(), vstar);
            const DenseMatrix t = matmul(vstar.transposed(), sv);
            want += test_util::matrix_trace(matmul(t, t));
        }
        if (std::fabs(got - want) > 1e-8 * std::fabs(want)) {
            ok = false;
            why = "objective mismatch on a " + ranks_to_string(shape) + " shape";
        }
    }

    // Kronecker algebra identities
    for (int trial = 0; trial < 50 && ok; ++trial) {
        const DenseMatrix a = test_util::random_matrix(rng, 4, 4);
        const DenseMatrix b = test_util::random_matrix(rng, 3, 3);
        const double tr = test_util::matrix_trace(kronecker(a, b));
        if (std::fabs(tr - test_util::matrix_trace(a) * test_util::matrix_trace(b)) > 1e-10) {
            ok = false;
            why = "trace multiplicativity";
        }
        const DenseMatrix c = test_util::random_matrix(rng, 4, 2);
        const DenseMatrix d = test_util::random_matrix(rng, 3, 2);
        const DenseMatrix lhs = matmul(kronecker(a, b), kronecker(c, d));
        const DenseMatrix rhs = kronecker(matmul(a, c), matmul(b, d));
        if (test_util::max_abs_diff(lhs.data, rhs.data) > 1e-10) {
            ok = false;
            why = "mixed-product identity";
        }
    }
    report(4, ok, "objective matches the explicit Kronecker trace; Kronecker identities hold",
           why);
}

void criterion_5() {
    Rng rng(53);
    bool ok = true;
    std::string why;
    for (int trial = 0; trial < 20; ++trial) {
        // distinct eigenvalues by construction: V diag(6,5,...,1) V^T
        const DenseMatrix v = orthonormal_columns(rng, 6, 6);
        DenseMatrix scaled = v;
        for (std::size_t j = 0; j < 6; ++j)
            for (std::size_t i = 0; i < 6; ++i)
                scaled(i, j) *= static_cast<double>(6 - j) + 0.3 * rng.uniform();
        const SymmetricMatrix s =
            SymmetricMatrix::symmetrize(matmul(scaled, v.transposed()));

        ModeCovariances cov;
        cov.shape = {6};
        cov.covs = {{s}};
        FitConfig cfg;
        cfg.ranks = {3};
        const auto [model, rep] = fit(cov, cfg);

        const auto eig = sym_eig(s);
        DenseMatrix top(6, 3);
        std::copy(eig.vectors.data.begin(), eig.vectors.data.begin() + 18, top.data.begin());
        const double angle = principal_angles(model.basis[0], top).back();
        if (angle >= 1e-8) {
            ok = false;
            why = "trial " + std::to_string(trial) + ", max angle " + std::to_string(angle);
        }
    }
    report(5, ok, "G=1, M=1 fit recovers the top eigenspace (angle < 1e-8, 20 trials)", why);
}

void criterion_6() {
    Rng rng(59);
    GroupedDataset data;
    data.groups.resize(2);
    for (auto& g : data.groups)
        for (int i = 0; i < 6; ++i) g.push_back(test_util::random_tensor(rng, {4, 3}));

    FitConfig cfg;
    cfg.ranks = {4, 3};
    const auto [mcca_model, rep] = fit(data, cfg);
    const MpcaModel mpca_model = mpca_fit(data, {4, 3}, cfg);
    const LinearModel pca_model = pca_fit(data, 12);
    const auto [cca_model, crep] = cca_fit(data, 12, cfg);

    const double e_mcca = rer(data, mcca_model);
    const double e_mpca = rer(data, mpca_model);
    const double e_pca = rer(data, pca_model);
    const double e_cca = rer(data, cca_model);
    const bool ok = e_mcca < 1e-10 && e_mpca < 1e-10 && e_pca < 1e-10 && e_cca < 1e-10;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "rer mcca %.2e mpca %.2e pca %.2e cca %.2e", e_mcca,
                  e_mpca, e_pca, e_cca);
    report(6, ok, "full-rank models are lossless for every method (RER < 1e-10)", buf);
}

void criterion_7() {
    const std::vector<std::size_t> shape{28, 28};
    const std::vector<std::size_t> ranks{8, 8};
    bool ok = param_count(Method::Mcca, shape, ranks, 100) == 6848;
    std::string why = ok ? "" : "param_count != 6848";

    SynthSpec spec;
    spec.shape = shape;
    spec.ranks = ranks;
    spec.groups = 2;
    spec.samples_per_group = 50;
    spec.seed = 77;
    const SynthResult synth = synth_dataset(spec);
    FitConfig cfg;
    cfg.ranks = ranks;
    const auto [model, rep] = fit(synth.data, cfg);

    const fs::path file =
        fs::temp_directory_path() /
        ("mcca-acc7-" + std::to_string(static_cast<unsigned long>(::getpid())) + ".mcca");
    write_model(file, to_stored(model, shape));
    const StoredModel stored = read_model(file);
    fs::remove(file);

    const std::size_t n = synth.data.total_samples();
    std::size_t core = n;
    for (std::size_t r : stored.ranks) core *= r;
    const std::size_t census = stored.basis_element_count() + core;
    if (census != param_count(Method::Mcca, shape, ranks, n)) {
        ok = false;
        why = "census mismatch";
    }
    const double want_cr =
        static_cast<double>(census) / (static_cast<double>(n) * 784.0);
    if (std::fabs(cr(Method::Mcca, shape, ranks, n) - want_cr) > 1e-15) {
        ok = false;
        why = "cr mismatch";
    }
    report(7, ok, "param_count((28,28),(8,8),N=100) = 6848; CR matches the stored census",
           why);
}

void criterion_8() {
    SynthSpec spec;
    spec.shape = {20, 20};
    spec.ranks = {6, 6};
    spec.groups = 5;
    spec.samples_per_group = 12;
    spec.noise = 0.05;
    spec.seed = 88;
    const SynthResult synth = synth_dataset(spec);
    const ModeCovariances cov = mode_covariances(synth.data);

    const std::vector<std::size_t> grid{2, 5, 8, 11, 14, 17, 20};
    std::vector<std::vector<double>> a1(grid.size(), std::vector<double>(grid.size()));
    std::vector<std::vector<double>> a2 = a1;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const auto alpha = contraction_ratios(cov, {grid[i], grid[j]});
            a1[i][j] = alpha[0]; // indexed [own rank][other rank] below
            a2[j][i] = alpha[1];
        }

    bool ok = true;
    std::string why;
    double max_spread = 0.0;
    for (const auto* table : {&a1, &a2}) {
        const auto& a = *table;
        for (std::size_t other = 0; other < grid.size(); ++other) {
            for (std::size_t own = 1; own < grid.size(); ++own)
                if (a[own][other] < a[own - 1][other] - 1e-12) {
                    ok = false;
                    why = "not monotone in own rank";
                }
            if (std::fabs(a[grid.size() - 1][other] - 1.0) > 1e-12) {
                ok = false;
                why = "not 1 at full rank";
            }
        }
        for (std::size_t own = 0; own < grid.size(); ++own) {
            const auto [lo, hi] = std::minmax_element(a[own].begin(), a[own].end());
            max_spread = std::max(max_spread, *hi - *lo);
        }
    }
    if (max_spread >= 0.05) {
        ok = false;
        why = "cross-mode spread " + std::to_string(max_spread);
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max cross-mode spread %.4f", max_spread);
    report(8, ok,
           "alpha monotone in its own rank, 1 at full rank, < 0.05 spread across the other mode",
           ok ? buf : why);
}

void criterion_9() {
    const auto t0 = std::chrono::steady_clock::now();
    SynthSpec spec;
    spec.shape = {12, 10};
    spec.ranks = {6, 5};
    spec.groups = 4;
    spec.samples_per_group = 20;
    spec.noise = 0.02;
    spec.decay = 0.5;
    spec.seed = 99;
    const SynthResult synth = synth_dataset(spec);
    const GroupedDataset& data = synth.data;
    const std::size_t n = data.total_samples();
    const std::size_t dim = shape_product(data.shape());

    bool ok = true;
    std::string why;
    FitConfig cfg;
    for (std::size_t r = 1; r <= 6; ++r) {
        const std::vector<std::size_t> ranks{r, r};
        cfg.ranks = ranks;
        const auto [mcca_model, rep] = fit(data, cfg);
        const double e_mcca = rer(data, mcca_model);
        const double e_mpca = rer(data, mpca_fit(data, ranks, cfg));

        const double target_cr = cr(Method::Mcca, data.shape(), ranks, n);
        const std::size_t lin_rank = matched_linear_rank(target_cr, dim, n);
        const auto [cca_model, crep] = cca_fit(data, lin_rank, cfg);
        const double e_cca = rer(data, cca_model);

        if (e_mcca > e_mpca + 0.01) {
            ok = false;
            why = "ranks " + ranks_to_string(ranks) + ": mcca " + std::to_string(e_mcca) +
                  " vs mpca " + std::to_string(e_mpca);
        }
        if (e_mcca > e_cca + 0.01) {
            ok = false;
            why = "ranks " + ranks_to_string(ranks) + ": mcca " + std::to_string(e_mcca) +
                  " vs cca " + std::to_string(e_cca);
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 120.0) {
        ok = false;
        why = "runtime " + std::to_string(secs) + " s";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "6-point tied grid, %.1f s", secs);
    report(9, ok, "MCCA RER within 0.01 of MPCA and CCA at every matched CR point",
           ok ? buf : why);
}

void criterion_10() {
    Rng rng(101);
    FitConfig cfg;
    cfg.ranks = {5, 5};

    auto covariances_for = [&](std::size_t n_per_group) {
        GroupedDataset data;
        data.groups.resize(2);
        for (auto& g : data.groups)
            for (std::size_t i = 0; i < n_per_group; ++i)
                g.push_back(test_util::random_tensor(rng, {10, 10}));
        return mode_covariances(data);
    };
    const ModeCovariances small = covariances_for(20);
    const ModeCovariances large = covariances_for(200);

    // time a fixed number of update sweeps on the precomputed covariances
    auto sweep_time = [&](const ModeCovariances& cov) {
        MccaModel model;
        model.ranks = cfg.ranks;
        for (std::size_t k = 0; k < 2; ++k)
            model.basis.push_back(init_basis(cov, k, cfg.ranks).v0);
        model.latent.assign(cov.group_count(), std::vector<SymmetricMatrix>(2));
        for (std::size_t g = 0; g < cov.group_count(); ++g)
            for (std::size_t k = 0; k < 2; ++k)
                model.latent[g][k] = SymmetricMatrix::symmetrize(
                    matmul(matmul(model.basis[k].transposed(), cov.covs[g][k].as_matrix()),
                           model.basis[k]));
        double best = 1e300;
        for (int rep_i = 0; rep_i < 3; ++rep_i) {
            MccaModel work = model;
            const auto t0 = std::chrono::steady_clock::now();
            for (int sweep = 0; sweep < 30; ++sweep)
                for (std::size_t k = 0; k < 2; ++k) update_step(work, cov, k);
            best = std::min(
                best,
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        return best;
    };
    const double t_small = sweep_time(small);
    const double t_large = sweep_time(large);
    const double ratio = t_large / t_small;
    const bool ok = ratio < 2.0 && ratio > 0.5;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "10x samples -> %.2fx per-iteration time (informational)",
                  ratio);
    report(10, ok, "per-iteration cost independent of sample count", buf);
}

void criterion_11() {
    bool ok = true;
    std::string why;
    const fs::path dir =
        fs::temp_directory_path() /
        ("mcca-acc11-" + std::to_string(static_cast<unsigned long>(::getpid())));
    fs::create_directories(dir);

    // IDX fixture: 1 image, 2x2, values 1..4 row-major
    {
        const unsigned char bytes[] = {0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2,
                                       0, 0, 0, 2, 1, 2,  3, 4};
        std::ofstream os(dir / "img-ubyte", std::ios::binary);
        os.write(reinterpret_cast<const char*>(bytes), sizeof(bytes));
        os.close();
        const auto samples = load_idx(dir / "img-ubyte");
        if (samples.size() != 1 || samples[0].at({0, 1}) != 2.0 ||
            samples[0].at({1, 0}) != 3.0) {
            ok = false;
            why = "IDX fixture";
        }
    }
    // PGM fixture
    {
        std::ofstream os(dir / "img.pgm", std::ios::binary);
        os << "P5\n2 2\n255\n";
        const unsigned char raster[] = {5, 6, 7, 8};
        os.write(reinterpret_cast<const char*>(raster), sizeof(raster));
        os.close();
        const DenseTensor t = load_pnm(dir / "img.pgm");
        if (t.at({0, 0}) != 5.0 || t.at({1, 1}) != 8.0) {
            ok = false;
            why = "PGM fixture";
        }
    }
    // MCTN1 and model containers
    {
        Rng rng(111);
        const DenseTensor t = test_util::random_tensor(rng, {3, 2, 2});
        write_tensor(dir / "t.mctn", t);
        if (read_tensor(dir / "t.mctn") != t) {
            ok = false;
            why = "tensor container";
        }

        StoredModel m;
        m.tag = Method::Mcca;
        m.shape = {3, 2};
        m.ranks = {2, 1};
        m.basis = {test_util::random_matrix(rng, 3, 2), test_util::random_matrix(rng, 2, 1)};
        m.latent = {{test_util::random_psd(rng, 2), test_util::random_psd(rng, 1)}};
        write_model(dir / "m.mcca", m);
        if (read_model(dir / "m.mcca") != m) {
            ok = false;
            why = "model container";
        }
    }
    // records CSV
    {
        const std::vector<CompressionRecord> records{
            {Method::Mcca, {2, 2}, 100, 0.125, 0.03125},
            {Method::Cca, {5}, 250, 1.0 / 3.0, 0.9999999999999999}};
        std::stringstream ss;
        write_records_csv(ss, records);
        if (read_records_csv(ss) != records) {
            ok = false;
            why = "records csv";
        }
    }
    fs::remove_all(dir);
    report(11, ok, "IDX/PNM fixtures load exactly; containers and CSV round-trip", why);
}

} // namespace

int main() {
    criteria_1_2_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures ? 1 : 0;
}
