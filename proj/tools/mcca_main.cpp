#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mcca/errors.hpp"
#include "mcca/ingest.hpp"
#include "mcca/metrics.hpp"
#include "mcca/serialize.hpp"
#include "mcca/solver.hpp"
#include "mcca/svg.hpp"
#include "mcca/synth.hpp"

namespace fs = std::filesystem;
using namespace mcca;

namespace {

int log_level() {
    const char* env = std::getenv("MCCA_LOG");
    if (!env) return 1;
    const std::string v = env;
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << msg << '\n';
}

std::string real17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Per-mode comma lists joined with 'x', e.g. "1,2,4x1,2,4".
std::vector<std::vector<std::size_t>> parse_grid(const std::string& text) {
    std::vector<std::vector<std::size_t>> lists;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('x', pos);
        if (end == std::string::npos) end = text.size();
        std::vector<std::size_t> list;
        std::size_t p = pos;
        while (p < end) {
            std::size_t q = text.find(',', p);
            if (q == std::string::npos || q > end) q = end;
            const std::string piece = text.substr(p, q - p);
            if (piece.empty()) throw InvalidInput("bad grid: " + text);
            list.push_back(static_cast<std::size_t>(std::stoull(piece)));
            p = q + 1;
        }
        if (list.empty()) throw InvalidInput("bad grid: " + text);
        lists.push_back(std::move(list));
        if (end == text.size()) break;
        pos = end + 1;
    }
    return lists;
}

// Cartesian expansion in deterministic grid order (mode 1 fastest); with
// tie, modes 1 and 2 share one rank value.
std::vector<std::vector<std::size_t>> expand_grid(
    const std::vector<std::vector<std::size_t>>& lists, bool tie) {
    std::vector<std::vector<std::size_t>> points;
    if (tie && !lists.empty()) {
        std::vector<std::vector<std::size_t>> rest(
            lists.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(2, lists.size())),
            lists.end());
        for (std::size_t v : lists[0]) {
            auto tail = expand_grid(rest.empty()
                                        ? std::vector<std::vector<std::size_t>>{{1}}
                                        : rest,
                                    false);
            for (const auto& t : tail) {
                std::vector<std::size_t> point{v, v};
                if (!rest.empty()) point.insert(point.end(), t.begin(), t.end());
                points.push_back(std::move(point));
            }
        }
        return points;
    }
    std::vector<std::size_t> idx(lists.size(), 0);
    while (true) {
        std::vector<std::size_t> point(lists.size());
        for (std::size_t m = 0; m < lists.size(); ++m) point[m] = lists[m][idx[m]];
        points.push_back(std::move(point));
        std::size_t m = 0;
        for (; m < lists.size(); ++m) {
            if (++idx[m] < lists[m].size()) break;
            idx[m] = 0;
        }
        if (m == lists.size()) break;
    }
    return points;
}

void write_fit_report(const fs::path& path, const FitReport& report) {
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot write report: " + path.string());
    os << "iteration,objective";
    for (std::size_t k = 0; k < report.alpha.size(); ++k)
        os << ",alpha_" << k + 1 << ",lower_" << k + 1 << ",upper_" << k + 1;
    os << ",converged\n";
    for (std::size_t i = 0; i < report.objective.size(); ++i) {
        os << i << ',' << real17(report.objective[i]);
        for (std::size_t k = 0; k < report.alpha.size(); ++k)
            os << ',' << real17(report.alpha[k]) << ',' << real17(report.lower_bound[k]) << ','
               << real17(report.upper_bound[k]);
        os << ',' << (report.converged ? 1 : 0) << '\n';
    }
}

// Linear-method rank whose parameter count best matches a target CR.
std::size_t matched_linear_rank(double target_cr, std::size_t dim, std::size_t n) {
    const double raw = static_cast<double>(n) * static_cast<double>(dim);
    const double r = target_cr * raw / static_cast<double>(dim + n);
    const auto rounded = static_cast<long long>(std::llround(r));
    return static_cast<std::size_t>(std::clamp<long long>(rounded, 1,
                                                          static_cast<long long>(dim)));
}

int cmd_fit(const std::string& manifest_path, const std::string& method_name_arg,
            const std::string& ranks_arg, double tol, int max_iter, const std::string& out_dir) {
    const Method method = method_from_name(method_name_arg);
    const GroupedDataset data = assemble(read_manifest(manifest_path));
    const auto ranks = ranks_from_string(ranks_arg);
    fs::create_directories(out_dir);

    FitConfig cfg;
    cfg.ranks = ranks;
    cfg.tol = tol;
    cfg.max_iter = max_iter;

    StoredModel stored;
    switch (method) {
    case Method::Mcca: {
        auto [model, report] = fit(data, cfg);
        if (report.degenerate_spectrum)
            log_info("warning: tied eigenvalues at a rank boundary; subspace is not unique");
        stored = to_stored(model, data.shape());
        write_fit_report(fs::path(out_dir) / "report.csv", report);
        log_info("fit: " + std::to_string(report.iterations) + " iterations, objective " +
                 real17(report.objective.back()));
        break;
    }
    case Method::Cca: {
        if (ranks.size() != 1) throw InvalidInput("cca takes a single rank");
        auto [model, report] = cca_fit(data, ranks[0], cfg);
        stored = to_stored(model);
        write_fit_report(fs::path(out_dir) / "report.csv", report);
        break;
    }
    case Method::Pca: {
        if (ranks.size() != 1) throw InvalidInput("pca takes a single rank");
        stored = to_stored(pca_fit(data, ranks[0]));
        break;
    }
    case Method::Mpca: {
        stored = to_stored(mpca_fit(data, ranks, cfg));
        break;
    }
    }
    const fs::path model_path = fs::path(out_dir) / "model.mcca";
    write_model(model_path, stored);
    log_info("wrote " + model_path.string());
    return 0;
}

int cmd_alpha_scan(const std::string& manifest_path, const std::string& grid_arg, bool tie,
                   const std::string& out_dir, bool svg) {
    const GroupedDataset data = assemble(read_manifest(manifest_path));
    const ModeCovariances cov = mode_covariances(data);
    const auto points = expand_grid(parse_grid(grid_arg), tie);
    fs::create_directories(out_dir);

    std::ofstream os(fs::path(out_dir) / "alpha.csv");
    if (!os) throw InvalidInput("cannot write alpha.csv");
    os << "ranks,mode,alpha\n";
    std::vector<ChartSeries> series(cov.mode_count());
    for (std::size_t k = 0; k < cov.mode_count(); ++k)
        series[k].label = "alpha_" + std::to_string(k + 1);
    for (const auto& ranks : points) {
        const auto alpha = contraction_ratios(cov, ranks);
        for (std::size_t k = 0; k < alpha.size(); ++k) {
            os << ranks_to_string(ranks) << ',' << k + 1 << ',' << real17(alpha[k]) << '\n';
            series[k].points.emplace_back(static_cast<double>(ranks[k]), alpha[k]);
        }
    }
    if (svg)
        write_line_chart(fs::path(out_dir) / "alpha.svg", "Contraction ratio vs rank",
                         "rank R_k", "alpha", series);
    return 0;
}

int cmd_rer_curve(const std::string& manifest_path, const std::string& methods_arg,
                  const std::string& grid_arg, bool tie, double tol, int max_iter,
                  const std::string& out_dir, bool svg) {
    std::vector<Method> methods;
    {
        std::size_t pos = 0;
        while (pos <= methods_arg.size()) {
            std::size_t end = methods_arg.find(',', pos);
            if (end == std::string::npos) end = methods_arg.size();
            const std::string name = methods_arg.substr(pos, end - pos);
            if (!name.empty()) methods.push_back(method_from_name(name));
            if (end == methods_arg.size()) break;
            pos = end + 1;
        }
    }
    if (methods.empty()) throw InvalidInput("empty method list");

    const GroupedDataset data = assemble(read_manifest(manifest_path));
    const auto& shape = data.shape();
    const std::size_t n = data.total_samples();
    const std::size_t dim = shape_product(shape);
    const auto points = expand_grid(parse_grid(grid_arg), tie);
    fs::create_directories(out_dir);

    FitConfig cfg;
    cfg.tol = tol;
    cfg.max_iter = max_iter;

    std::vector<CompressionRecord> records;
    for (const Method method : methods) {
        for (const auto& ranks : points) {
            CompressionRecord rec;
            rec.method = method;
            // Vector methods run at the rank whose CR matches this grid
            // point's multilinear CR, so curves are comparable per point.
            const double target_cr = cr(Method::Mcca, shape, ranks, n);
            switch (method) {
            case Method::Mcca: {
                cfg.ranks = ranks;
                auto [model, report] = fit(data, cfg);
                rec.ranks = ranks;
                rec.rer = rer(data, model);
                break;
            }
            case Method::Mpca: {
                cfg.ranks = ranks;
                rec.ranks = ranks;
                rec.rer = rer(data, mpca_fit(data, ranks, cfg));
                break;
            }
            case Method::Pca: {
                const std::size_t r = matched_linear_rank(target_cr, dim, n);
                rec.ranks = {r};
                rec.rer = rer(data, pca_fit(data, r));
                break;
            }
            case Method::Cca: {
                const std::size_t r = matched_linear_rank(target_cr, dim, n);
                rec.ranks = {r};
                auto [model, report] = cca_fit(data, r, cfg);
                rec.rer = rer(data, model);
                break;
            }
            }
            rec.params = param_count(method, shape, rec.ranks, n);
            rec.cr = cr(method, shape, rec.ranks, n);
            records.push_back(std::move(rec));
            log_info(method_name(method) + " ranks " + ranks_to_string(records.back().ranks) +
                     ": cr " + real17(records.back().cr) + " rer " +
                     real17(records.back().rer));
        }
    }
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        if (a.method != b.method) return a.method < b.method;
        return a.cr < b.cr;
    });
    std::ofstream os(fs::path(out_dir) / "rer.csv");
    if (!os) throw InvalidInput("cannot write rer.csv");
    write_records_csv(os, records);

    if (svg) {
        std::vector<ChartSeries> series;
        for (const Method method : methods) {
            ChartSeries s;
            s.label = method_name(method);
            for (const auto& rec : records)
                if (rec.method == method) s.points.emplace_back(rec.cr, rec.rer);
            series.push_back(std::move(s));
        }
        write_line_chart(fs::path(out_dir) / "rer.svg", "Reconstruction error rate vs CR",
                         "CR", "RER", series);
    }
    return 0;
}

int cmd_synth(const std::string& out_dir, const std::string& shape_arg,
              const std::string& ranks_arg, std::size_t groups, std::size_t samples,
              double noise, double decay, std::uint64_t seed) {
    SynthSpec spec;
    spec.shape = ranks_from_string(shape_arg);
    spec.ranks = ranks_from_string(ranks_arg);
    spec.groups = groups;
    spec.samples_per_group = samples;
    spec.noise = noise;
    spec.decay = decay;
    spec.seed = seed;

    const SynthResult result = synth_dataset(spec);
    fs::create_directories(out_dir);

    DatasetManifest manifest;
    manifest.root = out_dir;
    for (std::size_t g = 0; g < result.data.group_count(); ++g) {
        char gname[16];
        std::snprintf(gname, sizeof(gname), "g%02zu", g);
        const fs::path gdir = fs::path(out_dir) / gname;
        fs::create_directories(gdir);
        DatasetManifest::Group mg;
        mg.label = gname;
        for (std::size_t i = 0; i < result.data.groups[g].size(); ++i) {
            char fname[32];
            std::snprintf(fname, sizeof(fname), "sample_%03zu.mctn", i);
            write_tensor(gdir / fname, result.data.groups[g][i]);
            mg.patterns.push_back(std::string(gname) + "/" + fname);
        }
        manifest.groups.push_back(std::move(mg));
    }
    write_manifest(fs::path(out_dir) / "manifest.json", manifest);
    log_info("wrote synthetic dataset to " + out_dir);
    return 0;
}

int cmd_info(const std::string& manifest_path, const std::string& model_path) {
    if (!manifest_path.empty()) {
        const GroupedDataset data = assemble(read_manifest(manifest_path));
        std::cout << "groups: " << data.group_count() << '\n';
        std::cout << "shape: " << ranks_to_string(data.shape()) << '\n';
        for (std::size_t g = 0; g < data.group_count(); ++g)
            std::cout << "group " << g << ": " << data.groups[g].size() << " samples\n";
    }
    if (!model_path.empty()) {
        const StoredModel model = read_model(model_path);
        std::cout << "method: " << method_name(model.tag) << '\n';
        std::cout << "shape: " << ranks_to_string(model.shape) << '\n';
        std::cout << "ranks: " << ranks_to_string(model.ranks) << '\n';
        std::cout << "groups: " << model.latent.size() << '\n';
        std::cout << "basis elements: " << model.basis_element_count() << '\n';
    }
    if (manifest_path.empty() && model_path.empty())
        throw InvalidInput("info: pass --manifest and/or --model");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilinear common component analysis toolkit"};
    app.require_subcommand(1);

    std::string manifest, method = "mcca", ranks, grid, methods = "mcca", out = ".";
    std::string model_path, shape;
    double tol = 1e-8, noise = 0.05, decay = 0.7;
    int max_iter = 100;
    std::size_t groups = 2, samples = 20;
    std::uint64_t seed = 0;
    bool svg = false, tie = false;

    auto* fit_cmd = app.add_subcommand("fit", "Fit one method and write model + report");
    fit_cmd->add_option("--manifest", manifest)->required();
    fit_cmd->add_option("--method", method);
    fit_cmd->add_option("--ranks", ranks)->required();
    fit_cmd->add_option("--tol", tol);
    fit_cmd->add_option("--max-iter", max_iter);
    fit_cmd->add_option("--out", out);

    auto* alpha_cmd = app.add_subcommand("alpha-scan", "Contraction ratios over a rank grid");
    alpha_cmd->add_option("--manifest", manifest)->required();
    alpha_cmd->add_option("--grid", grid)->required();
    alpha_cmd->add_flag("--tie", tie);
    alpha_cmd->add_option("--out", out);
    alpha_cmd->add_flag("--svg", svg);

    auto* rer_cmd = app.add_subcommand("rer-curve", "RER vs CR curves per method");
    rer_cmd->add_option("--manifest", manifest)->required();
    rer_cmd->add_option("--methods", methods);
    rer_cmd->add_option("--grid", grid)->required();
    rer_cmd->add_flag("--tie", tie);
    rer_cmd->add_option("--tol", tol);
    rer_cmd->add_option("--max-iter", max_iter);
    rer_cmd->add_option("--out", out);
    rer_cmd->add_flag("--svg", svg);

    auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic dataset");
    synth_cmd->add_option("--out", out)->required();
    synth_cmd->add_option("--shape", shape)->required();
    synth_cmd->add_option("--ranks", ranks)->required();
    synth_cmd->add_option("--groups", groups);
    synth_cmd->add_option("--samples", samples);
    synth_cmd->add_option("--noise", noise);
    synth_cmd->add_option("--decay", decay);
    synth_cmd->add_option("--seed", seed);

    auto* info_cmd = app.add_subcommand("info", "Describe a manifest or model file");
    info_cmd->add_option("--manifest", manifest);
    info_cmd->add_option("--model", model_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(manifest, method, ranks, tol, max_iter, out);
        if (alpha_cmd->parsed()) return cmd_alpha_scan(manifest, grid, tie, out, svg);
        if (rer_cmd->parsed())
            return cmd_rer_curve(manifest, methods, grid, tie, tol, max_iter, out, svg);
        if (synth_cmd->parsed())
            return cmd_synth(out, shape, ranks, groups, samples, noise, decay, seed);
        if (info_cmd->parsed()) return cmd_info(manifest, model_path);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
