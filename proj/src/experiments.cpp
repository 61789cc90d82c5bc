#include "psm/experiments.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "psm/kernel.hpp"
#include "psm/rng.hpp"

namespace psm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

DirLock::DirLock(const std::string& dir) {
    fs::create_directories(dir);
    path_ = (fs::path(dir) / ".lock").string();
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        throw std::runtime_error("output directory '" + dir +
                                 "' is locked by another run (stale .lock?)");
    }
    ::close(fd);
}

DirLock::~DirLock() {
    if (!path_.empty()) ::unlink(path_.c_str());
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];  // lower median
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);  // LF endings as written
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_manifest(const std::string& out_dir, json j, double duration_s) {
    j["version"] = kToolVersion;
    j["duration_s"] = duration_s;
    write_text((fs::path(out_dir) / "manifest.json").string(), j.dump(2) + "\n");
}

struct ReferenceRun {
    ProxyID pid;
    json design_meta;
};

ReferenceRun build_reference(const ReferenceConfig& rc, std::uint64_t seed) {
    Rng rng(seed);
    const PointSet x0 = sample_ball(rc.n_x0, rc.r1, rng);
    RunConfig cfg{ShellGeometry(rc.r1, rc.r2), rc.epsilon, rc.c_qr, seed, rc.c};
    const int c = rc.c ? *rc.c
                       : decide_c(cfg.geometry, rc.epsilon, rc.c_qr, x0.size());
    DesignSet design = rc.design_path.empty()
                           ? DesignLibrary(rc.design_dir).design_for_degree(2 * c)
                           : load_design(rc.design_path, 2 * c);
    ReferenceRun run{build_proxy_id(x0, cfg, design, rc.threads), json{}};
    run.design_meta = {{"path", rc.design_path.empty() ? "library" : rc.design_path},
                       {"degree", design.degree},
                       {"n", design.points.size()}};
    return run;
}

json config_json(const ReferenceConfig& rc) {
    json j{{"r1", rc.r1},         {"r2", rc.r2},   {"epsilon", rc.epsilon},
           {"c_qr", rc.c_qr},     {"n_x0", rc.n_x0}, {"threads", rc.threads}};
    if (rc.c) j["c"] = *rc.c;
    return j;
}

}  // namespace

CompressResult run_compress(const CompressOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    DirLock lock(opts.out_dir);

    const PointSet x0 = load_points(opts.x0_path, "x0");
    RunConfig cfg{ShellGeometry(opts.r1, opts.r2), opts.epsilon, opts.c_qr,
                  opts.seed, opts.c};
    const int c = opts.c ? *opts.c
                         : decide_c(cfg.geometry, opts.epsilon, opts.c_qr,
                                    x0.size());
    DesignSet design =
        opts.design_path.empty()
            ? DesignLibrary(opts.design_dir).design_for_degree(2 * c)
            : load_design(opts.design_path, 2 * c);
    const ProxyID pid = build_proxy_id(x0, cfg, design, opts.threads);

    // skeleton indices, one per line
    {
        std::ostringstream ss;
        for (int idx : pid.skeleton) ss << idx << "\n";
        write_text((fs::path(opts.out_dir) / "skeleton.txt").string(), ss.str());
    }
    // projection matrix U as CSV
    {
        std::ostringstream ss;
        ss << "row_index";
        for (std::size_t j = 0; j < pid.rank(); ++j) ss << ",u" << j;
        ss << "\n";
        for (std::size_t i = 0; i < pid.x0.size(); ++i) {
            ss << i;
            for (std::size_t j = 0; j < pid.rank(); ++j) {
                ss << "," << format_sci(pid.projection(i, j));
            }
            ss << "\n";
        }
        write_text((fs::path(opts.out_dir) / "projection.csv").string(), ss.str());
    }

    CompressResult res;
    res.c = pid.c;
    res.n_yp = pid.yp.size();
    res.n_rep = pid.rank();
    res.max_yp_residual = *std::max_element(pid.yp_row_residuals.begin(),
                                            pid.yp_row_residuals.end());

    const double dt = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    json manifest{{"experiment", "compress"},
                  {"seed", opts.seed},
                  {"config",
                   {{"x0", opts.x0_path},
                    {"r1", opts.r1},
                    {"r2", opts.r2},
                    {"epsilon", opts.epsilon},
                    {"c_qr", opts.c_qr},
                    {"threads", opts.threads}}},
                  {"design",
                   {{"path", opts.design_path.empty() ? "library" : opts.design_path},
                    {"degree", pid.design.degree},
                    {"n", pid.yp.size()}}},
                  {"c", pid.c},
                  {"outputs", {"skeleton.txt", "projection.csv"}}};
    write_manifest(opts.out_dir, manifest, dt);

    std::cout << "c=" << res.c << " n_yp=" << res.n_yp << " n_rep=" << res.n_rep
              << " max_yp_residual=" << format_sci(res.max_yp_residual) << "\n";
    return res;
}

RowBoundsResult run_fig_rowbounds(const RowBoundsOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    DirLock lock(opts.out_dir);

    ReferenceRun ref = build_reference(opts.ref, opts.seed);
    const ProxyID& pid = ref.pid;
    const std::vector<double> row_max =
        max_error_on_gamma_all(pid, opts.gamma_samples, opts.ref.threads);

    struct Row {
        std::size_t row_index;
        double max_err, bound, ratio;
    };
    std::vector<Row> rows;
    RowBoundsResult res;
    std::vector<double> ratios;
    for (std::size_t i = 0; i < pid.x0.size(); ++i) {
        if (pid.is_skeleton_row(i)) continue;
        const double bound = pointwise_error_bound(row_bound_inputs(pid, i));
        const double ratio = bound / row_max[i];
        rows.push_back({i, row_max[i], bound, ratio});
        ratios.push_back(ratio);
        if (row_max[i] > bound) ++res.violations;
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.bound < b.bound || (a.bound == b.bound && a.row_index < b.row_index);
    });
    res.n_rows = rows.size();
    res.min_ratio = *std::min_element(ratios.begin(), ratios.end());
    res.max_ratio = *std::max_element(ratios.begin(), ratios.end());
    res.median_ratio = median_of(ratios);

    std::ostringstream ss;
    ss << "sorted_index,row_index,max_ei_gamma,bound_prop,ratio\n";
    for (std::size_t s = 0; s < rows.size(); ++s) {
        ss << s << "," << rows[s].row_index << "," << format_sci(rows[s].max_err)
           << "," << format_sci(rows[s].bound) << "," << format_sci(rows[s].ratio)
           << "\n";
    }
    ss << "# ratio_min=" << format_sci(res.min_ratio)
       << " ratio_median=" << format_sci(res.median_ratio)
       << " ratio_max=" << format_sci(res.max_ratio) << "\n";
    write_text((fs::path(opts.out_dir) / "rowbounds.csv").string(), ss.str());

    const double dt = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    json manifest{{"experiment", "fig-rowbounds"},
                  {"seed", opts.seed},
                  {"config", config_json(opts.ref)},
                  {"design", ref.design_meta},
                  {"samples", {{"gamma_samples", opts.gamma_samples}}},
                  {"outputs", {"rowbounds.csv"}}};
    write_manifest(opts.out_dir, manifest, dt);

    std::cout << "rows=" << res.n_rows << " violations=" << res.violations
              << " ratio_min=" << format_sci(res.min_ratio)
              << " ratio_median=" << format_sci(res.median_ratio) << "\n";
    return res;
}

std::vector<SweepRow> run_fig_sweep(const SweepOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    DirLock lock(opts.out_dir);

    std::vector<int> grid = opts.c_grid;
    if (grid.empty()) {
        for (int c = 5; c <= 40; ++c) grid.push_back(c);
    }
    Rng rng(opts.seed);
    const PointSet x0 = sample_ball(opts.ref.n_x0, opts.ref.r1, rng);
    const ShellGeometry geom(opts.ref.r1, opts.ref.r2);
    const DesignLibrary library(opts.ref.design_dir);

    std::vector<SweepRow> rows;
    for (int c : grid) {
        SweepRow row;
        row.c = c;
        try {
            const DesignSet design = library.design_for_degree(2 * c);
            RunConfig cfg{geom, opts.ref.epsilon, opts.ref.c_qr, opts.seed, c};
            const ProxyID pid = build_proxy_id(x0, cfg, design, opts.ref.threads);
            row.n_yp = pid.yp.size();
            const auto row_max =
                max_error_on_gamma_all(pid, opts.gamma_samples, opts.ref.threads);
            row.max_err = *std::max_element(row_max.begin(), row_max.end());
            row.bound_global = global_error_bound(pid, opts.ref.epsilon);
        } catch (const std::exception& e) {
            row.skipped = true;
            row.reason = e.what();
        }
        std::cout << "c=" << row.c
                  << (row.skipped
                          ? " skipped"
                          : " n_yp=" + std::to_string(row.n_yp) +
                                " max_err=" + format_sci(row.max_err))
                  << "\n";
        rows.push_back(std::move(row));
    }

    std::ostringstream ss;
    ss << "c,n_yp,max_err,bound_global,status\n";
    for (const SweepRow& r : rows) {
        if (r.skipped) {
            ss << r.c << ",,,,skipped: " << r.reason << "\n";
        } else {
            ss << r.c << "," << r.n_yp << "," << format_sci(r.max_err) << ","
               << format_sci(r.bound_global) << ",ok\n";
        }
    }
    write_text((fs::path(opts.out_dir) / "sweep.csv").string(), ss.str());

    const double dt = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    json manifest{{"experiment", "fig-sweep"},
                  {"seed", opts.seed},
                  {"config", config_json(opts.ref)},
                  {"grid", grid},
                  {"samples", {{"gamma_samples", opts.gamma_samples}}},
                  {"outputs", {"sweep.csv"}}};
    write_manifest(opts.out_dir, manifest, dt);
    return rows;
}

std::vector<Y0ShellResult> run_fig_y0(const Y0Options& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    DirLock lock(opts.out_dir);

    ReferenceRun ref = build_reference(opts.ref, opts.seed);
    const ProxyID& pid = ref.pid;
    Rng rng(opts.seed + 1);  // separate stream from the X0 draw inside build

    std::vector<Y0ShellResult> results;
    std::vector<std::string> outputs;
    for (double outer : opts.outer_radii) {
        const PointSet y0 = sample_shell(opts.n_y0, opts.ref.r2, outer, rng);
        const ErrorReport rep = rowwise_error_stats(pid, y0, opts.ref.threads);

        struct Row {
            std::size_t row_index;
            double avg, mx, bound;
        };
        std::vector<Row> rows;
        Y0ShellResult res;
        res.outer = outer;
        std::vector<double> max_over_avg;
        const double simp = simplified_error_bound(pid.c, pid.epsilon);
        for (std::size_t i = 0; i < pid.x0.size(); ++i) {
            if (rep.skeleton_row[i]) continue;
            rows.push_back({i, rep.l2_scaled[i], rep.max_abs[i],
                            rep.bound_rowwise[i]});
            if (rep.l2_scaled[i] > rep.bound_rowwise[i]) ++res.violations_rowwise;
            if (rep.l2_scaled[i] > simp) ++res.violations_simplified;
            if (rep.l2_scaled[i] > 0.0) {
                max_over_avg.push_back(rep.max_abs[i] / rep.l2_scaled[i]);
            }
        }
        res.median_max_over_avg = median_of(max_over_avg);
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            return a.bound < b.bound ||
                   (a.bound == b.bound && a.row_index < b.row_index);
        });

        char name[64];
        std::snprintf(name, sizeof(name), "y0_shell_%g_%g.csv", opts.ref.r2,
                      outer);
        std::ostringstream ss;
        ss << "sorted_index,row_index,avg_entry_err,max_entry_err,bound_rowwise\n";
        for (std::size_t s = 0; s < rows.size(); ++s) {
            ss << s << "," << rows[s].row_index << "," << format_sci(rows[s].avg)
               << "," << format_sci(rows[s].mx) << ","
               << format_sci(rows[s].bound) << "\n";
        }
        write_text((fs::path(opts.out_dir) / name).string(), ss.str());
        outputs.push_back(name);
        results.push_back(res);
        std::cout << "shell(" << opts.ref.r2 << "," << outer
                  << "): violations=" << res.violations_rowwise
                  << " median_max_over_avg="
                  << format_sci(res.median_max_over_avg) << "\n";
    }

    const double dt = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    json manifest{{"experiment", "fig-y0"},
                  {"seed", opts.seed},
                  {"config", config_json(opts.ref)},
                  {"design", ref.design_meta},
                  {"samples",
                   {{"n_y0", opts.n_y0}, {"outer_radii", opts.outer_radii}}},
                  {"outputs", outputs}};
    write_manifest(opts.out_dir, manifest, dt);
    return results;
}

std::vector<TableRow> table_presets() {
    return {
        {1, 2, 1e-6, 30, 1862},   {1, 2, 1e-4, 23, 1106},
        {1, 2, 1e-8, 38, 2965},   {1, 4, 1e-6, 12, 314},
        {1, 6, 1e-6, 9, 181},     {10, 20, 1e-6, 27, 1514},
        {100, 200, 1e-6, 23, 1106},
    };
}

std::vector<TableResult> run_table(const TableOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    DirLock lock(opts.out_dir);

    std::vector<TableRow> rows = opts.rows.empty() ? table_presets() : opts.rows;
    std::vector<TableResult> results;
    std::ostringstream ss;
    ss << "r1,r2,ratio,eps,c_computed,n_yp_heuristic,c_paper,delta\n";
    for (const TableRow& row : rows) {
        TableResult r;
        r.row = row;
        const ShellGeometry geom(row.r1, row.r2);
        r.c_computed = decide_c(geom, row.epsilon, opts.c_qr, opts.n_x0);
        r.n_yp_heuristic = design_size_heuristic(r.c_computed);
        if (row.c_paper) r.delta = r.c_computed - *row.c_paper;
        ss << format_sci(row.r1) << "," << format_sci(row.r2) << ","
           << format_sci(row.r1 / row.r2) << "," << format_sci(row.epsilon)
           << "," << r.c_computed << "," << r.n_yp_heuristic << ",";
        if (row.c_paper) {
            ss << *row.c_paper << "," << *r.delta << "\n";
        } else {
            ss << ",\n";
        }
        results.push_back(r);
    }
    write_text((fs::path(opts.out_dir) / "table.csv").string(), ss.str());

    const double dt = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    json manifest{{"experiment", "table"},
                  {"config", {{"n_x0", opts.n_x0}, {"c_qr", opts.c_qr}}},
                  {"rows", rows.size()},
                  {"outputs", {"table.csv"}}};
    write_manifest(opts.out_dir, manifest, dt);
    return results;
}

ValidationReport run_design_validate(const DesignValidateOptions& opts) {
    const PointSet pts = load_points(opts.file, "design");
    const ValidationReport rep = validate_design(pts, opts.degree, opts.tol);
    if (!opts.out_dir.empty()) {
        DirLock lock(opts.out_dir);
        std::ostringstream ss;
        ss << "l,m,defect\n";
        for (const auto& d : rep.defects) {
            ss << d.l << "," << d.m << "," << format_sci(d.defect) << "\n";
        }
        write_text((fs::path(opts.out_dir) / "design_report.csv").string(),
                   ss.str());
        json manifest{{"experiment", "design-validate"},
                      {"config",
                       {{"file", opts.file},
                        {"degree", opts.degree},
                        {"tol", opts.tol}}},
                      {"pass", rep.pass},
                      {"residual", rep.residual},
                      {"outputs", {"design_report.csv"}}};
        write_manifest(opts.out_dir, manifest, 0.0);
    }
    return rep;
}

DesignSet run_design_generate(const DesignGenerateOptions& opts) {
    Rng rng(opts.seed);
    DesignSet d = generate_design(opts.degree, opts.n_points, rng, opts.max_iters);
    if (!opts.out_file.empty()) {
        if (const fs::path dir = fs::path(opts.out_file).parent_path();
            !dir.empty()) {
            fs::create_directories(dir);
        }
        save_design(opts.out_file, d);
    }
    return d;
}

}  // namespace psm
