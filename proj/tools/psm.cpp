// Command-line harness for proxy-surface interpolative decompositions of the
// 3D Laplace kernel: compression runs, bound/error experiments with CSV
// output, and spherical design management.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "psm/experiments.hpp"

namespace {

void add_reference_flags(CLI::App* cmd, psm::ReferenceConfig& ref) {
    cmd->add_option("--r1", ref.r1, "source ball radius");
    cmd->add_option("--r2", ref.r2, "proxy sphere radius");
    cmd->add_option("--eps", ref.epsilon, "per-point ID precision scale");
    cmd->add_option("--cqr", ref.c_qr, "projection entry bound");
    cmd->add_option("--nx0", ref.n_x0, "number of source points to sample");
    cmd->add_option("--design", ref.design_path, "design file (overrides library)");
    cmd->add_option("--design-dir", ref.design_dir,
                    "design library directory (default: PSM_DESIGN_DIR or bundled)");
    cmd->add_option("--threads", ref.threads, "row-parallel worker count");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "psm: interpolative decomposition of 3D Laplace kernel matrices via a "
        "proxy surface, with computable error bounds.\n"
        "Default experiment seeds: compress 7100, fig-rowbounds 7101, "
        "fig-sweep 7102, fig-y0 7103.\n"
        "Bundled designs: PSM_DESIGN_DIR overrides the built-in directory."};
    app.require_subcommand(1);

    // compress
    psm::CompressOptions comp;
    int comp_c = -1;
    auto* c_comp = app.add_subcommand("compress", "row ID of K(X0, far field)");
    c_comp->add_option("--x0", comp.x0_path, "source point file")->required();
    c_comp->add_option("--r1", comp.r1)->required();
    c_comp->add_option("--r2", comp.r2)->required();
    c_comp->add_option("--eps", comp.epsilon)->required();
    c_comp->add_option("--cqr", comp.c_qr);
    c_comp->add_option("--seed", comp.seed);
    c_comp->add_option("--c", comp_c, "override the expansion order rule");
    c_comp->add_option("--design", comp.design_path);
    c_comp->add_option("--design-dir", comp.design_dir);
    c_comp->add_option("--out", comp.out_dir)->required();
    c_comp->add_option("--threads", comp.threads);

    // fig-rowbounds
    psm::RowBoundsOptions rb;
    auto* c_rb = app.add_subcommand(
        "fig-rowbounds", "per-row far-field max error vs pointwise bound");
    add_reference_flags(c_rb, rb.ref);
    int rb_c = 30;
    c_rb->add_option("--c", rb_c, "expansion order (reference default 30)");
    c_rb->add_option("--seed", rb.seed);
    c_rb->add_option("--gamma-samples", rb.gamma_samples);
    c_rb->add_option("--out", rb.out_dir)->required();

    // fig-sweep
    psm::SweepOptions sw;
    int sw_cmin = 5, sw_cmax = 40;
    std::vector<int> sw_list;
    auto* c_sw = app.add_subcommand("fig-sweep",
                                    "max error and global bound over a c grid");
    add_reference_flags(c_sw, sw.ref);
    c_sw->add_option("--cmin", sw_cmin);
    c_sw->add_option("--cmax", sw_cmax);
    c_sw->add_option("--clist", sw_list, "explicit c values (overrides cmin/cmax)");
    c_sw->add_option("--seed", sw.seed);
    c_sw->add_option("--gamma-samples", sw.gamma_samples);
    c_sw->add_option("--out", sw.out_dir)->required();

    // fig-y0
    psm::Y0Options y0;
    auto* c_y0 = app.add_subcommand(
        "fig-y0", "row error statistics over sampled far-field subdomains");
    add_reference_flags(c_y0, y0.ref);
    int y0_c = 30;
    c_y0->add_option("--c", y0_c, "expansion order (reference default 30)");
    c_y0->add_option("--seed", y0.seed);
    c_y0->add_option("--ny0", y0.n_y0);
    c_y0->add_option("--outer", y0.outer_radii, "outer radii of the Y0 shells");
    c_y0->add_option("--out", y0.out_dir)->required();

    // table
    psm::TableOptions tab;
    std::string tab_rows_file;
    auto* c_tab = app.add_subcommand(
        "table", "expansion order rule over the preset parameter rows");
    c_tab->add_option("--rows", tab_rows_file,
                      "CSV of r1,r2,eps rows (default: built-in presets)");
    c_tab->add_option("--nx0", tab.n_x0);
    c_tab->add_option("--cqr", tab.c_qr);
    c_tab->add_option("--out", tab.out_dir)->required();

    // design validate | generate
    auto* c_des = app.add_subcommand("design", "spherical design utilities");
    c_des->require_subcommand(1);
    psm::DesignValidateOptions dv;
    auto* c_dv = c_des->add_subcommand("validate", "certify exactness degree");
    c_dv->add_option("--file", dv.file)->required();
    c_dv->add_option("--degree", dv.degree)->required();
    c_dv->add_option("--tol", dv.tol);
    c_dv->add_option("--out", dv.out_dir, "directory for the defect report CSV");
    psm::DesignGenerateOptions dg;
    auto* c_dg = c_des->add_subcommand("generate", "optimize a new design");
    c_dg->add_option("--degree", dg.degree)->required();
    c_dg->add_option("--n", dg.n_points)->required();
    c_dg->add_option("--seed", dg.seed);
    c_dg->add_option("--iters", dg.max_iters);
    c_dg->add_option("--out", dg.out_file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*c_comp) {
            if (c_comp->count("--c")) comp.c = comp_c;
            run_compress(comp);
        } else if (*c_rb) {
            rb.ref.c = rb_c;
            run_fig_rowbounds(rb);
        } else if (*c_sw) {
            if (sw_list.empty()) {
                for (int c = sw_cmin; c <= sw_cmax; ++c) sw.c_grid.push_back(c);
            } else {
                sw.c_grid = sw_list;
            }
            run_fig_sweep(sw);
        } else if (*c_y0) {
            y0.ref.c = y0_c;
            run_fig_y0(y0);
        } else if (*c_tab) {
            if (!tab_rows_file.empty()) {
                std::ifstream in(tab_rows_file);
                if (!in) throw std::runtime_error("cannot open " + tab_rows_file);
                std::string line;
                while (std::getline(in, line)) {
                    for (char& ch : line) {
                        if (ch == ',') ch = ' ';
                    }
                    std::istringstream ls(line);
                    double r1, r2, eps;
                    if (ls >> r1 >> r2 >> eps) {
                        tab.rows.push_back({r1, r2, eps, std::nullopt, std::nullopt});
                    }
                }
            }
            run_table(tab);
        } else if (*c_dv) {
            const psm::ValidationReport rep = run_design_validate(dv);
            if (rep.pass) {
                std::cout << "pass degree=" << dv.degree
                          << " residual=" << psm::format_sci(rep.residual) << "\n";
            } else {
                std::cout << "fail first (l,m)=(" << rep.first_fail_l << ","
                          << rep.first_fail_m
                          << ") residual=" << psm::format_sci(rep.residual)
                          << "\n";
                return 1;
            }
        } else if (*c_dg) {
            const psm::DesignSet d = run_design_generate(dg);
            std::cout << "generated t=" << d.degree << " n=" << d.points.size()
                      << " residual=" << psm::format_sci(d.residual) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
