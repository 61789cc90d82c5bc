#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psm/design.hpp"
#include "psm/proxy.hpp"

namespace psm {

inline constexpr const char* kToolVersion = "0.1.0";

// Fixed default seeds, one per experiment, so shipped reference numbers are
// stable. Documented in the CLI help.
inline constexpr std::uint64_t kSeedCompress = 7100;
inline constexpr std::uint64_t kSeedRowBounds = 7101;
inline constexpr std::uint64_t kSeedSweep = 7102;
inline constexpr std::uint64_t kSeedY0 = 7103;

// Values are written as "%.16e" (17 significant digits) so reruns are
// byte-identical and doubles round-trip.
std::string format_sci(double v);

// Exclusive .lock file in the output directory, removed on destruction.
class DirLock {
public:
    explicit DirLock(const std::string& dir);
    ~DirLock();
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    std::string path_;
};

struct ReferenceConfig {
    double r1 = 1.0;
    double r2 = 2.0;
    double epsilon = 1e-6;
    double c_qr = 2.0;
    std::size_t n_x0 = 2000;
    std::optional<int> c = 30;       // the reference runs pin c
    std::string design_path;         // empty: use the design library
    std::string design_dir;          // empty: env var / bundled directory
    int threads = 1;
};

struct CompressOptions {
    std::string x0_path;
    double r1 = 1.0;
    double r2 = 2.0;
    double epsilon = 1e-6;
    double c_qr = 2.0;
    std::uint64_t seed = kSeedCompress;
    std::optional<int> c;
    std::string design_path;
    std::string design_dir;
    std::string out_dir;
    int threads = 1;
};

struct CompressResult {
    int c = 0;
    std::size_t n_yp = 0;
    std::size_t n_rep = 0;
    double max_yp_residual = 0.0;
};

CompressResult run_compress(const CompressOptions& opts);

struct RowBoundsOptions {
    ReferenceConfig ref;
    std::uint64_t seed = kSeedRowBounds;
    std::size_t gamma_samples = 20000;
    std::string out_dir;
};

struct RowBoundsResult {
    std::size_t n_rows = 0;       // non-skeleton rows reported
    std::size_t violations = 0;   // rows with measured max > bound
    double min_ratio = 0.0;
    double median_ratio = 0.0;
    double max_ratio = 0.0;
};

RowBoundsResult run_fig_rowbounds(const RowBoundsOptions& opts);

struct SweepOptions {
    ReferenceConfig ref;           // ref.c is ignored; grid below drives c
    std::uint64_t seed = kSeedSweep;
    std::vector<int> c_grid;       // empty: 5..40
    std::size_t gamma_samples = 20000;
    std::string out_dir;
};

struct SweepRow {
    int c = 0;
    std::size_t n_yp = 0;
    double max_err = 0.0;
    double bound_global = 0.0;
    bool skipped = false;
    std::string reason;
};

std::vector<SweepRow> run_fig_sweep(const SweepOptions& opts);

struct Y0Options {
    ReferenceConfig ref;
    std::uint64_t seed = kSeedY0;
    std::size_t n_y0 = 20000;
    std::vector<double> outer_radii = {4.0, 8.0};
    std::string out_dir;
};

struct Y0ShellResult {
    double outer = 0.0;
    std::size_t violations_rowwise = 0;   // l2_scaled > rowwise bound
    std::size_t violations_simplified = 0;  // l2_scaled > (2c+3) eps
    double median_max_over_avg = 0.0;
};

std::vector<Y0ShellResult> run_fig_y0(const Y0Options& opts);

struct TableRow {
    double r1, r2, epsilon;
    std::optional<int> c_paper;
    std::optional<int> n_yp_paper;
};

struct TableOptions {
    std::vector<TableRow> rows;  // empty: built-in presets
    std::size_t n_x0 = 2000;
    double c_qr = 2.0;
    std::string out_dir;
};

struct TableResult {
    TableRow row;
    int c_computed = 0;
    int n_yp_heuristic = 0;
    std::optional<int> delta;
};

// Built-in preset rows (published parameter study; reference c and |Yp|).
std::vector<TableRow> table_presets();

std::vector<TableResult> run_table(const TableOptions& opts);

struct DesignValidateOptions {
    std::string file;
    int degree = 0;
    double tol = kLoadedDesignTol;
    std::string out_dir;  // optional; report CSV written here when set
};

ValidationReport run_design_validate(const DesignValidateOptions& opts);

struct DesignGenerateOptions {
    int degree = 0;
    std::size_t n_points = 0;
    std::uint64_t seed = 1;
    std::size_t max_iters = 5000;
    std::string out_file;
};

DesignSet run_design_generate(const DesignGenerateOptions& opts);

}  // namespace psm
