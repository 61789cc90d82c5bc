#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psm/geometry.hpp"
#include "psm/rng.hpp"

namespace psm {

enum class DesignSource { file, generated };

// Equal-weight quadrature point set on the unit sphere with certified
// polynomial exactness degree t: (1/N) sum_j Y_l^m(p_j) vanishes for all
// 1 <= l <= t within the recorded tolerance.
struct DesignSet {
    PointSet points;
    int degree = 0;
    DesignSource source = DesignSource::file;
    double residual = 0.0;        // worst quadrature defect over certified degrees
    double validation_tol = 0.0;  // tolerance the certification used
};

struct DesignDefect {
    int l;
    int m;
    double defect;
};

struct ValidationReport {
    bool pass = false;
    double residual = 0.0;  // max |defect|
    int first_fail_l = -1;
    int first_fail_m = 0;
    std::vector<DesignDefect> defects;  // all (l,m) up to the checked degree
};

inline constexpr double kLoadedDesignTol = 1e-10;
inline constexpr double kGeneratedDesignTol = 1e-8;

// Heuristic point count for exactness degree 2c.
inline int design_size_heuristic(int c) { return 2 * c * c + 2 * c + 2; }

// Checks the first-moment defects (1/N) sum_j Y_l^m(p_j) for 1 <= l <= t.
// Failure is reported, not thrown.
ValidationReport validate_design(const PointSet& points, int t, double tol);

// Reads a design file (point-set text format; optional "# t=<d> N=<n>" header),
// normalizes points to the unit sphere (error if off by more than 1e-8), and
// certifies at least expected_degree.
DesignSet load_design(const std::string& path, int expected_degree,
                      double tol = kLoadedDesignTol);

void save_design(const std::string& path, const DesignSet& d);

// Produces a degree-t design with n_points points by minimizing the summed
// squared quadrature defects, starting from a seeded spiral layout. Descent
// plus a Gauss-Newton polish; throws if the result does not certify at the
// generated-design tolerance within max_iters total iterations.
DesignSet generate_design(int t, std::size_t n_points, Rng& rng,
                          std::size_t max_iters = 5000);

// Radial scaling onto the proxy sphere; exactness is scale invariant.
PointSet scale_to_surface(const DesignSet& d, double r2);

// Directory of bundled design files. Picks the smallest point set whose
// certified degree suffices; certification happens on load and is cached.
class DesignLibrary {
public:
    // dir empty: use PSM_DESIGN_DIR from the environment, else the bundled
    // data directory configured at build time.
    explicit DesignLibrary(std::string dir = "");

    const std::string& dir() const { return dir_; }

    // Smallest-N design with degree >= t; throws if none is available.
    DesignSet design_for_degree(int t) const;

    struct Entry {
        std::string path;
        int t;
        int n;
    };
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::string dir_;
    std::vector<Entry> entries_;
};

}  // namespace psm
