#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace psm {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double norm2() const { return x * x + y * y + z * z; }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline Point3 operator-(const Point3& a, const Point3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Point3 operator+(const Point3& a, const Point3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Point3 operator*(double s, const Point3& p) {
    return {s * p.x, s * p.y, s * p.z};
}
inline double dot(const Point3& a, const Point3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

// Ordered point collection; index identity defines kernel matrix rows/columns.
struct PointSet {
    std::vector<Point3> points;
    std::string label;

    PointSet() = default;
    explicit PointSet(std::string lbl) : label(std::move(lbl)) {}
    PointSet(std::vector<Point3> pts, std::string lbl)
        : points(std::move(pts)), label(std::move(lbl)) {}

    std::size_t size() const { return points.size(); }
    const Point3& operator[](std::size_t i) const { return points[i]; }
    Point3& operator[](std::size_t i) { return points[i]; }
};

// Concentric configuration: sources in B(0,r1), targets outside B(0,r2),
// proxy sphere Gamma = boundary of B(0,r2).
struct ShellGeometry {
    double r1;
    double r2;

    ShellGeometry(double r1_, double r2_);
    double ratio() const { return r1 / r2; }
    double gap() const { return r2 - r1; }
};

struct RunConfig {
    ShellGeometry geometry;
    double epsilon;                  // per-point ID precision scale
    double c_qr = 2.0;               // projection entry bound
    std::uint64_t seed = 0;
    std::optional<int> c_override;   // bypass the expansion-order rule

    void validate() const;
};

// Plain text point-set format: three whitespace-separated fields per line,
// '#' comment lines ignored.
PointSet load_points(const std::string& path, const std::string& label = "");
void save_points(const std::string& path, const PointSet& ps,
                 const std::string& header_comment = "");

}  // namespace psm
