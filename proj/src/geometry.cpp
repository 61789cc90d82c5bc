#include "psm/geometry.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace psm {

ShellGeometry::ShellGeometry(double r1_, double r2_) : r1(r1_), r2(r2_) {
    if (!(r1 > 0.0) || !(r2 > r1) || !std::isfinite(r1) || !std::isfinite(r2)) {
        throw std::invalid_argument("ShellGeometry requires 0 < r1 < r2");
    }
}

void RunConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (!(c_qr >= 1.0)) throw std::invalid_argument("c_qr must be >= 1");
    if (c_override && *c_override < 0) {
        throw std::invalid_argument("c_override must be nonnegative");
    }
}

PointSet load_points(const std::string& path, const std::string& label) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open point file: " + path);
    PointSet ps(label.empty() ? path : label);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        Point3 p;
        if (!(ls >> p.x >> p.y >> p.z)) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected three numeric fields");
        }
        if (!p.finite()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": non-finite coordinate");
        }
        ps.points.push_back(p);
    }
    return ps;
}

void save_points(const std::string& path, const PointSet& ps,
                 const std::string& header_comment) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write point file: " + path);
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    char buf[96];
    for (const Point3& p : ps.points) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x, p.y, p.z);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace psm
