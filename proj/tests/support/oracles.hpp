#pragma once

// Independent reference computations used to freeze and cross-check results.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "krig/core.hpp"

namespace krig::testing {

struct OracleBin {
    std::size_t pairs = 0;
    double sq_sum = 0.0;
    double dist_sum = 0.0;
    double gamma() const { return sq_sum / (2.0 * static_cast<double>(pairs)); }
};

/// All ordered pairs i<j enumerated explicitly, binned by nearest multiple of the bin width.
inline std::map<long, OracleBin> brute_force_variogram(const std::vector<PixelSample>& s, double max_lag,
                                                       double bin_width) {
    std::map<long, OracleBin> bins;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (j <= i) {
                continue;
            }
            const double dr = s[i].position.row - s[j].position.row;
            const double dc = s[i].position.col - s[j].position.col;
            const double d = std::sqrt(dr * dr + dc * dc);
            if (d > max_lag) {
                continue;
            }
            const long bin = std::lround(std::floor(d / bin_width + 0.5));
            auto& b = bins[bin];
            ++b.pairs;
            b.sq_sum += (s[i].value - s[j].value) * (s[i].value - s[j].value);
            b.dist_sum += d;
        }
    }
    return bins;
}

inline double oracle_spherical(double h, double nugget, double sill, double range) {
    if (h == 0.0) {
        return 0.0;
    }
    if (h >= range) {
        return sill;
    }
    const double t = h / range;
    return nugget + (sill - nugget) * (1.5 * t - 0.5 * t * t * t);
}

/// Ordinary Kriging weights from a dense full-pivot solve in Eigen.
inline Eigen::VectorXd oracle_kriging_solution(const std::vector<Position>& pts, Position target, double nugget,
                                               double sill, double range) {
    const int n = static_cast<int>(pts.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::VectorXd b(n + 1);
    auto dist = [](Position p, Position q) { return std::hypot(p.row - q.row, p.col - q.col); };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = oracle_spherical(dist(pts[i], pts[j]), nugget, sill, range);
        }
        a(i, n) = 1.0;
        a(n, i) = 1.0;
        b(i) = oracle_spherical(dist(pts[i], target), nugget, sill, range);
    }
    b(n) = 1.0;
    return a.fullPivLu().solve(b);
}

}  // namespace krig::testing
