#pragma once

// Ordinary Kriging for a single target: system assembly, weight solve, prediction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "krig/core.hpp"
#include "krig/variogram.hpp"

namespace krig {

/// Bordered variogram system
///   [ G  1 ] [w ]   [g0]
///   [ 1' 0 ] [mu] = [ 1]
/// with G(i,j) = gamma(|p_i - p_j|) and g0(i) = gamma(|p_i - target|).
struct KrigingSystem {
    std::vector<PixelSample> points;
    Position target;
    VariogramModel model;
    std::vector<double> matrix;  // (n+1) x (n+1), row-major
    std::vector<double> rhs;     // n+1

    std::size_t size() const { return points.size() + 1; }
    double operator()(std::size_t i, std::size_t j) const { return matrix[i * size() + j]; }
};

struct KrigingWeights {
    std::vector<double> weights;
    double lagrange = 0.0;
    std::vector<double> target_gamma;  // gamma(|p_i - target|), used for the variance
    bool degraded = false;             // inverse-distance fallback was used
};

struct Prediction {
    double value = 0.0;
    double variance = 0.0;
};

struct KrigingSolution {
    KrigingWeights weights;
    Prediction prediction;
};

inline KrigingSystem assemble_system(std::span<const PixelSample> points, Position target,
                                     const VariogramModel& model) {
    if (points.empty()) {
        throw std::invalid_argument("assemble_system: no known points");
    }
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (points[i].position == points[j].position) {
                throw std::invalid_argument("assemble_system: duplicate point positions");
            }
        }
    }

    KrigingSystem sys;
    sys.points.assign(points.begin(), points.end());
    sys.target = target;
    sys.model = model;
    const std::size_t m = n + 1;
    sys.matrix.assign(m * m, 0.0);
    sys.rhs.assign(m, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double g = model_gamma(model, std::sqrt(squared_distance(points[i].position, points[j].position)));
            sys.matrix[i * m + j] = g;
            sys.matrix[j * m + i] = g;
        }
        sys.matrix[i * m + n] = 1.0;
        sys.matrix[n * m + i] = 1.0;
        sys.rhs[i] = model_gamma(model, std::sqrt(squared_distance(points[i].position, target)));
    }
    return sys;
}

namespace detail {

/// In-place LU with partial pivoting on a dense row-major m x m matrix.
/// Returns false if a pivot falls below `min_pivot` in magnitude.
class DenseLu {
public:
    DenseLu(std::vector<double> a, std::size_t m, double min_pivot) : lu_(std::move(a)), perm_(m), m_(m) {
        for (std::size_t i = 0; i < m; ++i) {
            perm_[i] = i;
        }
        ok_ = factor(min_pivot);
    }

    bool ok() const { return ok_; }

    std::vector<double> solve(std::span<const double> b) const {
        std::vector<double> x(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            double s = b[perm_[i]];
            for (std::size_t k = 0; k < i; ++k) {
                s -= lu_[i * m_ + k] * x[k];
            }
            x[i] = s;
        }
        for (std::size_t ii = m_; ii-- > 0;) {
            double s = x[ii];
            for (std::size_t k = ii + 1; k < m_; ++k) {
                s -= lu_[ii * m_ + k] * x[k];
            }
            x[ii] = s / lu_[ii * m_ + ii];
        }
        return x;
    }

private:
    bool factor(double min_pivot) {
        for (std::size_t col = 0; col < m_; ++col) {
            std::size_t piv = col;
            double best = std::abs(lu_[col * m_ + col]);
            for (std::size_t r = col + 1; r < m_; ++r) {
                const double v = std::abs(lu_[r * m_ + col]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (!(best >= min_pivot)) {
                return false;
            }
            if (piv != col) {
                std::swap_ranges(lu_.begin() + static_cast<std::ptrdiff_t>(col * m_),
                                 lu_.begin() + static_cast<std::ptrdiff_t>((col + 1) * m_),
                                 lu_.begin() + static_cast<std::ptrdiff_t>(piv * m_));
                std::swap(perm_[col], perm_[piv]);
            }
            const double d = lu_[col * m_ + col];
            for (std::size_t r = col + 1; r < m_; ++r) {
                const double f = lu_[r * m_ + col] / d;
                lu_[r * m_ + col] = f;
                if (f == 0.0) {
                    continue;
                }
                for (std::size_t k = col + 1; k < m_; ++k) {
                    lu_[r * m_ + k] -= f * lu_[col * m_ + k];
                }
            }
        }
        return true;
    }

    std::vector<double> lu_;
    std::vector<std::size_t> perm_;
    std::size_t m_;
    bool ok_ = false;
};

inline constexpr double kMinPivot = 1e-12;
inline constexpr double kJitter = 1e-6;

/// Solve a normalized system, with one step of iterative refinement.
inline std::optional<std::vector<double>> lu_solve(const std::vector<double>& a, const std::vector<double>& b,
                                                   std::size_t m) {
    DenseLu lu(a, m, kMinPivot);
    if (!lu.ok()) {
        return std::nullopt;
    }
    auto x = lu.solve(b);
    std::vector<double> resid(m);
    for (std::size_t i = 0; i < m; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < m; ++k) {
            s -= a[i * m + k] * x[k];
        }
        resid[i] = s;
    }
    const auto dx = lu.solve(resid);
    for (std::size_t i = 0; i < m; ++i) {
        x[i] += dx[i];
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            return std::nullopt;
        }
    }
    return x;
}

}  // namespace detail

/// Solve for the BLUE weights. Falls back to a jittered system and then to
/// normalized inverse-squared-distance weights, flagging the latter as degraded.
inline KrigingWeights solve_weights(const KrigingSystem& sys) {
    const std::size_t n = sys.points.size();
    const std::size_t m = n + 1;
    KrigingWeights out;
    out.target_gamma.assign(sys.rhs.begin(), sys.rhs.begin() + static_cast<std::ptrdiff_t>(n));

    for (std::size_t i = 0; i < n; ++i) {
        if (sys.points[i].position == sys.target) {
            out.weights.assign(n, 0.0);
            out.weights[i] = 1.0;
            return out;
        }
    }
    if (n == 1) {
        out.weights = {1.0};
        out.lagrange = sys.rhs[0];
        return out;
    }

    // Weights are invariant under scaling gamma, so normalize it to O(1).
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            scale = std::max(scale, std::abs(sys(i, j)));
        }
        scale = std::max(scale, std::abs(sys.rhs[i]));
    }
    if (scale > 0.0) {
        std::vector<double> a = sys.matrix;
        std::vector<double> b = sys.rhs;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                a[i * m + j] /= scale;
            }
            b[i] /= scale;
        }
        auto x = detail::lu_solve(a, b, m);
        if (!x) {
            const double jitter = detail::kJitter * std::max(sys.model.sill, kFlatSill) / scale;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (i != j) {
                        a[i * m + j] += jitter;
                    }
                }
            }
            x = detail::lu_solve(a, b, m);
        }
        if (x) {
            out.weights.assign(x->begin(), x->begin() + static_cast<std::ptrdiff_t>(n));
            out.lagrange = (*x)[n] * scale;
            return out;
        }
    }

    out.degraded = true;
    out.weights.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.weights[i] = 1.0 / squared_distance(sys.points[i].position, sys.target);
        total += out.weights[i];
    }
    for (double& w : out.weights) {
        w /= total;
    }
    out.lagrange = 0.0;
    return out;
}

/// Weighted estimate and Kriging variance sum(w_i g0_i) + mu, with round-off
/// negatives clamped to zero.
inline Prediction predict(const KrigingWeights& w, std::span<const double> values) {
    if (values.size() != w.weights.size()) {
        throw std::invalid_argument("predict: weights and values differ in length");
    }
    Prediction p;
    for (std::size_t i = 0; i < values.size(); ++i) {
        p.value += w.weights[i] * values[i];
    }
    double var = w.lagrange;
    for (std::size_t i = 0; i < w.target_gamma.size() && i < w.weights.size(); ++i) {
        var += w.weights[i] * w.target_gamma[i];
    }
    p.variance = std::max(var, 0.0);
    return p;
}

inline KrigingSolution krige(std::span<const PixelSample> points, Position target, const VariogramModel& model) {
    const auto sys = assemble_system(points, target, model);
    KrigingSolution sol;
    sol.weights = solve_weights(sys);
    std::vector<double> values(points.size());
    std::transform(points.begin(), points.end(), values.begin(), [](const PixelSample& s) { return s.value; });
    sol.prediction = predict(sol.weights, values);
    return sol;
}

}  // namespace krig
