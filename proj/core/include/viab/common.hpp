#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace viab {

/// A point of R^n. State dimensions in this library are small (1..6), so a
/// plain vector is used everywhere instead of a fixed-size type.
using State = std::vector<double>;

/// Encodes "+infinity" for times and extended-real values. Every threshold in
/// the library compares against it, so finite horizons must stay far below.
inline constexpr double kInfTime = 1e18;

inline bool is_inf(double v) { return v >= kInfTime; }
inline bool is_neg_inf(double v) { return v <= -kInfTime; }

/// Maps IEEE infinities onto the sentinel and leaves finite values alone.
inline double to_sentinel(double v)
{
    if (v >= kInfTime) return kInfTime;
    if (v <= -kInfTime) return -kInfTime;
    return v;
}

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// State became NaN/inf or exceeded the blow-up threshold during integration.
class NonFinite : public Error {
public:
    using Error::Error;
};

/// An oracle has no analytic answer for the requested query.
class Unsupported : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

/// Lyapunov descent inequality failed along the computed trajectory.
class DescentViolation : public Error {
public:
    using Error::Error;
};

/// Epigraph envelope touched the roof of the y-grid.
class CapTooSmall : public Error {
public:
    using Error::Error;
};

/// Closed-form evaluator called outside its parameter domain.
class ParamDomain : public Error {
public:
    using Error::Error;
};

// ---- small dense helpers ----------------------------------------------------

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double dist(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double norm_inf(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

/// x + h*v
inline State add_scaled(std::span<const double> x, double h, std::span<const double> v)
{
    State out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * v[i];
    return out;
}

inline State sub(std::span<const double> a, std::span<const double> b)
{
    State out(a.begin(), a.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

inline State scaled(std::span<const double> a, double s)
{
    State out(a.begin(), a.end());
    for (double& v : out) v *= s;
    return out;
}

inline bool all_finite(std::span<const double> a)
{
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

// ---- worker pool ------------------------------------------------------------

/// Width of the worker pool used by grid sweeps. Results never depend on it:
/// every task writes its own output slot.
struct Exec {
    unsigned workers = 1;
};

/// Runs body(i) for i in [0, n) on `workers` threads. The first exception
/// thrown by any task is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, Exec exec, const std::function<void(std::size_t)>& body);

}  // namespace viab
