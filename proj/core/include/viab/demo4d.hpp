#pragma once

#include <cstdint>
#include <numbers>

#include "viab/characteristics.hpp"

namespace viab {

/// Age-structured demographic model on K = R+ x [0, r2] x R+ x [0, b] with
/// characteristic field phi(x) = (1, -rho x2, sigma x3, beta (b - x4) x4).
struct Demo4dParams {
    double rho = 1.0;
    double sigma = 0.5;
    double beta = 0.3;
    double b = 2.0;
    double r2 = std::numbers::e;
};

/// Closed-form evaluator of the scalar problem
///   du/dt + Du phi = -A(t, x) u
/// with initial data u0, birth data v1 on {x1 = 0} and data v_r2 on {x2 = r2}.
///
/// The three regimes are selected by comparing t, x1 and L = log(r2/x2)/rho:
///   1: t <= min(x1, L)      foot on the initial slice
///   2: x1 <= min(t, L)      foot on {x1 = 0}
///   3: L <= min(t, x1)      foot on {x2 = r2}
/// Ties go to the lower regime number.
class Demo4d {
public:
    using Rate = std::function<double(double t, std::span<const double> x)>;
    using Initial = std::function<double(std::span<const double> x)>;
    /// (s, three remaining coordinates) -> value.
    using Face = std::function<double(double s, std::span<const double> rest)>;

    Demo4d(Demo4dParams params, Initial u0, Face v1, Face v_r2);

    /// Constant A (the default is 0).
    void set_rate(double a);
    /// State- and time-dependent A; the exponential factor is then computed
    /// by composite Simpson quadrature along the characteristic.
    void set_rate(Rate a, std::size_t panels = 400);

    const Demo4dParams& params() const { return params_; }

    VectorField field() const;
    SetOracle domain() const;

    /// Throws ParamDomain unless x1 >= 0, x2 in (0, r2], x3 >= 0, x4 in (0, b).
    void check_domain(std::span<const double> x) const;

    /// log(r2 / x2) / rho
    double second_face_time(std::span<const double> x) const;
    /// min(x1, log(r2/x2)/rho): the backward exit time before the t cap.
    double exit_time(std::span<const double> x) const;
    int regime(double t, std::span<const double> x) const;

    /// Backward flow of x for duration d >= 0 (closed form).
    State backward_flow(double d, std::span<const double> x) const;
    Exitor exitor(double t, std::span<const double> x) const;

    /// int_s^t A(tau, backward_flow(t - tau, x)) dtau
    double rate_integral(double s, double t, std::span<const double> x) const;

    double solve(double t, std::span<const double> x) const;

    /// The same problem for solve_char / graph_sample (output dimension 1).
    /// Boundary feet with |xi1| <= |r2 - xi2| read v1, the others v_r2.
    CharProblem char_problem() const;

private:
    Demo4dParams params_;
    Initial u0_;
    Face v1_;
    Face v_r2_;
    double a_const_ = 0.0;
    Rate a_fn_;
    std::size_t panels_ = 400;
};

/// per_regime random (t, x) points in each of the three regimes, regime 1
/// first. t, x1 and log(r2/x2)/rho are kept at least `gap` apart so the
/// regime is unambiguous. Deterministic for a given seed.
std::vector<TimePoint> demo4d_samples(const Demo4d& d, std::size_t per_regime, std::uint64_t seed,
                                      double gap = 0.05);

}  // namespace viab
