#include "viab/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace viab::fields {

VectorField zero(std::size_t dim)
{
    VectorField f;
    f.dim = dim;
    f.eval = [](double, std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    f.growth_c = 0.0;
    f.lipschitz = 0.0;
    f.monotone_mu = 0.0;
    return f;
}

VectorField scalar_linear(double k, std::size_t dim)
{
    VectorField f;
    f.dim = dim;
    f.eval = [k](double, std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = k * x[i];
    };
    f.growth_c = std::abs(k);
    f.lipschitz = std::abs(k);
    f.monotone_mu = -k;
    return f;
}

VectorField affine(std::vector<double> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    if (a.size() != n * n) throw std::invalid_argument("affine: A must be n x n with n = len(b)");
    double frob = 0.0;
    for (double v : a) frob += v * v;
    VectorField f;
    f.dim = n;
    f.eval = [a = std::move(a), b = std::move(b), n](double, std::span<const double> x,
                                                     std::span<double> out) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = b[i];
            for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
            out[i] = s;
        }
    };
    f.lipschitz = std::sqrt(frob);
    return f;
}

VectorField rotation(double omega)
{
    VectorField f;
    f.dim = 2;
    f.eval = [omega](double, std::span<const double> x, std::span<double> out) {
        out[0] = -omega * x[1];
        out[1] = omega * x[0];
    };
    f.growth_c = std::abs(omega);
    f.lipschitz = std::abs(omega);
    f.monotone_mu = 0.0;
    return f;
}

VectorField transport(std::vector<double> velocity)
{
    VectorField f;
    f.dim = velocity.size();
    f.growth_c = norm(velocity);
    f.lipschitz = 0.0;
    f.monotone_mu = 0.0;
    f.eval = [c = std::move(velocity)](double, std::span<const double>, std::span<double> out) {
        std::copy(c.begin(), c.end(), out.begin());
    };
    return f;
}

VectorField logistic(double beta, double b)
{
    VectorField f;
    f.dim = 1;
    f.eval = [beta, b](double, std::span<const double> x, std::span<double> out) {
        out[0] = beta * (b - x[0]) * x[0];
    };
    return f;
}

VectorField demographic4d(double rho, double sigma, double beta, double b)
{
    VectorField f;
    f.dim = 4;
    f.eval = [=](double, std::span<const double> x, std::span<double> out) {
        out[0] = 1.0;
        out[1] = -rho * x[1];
        out[2] = sigma * x[2];
        out[3] = beta * (b - x[3]) * x[3];
    };
    return f;
}

VectorField polynomial(std::size_t dim, std::vector<std::vector<Monomial>> components)
{
    if (components.size() != dim) throw std::invalid_argument("polynomial: need one component per axis");
    for (const auto& comp : components)
        for (const auto& m : comp)
            if (m.powers.size() != dim)
                throw std::invalid_argument("polynomial: monomial powers must have length dim");
    VectorField f;
    f.dim = dim;
    f.eval = [comps = std::move(components)](double, std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < comps.size(); ++i) {
            double s = 0.0;
            for (const auto& m : comps[i]) {
                double term = m.coef;
                for (std::size_t j = 0; j < x.size(); ++j)
                    if (m.powers[j] != 0) term *= std::pow(x[j], m.powers[j]);
                s += term;
            }
            out[i] = s;
        }
    };
    return f;
}

}  // namespace viab::fields
