#pragma once

#include <vector>

#include "viab/dynamics.hpp"

namespace viab::fields {

/// f(x) = 0 in R^dim.
VectorField zero(std::size_t dim);

/// f(x) = k x componentwise. Declares growth |k|, Lipschitz |k| and, for
/// k < 0, monotone constant -k.
VectorField scalar_linear(double k, std::size_t dim = 1);

/// f(x) = A x + b with A row-major dim x dim.
VectorField affine(std::vector<double> a, std::vector<double> b);

/// Planar rotation f(x) = omega (-x2, x1).
VectorField rotation(double omega = 1.0);

/// Constant velocity f(x) = c.
VectorField transport(std::vector<double> velocity);

/// Scalar logistic y' = beta (b - y) y.
VectorField logistic(double beta, double b);

/// Demographic characteristic field on R^4:
/// (1, -rho x2, sigma x3, beta (b - x4) x4).
VectorField demographic4d(double rho, double sigma, double beta, double b);

/// Sum of monomials per output component:
/// f_i(x) = sum_k coef[i][k] * prod_j x_j^powers[i][k][j].
struct Monomial {
    double coef = 0.0;
    std::vector<int> powers;
};
VectorField polynomial(std::size_t dim, std::vector<std::vector<Monomial>> components);

}  // namespace viab::fields
