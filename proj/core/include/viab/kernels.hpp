#pragma once

#include <vector>

#include "viab/dynamics.hpp"
#include "viab/grid.hpp"
#include "viab/sets.hpp"

namespace viab {

// All functionals below are evaluated along the single RK4 solution from x.
// For fields with non-unique solutions the sup/inf over the solution set
// collapses to that one trajectory, so exit times are lower bounds of the
// set-valued exit function.

/// Relative tolerance of the crossing bisection (times T_max).
inline constexpr double kCrossingRelTol = 1e-8;

/// First time the trajectory from x leaves K, refined by bisection to
/// 1e-8 * T_max. Returns kInfTime when it stays in K up to T_max and 0 when
/// x is not in K. Grazing (touching then leaving) counts as exit.
double exit_time(const VectorField& field, const SetOracle& k, std::span<const double> x, double t_max,
                 double h);

/// First time the trajectory from x enters C (0 when x is in C), or kInfTime.
double hitting_time(const VectorField& field, const SetOracle& c, std::span<const double> x,
                    double t_max, double h);

/// hitting_time(C) - exit_time(K): +kInfTime when C is never reached,
/// -kInfTime when C is reached but K is never left. With C = K this is
/// -exit_time.
double capture_margin(const VectorField& field, const SetOracle& k, const SetOracle& c,
                      std::span<const double> x, double t_max, double h);

/// exit_time at every grid node in K; nodes outside K get value 0 and
/// inside = false. Thresholding {value >= T} gives Viab(K, T) on the grid.
TimeField viab_field(const VectorField& field, const SetOracle& k, const GridSpec& grid, double t_max,
                     double h, Exec exec = {});

/// hitting_time of C at every grid node (all nodes inside). {value <= T}
/// gives Capt(C, T).
TimeField capt_field(const VectorField& field, const SetOracle& c, const GridSpec& grid, double t_max,
                     double h, Exec exec = {});

/// capture_margin at every grid node in K. {value <= 0} is the viable-capture
/// basin of C in K.
TimeField viable_capt_field(const VectorField& field, const SetOracle& k, const SetOracle& c,
                            const GridSpec& grid, double t_max, double h, Exec exec = {});

struct KernelMask {
    GridSpec grid;
    std::vector<char> survivors;
    std::size_t passes = 0;

    std::vector<std::size_t> indices() const;
};

/// Fixed-point refinement on grid nodes in K: a node survives a pass when its
/// one-step image flow(h, x) lies within one cell diagonal of a surviving
/// node. Deletions are applied per pass (Jacobi order), so the result does
/// not depend on the worker count. Outer approximation of Viab_f(K).
///
/// The image is integrated with RK4 substeps of min(h, 0.01). Choose h so the
/// one-step displacement exceeds the cell diagonal away from equilibria,
/// otherwise slow nodes are their own witnesses and survive.
KernelMask discrete_kernel(const VectorField& field, const SetOracle& k, const GridSpec& grid, double h,
                           Exec exec = {});

struct RepellerReport {
    bool is_repeller = true;
    /// sup of the finite exit times over nodes in K (0 when K is empty).
    double max_exit_time = 0.0;
};

/// True iff every grid node in K exits before T_max.
RepellerReport repeller_check(const VectorField& field, const SetOracle& k, const GridSpec& grid,
                              double t_max, double h, Exec exec = {});

}  // namespace viab
