#pragma once

#include <iosfwd>
#include <vector>

#include "viab/common.hpp"

namespace viab {

/// Regular lattice over the box [lo, hi]. counts[a] is the number of nodes on
/// axis a (>= 2), so node i on axis a sits at lo + (hi - lo) * i / (counts - 1).
/// Flat indices are row-major: the last axis varies fastest.
struct GridSpec {
    State lo;
    State hi;
    std::vector<std::size_t> counts;

    GridSpec() = default;
    GridSpec(State lo, State hi, std::vector<std::size_t> counts);

    /// Throws std::invalid_argument unless lo < hi and counts >= 2 on every axis.
    void validate() const;

    std::size_t dim() const { return lo.size(); }
    std::size_t size() const;
    double spacing(std::size_t axis) const;
    double diagonal() const;
    double coord(std::size_t axis, std::size_t i) const;

    std::vector<std::size_t> unflatten(std::size_t flat) const;
    std::size_t flatten(std::span<const std::size_t> idx) const;
    State node(std::size_t flat) const;

    /// Flat index of the node nearest to x (coordinates clamped to the box).
    std::size_t nearest(std::span<const double> x) const;
};

/// Per-node time values (exit/hitting times, capture margins) with the
/// +inf sentinel, plus a mask of nodes that lie in the reference set.
struct TimeField {
    GridSpec grid;
    std::vector<double> values;
    std::vector<char> inside;

    /// Flat indices with value >= threshold (among inside nodes).
    std::vector<std::size_t> at_least(double threshold) const;
    /// Flat indices with value <= threshold (among inside nodes).
    std::vector<std::size_t> at_most(double threshold) const;
};

/// Rows `x1,...,xn,value`, sentinel printed as inf.
void write_time_field_csv(std::ostream& os, const TimeField& field);

/// A scalar function sampled on grid nodes, with multilinear interpolation.
struct ValueField {
    GridSpec grid;
    std::vector<double> values;

    /// Multilinear interpolation. Returns the +inf sentinel when x leaves the
    /// grid box or when any corner carrying positive weight is infinite.
    double interpolate(std::span<const double> x) const;
};

/// Rows `x1,...,xn,value`.
void write_value_field_csv(std::ostream& os, const ValueField& field);

}  // namespace viab
