#include "viab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "viab/csv.hpp"

namespace viab {

GridSpec::GridSpec(State lo_, State hi_, std::vector<std::size_t> counts_)
    : lo(std::move(lo_)), hi(std::move(hi_)), counts(std::move(counts_))
{
    validate();
}

void GridSpec::validate() const
{
    if (lo.empty() || lo.size() != hi.size() || lo.size() != counts.size())
        throw std::invalid_argument("grid: lo, hi and counts must have the same non-zero length");
    for (std::size_t a = 0; a < lo.size(); ++a) {
        if (!(lo[a] < hi[a])) throw std::invalid_argument("grid: lo must be < hi on every axis");
        if (counts[a] < 2) throw std::invalid_argument("grid: counts must be >= 2 on every axis");
    }
}

std::size_t GridSpec::size() const
{
    std::size_t n = 1;
    for (std::size_t c : counts) n *= c;
    return n;
}

double GridSpec::spacing(std::size_t axis) const
{
    return (hi[axis] - lo[axis]) / static_cast<double>(counts[axis] - 1);
}

double GridSpec::diagonal() const
{
    double s = 0.0;
    for (std::size_t a = 0; a < dim(); ++a) s += spacing(a) * spacing(a);
    return std::sqrt(s);
}

double GridSpec::coord(std::size_t axis, std::size_t i) const
{
    if (i + 1 == counts[axis]) return hi[axis];
    return lo[axis] + (hi[axis] - lo[axis]) * static_cast<double>(i) / static_cast<double>(counts[axis] - 1);
}

std::vector<std::size_t> GridSpec::unflatten(std::size_t flat) const
{
    std::vector<std::size_t> idx(dim());
    for (std::size_t a = dim(); a-- > 0;) {
        idx[a] = flat % counts[a];
        flat /= counts[a];
    }
    return idx;
}

std::size_t GridSpec::flatten(std::span<const std::size_t> idx) const
{
    std::size_t flat = 0;
    for (std::size_t a = 0; a < dim(); ++a) flat = flat * counts[a] + idx[a];
    return flat;
}

State GridSpec::node(std::size_t flat) const
{
    const auto idx = unflatten(flat);
    State x(dim());
    for (std::size_t a = 0; a < dim(); ++a) x[a] = coord(a, idx[a]);
    return x;
}

std::size_t GridSpec::nearest(std::span<const double> x) const
{
    std::vector<std::size_t> idx(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        const double u = (x[a] - lo[a]) / spacing(a);
        const double r = std::clamp(std::round(u), 0.0, static_cast<double>(counts[a] - 1));
        idx[a] = static_cast<std::size_t>(r);
    }
    return flatten(idx);
}

std::vector<std::size_t> TimeField::at_least(double threshold) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (inside[i] && values[i] >= threshold) out.push_back(i);
    return out;
}

std::vector<std::size_t> TimeField::at_most(double threshold) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (inside[i] && values[i] <= threshold) out.push_back(i);
    return out;
}

namespace {

void write_grid_values(std::ostream& os, const GridSpec& grid, const std::vector<double>& values)
{
    std::vector<std::string> header;
    for (std::size_t a = 0; a < grid.dim(); ++a) header.push_back("x" + std::to_string(a + 1));
    header.emplace_back("value");
    csv::write_header(os, header);
    for (std::size_t i = 0; i < values.size(); ++i) {
        csv::Row row(os);
        for (double c : grid.node(i)) row << c;
        row << values[i];
    }
}

}  // namespace

void write_time_field_csv(std::ostream& os, const TimeField& field)
{
    write_grid_values(os, field.grid, field.values);
}

void write_value_field_csv(std::ostream& os, const ValueField& field)
{
    write_grid_values(os, field.grid, field.values);
}

double ValueField::interpolate(std::span<const double> x) const
{
    const std::size_t n = grid.dim();
    std::vector<std::size_t> base(n);
    std::vector<double> frac(n);
    for (std::size_t a = 0; a < n; ++a) {
        // Tiny slack so points that round just outside the box still resolve.
        const double slack = 1e-12 * grid.spacing(a);
        if (x[a] < grid.lo[a] - slack || x[a] > grid.hi[a] + slack) return kInfTime;
        double u = (x[a] - grid.lo[a]) / grid.spacing(a);
        u = std::clamp(u, 0.0, static_cast<double>(grid.counts[a] - 1));
        std::size_t i = static_cast<std::size_t>(std::floor(u));
        if (i + 1 >= grid.counts[a]) i = grid.counts[a] - 2;
        base[a] = i;
        frac[a] = u - static_cast<double>(i);
    }

    double acc = 0.0;
    std::vector<std::size_t> idx(n);
    for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
        double w = 1.0;
        for (std::size_t a = 0; a < n; ++a) {
            const bool up = (corner >> a) & 1u;
            idx[a] = base[a] + (up ? 1 : 0);
            w *= up ? frac[a] : 1.0 - frac[a];
        }
        if (w == 0.0) continue;
        const double v = values[grid.flatten(idx)];
        if (is_inf(v)) return kInfTime;
        acc += w * v;
    }
    return acc;
}

}  // namespace viab
