#pragma once

#include <iosfwd>
#include <memory>
#include <string_view>
#include <vector>

#include "viab/common.hpp"
#include "viab/kdtree.hpp"

namespace viab {

enum class SetKind {
    box,
    ball,
    sphere,
    halfspace,
    product,
    point_cloud,
    complement,
    intersection,
    union_of,
    sublevel,
};

std::string_view to_string(SetKind kind);

/// Lower-dimensional sets (spheres, point clouds) are "hit" when the distance
/// is below this slack; floating point never lands on them exactly.
inline constexpr double kMembershipSlack = 1e-12;

/// Finite set of points with a merge radius. Construction drops any point
/// closer than tol/2 to an already kept one (first occurrence wins), so the
/// stored points are pairwise at least tol/2 apart.
class PointCloud {
public:
    PointCloud() = default;
    PointCloud(std::vector<State> points, double tol);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return tree_.size(); }
    bool empty() const { return size() == 0; }
    double tol() const { return tol_; }
    std::span<const double> point(std::size_t i) const { return tree_.point(i); }
    std::vector<State> points() const;
    const KdTree& tree() const { return tree_; }

private:
    KdTree tree_;
    std::size_t dim_ = 0;
    double tol_ = 0.0;
};

/// One state per row with header x1,...,xn.
void write_point_cloud_csv(std::ostream& os, const PointCloud& cloud);

struct DistanceBounds {
    double lower = 0.0;
    double upper = 0.0;
};

namespace detail {
struct SetNode;
}

/// Closed set K given by membership, distance and best approximation.
///
/// Cheap to copy (shared immutable node tree) and safe to query from many
/// threads. Projections and distances are exact for box, ball, sphere,
/// halfspace, product and point_cloud. Intersection distances are bracketed
/// (see distance_bounds); sublevel sets use first-order estimates.
class SetOracle {
public:
    SetOracle() = default;

    std::size_t dim() const;
    SetKind kind() const;

    bool contains(std::span<const double> x) const;
    double distance(std::span<const double> x) const;
    DistanceBounds distance_bounds(std::span<const double> x) const;

    /// Best approximation of y in K. Ties follow the primitive's analytic
    /// rule: boxes clamp, balls/spheres scale radially (the centre maps along
    /// +e1), point clouds take the lowest index among minimizers.
    State project(std::span<const double> y) const;

    /// Distance from x to the boundary of K (for x in K: distance to the
    /// complement; otherwise the distance to K). +inf sentinel when K has no
    /// boundary (whole space).
    double boundary_distance(std::span<const double> x) const;

    // ---- primitives ----
    /// Axis-aligned box; infinite bounds are allowed (whole space = all infinite).
    static SetOracle box(State lo, State hi);
    static SetOracle whole_space(std::size_t dim);
    static SetOracle ball(State center, double radius);
    static SetOracle sphere(State center, double radius);
    /// {x : <a, x> <= b}
    static SetOracle halfspace(State a, double b);
    static SetOracle point_cloud(PointCloud cloud);
    /// {x : g(x) <= 0}. Returning >= kInfTime from g means "far outside".
    static SetOracle sublevel(std::size_t dim, std::function<double(std::span<const double>)> g);
    static SetOracle empty(std::size_t dim);

    // ---- composites ----
    /// Cartesian product; the state is the concatenation of the factors.
    static SetOracle product(std::vector<SetOracle> factors);
    static SetOracle intersection(std::vector<SetOracle> members);
    static SetOracle union_of(std::vector<SetOracle> members, std::size_t dim);
    /// Closure of the complement of k. project() only works where k's
    /// boundary has an analytic projection (box, ball, halfspace, products of
    /// those); otherwise it throws Unsupported for points inside k.
    static SetOracle complement(SetOracle k);

private:
    explicit SetOracle(std::shared_ptr<const detail::SetNode> node) : node_(std::move(node)) {}

    std::shared_ptr<const detail::SetNode> node_;

    friend struct detail::SetNode;
};

/// Default ladder bounds for tangent_residual.
inline constexpr double kTangentHMin = 1e-6;
inline constexpr double kTangentHMax = 1e-2;

/// min over h = h_max, h_max/2, ... >= h_min of d(x + h v, K) / h.
/// Close to 0 when v is a contingent direction of K at x.
double tangent_residual(const SetOracle& k, std::span<const double> x, std::span<const double> v,
                        double h_min = kTangentHMin, double h_max = kTangentHMax);

enum class LimitMode { upper, lower };

/// Finite proxy of the Painleve-Kuratowski limits of a sequence of clouds.
///
/// Only the tail (second half) of the sequence is examined. A candidate point
/// (any point of a tail cloud) enters the upper limit when it lies within eps
/// of at least half of the tail clouds, and the lower limit when it lies
/// within eps of every tail cloud. The result is merged with radius eps.
PointCloud set_limit(const std::vector<PointCloud>& clouds, LimitMode mode, double eps);

}  // namespace viab
