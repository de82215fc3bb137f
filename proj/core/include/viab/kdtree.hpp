#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace viab {

/// Static k-d tree over a flat, row-major point array (Euclidean metric).
class KdTree {
public:
    KdTree() = default;
    KdTree(std::vector<double> coords, std::size_t dim);

    std::size_t size() const { return dim_ ? coords_.size() / dim_ : 0; }
    std::size_t dim() const { return dim_; }
    std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }

    struct Hit {
        std::size_t index = 0;
        double distance = 0.0;
    };

    /// Exact nearest neighbour; among equidistant points the lowest index wins.
    /// Undefined on an empty tree.
    Hit nearest(std::span<const double> q) const;

    /// Indices of all points with distance <= r, ascending.
    std::vector<std::size_t> radius(std::span<const double> q, double r) const;

    bool any_within(std::span<const double> q, double r) const;

private:
    struct Node {
        std::size_t begin = 0, end = 0;  // range in order_
        int axis = -1;                   // -1: leaf
        double split = 0.0;
        std::size_t left = 0, right = 0;
    };

    std::size_t build(std::size_t begin, std::size_t end);
    void nearest_rec(std::size_t node, std::span<const double> q, Hit& best, double& best_sq) const;
    void radius_rec(std::size_t node, std::span<const double> q, double r_sq,
                    std::vector<std::size_t>& out) const;
    bool any_rec(std::size_t node, std::span<const double> q, double r_sq) const;
    double sq_dist(std::size_t i, std::span<const double> q) const;

    std::vector<double> coords_;
    std::size_t dim_ = 0;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace viab
