#include "viab/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace viab {

namespace {
constexpr std::size_t kLeafSize = 8;
}

KdTree::KdTree(std::vector<double> coords, std::size_t dim) : coords_(std::move(coords)), dim_(dim)
{
    if (dim_ == 0 || coords_.size() % dim_ != 0) throw std::invalid_argument("KdTree: bad coordinate array");
    order_.resize(size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (!order_.empty()) {
        nodes_.reserve(2 * order_.size() / kLeafSize + 2);
        build(0, order_.size());
    }
}

std::size_t KdTree::build(std::size_t begin, std::size_t end)
{
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) return id;

    // Split on the axis of widest spread.
    int axis = 0;
    double widest = -1.0;
    for (std::size_t a = 0; a < dim_; ++a) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t k = begin; k < end; ++k) {
            const double v = coords_[order_[k] * dim_ + a];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            axis = static_cast<int>(a);
        }
    }
    if (widest <= 0.0) return id;  // all points coincide: keep as a leaf

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t i, std::size_t j) {
                         return coords_[i * dim_ + axis] < coords_[j * dim_ + axis];
                     });
    const double split = coords_[order_[mid] * dim_ + axis];
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

double KdTree::sq_dist(std::size_t i, std::span<const double> q) const
{
    double s = 0.0;
    const double* p = coords_.data() + i * dim_;
    for (std::size_t a = 0; a < dim_; ++a) {
        const double d = p[a] - q[a];
        s += d * d;
    }
    return s;
}

void KdTree::nearest_rec(std::size_t node_id, std::span<const double> q, Hit& best, double& best_sq) const
{
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
        for (std::size_t k = node.begin; k < node.end; ++k) {
            const std::size_t i = order_[k];
            const double d = sq_dist(i, q);
            if (d < best_sq || (d == best_sq && i < best.index)) {
                best_sq = d;
                best.index = i;
            }
        }
        return;
    }
    const double diff = q[static_cast<std::size_t>(node.axis)] - node.split;
    const std::size_t near = diff < 0.0 ? node.left : node.right;
    const std::size_t far = diff < 0.0 ? node.right : node.left;
    nearest_rec(near, q, best, best_sq);
    // <= so that equidistant points with lower index on the far side are seen.
    if (diff * diff <= best_sq) nearest_rec(far, q, best, best_sq);
}

KdTree::Hit KdTree::nearest(std::span<const double> q) const
{
    Hit best{std::numeric_limits<std::size_t>::max(), 0.0};
    double best_sq = std::numeric_limits<double>::infinity();
    if (!nodes_.empty()) nearest_rec(0, q, best, best_sq);
    best.distance = std::sqrt(best_sq);
    return best;
}

void KdTree::radius_rec(std::size_t node_id, std::span<const double> q, double r_sq,
                        std::vector<std::size_t>& out) const
{
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
        for (std::size_t k = node.begin; k < node.end; ++k)
            if (sq_dist(order_[k], q) <= r_sq) out.push_back(order_[k]);
        return;
    }
    const double diff = q[static_cast<std::size_t>(node.axis)] - node.split;
    if (diff <= 0.0 || diff * diff <= r_sq) radius_rec(node.left, q, r_sq, out);
    if (diff >= 0.0 || diff * diff <= r_sq) radius_rec(node.right, q, r_sq, out);
}

std::vector<std::size_t> KdTree::radius(std::span<const double> q, double r) const
{
    std::vector<std::size_t> out;
    if (!nodes_.empty()) radius_rec(0, q, r * r, out);
    std::sort(out.begin(), out.end());
    return out;
}

bool KdTree::any_rec(std::size_t node_id, std::span<const double> q, double r_sq) const
{
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
        for (std::size_t k = node.begin; k < node.end; ++k)
            if (sq_dist(order_[k], q) <= r_sq) return true;
        return false;
    }
    const double diff = q[static_cast<std::size_t>(node.axis)] - node.split;
    if ((diff <= 0.0 || diff * diff <= r_sq) && any_rec(node.left, q, r_sq)) return true;
    if ((diff >= 0.0 || diff * diff <= r_sq) && any_rec(node.right, q, r_sq)) return true;
    return false;
}

bool KdTree::any_within(std::span<const double> q, double r) const
{
    return !nodes_.empty() && any_rec(0, q, r * r);
}

}  // namespace viab
