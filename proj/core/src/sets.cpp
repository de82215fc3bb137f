#include "viab/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "viab/csv.hpp"

namespace viab {

std::string_view to_string(SetKind kind)
{
    switch (kind) {
    case SetKind::box: return "box";
    case SetKind::ball: return "ball";
    case SetKind::sphere: return "sphere";
    case SetKind::halfspace: return "halfspace";
    case SetKind::product: return "product";
    case SetKind::point_cloud: return "point-cloud";
    case SetKind::complement: return "complement";
    case SetKind::intersection: return "intersection";
    case SetKind::union_of: return "union";
    case SetKind::sublevel: return "sublevel";
    }
    return "unknown";
}

// ---- PointCloud ---------------------------------------------------------------

namespace {

struct CellKey {
    std::vector<long long> c;
    bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const
    {
        std::size_t h = 1469598103934665603ull;
        for (long long v : k.c) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
        return h;
    }
};

}  // namespace

PointCloud::PointCloud(std::vector<State> points, double tol) : tol_(tol)
{
    if (points.empty()) return;
    dim_ = points.front().size();
    const double r = 0.5 * tol;

    std::vector<double> kept;
    kept.reserve(points.size() * dim_);
    if (r <= 0.0) {
        for (const auto& p : points) kept.insert(kept.end(), p.begin(), p.end());
        tree_ = KdTree(std::move(kept), dim_);
        return;
    }

    // Uniform hash with cell size r: a conflicting kept point lies in one of
    // the 3^dim neighbouring cells.
    std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> cells;
    std::size_t count = 0;
    CellKey key{std::vector<long long>(dim_)};
    CellKey probe{std::vector<long long>(dim_)};
    std::vector<int> offset(dim_);
    for (const auto& p : points) {
        if (p.size() != dim_) throw std::invalid_argument("PointCloud: mixed dimensions");
        for (std::size_t a = 0; a < dim_; ++a) key.c[a] = static_cast<long long>(std::floor(p[a] / r));

        bool clash = false;
        std::fill(offset.begin(), offset.end(), -1);
        while (!clash) {
            for (std::size_t a = 0; a < dim_; ++a) probe.c[a] = key.c[a] + offset[a];
            if (auto it = cells.find(probe); it != cells.end()) {
                for (std::size_t idx : it->second) {
                    if (dist(std::span<const double>(kept.data() + idx * dim_, dim_), p) < r) {
                        clash = true;
                        break;
                    }
                }
            }
            std::size_t a = 0;
            while (a < dim_ && ++offset[a] > 1) offset[a++] = -1;
            if (a == dim_) break;
        }
        if (clash) continue;
        kept.insert(kept.end(), p.begin(), p.end());
        cells[key].push_back(count++);
    }
    tree_ = KdTree(std::move(kept), dim_);
}

std::vector<State> PointCloud::points() const
{
    std::vector<State> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        auto p = point(i);
        out.emplace_back(p.begin(), p.end());
    }
    return out;
}

void write_point_cloud_csv(std::ostream& os, const PointCloud& cloud)
{
    std::vector<std::string> header;
    for (std::size_t i = 0; i < cloud.dim(); ++i) header.push_back("x" + std::to_string(i + 1));
    csv::write_header(os, header);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        csv::Row row(os);
        for (double v : cloud.point(i)) row << v;
    }
}

// ---- node hierarchy -------------------------------------------------------------

namespace detail {

struct SetNode {
    virtual ~SetNode() = default;
    virtual SetKind kind() const = 0;
    virtual std::size_t dim() const = 0;
    virtual double distance(std::span<const double> x) const = 0;
    virtual State project(std::span<const double> y) const = 0;
    virtual bool contains(std::span<const double> x) const { return distance(x) <= 0.0; }
    virtual DistanceBounds distance_bounds(std::span<const double> x) const
    {
        const double d = distance(x);
        return {d, d};
    }
    virtual double boundary_distance(std::span<const double> x) const
    {
        if (!contains(x)) return distance(x);
        throw Unsupported(std::string("boundary distance not available for ") +
                          std::string(to_string(kind())));
    }
    /// Nearest boundary point for y inside the set.
    virtual State project_to_boundary(std::span<const double>) const
    {
        throw Unsupported(std::string("no analytic boundary projection for ") +
                          std::string(to_string(kind())));
    }

    static const SetNode& of(const SetOracle& k);
};

}  // namespace detail

using detail::SetNode;

namespace {

void require_dim(std::span<const double> x, std::size_t dim)
{
    if (x.size() != dim) throw std::invalid_argument("set oracle: dimension mismatch");
}

class BoxNode final : public SetNode {
public:
    BoxNode(State lo, State hi) : lo_(std::move(lo)), hi_(std::move(hi))
    {
        if (lo_.size() != hi_.size()) throw std::invalid_argument("box: lo/hi size mismatch");
        for (std::size_t i = 0; i < lo_.size(); ++i)
            if (lo_[i] > hi_[i]) throw std::invalid_argument("box: lo > hi");
    }
    SetKind kind() const override { return SetKind::box; }
    std::size_t dim() const override { return lo_.size(); }

    bool contains(std::span<const double> x) const override
    {
        require_dim(x, dim());
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!(x[i] >= lo_[i] && x[i] <= hi_[i])) return false;
        return true;
    }
    double distance(std::span<const double> x) const override
    {
        require_dim(x, dim());
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] < lo_[i] ? lo_[i] - x[i] : (x[i] > hi_[i] ? x[i] - hi_[i] : 0.0);
            s += d * d;
        }
        return std::sqrt(s);
    }
    State project(std::span<const double> y) const override
    {
        require_dim(y, dim());
        State out(y.begin(), y.end());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo_[i], hi_[i]);
        return out;
    }
    double boundary_distance(std::span<const double> x) const override
    {
        if (!contains(x)) return distance(x);
        double best = kInfTime;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (std::isfinite(lo_[i])) best = std::min(best, x[i] - lo_[i]);
            if (std::isfinite(hi_[i])) best = std::min(best, hi_[i] - x[i]);
        }
        return best;
    }
    State project_to_boundary(std::span<const double> y) const override
    {
        double best = std::numeric_limits<double>::infinity();
        std::size_t axis = 0;
        double target = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (std::isfinite(lo_[i]) && y[i] - lo_[i] < best) {
                best = y[i] - lo_[i];
                axis = i;
                target = lo_[i];
            }
            if (std::isfinite(hi_[i]) && hi_[i] - y[i] < best) {
                best = hi_[i] - y[i];
                axis = i;
                target = hi_[i];
            }
        }
        if (!std::isfinite(best)) throw Unsupported("whole space has no boundary");
        State out(y.begin(), y.end());
        out[axis] = target;
        return out;
    }

private:
    State lo_, hi_;
};

State radial(std::span<const double> y, const State& c, double r)
{
    State d = sub(y, c);
    const double n = norm(d);
    State out = c;
    if (n == 0.0) {
        out[0] += r;
        return out;
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += r * d[i] / n;
    return out;
}

class BallNode final : public SetNode {
public:
    BallNode(State c, double r) : c_(std::move(c)), r_(r)
    {
        if (r < 0.0) throw std::invalid_argument("ball: negative radius");
    }
    SetKind kind() const override { return SetKind::ball; }
    std::size_t dim() const override { return c_.size(); }
    double distance(std::span<const double> x) const override
    {
        require_dim(x, dim());
        return std::max(0.0, dist(x, c_) - r_);
    }
    State project(std::span<const double> y) const override
    {
        require_dim(y, dim());
        if (dist(y, c_) <= r_) return State(y.begin(), y.end());
        return radial(y, c_, r_);
    }
    double boundary_distance(std::span<const double> x) const override
    {
        require_dim(x, dim());
        return std::abs(dist(x, c_) - r_);
    }
    State project_to_boundary(std::span<const double> y) const override { return radial(y, c_, r_); }

private:
    State c_;
    double r_;
};

class SphereNode final : public SetNode {
public:
    SphereNode(State c, double r) : c_(std::move(c)), r_(r)
    {
        if (r < 0.0) throw std::invalid_argument("sphere: negative radius");
    }
    SetKind kind() const override { return SetKind::sphere; }
    std::size_t dim() const override { return c_.size(); }
    double distance(std::span<const double> x) const override
    {
        require_dim(x, dim());
        return std::abs(dist(x, c_) - r_);
    }
    bool contains(std::span<const double> x) const override
    {
        return distance(x) <= kMembershipSlack * std::max(1.0, r_);
    }
    State project(std::span<const double> y) const override
    {
        require_dim(y, dim());
        return radial(y, c_, r_);
    }
    double boundary_distance(std::span<const double> x) const override { return distance(x); }

private:
    State c_;
    double r_;
};

class HalfspaceNode final : public SetNode {
public:
    HalfspaceNode(State a, double b) : a_(std::move(a)), b_(b), norm_a_(norm(a_))
    {
        if (norm_a_ == 0.0) throw std::invalid_argument("halfspace: zero normal");
    }
    SetKind kind() const override { return SetKind::halfspace; }
    std::size_t dim() const override { return a_.size(); }
    bool contains(std::span<const double> x) const override
    {
        require_dim(x, dim());
        return dot(a_, x) <= b_;
    }
    double distance(std::span<const double> x) const override
    {
        require_dim(x, dim());
        return std::max(0.0, (dot(a_, x) - b_) / norm_a_);
    }
    State project(std::span<const double> y) const override
    {
        require_dim(y, dim());
        const double excess = dot(a_, y) - b_;
        if (excess <= 0.0) return State(y.begin(), y.end());
        return add_scaled(y, -excess / (norm_a_ * norm_a_), a_);
    }
    double boundary_distance(std::span<const double> x) const override
    {
        require_dim(x, dim());
        return std::abs(dot(a_, x) - b_) / norm_a_;
    }
    State project_to_boundary(std::span<const double> y) const override
    {
        return add_scaled(y, -(dot(a_, y) - b_) / (norm_a_ * norm_a_), a_);
    }

private:
    State a_;
    double b_;
    double norm_a_;
};

class CloudNode final : public SetNode {
public:
    explicit CloudNode(PointCloud cloud) : cloud_(std::move(cloud)) {}
    SetKind kind() const override { return SetKind::point_cloud; }
    std::size_t dim() const override { return cloud_.dim(); }
    double distance(std::span<const double> x) const override
    {
        if (cloud_.empty()) return kInfTime;
        require_dim(x, dim());
        return cloud_.tree().nearest(x).distance;
    }
    bool contains(std::span<const double> x) const override
    {
        return !cloud_.empty() && distance(x) <= kMembershipSlack;
    }
    State project(std::span<const double> y) const override
    {
        if (cloud_.empty()) throw Unsupported("projection onto an empty point cloud");
        auto p = cloud_.point(cloud_.tree().nearest(y).index);
        return State(p.begin(), p.end());
    }
    double boundary_distance(std::span<const double> x) const override { return distance(x); }

private:
    PointCloud cloud_;
};

class SublevelNode final : public SetNode {
public:
    SublevelNode(std::size_t dim, std::function<double(std::span<const double>)> g)
        : dim_(dim), g_(std::move(g))
    {
    }
    SetKind kind() const override { return SetKind::sublevel; }
    std::size_t dim() const override { return dim_; }
    bool contains(std::span<const double> x) const override { return g_(x) <= 0.0; }

    double distance(std::span<const double> x) const override
    {
        const double g = g_(x);
        if (g <= 0.0) return 0.0;
        if (g >= kInfTime) return kInfTime;
        return dist(x, project(x));
    }
    State project(std::span<const double> y) const override
    {
        // Newton steps on g = 0 along the numerical gradient; approximate.
        State z(y.begin(), y.end());
        for (int it = 0; it < 50; ++it) {
            const double g = g_(z);
            if (g <= 0.0) return z;
            if (g >= kInfTime) throw Unsupported("sublevel projection from an infinite value");
            State grad = gradient(z);
            const double n2 = dot(grad, grad);
            if (n2 == 0.0) throw Unsupported("sublevel projection hit a flat point");
            // Overshoot slightly so the iterate lands inside the closed set.
            const double step = g / n2 * (1.0 + 1e-9) + 1e-15;
            for (std::size_t i = 0; i < z.size(); ++i) z[i] -= step * grad[i];
        }
        throw NoConvergence("sublevel projection did not converge in 50 iterations");
    }
    double boundary_distance(std::span<const double> x) const override
    {
        const double g = g_(x);
        if (g >= kInfTime) return kInfTime;
        State grad = gradient(x);
        const double n = norm(grad);
        if (n == 0.0) return g == 0.0 ? 0.0 : kInfTime;
        return std::abs(g) / n;
    }

private:
    State gradient(std::span<const double> x) const
    {
        State grad(dim_);
        State probe(x.begin(), x.end());
        for (std::size_t i = 0; i < dim_; ++i) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[i]));
            probe[i] = x[i] + h;
            const double up = g_(probe);
            probe[i] = x[i] - h;
            const double dn = g_(probe);
            probe[i] = x[i];
            grad[i] = (up - dn) / (2.0 * h);
        }
        return grad;
    }

    std::size_t dim_;
    std::function<double(std::span<const double>)> g_;
};

class ProductNode final : public SetNode {
public:
    explicit ProductNode(std::vector<SetOracle> factors) : factors_(std::move(factors))
    {
        std::size_t off = 0;
        for (const auto& f : factors_) {
            offsets_.push_back(off);
            off += f.dim();
        }
        dim_ = off;
    }
    SetKind kind() const override { return SetKind::product; }
    std::size_t dim() const override { return dim_; }

    bool contains(std::span<const double> x) const override
    {
        require_dim(x, dim_);
        for (std::size_t j = 0; j < factors_.size(); ++j)
            if (!factors_[j].contains(part(x, j))) return false;
        return true;
    }
    double distance(std::span<const double> x) const override
    {
        require_dim(x, dim_);
        double s = 0.0;
        for (std::size_t j = 0; j < factors_.size(); ++j) {
            const double d = factors_[j].distance(part(x, j));
            if (d >= kInfTime) return kInfTime;
            s += d * d;
        }
        return std::sqrt(s);
    }
    State project(std::span<const double> y) const override
    {
        require_dim(y, dim_);
        State out;
        out.reserve(dim_);
        for (std::size_t j = 0; j < factors_.size(); ++j) {
            State p = factors_[j].project(part(y, j));
            out.insert(out.end(), p.begin(), p.end());
        }
        return out;
    }
    double boundary_distance(std::span<const double> x) const override
    {
        if (!contains(x)) return distance(x);
        double best = kInfTime;
        for (std::size_t j = 0; j < factors_.size(); ++j)
            best = std::min(best, factors_[j].boundary_distance(part(x, j)));
        return best;
    }
    State project_to_boundary(std::span<const double> y) const override
    {
        std::size_t best_j = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < factors_.size(); ++j) {
            const double d = factors_[j].boundary_distance(part(y, j));
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        State out(y.begin(), y.end());
        State p = SetNode::of(factors_[best_j]).project_to_boundary(part(y, best_j));
        std::copy(p.begin(), p.end(), out.begin() + static_cast<std::ptrdiff_t>(offsets_[best_j]));
        return out;
    }

private:
    std::span<const double> part(std::span<const double> x, std::size_t j) const
    {
        return x.subspan(offsets_[j], factors_[j].dim());
    }

    std::vector<SetOracle> factors_;
    std::vector<std::size_t> offsets_;
    std::size_t dim_ = 0;
};

class IntersectionNode final : public SetNode {
public:
    explicit IntersectionNode(std::vector<SetOracle> members) : members_(std::move(members))
    {
        if (members_.empty()) throw std::invalid_argument("intersection: no members");
    }
    SetKind kind() const override { return SetKind::intersection; }
    std::size_t dim() const override { return members_.front().dim(); }

    bool contains(std::span<const double> x) const override
    {
        for (const auto& m : members_)
            if (!m.contains(x)) return false;
        return true;
    }
    /// Certified lower bound: the largest member distance.
    double distance(std::span<const double> x) const override
    {
        double d = 0.0;
        for (const auto& m : members_) d = std::max(d, m.distance(x));
        return d;
    }
    DistanceBounds distance_bounds(std::span<const double> x) const override
    {
        const double lower = distance(x);
        if (lower == 0.0 && contains(x)) return {0.0, 0.0};
        double upper = kInfTime;
        const State z = dykstra(x);
        if (contains(z)) upper = dist(x, z);
        return {lower, std::max(lower, upper)};
    }
    State project(std::span<const double> y) const override
    {
        if (contains(y)) return State(y.begin(), y.end());
        return dykstra(y);
    }
    double boundary_distance(std::span<const double> x) const override
    {
        if (!contains(x)) return distance(x);
        double best = kInfTime;
        for (const auto& m : members_) best = std::min(best, m.boundary_distance(x));
        return best;
    }

private:
    // Dykstra's alternating projections (exact projection for convex members),
    // capped at 50 sweeps.
    State dykstra(std::span<const double> y) const
    {
        const std::size_t m = members_.size();
        State x(y.begin(), y.end());
        std::vector<State> incr(m, State(x.size(), 0.0));
        for (int sweep = 0; sweep < 50; ++sweep) {
            State before = x;
            for (std::size_t j = 0; j < m; ++j) {
                State shifted = x;
                for (std::size_t i = 0; i < x.size(); ++i) shifted[i] += incr[j][i];
                State p = members_[j].project(shifted);
                for (std::size_t i = 0; i < x.size(); ++i) incr[j][i] = shifted[i] - p[i];
                x = std::move(p);
            }
            if (dist(before, x) <= 1e-14 * std::max(1.0, norm(x)) && contains(x)) break;
        }
        return x;
    }

    std::vector<SetOracle> members_;
};

class UnionNode final : public SetNode {
public:
    UnionNode(std::vector<SetOracle> members, std::size_t dim) : members_(std::move(members)), dim_(dim)
    {
        for (const auto& m : members_)
            if (m.dim() != dim_) throw std::invalid_argument("union: member dimension mismatch");
    }
    SetKind kind() const override { return SetKind::union_of; }
    std::size_t dim() const override { return dim_; }
    bool contains(std::span<const double> x) const override
    {
        for (const auto& m : members_)
            if (m.contains(x)) return true;
        return false;
    }
    double distance(std::span<const double> x) const override
    {
        double d = kInfTime;
        for (const auto& m : members_) d = std::min(d, m.distance(x));
        return d;
    }
    State project(std::span<const double> y) const override
    {
        if (members_.empty()) throw Unsupported("projection onto the empty set");
        std::size_t best_j = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < members_.size(); ++j) {
            const double d = members_[j].distance(y);
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        return members_[best_j].project(y);
    }
    /// For x in the union this is a lower bound (largest boundary distance
    /// among members containing x).
    double boundary_distance(std::span<const double> x) const override
    {
        if (!contains(x)) return distance(x);
        double best = 0.0;
        for (const auto& m : members_)
            if (m.contains(x)) best = std::max(best, m.boundary_distance(x));
        return best;
    }

private:
    std::vector<SetOracle> members_;
    std::size_t dim_;
};

class ComplementNode final : public SetNode {
public:
    explicit ComplementNode(SetOracle inner) : inner_(std::move(inner)) {}
    SetKind kind() const override { return SetKind::complement; }
    std::size_t dim() const override { return inner_.dim(); }

    bool contains(std::span<const double> x) const override
    {
        return !inner_.contains(x) || inner_.boundary_distance(x) <= 0.0;
    }
    double distance(std::span<const double> x) const override
    {
        return inner_.contains(x) ? inner_.boundary_distance(x) : 0.0;
    }
    State project(std::span<const double> y) const override
    {
        if (contains(y)) return State(y.begin(), y.end());
        return SetNode::of(inner_).project_to_boundary(y);
    }
    double boundary_distance(std::span<const double> x) const override
    {
        return inner_.boundary_distance(x);
    }

private:
    SetOracle inner_;
};

}  // namespace

namespace detail {
const SetNode& SetNode::of(const SetOracle& k)
{
    if (!k.node_) throw std::logic_error("empty SetOracle handle");
    return *k.node_;
}
}  // namespace detail

// ---- SetOracle facade ---------------------------------------------------------

std::size_t SetOracle::dim() const { return SetNode::of(*this).dim(); }
SetKind SetOracle::kind() const { return SetNode::of(*this).kind(); }
bool SetOracle::contains(std::span<const double> x) const { return SetNode::of(*this).contains(x); }
double SetOracle::distance(std::span<const double> x) const { return SetNode::of(*this).distance(x); }
DistanceBounds SetOracle::distance_bounds(std::span<const double> x) const
{
    return SetNode::of(*this).distance_bounds(x);
}
State SetOracle::project(std::span<const double> y) const { return SetNode::of(*this).project(y); }
double SetOracle::boundary_distance(std::span<const double> x) const
{
    return SetNode::of(*this).boundary_distance(x);
}

SetOracle SetOracle::box(State lo, State hi)
{
    return SetOracle(std::make_shared<BoxNode>(std::move(lo), std::move(hi)));
}

SetOracle SetOracle::whole_space(std::size_t dim)
{
    const double inf = std::numeric_limits<double>::infinity();
    return box(State(dim, -inf), State(dim, inf));
}

SetOracle SetOracle::ball(State center, double radius)
{
    return SetOracle(std::make_shared<BallNode>(std::move(center), radius));
}

SetOracle SetOracle::sphere(State center, double radius)
{
    return SetOracle(std::make_shared<SphereNode>(std::move(center), radius));
}

SetOracle SetOracle::halfspace(State a, double b)
{
    return SetOracle(std::make_shared<HalfspaceNode>(std::move(a), b));
}

SetOracle SetOracle::point_cloud(PointCloud cloud)
{
    return SetOracle(std::make_shared<CloudNode>(std::move(cloud)));
}

SetOracle SetOracle::sublevel(std::size_t dim, std::function<double(std::span<const double>)> g)
{
    return SetOracle(std::make_shared<SublevelNode>(dim, std::move(g)));
}

SetOracle SetOracle::empty(std::size_t dim) { return union_of({}, dim); }

SetOracle SetOracle::product(std::vector<SetOracle> factors)
{
    return SetOracle(std::make_shared<ProductNode>(std::move(factors)));
}

SetOracle SetOracle::intersection(std::vector<SetOracle> members)
{
    return SetOracle(std::make_shared<IntersectionNode>(std::move(members)));
}

SetOracle SetOracle::union_of(std::vector<SetOracle> members, std::size_t dim)
{
    return SetOracle(std::make_shared<UnionNode>(std::move(members), dim));
}

SetOracle SetOracle::complement(SetOracle k)
{
    return SetOracle(std::make_shared<ComplementNode>(std::move(k)));
}

// ---- cone and limit tests -------------------------------------------------------

double tangent_residual(const SetOracle& k, std::span<const double> x, std::span<const double> v,
                        double h_min, double h_max)
{
    if (!(h_min > 0.0 && h_min < h_max)) throw std::invalid_argument("tangent_residual: need 0 < h_min < h_max");
    double best = std::numeric_limits<double>::infinity();
    State probe(x.size());
    for (double h = h_max; h >= h_min; h *= 0.5) {
        for (std::size_t i = 0; i < x.size(); ++i) probe[i] = x[i] + h * v[i];
        best = std::min(best, k.distance(probe) / h);
        if (best == 0.0) break;
    }
    return best;
}

PointCloud set_limit(const std::vector<PointCloud>& clouds, LimitMode mode, double eps)
{
    if (clouds.size() < 2) throw std::invalid_argument("set_limit: need at least two clouds");
    const std::size_t first = clouds.size() / 2;
    const std::size_t tail = clouds.size() - first;

    std::vector<State> kept;
    for (std::size_t c = first; c < clouds.size(); ++c) {
        for (std::size_t i = 0; i < clouds[c].size(); ++i) {
            auto p = clouds[c].point(i);
            std::size_t hits = 0;
            for (std::size_t d = first; d < clouds.size(); ++d)
                if (clouds[d].tree().any_within(p, eps)) ++hits;
            const bool keep = mode == LimitMode::lower ? hits == tail : 2 * hits >= tail;
            if (keep) kept.emplace_back(p.begin(), p.end());
        }
    }
    return PointCloud(std::move(kept), eps);
}

}  // namespace viab
