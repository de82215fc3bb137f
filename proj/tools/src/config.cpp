#include "config.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "viab/fields.hpp"

namespace viab::cli {

json load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path, e.what());
    }
}

bool Node::has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

Node Node::at(const std::string& key) const
{
    if (!j_->is_object()) fail("expected an object");
    const auto it = j_->find(key);
    if (it == j_->end()) throw ConfigError(path_.empty() ? key : path_ + "." + key, "missing section");
    return Node(*it, path_.empty() ? key : path_ + "." + key);
}

Node Node::at(std::size_t i) const
{
    if (!j_->is_array() || i >= j_->size()) fail("expected an array with at least " + std::to_string(i + 1) + " entries");
    return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]");
}

std::size_t Node::size() const
{
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
}

double Node::number() const
{
    if (j_->is_number()) return j_->get<double>();
    if (j_->is_string()) {
        const auto s = j_->get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    fail("expected a number (or \"inf\" / \"-inf\")");
}

double Node::number(const std::string& key, double fallback) const
{
    return has(key) ? at(key).number() : fallback;
}

std::size_t Node::count() const
{
    if (!j_->is_number_unsigned() && !(j_->is_number_integer() && j_->get<long long>() >= 0))
        fail("expected a non-negative integer");
    return j_->get<std::size_t>();
}

std::string Node::string() const
{
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
}

State Node::vec() const
{
    State out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
    return out;
}

std::vector<State> Node::vecs() const
{
    std::vector<State> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).vec());
    return out;
}

void Node::fail(const std::string& msg) const { throw ConfigError(path_.empty() ? "<root>" : path_, msg); }

VectorField parse_field(const Node& n)
{
    if (n.has("polynomial")) {
        const Node poly = n.at("polynomial");
        const std::size_t dim = poly.at("dim").count();
        const Node comps = poly.at("components");
        if (comps.size() != dim) comps.fail("needs one entry per state component");
        std::vector<std::vector<fields::Monomial>> out(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            const Node terms = comps.at(i);
            for (std::size_t k = 0; k < terms.size(); ++k) {
                const Node term = terms.at(k);
                fields::Monomial m;
                m.coef = term.at("coef").number();
                const Node pw = term.at("powers");
                if (pw.size() != dim) pw.fail("needs one power per state component");
                for (std::size_t j = 0; j < dim; ++j) m.powers.push_back(static_cast<int>(pw.at(j).count()));
                out[i].push_back(std::move(m));
            }
        }
        return fields::polynomial(dim, std::move(out));
    }

    const std::string name = n.at("builtin").string();
    if (name == "zero") return fields::zero(n.has("dim") ? n.at("dim").count() : 1);
    if (name == "linear") return fields::scalar_linear(n.at("k").number(), n.has("dim") ? n.at("dim").count() : 1);
    if (name == "affine") {
        const State a = n.at("a").vec();
        const State b = n.at("b").vec();
        if (a.size() != b.size() * b.size()) n.at("a").fail("must hold dim*dim entries (row-major)");
        return fields::affine(a, b);
    }
    if (name == "rotation") return fields::rotation(n.number("omega", 1.0));
    if (name == "transport") return fields::transport(n.at("velocity").vec());
    if (name == "logistic") return fields::logistic(n.at("beta").number(), n.at("b").number());
    if (name == "demographic4d")
        return fields::demographic4d(n.at("rho").number(), n.at("sigma").number(), n.at("beta").number(),
                                     n.at("b").number());
    n.at("builtin").fail("unknown field '" + name +
                         "' (expected zero, linear, affine, rotation, transport, logistic, demographic4d)");
}

SetOracle parse_set(const Node& n)
{
    if (!n.raw().is_object() || n.raw().size() != 1)
        n.fail("a set is an object with exactly one kind key (box, ball, sphere, halfspace, product, "
               "intersection, union, complement, point_cloud, whole_space, empty)");
    const std::string kind = n.raw().begin().key();
    const Node body = n.at(kind);

    auto members = [&] {
        std::vector<SetOracle> out;
        for (std::size_t i = 0; i < body.size(); ++i) out.push_back(parse_set(body.at(i)));
        if (out.empty()) body.fail("needs at least one member");
        return out;
    };

    if (kind == "box") {
        State lo = body.at("lo").vec(), hi = body.at("hi").vec();
        if (lo.size() != hi.size()) body.fail("lo and hi differ in length");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (lo[i] > hi[i]) body.fail("lo must not exceed hi");
        return SetOracle::box(std::move(lo), std::move(hi));
    }
    if (kind == "ball" || kind == "sphere") {
        const double r = body.at("radius").number();
        if (!(r >= 0.0)) body.at("radius").fail("must be >= 0");
        return kind == "ball" ? SetOracle::ball(body.at("center").vec(), r)
                              : SetOracle::sphere(body.at("center").vec(), r);
    }
    if (kind == "halfspace") return SetOracle::halfspace(body.at("a").vec(), body.at("b").number());
    if (kind == "product") return SetOracle::product(members());
    if (kind == "intersection") return SetOracle::intersection(members());
    if (kind == "union") {
        auto m = members();
        const std::size_t dim = m.front().dim();
        return SetOracle::union_of(std::move(m), dim);
    }
    if (kind == "complement") return SetOracle::complement(parse_set(body));
    if (kind == "point_cloud")
        return SetOracle::point_cloud(PointCloud(body.at("points").vecs(), body.number("tol", 0.0)));
    if (kind == "whole_space") return SetOracle::whole_space(body.count());
    if (kind == "empty") return SetOracle::empty(body.count());
    n.fail("unknown set kind '" + kind + "'");
}

GridSpec parse_grid(const Node& n)
{
    std::vector<std::size_t> counts;
    const Node c = n.at("counts");
    for (std::size_t i = 0; i < c.size(); ++i) counts.push_back(c.at(i).count());
    State lo = n.at("lo").vec(), hi = n.at("hi").vec();
    try {
        GridSpec grid(std::move(lo), std::move(hi), std::move(counts));
        grid.validate();
        return grid;
    } catch (const std::invalid_argument& e) {
        n.fail(e.what());
    }
}

LagrangianProblem parse_problem(const Node& root)
{
    LagrangianProblem p;
    p.f = parse_field(root.at("field"));
    p.a = root.number("a", 0.0);
    p.value_cap = root.number("value_cap", p.value_cap);

    if (root.has("l")) {
        const Node l = root.at("l");
        if (l.has("constant")) {
            const double c = l.at("constant").number();
            p.l = [c](std::span<const double>, std::span<const double>) { return c; };
        } else if (l.has("speed")) {
            const double c = l.at("speed").number();
            p.l = [c](std::span<const double>, std::span<const double> v) { return c * norm(v); };
        } else {
            l.fail("expected {\"constant\": c} or {\"speed\": c}");
        }
    }
    if (root.has("u")) {
        const Node u = root.at("u");
        if (u.has("norm")) {
            const double c = u.at("norm").number();
            p.u = [c](std::span<const double> x) { return c * norm(x); };
        } else if (u.has("constant")) {
            const double c = u.at("constant").number();
            p.u = [c](std::span<const double>) { return c; };
        } else if (u.has("indicator")) {
            p.u = indicator(parse_set(u.at("indicator")));
        } else {
            u.fail("expected {\"norm\": c}, {\"constant\": c} or {\"indicator\": set}");
        }
    }
    return p;
}

double AffineData::operator()(double s, std::span<const double> x) const
{
    double v = c0 + s_coef * s;
    for (std::size_t i = 0; i < coef.size() && i < x.size(); ++i) v += coef[i] * x[i];
    return v;
}

AffineData parse_affine(const Node& n, std::size_t dim)
{
    AffineData d;
    d.c0 = n.number("const", 0.0);
    d.s_coef = n.number("s", 0.0);
    if (n.has("x")) {
        d.coef = n.at("x").vec();
        if (d.coef.size() != dim) n.at("x").fail("needs " + std::to_string(dim) + " coefficients");
    }
    return d;
}

CharProblem parse_char_problem(const Node& root)
{
    CharProblem prob;
    prob.phi = parse_field(root.at("field"));
    prob.k = parse_set(root.at("K"));
    const std::size_t n = prob.phi.dim;
    if (prob.k.dim() != n) root.at("K").fail("dimension differs from the field");
    prob.output_dim = 1;

    if (root.has("f")) {
        const std::string kind = root.at("f").string();
        if (kind != "output") root.at("f").fail("only \"output\" (x' = y) is supported");
        if (n != 1) root.at("f").fail("x' = y needs a one-dimensional state");
        prob.f = [](double, std::span<const double>, std::span<const double> y) { return State{y[0]}; };
    }

    double lambda = 0.0, g0 = 0.0;
    if (root.has("g")) {
        const Node g = root.at("g");
        lambda = g.number("linear", 0.0);
        g0 = g.number("constant", 0.0);
    }
    prob.g = [lambda, g0](double, std::span<const double>, std::span<const double> y) {
        return State{lambda * y[0] + g0};
    };

    const AffineData u0 = parse_affine(root.at("u0"), n);
    prob.data.u0 = [u0](std::span<const double> x) { return State{u0(0.0, x)}; };
    if (root.has("v_gamma")) {
        const AffineData v = parse_affine(root.at("v_gamma"), n);
        prob.data.v_gamma = [v](double s, std::span<const double> xi) { return State{v(s, xi)}; };
    }
    if (root.has("impulse_times")) prob.data.impulse_times = root.at("impulse_times").vec();
    prob.x_tol = root.number("x_tol", prob.x_tol);
    return prob;
}

Demo4d parse_demo4d(const Node& root)
{
    Demo4dParams params;
    if (root.has("params")) {
        const Node p = root.at("params");
        params.rho = p.number("rho", params.rho);
        params.sigma = p.number("sigma", params.sigma);
        params.beta = p.number("beta", params.beta);
        params.b = p.number("b", params.b);
        params.r2 = p.number("r2", params.r2);
    }
    const AffineData u0 = parse_affine(root.at("u0"), 4);
    const AffineData v1 = parse_affine(root.at("v1"), 3);
    const AffineData v_r2 = parse_affine(root.at("v_r2"), 3);
    try {
        Demo4d d(
            params, [u0](std::span<const double> x) { return u0(0.0, x); },
            [v1](double s, std::span<const double> r) { return v1(s, r); },
            [v_r2](double s, std::span<const double> r) { return v_r2(s, r); });
        d.set_rate(root.number("A", 0.0));
        return d;
    } catch (const std::invalid_argument& e) {
        (root.has("params") ? root.at("params") : root).fail(e.what());
    }
}

}  // namespace viab::cli
