#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "viab/characteristics.hpp"
#include "viab/demo4d.hpp"
#include "viab/epi_hj.hpp"
#include "viab/grid.hpp"
#include "viab/sets.hpp"

namespace viab::cli {

using json = nlohmann::json;

/// A malformed or missing entry; `what()` starts with the dotted path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& msg) : std::runtime_error(path + ": " + msg) {}
};

/// Reads and parses the file; JSON syntax errors carry line and column.
json load_config(const std::string& path);

/// A view of one JSON node together with its dotted path, for diagnostics.
class Node {
public:
    Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

    const json& raw() const { return *j_; }
    const std::string& path() const { return path_; }

    bool has(const std::string& key) const;
    Node at(const std::string& key) const;
    Node at(std::size_t i) const;
    std::size_t size() const;

    /// Numbers, or the strings "inf" / "-inf".
    double number() const;
    double number(const std::string& key, double fallback) const;
    std::size_t count() const;
    std::string string() const;
    State vec() const;
    std::vector<State> vecs() const;

    [[noreturn]] void fail(const std::string& msg) const;

private:
    const json* j_;
    std::string path_;
};

VectorField parse_field(const Node& n);
SetOracle parse_set(const Node& n);
GridSpec parse_grid(const Node& n);

/// {"f": field, "l": ..., "a": ..., "u": ..., "value_cap": ...}
LagrangianProblem parse_problem(const Node& root);

/// Affine data  const + s_coef * s + x . coef  (the s term only for boundary data).
struct AffineData {
    double c0 = 0.0;
    double s_coef = 0.0;
    State coef;

    double operator()(double s, std::span<const double> x) const;
};
AffineData parse_affine(const Node& n, std::size_t dim);

/// Characteristic problem for pde-char / pde-graph.
CharProblem parse_char_problem(const Node& root);

Demo4d parse_demo4d(const Node& root);

}  // namespace viab::cli
