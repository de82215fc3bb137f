#include "viab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "config.hpp"
#include "viab/csv.hpp"
#include "viab/dynamics.hpp"
#include "viab/kernels.hpp"

namespace viab::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
    Node root;
    fs::path out_dir;
    Exec exec;
    std::ostream& log;

    std::ofstream open(const std::string& name) const
    {
        const fs::path path = out_dir / name;
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write " + path.string());
        log << "wrote " << path.string() << "\n";
        return os;
    }

    double horizon() const { return root.at("T_max").number(); }
    double step() const
    {
        const double h = root.at("h").number();
        if (!(h > 0.0)) root.at("h").fail("must be > 0");
        return h;
    }
};

std::vector<std::string> state_columns(std::size_t n, const char* prefix = "x")
{
    std::vector<std::string> cols;
    for (std::size_t i = 0; i < n; ++i) cols.push_back(prefix + std::to_string(i + 1));
    return cols;
}

/// "points" when present, otherwise the nodes of "grid".
std::vector<State> points_or_grid(const Node& root)
{
    if (root.has("points")) return root.at("points").vecs();
    const GridSpec grid = parse_grid(root.at("grid"));
    std::vector<State> pts;
    for (std::size_t i = 0; i < grid.size(); ++i) pts.push_back(grid.node(i));
    return pts;
}

void check_dims(const Node& where, const std::vector<State>& pts, std::size_t dim)
{
    for (const auto& p : pts)
        if (p.size() != dim) where.fail("every point needs " + std::to_string(dim) + " coordinates");
}

std::vector<double> per_point(const std::vector<State>& pts, Exec exec,
                              const std::function<double(const State&)>& fn)
{
    std::vector<double> out(pts.size());
    parallel_for(pts.size(), exec, [&](std::size_t i) { out[i] = fn(pts[i]); });
    return out;
}

void write_point_values(std::ostream& os, const std::vector<State>& pts, const std::vector<double>& values,
                        std::size_t dim)
{
    auto cols = state_columns(dim);
    cols.push_back("value");
    csv::write_header(os, cols);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        csv::Row row(os);
        for (double v : pts[i]) row << v;
        row << values[i];
    }
}

// ---- dynamics ---------------------------------------------------------------

void cmd_integrate(Context& ctx)
{
    const auto f = parse_field(ctx.root.at("field"));
    const State x0 = ctx.root.at("x0").vec();
    if (x0.size() != f.dim) ctx.root.at("x0").fail("dimension differs from the field");
    const double t0 = ctx.root.number("t0", 0.0);
    const auto traj = integrate(f, x0, t0, t0 + ctx.root.at("T").number(), ctx.step());
    auto os = ctx.open("trajectory.csv");
    write_trajectory_csv(os, traj);
}

void cmd_flow(Context& ctx)
{
    const auto f = parse_field(ctx.root.at("field"));
    const State x0 = ctx.root.at("x0").vec();
    if (x0.size() != f.dim) ctx.root.at("x0").fail("dimension differs from the field");
    const double t = ctx.root.at("t").number();
    const State x = flow(f, t, x0, ctx.step());
    auto os = ctx.open("flow.csv");
    auto cols = state_columns(f.dim);
    cols.insert(cols.begin(), "t");
    csv::write_header(os, cols);
    csv::Row row(os);
    row << t;
    for (double v : x) row << v;
}

void cmd_reach(Context& ctx)
{
    const auto f = parse_field(ctx.root.at("field"));
    const auto seeds = ctx.root.at("seeds").vecs();
    check_dims(ctx.root.at("seeds"), seeds, f.dim);
    const auto image = reach_set(f, ctx.root.at("t").number(), seeds, ctx.step(), ctx.exec);
    auto os = ctx.open("reach.csv");
    auto cols = state_columns(f.dim);
    cols.push_back("ok");
    csv::write_header(os, cols);
    for (const auto& p : image) {
        csv::Row row(os);
        for (std::size_t i = 0; i < f.dim; ++i) row << (p.ok ? p.x[i] : std::numeric_limits<double>::quiet_NaN());
        row << (p.ok ? 1.0 : 0.0);
    }
}

// ---- kernels ----------------------------------------------------------------

void cmd_exit_time(Context& ctx, bool hitting)
{
    const auto f = parse_field(ctx.root.at("field"));
    const auto set = parse_set(ctx.root.at(hitting ? "C" : "K"));
    const auto pts = points_or_grid(ctx.root);
    check_dims(ctx.root, pts, f.dim);
    const double t_max = ctx.horizon(), h = ctx.step();
    const auto values = per_point(pts, ctx.exec, [&](const State& x) {
        return hitting ? hitting_time(f, set, x, t_max, h) : exit_time(f, set, x, t_max, h);
    });
    auto os = ctx.open(hitting ? "hitting_time.csv" : "exit_time.csv");
    write_point_values(os, pts, values, f.dim);
}

void cmd_time_field(Context& ctx, const std::string& kind)
{
    const auto f = parse_field(ctx.root.at("field"));
    const auto grid = parse_grid(ctx.root.at("grid"));
    if (grid.dim() != f.dim) ctx.root.at("grid").fail("dimension differs from the field");
    const double t_max = ctx.horizon(), h = ctx.step();
    TimeField tf;
    if (kind == "viab") {
        tf = viab_field(f, parse_set(ctx.root.at("K")), grid, t_max, h, ctx.exec);
    } else if (kind == "capt") {
        tf = capt_field(f, parse_set(ctx.root.at("C")), grid, t_max, h, ctx.exec);
    } else {
        tf = viable_capt_field(f, parse_set(ctx.root.at("K")), parse_set(ctx.root.at("C")), grid, t_max, h,
                               ctx.exec);
    }
    std::string name = kind;
    std::replace(name.begin(), name.end(), '-', '_');
    auto os = ctx.open(name + ".csv");
    write_time_field_csv(os, tf);
    if (kind == "viab") ctx.log << "nodes with exit time >= T_max: " << tf.at_least(t_max).size() << "\n";
}

void cmd_kernel(Context& ctx)
{
    const auto f = parse_field(ctx.root.at("field"));
    const auto grid = parse_grid(ctx.root.at("grid"));
    if (grid.dim() != f.dim) ctx.root.at("grid").fail("dimension differs from the field");
    const auto mask = discrete_kernel(f, parse_set(ctx.root.at("K")), grid, ctx.step(), ctx.exec);
    auto os = ctx.open("kernel.csv");
    auto cols = state_columns(f.dim);
    cols.push_back("survives");
    csv::write_header(os, cols);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv::Row row(os);
        for (double v : grid.node(i)) row << v;
        row << (mask.survivors[i] ? 1.0 : 0.0);
    }
    ctx.log << "survivors: " << mask.indices().size() << " after " << mask.passes << " passes\n";
}

// ---- epi_hj -----------------------------------------------------------------

void cmd_value(Context& ctx, const std::string& kind)
{
    const auto p = parse_problem(ctx.root);
    const auto pts = points_or_grid(ctx.root);
    check_dims(ctx.root, pts, p.f.dim);
    const double t_max = ctx.horizon(), h = ctx.step();
    const auto values = per_point(pts, ctx.exec, [&](const State& x) {
        if (kind == "value-sup") return value_sup(p, x, t_max, h);
        if (kind == "value-inf") return value_inf(p, x, t_max, h);
        return lyapunov(p, x, t_max, h);
    });
    std::string name = kind;
    std::replace(name.begin(), name.end(), '-', '_');
    {
        auto os = ctx.open(name + ".csv");
        write_point_values(os, pts, values, p.f.dim);
    }

    if (kind != "lyapunov" && ctx.root.has("epigraph_grid")) {
        const auto grid = parse_grid(ctx.root.at("epigraph_grid"));
        if (grid.dim() != p.f.dim + 1) ctx.root.at("epigraph_grid").fail("needs one axis per state plus the y axis");
        const ValueMode mode = kind == "value-sup" ? ValueMode::sup : ValueMode::inf;
        const auto env = epigraph_value_field(p, grid, mode, t_max, h, ctx.exec);
        auto os = ctx.open(kind == "value-sup" ? "epigraph_sup.csv" : "epigraph_inf.csv");
        write_value_field_csv(os, env);
    }
}

void cmd_minimal(Context& ctx, bool length)
{
    const auto f = parse_field(ctx.root.at("field"));
    const auto target = parse_set(ctx.root.at("C"));
    const auto pts = points_or_grid(ctx.root);
    check_dims(ctx.root, pts, f.dim);
    const double t_max = ctx.horizon(), h = ctx.step();
    const auto values = per_point(pts, ctx.exec, [&](const State& x) {
        return length ? minimal_length(f, target, x, t_max, h) : minimal_time(f, target, x, t_max, h);
    });
    auto os = ctx.open(length ? "minlength.csv" : "mintime.csv");
    write_point_values(os, pts, values, f.dim);
}

void cmd_hj_check(Context& ctx)
{
    const auto p = parse_problem(ctx.root);
    const std::string mode = ctx.root.at("mode").string();
    if (mode != "sup" && mode != "inf") ctx.root.at("mode").fail("expected \"sup\" or \"inf\"");
    const auto grid = parse_grid(ctx.root.at("grid"));
    if (grid.dim() != p.f.dim) ctx.root.at("grid").fail("dimension differs from the field");
    const double t_max = ctx.horizon(), h = ctx.step();

    ValueField v{grid, std::vector<double>(grid.size())};
    parallel_for(grid.size(), ctx.exec, [&](std::size_t i) {
        const State x = grid.node(i);
        v.values[i] = mode == "sup" ? value_sup(p, x, t_max, h) : value_inf(p, x, t_max, h);
    });
    std::vector<State> samples;
    if (ctx.root.has("samples")) {
        samples = ctx.root.at("samples").vecs();
        check_dims(ctx.root.at("samples"), samples, p.f.dim);
    } else {
        // Interior nodes: the one-sided quotients need room on both sides.
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto idx = grid.unflatten(i);
            bool interior = true;
            for (std::size_t a = 0; a < grid.dim(); ++a)
                interior = interior && idx[a] >= 3 && idx[a] + 3 < grid.counts[a];
            if (interior) samples.push_back(grid.node(i));
        }
    }
    const double tol = ctx.root.number("tol", 0.05);
    const auto report = mode == "sup" ? hj_check_sup(p, v, samples, tol) : hj_check_inf(p, v, samples, tol);
    {
        auto os = ctx.open("hj_value.csv");
        write_value_field_csv(os, v);
    }
    auto os = ctx.open("hj_report.csv");
    write_hj_report_csv(os, report);
    ctx.log << "violations: " << report.violations << " of " << report.samples.size() << "\n";
}

// ---- characteristics --------------------------------------------------------

void cmd_pde_char(Context& ctx)
{
    const auto prob = parse_char_problem(ctx.root);
    const std::size_t n = prob.phi.dim;
    std::vector<TimePoint> queries;
    if (ctx.root.has("queries")) {
        const Node q = ctx.root.at("queries");
        for (const auto& row : q.vecs()) {
            if (row.size() != n + 1) q.fail("each query is [t, x1, ..., xn]");
            queries.push_back({row[0], State(row.begin() + 1, row.end())});
        }
    } else {
        const auto grid = parse_grid(ctx.root.at("eval_grid"));
        if (grid.dim() != n + 1) ctx.root.at("eval_grid").fail("axes are (t, x1, ..., xn)");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const State node = grid.node(i);
            queries.push_back({node[0], State(node.begin() + 1, node.end())});
        }
    }
    for (const auto& q : queries)
        if (!prob.k.contains(q.x) || q.t < 0.0) ctx.root.fail("evaluation points must have t >= 0 and x in K");
    const auto values = solve_char_batch(prob, queries, ctx.step(), ctx.exec);
    auto os = ctx.open("solution.csv");
    write_solution_csv(os, queries, values, prob.output_dim);
}

void cmd_pde_graph(Context& ctx)
{
    const auto prob = parse_char_problem(ctx.root);
    GraphSampleOptions opts;
    opts.seed_grid = parse_grid(ctx.root.at("seed_grid"));
    if (opts.seed_grid.dim() != prob.phi.dim) ctx.root.at("seed_grid").fail("dimension differs from the field");
    opts.tol = ctx.root.number("tol", opts.tol);
    if (ctx.root.has("seeds_per_face")) opts.seeds_per_face = ctx.root.at("seeds_per_face").count();
    opts.exec = ctx.exec;
    const double T = ctx.root.at("T").number();
    const auto cloud = graph_sample(prob, T, ctx.step(), opts);
    {
        auto os = ctx.open("graph.csv");
        write_graph_csv(os, cloud);
    }
    if (!ctx.root.has("graph_queries")) return;

    const Node qs = ctx.root.at("graph_queries");
    auto os = ctx.open("graph_query.csv");
    auto cols = state_columns(prob.phi.dim);
    cols.insert(cols.begin(), "t");
    cols.push_back("cluster");
    for (const auto& c : state_columns(prob.output_dim, "y")) cols.push_back(c);
    csv::write_header(os, cols);
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const Node q = qs.at(i);
        const double t = q.at("t").number();
        const State x = q.at("x").vec();
        const auto clusters = query_graph(cloud, t, x, q.at("radius").number());
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            csv::Row row(os);
            row << t;
            for (double v : x) row << v;
            row << static_cast<double>(c);
            for (double v : clusters[c]) row << v;
        }
        ctx.log << "query " << i << ": " << clusters.size() << " clusters\n";
    }
}

void cmd_demo4d(Context& ctx)
{
    const Demo4d d = parse_demo4d(ctx.root);
    std::size_t per_regime = 67;
    if (ctx.root.has("samples_per_regime")) per_regime = ctx.root.at("samples_per_regime").count();
    const auto seed = static_cast<std::uint64_t>(ctx.root.number("seed", 1.0));
    const auto queries = demo4d_samples(d, per_regime, seed);

    std::vector<double> closed(queries.size());
    std::vector<int> regimes(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        closed[i] = d.solve(queries[i].t, queries[i].x);
        regimes[i] = d.regime(queries[i].t, queries[i].x);
    }
    const auto numeric = solve_char_batch(d.char_problem(), queries, ctx.step(), ctx.exec);

    std::vector<std::string> cols{"t", "x1", "x2", "x3", "x4", "regime"};
    {
        auto os = ctx.open("demo4d.csv");
        auto c = cols;
        c.push_back("u");
        csv::write_header(os, c);
        for (std::size_t i = 0; i < queries.size(); ++i) {
            csv::Row row(os);
            row << queries[i].t;
            for (double v : queries[i].x) row << v;
            row << static_cast<double>(regimes[i]) << closed[i];
        }
    }
    double worst = 0.0;
    auto os = ctx.open("demo4d_diff.csv");
    for (const char* c : {"closed_form", "solve_char", "abs_diff"}) cols.push_back(c);
    csv::write_header(os, cols);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const double num = numeric[i] ? (*numeric[i])[0] : std::numeric_limits<double>::quiet_NaN();
        const double diff = std::abs(num - closed[i]);
        worst = std::max(worst, numeric[i] ? diff : kInfTime);
        csv::Row row(os);
        row << queries[i].t;
        for (double v : queries[i].x) row << v;
        row << static_cast<double>(regimes[i]) << closed[i] << num << diff;
    }
    ctx.log << "max |closed_form - solve_char| = " << csv::format(worst) << "\n";
}

using Handler = std::function<void(Context&)>;

const std::vector<std::pair<std::string, std::string>>& command_table()
{
    static const std::vector<std::pair<std::string, std::string>> table{
        {"integrate", "RK4 trajectory of the field from x0 (trajectory.csv)"},
        {"flow", "flow map theta_f(t, x0), t may be negative (flow.csv)"},
        {"reach", "pointwise image of the seeds at time t (reach.csv)"},
        {"exit-time", "exit time of K at points or grid nodes (exit_time.csv)"},
        {"hitting-time", "hitting time of C at points or grid nodes (hitting_time.csv)"},
        {"viab", "exit-time field of K on the grid (viab.csv)"},
        {"capt", "hitting-time field of C on the grid (capt.csv)"},
        {"viable-capt", "capture margin of C in K on the grid (viable_capt.csv)"},
        {"kernel", "discrete viability kernel of K (kernel.csv)"},
        {"value-sup", "sup value function at points; epigraph field with epigraph_grid (value_sup.csv)"},
        {"value-inf", "inf value function at points; epigraph field with epigraph_grid (value_inf.csv)"},
        {"lyapunov", "Lyapunov value with the descent check (lyapunov.csv)"},
        {"mintime", "minimal time to C (mintime.csv)"},
        {"minlength", "minimal length to C (minlength.csv)"},
        {"hj-check", "Hamilton-Jacobi residuals of the computed value (hj_value.csv, hj_report.csv)"},
        {"pde-char", "single-valued characteristics solution (solution.csv)"},
        {"pde-graph", "sampled solution graph and cluster queries (graph.csv, graph_query.csv)"},
        {"demo4d", "demographic example: closed form vs solve_char (demo4d.csv, demo4d_diff.csv)"},
    };
    return table;
}

Handler handler_for(const std::string& name)
{
    static const std::map<std::string, Handler> handlers{
        {"integrate", cmd_integrate},
        {"flow", cmd_flow},
        {"reach", cmd_reach},
        {"exit-time", [](Context& c) { cmd_exit_time(c, false); }},
        {"hitting-time", [](Context& c) { cmd_exit_time(c, true); }},
        {"viab", [](Context& c) { cmd_time_field(c, "viab"); }},
        {"capt", [](Context& c) { cmd_time_field(c, "capt"); }},
        {"viable-capt", [](Context& c) { cmd_time_field(c, "viable-capt"); }},
        {"kernel", cmd_kernel},
        {"value-sup", [](Context& c) { cmd_value(c, "value-sup"); }},
        {"value-inf", [](Context& c) { cmd_value(c, "value-inf"); }},
        {"lyapunov", [](Context& c) { cmd_value(c, "lyapunov"); }},
        {"mintime", [](Context& c) { cmd_minimal(c, false); }},
        {"minlength", [](Context& c) { cmd_minimal(c, true); }},
        {"hj-check", cmd_hj_check},
        {"pde-char", cmd_pde_char},
        {"pde-graph", cmd_pde_graph},
        {"demo4d", cmd_demo4d},
    };
    return handlers.at(name);
}

}  // namespace

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, _] : command_table()) out.push_back(name);
        return out;
    }();
    return names;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"viabctl: viability kernels, capture basins, value functions and characteristics"};
    app.name("viabctl");
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned workers = 1;
    app.add_option("--out", out_dir, "output directory (default: $VIAB_OUT_DIR, then .)");
    app.add_option("--workers", workers, "worker threads for grid sweeps")->check(CLI::Range(1u, 1024u));

    for (const auto& [name, help] : command_table()) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", config_path, "JSON problem file")->required();
        sub->fallthrough();
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();

    if (out_dir.empty()) {
        if (const char* env = std::getenv(kOutDirEnv); env && *env) out_dir = env;
        else out_dir = ".";
    }

    try {
        const json cfg = load_config(config_path);
        Context ctx{Node(cfg, ""), fs::path(out_dir), Exec{workers}, out};
        fs::create_directories(ctx.out_dir);
        handler_for(command)(ctx);
        return kOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ParamDomain& e) {
        err << "config error: " << command << ": " << e.what() << "\n";
        return kConfigError;
    } catch (const Unsupported& e) {
        err << "config error: " << command << ": " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << command << ": " << e.what() << "\n";
        return kConfigError;
    } catch (const Error& e) {
        // NonFinite, CapTooSmall, NoConvergence, DescentViolation.
        err << "numeric failure in " << command << ": " << e.what() << "\n";
        return kNumericFailure;
    } catch (const std::exception& e) {
        err << "error in " << command << ": " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace viab::cli
