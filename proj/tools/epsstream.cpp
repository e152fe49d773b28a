#include "epsstream/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace epsstream;

namespace {

struct ConfigFlags {
    std::string family = "halfplane";
    std::string eps = "1/4";
    std::string c = "1";
    std::optional<std::size_t> cap;
    std::optional<std::int64_t> scale;

    void add_to(CLI::App* app) {
        app->add_option("--family", family, "range family: halfplane quadrant wedge dwedge disk slab vpar");
        app->add_option("--eps", eps, "approximation parameter in (0,1)");
        app->add_option("--c", c, "schedule exponent, w_k = k^(-1-c)");
        app->add_option("--cap", cap, "oracle size cap for the family");
        app->add_option("--scale", scale, "lattice points per unit (default: EPS_STREAM_SCALE or 2^20)");
    }

    EngineConfig resolve() const {
        EngineConfig cfg;
        const FamilyKind kind = parse_family(family);
        cfg.family = RangeFamily(kind, cap.value_or(default_oracle_cap(kind)));
        cfg.eps = parse_rational(eps);
        cfg.c = parse_rational(c);
        cfg.scale = scale ? CoordinateScale(*scale) : CoordinateScale::from_environment();
        cfg.validate();
        return cfg;
    }
};

struct SourceFlags {
    std::string state, snapshot;

    void add_to(CLI::App* app) {
        app->add_option("--state", state, "engine state written by build");
        app->add_option("--snapshot", snapshot, "snapshot written by build");
    }

    Snapshot load() const {
        if (!snapshot.empty()) return snapshot_from_json(cli::read_json_file(snapshot));
        if (!state.empty()) return StreamEngine::from_json(cli::read_json_file(state)).snapshot();
        throw std::invalid_argument("give --state or --snapshot");
    }
};

void add_stat_flags(CLI::App* app, cli::StatRequest& req) {
    app->add_option("name", req.name, "which statistic")->required();
    app->add_option("--point", req.point, "query point x,y");
    app->add_option("--line", req.line, "line slope,intercept");
    app->add_option("--slope", req.slope, "slope value");
    app->add_option("--delta", req.delta, "wedge fraction for simplicial depth (default sqrt(eps))");
    app->add_option("--fraction", req.fraction, "mass fraction for the LMS oracles (default 1/2)");
    app->add_option("--range", req.range, "range descriptor kind:params");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic streaming eps-approximations for planar range spaces"};
    app.require_subcommand(1);

    ConfigFlags build_cfg;
    std::string build_input, build_state, build_snapshot, build_resume;
    auto* build = app.add_subcommand("build", "stream points into an engine and write its state and snapshot");
    build_cfg.add_to(build);
    build->add_option("--input", build_input, "points file, one x,y per line (default stdin)");
    build->add_option("--state-out", build_state, "write engine state here");
    build->add_option("--snapshot-out", build_snapshot, "write the snapshot here");
    build->add_option("--resume", build_resume, "continue from a saved engine state");

    SourceFlags query_src;
    std::string query_file;
    auto* query = app.add_subcommand("query", "answer count/iceberg/net queries, one JSON line each");
    query_src.add_to(query);
    query->add_option("--queries", query_file, "query file (default stdin)");

    SourceFlags stats_src;
    cli::StatRequest stats_req;
    auto* stats = app.add_subcommand("stats", "robust statistics on a snapshot");
    stats_src.add_to(stats);
    add_stat_flags(stats, stats_req);

    std::string oracle_input;
    std::optional<std::int64_t> oracle_scale;
    cli::StatRequest oracle_req;
    auto* oracle = app.add_subcommand("oracle", "exact reference values on raw points");
    oracle->add_option("--input", oracle_input, "points file (default stdin)");
    oracle->add_option("--scale", oracle_scale, "lattice points per unit");
    add_stat_flags(oracle, oracle_req);

    ConfigFlags bench_cfg;
    std::vector<std::size_t> bench_sizes;
    std::string bench_input;
    bool bench_no_timing = false;
    auto* bench = app.add_subcommand("bench", "CSV of space and exact error against stream length");
    bench_cfg.add_to(bench);
    bench->add_option("--sizes", bench_sizes, "stream lengths")->required()->delimiter(',');
    bench->add_option("--input", bench_input, "points file (default: a fixed Halton sequence)");
    bench->add_flag("--no-timing", bench_no_timing, "leave runtime_ms empty");

    SourceFlags net_src;
    auto* net = app.add_subcommand("net", "print the eps-net of a snapshot");
    net_src.add_to(net);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kConfig;
    }

    try {
        if (*build) {
            std::optional<StreamEngine> engine;
            if (!build_resume.empty()) {
                engine.emplace(StreamEngine::from_json(cli::read_json_file(build_resume)));
            } else {
                engine.emplace(build_cfg.resolve());
            }
            const CoordinateScale scale = engine->config().scale;
            const cli::BuildResult r = cli::run_build(cli::read_points_file(build_input, scale), std::move(*engine));
            if (!build_state.empty()) cli::write_file(build_state, r.engine.to_json().dump() + "\n");
            if (!build_snapshot.empty()) cli::write_file(build_snapshot, snapshot_to_json(r.snapshot).dump() + "\n");
            std::cout << cli::build_summary(r).dump() << '\n';
            return cli::kOk;
        }
        if (*query) {
            const Snapshot snap = query_src.load();
            if (query_file.empty() || query_file == "-") return cli::run_query(snap, std::cin, std::cout);
            std::ifstream in(query_file);
            if (!in) throw std::invalid_argument("cannot open " + query_file);
            return cli::run_query(snap, in, std::cout);
        }
        if (*stats) {
            std::cout << cli::run_stat(stats_src.load(), stats_req).dump() << '\n';
            return cli::kOk;
        }
        if (*oracle) {
            const CoordinateScale scale = oracle_scale ? CoordinateScale(*oracle_scale) : CoordinateScale::from_environment();
            std::cout << cli::run_oracle(cli::read_points_file(oracle_input, scale), scale, oracle_req).dump() << '\n';
            return cli::kOk;
        }
        if (*bench) {
            const EngineConfig cfg = bench_cfg.resolve();
            std::size_t longest = 0;
            for (std::size_t n : bench_sizes) longest = std::max(longest, n);
            const std::vector<Point2> stream = bench_input.empty() ? cli::halton_points(longest, cfg.scale)
                                                                   : cli::read_points_file(bench_input, cfg.scale);
            cli::run_bench(cfg, bench_sizes, stream, std::cout, !bench_no_timing);
            return cli::kOk;
        }
        if (*net) {
            std::cout << cli::net_json(net_src.load()).dump() << '\n';
            return cli::kOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "epsstream: " << e.what() << '\n';
        return cli::exit_code_for(e);
    }
    return cli::kOk;
}
