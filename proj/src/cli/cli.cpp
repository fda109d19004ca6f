#include "dsolkit/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "dsolkit/io.hpp"

namespace dsolkit::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct Common {
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::string region_path;
    std::string out_path;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--tol", c.tol, "Residual tolerance");
    sub->add_option("--seed", c.seed, "Sampler seed override");
    sub->add_option("--region", c.region_path, "Region document overriding the one in the input");
    sub->add_option("--out", c.out_path, "Output path");
}

SampleRegion resolve_region(const io::MatrixDocument& doc, const Common& c) {
    SampleRegion r = c.region_path.empty() ? doc.region_or_default()
                                           : io::region_from_json(io::read_json(c.region_path), doc.matrix.variables());
    if (c.seed)
        r.seed = *c.seed;
    return r;
}

std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        try {
            out.push_back(std::stod(item, &used));
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
            throw io::DocumentError("--x0: \"" + item + "\" is not a number");
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f)
        throw io::DocumentError("cannot write " + path);
    f << text;
    if (!f)
        throw io::DocumentError("write failed for " + path);
}

int cmd_verify(const std::string& matrix_path, const Common& c, std::ostream& out) {
    const io::MatrixDocument doc = io::matrix_from_json(io::read_json(matrix_path));
    const SampleRegion region = resolve_region(doc, c);
    const double tol = c.tol.value_or(kDefaultTolerance);
    const auto samples = region.sample();

    const VerificationReport jac = verify_jacobi(doc.matrix, samples, tol);
    const VerificationReport ds = verify_dsolution(doc.matrix, samples, tol);
    CasimirSet casimirs = doc.casimirs;
    const bool casimirs_ok = casimirs.verify(doc.matrix, samples, tol);
    const RankProfile ranks = rank_profile(doc.matrix, samples);

    out << summarize(jac) << '\n' << summarize(ds) << '\n';
    Json casimir_reports = Json::array();
    for (std::size_t k = 0; k < casimirs.size(); ++k) {
        const CasimirEntry& e = casimirs[k];
        out << "casimir " << k + 1 << " [" << e.function.to_string() << "] " << summarize(*e.report) << '\n';
        Json r = io::report_to_json(*e.report);
        r["function"] = e.function.to_string();
        casimir_reports.push_back(r);
    }
    Json rank_counts = Json::object();
    out << "rank profile:";
    for (const auto& [rank, count] : ranks.counts) {
        out << ' ' << rank << 'x' << count;
        rank_counts[std::to_string(rank)] = count;
    }
    out << (ranks.odd_warnings ? " (odd numerical rank at " + std::to_string(ranks.odd_warnings) + " samples)" : "")
        << '\n';

    if (!c.out_path.empty())
        io::write_json(c.out_path, {{"jacobi", io::report_to_json(jac)},
                                    {"dsolution", io::report_to_json(ds)},
                                    {"casimirs", casimir_reports},
                                    {"rank_profile", rank_counts},
                                    {"odd_rank_warnings", ranks.odd_warnings},
                                    {"singular_points", ranks.singular_points}});
    return jac.passed && ds.passed && casimirs_ok ? kExitPass : kExitFail;
}

int cmd_construct(const std::string& dpsi_path, const Common& c, std::ostream& out) {
    if (c.out_path.empty())
        throw io::DocumentError("construct: --out is required");
    const DPsiSpec spec = io::dpsi_from_json(io::read_json(dpsi_path));
    const Construction built = build_dpsi(spec);
    SampleRegion region = c.region_path.empty()
                              ? SampleRegion::cube(built.matrix.variables())
                              : io::region_from_json(io::read_json(c.region_path), built.matrix.variables());
    if (c.seed)
        region.seed = *c.seed;
    io::write_json(c.out_path, io::matrix_to_json(built.matrix, built.casimirs, region));
    out << "wrote " << c.out_path << ": " << built.matrix.upper_entries().size() << " nonzero entries, "
        << built.casimirs.size() << " casimirs\n";
    return kExitPass;
}

int cmd_transform(const std::string& request_path, const Common& c, std::ostream& out) {
    const Json request = io::read_json(request_path);
    const io::TransformOutcome outcome = io::run_transform_request(request, fs::path(request_path).parent_path());
    const TransformResult& r = outcome.result;
    for (const std::string& w : r.warnings)
        out << "warning: " << w << '\n';
    out << outcome.op << ' ' << summarize(r.report) << '\n';
    if (!c.out_path.empty()) {
        Json doc = io::matrix_to_json(r.matrix);
        doc["report"] = io::report_to_json(r.report);
        io::write_json(c.out_path, doc);
    }
    return r.report.passed ? kExitPass : kExitFail;
}

int cmd_reduce(const std::string& family_path, const Common& c, std::ostream& out) {
    const Json doc = io::read_json(family_path);
    std::vector<double> a;
    std::string eta_text;
    try {
        a = doc.at("a").get<std::vector<double>>();
        eta_text = doc.at("eta").get<std::string>();
    } catch (const Json::exception& e) {
        throw io::DocumentError("family: " + std::string(e.what()));
    }
    if (a.size() != 3)
        throw io::DocumentError("family.a: expected three coefficients");
    Expr eta;
    try {
        eta = parse(eta_text, {"y"});
    } catch (const ParseError& e) {
        throw io::DocumentError("family.eta: " + std::string(e.what()));
    }
    const auto x = numbered_names("x", 3);
    SampleRegion region = doc.contains("region") ? io::region_from_json(doc.at("region"), x) : SampleRegion::cube(x);
    if (!c.region_path.empty())
        region = io::region_from_json(io::read_json(c.region_path), x);
    if (c.seed)
        region.seed = *c.seed;
    const DarbouxChart chart = darboux_reduce_3d(a[0], a[1], a[2], eta, region, c.tol.value_or(kDefaultTolerance));
    out << "forward: ";
    for (std::size_t i = 0; i < 3; ++i)
        out << (i ? ", " : "") << chart.forward[i].to_string();
    out << "\ninverse: ";
    for (std::size_t i = 0; i < 3; ++i)
        out << (i ? ", " : "") << chart.inverse[i].to_string();
    out << "\ncasimir: " << chart.casimir.to_string() << "\ncanonical deviation "
        << io::format_number(chart.canonical_deviation) << ", roundtrip error "
        << io::format_number(chart.roundtrip_error) << '\n';
    if (!c.out_path.empty())
        io::write_json(c.out_path, io::chart_to_json(chart));
    return chart.canonical_deviation <= 1e-10 && chart.roundtrip_error <= 1e-9 ? kExitPass : kExitFail;
}

struct SimulateArgs {
    std::string request_path;
    std::string matrix_path;
    std::string hamiltonian;
    std::string x0;
    std::optional<double> h;
    std::optional<std::size_t> steps;
};

int cmd_simulate(SimulateArgs s, const Common& c, std::ostream& out) {
    fs::path base;
    if (!s.request_path.empty()) {
        const Json req = io::read_json(s.request_path);
        base = fs::path(s.request_path).parent_path();
        try {
            if (s.matrix_path.empty() && req.contains("matrix"))
                s.matrix_path = (base / req.at("matrix").get<std::string>()).string();
            if (s.hamiltonian.empty() && req.contains("hamiltonian"))
                s.hamiltonian = req.at("hamiltonian").get<std::string>();
            if (s.x0.empty() && req.contains("x0")) {
                std::string joined;
                for (double v : req.at("x0").get<std::vector<double>>())
                    joined += (joined.empty() ? "" : ",") + io::format_number(v);
                s.x0 = joined;
            }
            if (!s.h && req.contains("h"))
                s.h = req.at("h").get<double>();
            if (!s.steps && req.contains("steps"))
                s.steps = req.at("steps").get<std::size_t>();
        } catch (const Json::exception& e) {
            throw io::DocumentError("simulation request: " + std::string(e.what()));
        }
    }
    if (s.matrix_path.empty() || s.hamiltonian.empty() || s.x0.empty() || !s.h || !s.steps)
        throw io::DocumentError("simulate: matrix, hamiltonian, x0, h and steps are all required");
    const io::MatrixDocument doc = io::matrix_from_json(io::read_json(s.matrix_path));
    Expr h_expr;
    try {
        h_expr = parse(s.hamiltonian, doc.matrix.variables());
    } catch (const ParseError& e) {
        throw io::DocumentError("hamiltonian: " + std::string(e.what()));
    }
    const std::vector<double> x0 = parse_numbers(s.x0);
    if (x0.size() != doc.matrix.dimension())
        throw io::DocumentError("x0: expected " + std::to_string(doc.matrix.dimension()) + " components");
    const Trajectory t = integrate(doc.matrix, h_expr, Point(doc.matrix.variables(), x0), *s.h, *s.steps);
    const std::string csv = io::trajectory_csv(t, h_expr, doc.casimirs);
    if (c.out_path.empty()) {
        out << csv;
        return kExitPass;
    }
    write_text(c.out_path, csv);
    const ConservationReport rep = conservation_report(t, doc.matrix, h_expr, doc.casimirs);
    for (const InvariantDrift& d : rep.invariants)
        out << d.name << " [" << d.function.to_string() << "] drift " << io::format_number(d.drift) << ", at h/2 "
            << io::format_number(d.drift_half) << ", ratio " << io::format_number(d.ratio) << '\n';
    return kExitPass;
}

int cmd_fixtures(const std::string& dir, std::ostream& out) {
    fs::create_directories(dir);
    for (const fixtures::Fixture& f : fixtures::all()) {
        const fs::path p = fs::path(dir) / (f.name + ".json");
        io::write_json(p, io::matrix_to_json(f.matrix, f.casimirs, f.region));
        out << "wrote " << p.string() << '\n';
    }
    const Expr psi = parse("sin(y1) + y2", {"y1", "y2"});
    io::write_json(fs::path(dir) / "example2_dpsi.json", io::dpsi_to_json(fixtures::example2_spec(psi)));
    out << "wrote " << (fs::path(dir) / "example2_dpsi.json").string() << '\n';
    const Json family = {{"a", {1.0, 2.0, 3.0}},
                         {"eta", "exp(y)"},
                         {"region", io::region_to_json(SampleRegion::cube(numbered_names("x", 3)))}};
    io::write_json(fs::path(dir) / "theorem5_family.json", family);
    out << "wrote " << (fs::path(dir) / "theorem5_family.json").string() << '\n';
    return kExitPass;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Construct and verify distinguished Poisson structure matrices"};
    app.require_subcommand(1);
    Common common;

    std::string matrix_path;
    auto* verify = app.add_subcommand("verify", "Check Jacobi, distinguished and Casimir properties");
    verify->add_option("--matrix,matrix", matrix_path, "Matrix document")->required();
    add_common(verify, common);

    std::string dpsi_path;
    auto* construct = app.add_subcommand("construct", "Build a matrix from a linear-Casimir spec");
    construct->add_option("--dpsi", dpsi_path, "Spec document")->required();
    add_common(construct, common);

    std::string transform_path;
    auto* transform = app.add_subcommand("transform", "Apply a closure operation");
    transform->add_option("--transform,request", transform_path, "Transform request document")->required();
    add_common(transform, common);

    std::string family_path;
    auto* reduce = app.add_subcommand("reduce", "Darboux chart of a three-dimensional family");
    reduce->add_option("--family,family", family_path, "Family document {a, eta, region}")->required();
    add_common(reduce, common);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Integrate x' = J grad H");
    simulate->set_help_flag("--help", "Print this help message and exit");
    simulate->add_option("--request", sim.request_path, "Simulation request document");
    simulate->add_option("--matrix", sim.matrix_path, "Matrix document");
    simulate->add_option("--hamiltonian", sim.hamiltonian, "Hamiltonian expression");
    simulate->add_option("--x0", sim.x0, "Comma-separated initial state");
    simulate->add_option("--h", sim.h, "Step size");
    simulate->add_option("--steps", sim.steps, "Number of steps");
    add_common(simulate, common);

    std::string fixtures_dir = "fixtures";
    auto* fixtures = app.add_subcommand("fixtures", "Write the bundled example documents");
    fixtures->add_option("--out", fixtures_dir, "Output directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*verify)
            return cmd_verify(matrix_path, common, out);
        if (*construct)
            return cmd_construct(dpsi_path, common, out);
        if (*transform)
            return cmd_transform(transform_path, common, out);
        if (*reduce)
            return cmd_reduce(family_path, common, out);
        if (*simulate)
            return cmd_simulate(sim, common, out);
        if (*fixtures)
            return cmd_fixtures(fixtures_dir, out);
    } catch (const HypothesisError& e) {
        err << "refused: " << e.what() << '\n';
        return kExitFail;
    } catch (const ExpressionSwell& e) {
        err << "refused: " << e.what() << '\n';
        return kExitFail;
    } catch (const IntegrationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitFail;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace dsolkit::cli
