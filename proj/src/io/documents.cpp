#include "dsolkit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dsolkit::io {

namespace {

Expr parse_field(const std::string& text, const std::vector<std::string>& vars, const std::string& context) {
    try {
        return parse(text, vars);
    } catch (const ParseError& e) {
        throw DocumentError(context + ": " + e.what() + " in \"" + text + "\"");
    }
}

const Json& require(const Json& doc, const char* key, const std::string& context) {
    if (!doc.is_object() || !doc.contains(key))
        throw DocumentError(context + ": missing field \"" + key + "\"");
    return doc.at(key);
}

template <typename T>
T get_as(const Json& value, const std::string& context) {
    try {
        return value.get<T>();
    } catch (const Json::exception& e) {
        throw DocumentError(context + ": " + e.what());
    }
}

// Entries may be numbers or expression strings.
Expr expr_value(const Json& v, const std::vector<std::string>& vars, const std::string& context) {
    if (v.is_number())
        return Expr::constant(v.get<double>());
    if (v.is_string())
        return parse_field(v.get<std::string>(), vars, context);
    throw DocumentError(context + ": expected a number or an expression string");
}

std::vector<Expr> expr_list(const Json& v, const std::vector<std::string>& vars, const std::string& context) {
    if (!v.is_array())
        throw DocumentError(context + ": expected an array");
    std::vector<Expr> out;
    for (std::size_t k = 0; k < v.size(); ++k)
        out.push_back(expr_value(v[k], vars, context + "[" + std::to_string(k) + "]"));
    return out;
}

Json expr_strings(const std::vector<Expr>& list) {
    Json out = Json::array();
    for (const Expr& e : list)
        out.push_back(e.to_string());
    return out;
}

std::pair<std::size_t, std::size_t> parse_pair_key(const std::string& key, const std::string& context) {
    std::size_t i = 0, j = 0;
    char tail = 0;
    if (std::sscanf(key.c_str(), "%zu,%zu%c", &i, &j, &tail) != 2 || i == 0 || j == 0)
        throw DocumentError(context + ": key \"" + key + "\" is not of the form \"i,j\"");
    return {i - 1, j - 1};
}

MatrixDocument load_matrix(const Json& path_value, const std::filesystem::path& base_dir, const std::string& context) {
    const std::filesystem::path p = get_as<std::string>(path_value, context);
    return matrix_from_json(read_json(p.is_absolute() ? p : base_dir / p));
}

MatrixPolynomial polynomial_from_json(const Json& doc, const std::string& context) {
    const auto parity = get_as<std::string>(require(doc, "parity", context), context + ".parity");
    auto coefficients = get_as<std::vector<double>>(require(doc, "coefficients", context), context + ".coefficients");
    if (coefficients.empty())
        throw DocumentError(context + ".coefficients: must not be empty");
    if (parity == "odd")
        return MatrixPolynomial::odd(std::move(coefficients));
    if (parity == "even")
        return MatrixPolynomial::even(std::move(coefficients));
    throw DocumentError(context + ".parity: expected \"odd\" or \"even\"");
}

CasimirMatrix casimir_matrix_from_json(const Json& doc, std::size_t n, const std::string& context) {
    const auto sym = get_as<std::string>(require(doc, "symmetry", context), context + ".symmetry");
    Symmetry symmetry;
    if (sym == "skew")
        symmetry = Symmetry::Skew;
    else if (sym == "symmetric")
        symmetry = Symmetry::Symmetric;
    else if (sym == "general")
        symmetry = Symmetry::General;
    else
        throw DocumentError(context + ".symmetry: expected skew, symmetric or general");
    std::vector<Expr> generators;
    if (doc.contains("generators")) {
        // Generators are expressions in the matrix coordinates.
        const auto x = numbered_names("x", n);
        generators = expr_list(doc.at("generators"), x, context + ".generators");
    }
    const auto y = numbered_names("y", generators.size());
    const Json& rows = require(doc, "entries", context);
    if (!rows.is_array() || rows.size() != n)
        throw DocumentError(context + ".entries: expected " + std::to_string(n) + " rows");
    ExprMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n)
            throw DocumentError(context + ".entries: row " + std::to_string(i + 1) + " needs " + std::to_string(n) +
                                " entries");
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = expr_value(rows[i][j], y, context + ".entries[" + std::to_string(i) + "][" +
                                                    std::to_string(j) + "]");
    }
    try {
        return CasimirMatrix::from_generators(m, generators, symmetry);
    } catch (const std::invalid_argument& e) {
        throw DocumentError(context + ": " + e.what());
    }
}

unsigned power_from_json(const Json& args, const std::string& context) {
    if (!args.contains("m"))
        return 1;
    const int m = get_as<int>(args.at("m"), context + ".m");
    if (m < 0)
        throw DocumentError(context + ".m: must be nonnegative");
    return static_cast<unsigned>(m);
}

}  // namespace

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

SampleRegion MatrixDocument::region_or_default() const {
    return region ? *region : SampleRegion::cube(matrix.variables());
}

Json region_to_json(const SampleRegion& region) {
    Json box = Json::array();
    for (const Interval& iv : region.box)
        box.push_back({iv.lo, iv.hi});
    return {{"box", box},
            {"exclusions", expr_strings(region.exclusions)},
            {"margin", region.margin},
            {"samples", region.samples},
            {"seed", region.seed}};
}

SampleRegion region_from_json(const Json& doc, const std::vector<std::string>& variables) {
    const std::string ctx = "region";
    if (!doc.is_object())
        throw DocumentError(ctx + ": expected an object");
    SampleRegion r = SampleRegion::cube(variables);
    if (doc.contains("box")) {
        const Json& box = doc.at("box");
        if (!box.is_array() || box.size() != variables.size())
            throw DocumentError(ctx + ".box: expected " + std::to_string(variables.size()) + " intervals");
        for (std::size_t k = 0; k < box.size(); ++k) {
            const auto iv = get_as<std::vector<double>>(box[k], ctx + ".box");
            if (iv.size() != 2 || !(iv[0] <= iv[1]))
                throw DocumentError(ctx + ".box[" + std::to_string(k) + "]: expected [lo, hi] with lo <= hi");
            r.box[k] = {iv[0], iv[1]};
        }
    }
    if (doc.contains("exclusions"))
        r.exclusions = expr_list(doc.at("exclusions"), variables, ctx + ".exclusions");
    if (doc.contains("margin"))
        r.margin = get_as<double>(doc.at("margin"), ctx + ".margin");
    if (doc.contains("samples"))
        r.samples = get_as<std::size_t>(doc.at("samples"), ctx + ".samples");
    if (doc.contains("seed"))
        r.seed = get_as<std::uint64_t>(doc.at("seed"), ctx + ".seed");
    return r;
}

Json matrix_to_json(const StructureMatrix& matrix, const CasimirSet& casimirs,
                    const std::optional<SampleRegion>& region) {
    Json entries = Json::array();
    for (const UpperEntry& e : matrix.upper_entries())
        entries.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"expr", e.value.to_string()}});
    Json doc = {{"dimension", matrix.dimension()},
                {"variables", matrix.variables()},
                {"entries", entries},
                {"casimirs", expr_strings(casimirs.functions())}};
    if (region)
        doc["region"] = region_to_json(*region);
    return doc;
}

MatrixDocument matrix_from_json(const Json& doc) {
    const std::string ctx = "matrix";
    const auto n = get_as<std::size_t>(require(doc, "dimension", ctx), ctx + ".dimension");
    const auto vars = doc.contains("variables") ? get_as<std::vector<std::string>>(doc.at("variables"), ctx + ".variables")
                                                : numbered_names("x", n);
    std::vector<UpperEntry> upper;
    const Json& entries = require(doc, "entries", ctx);
    if (!entries.is_array())
        throw DocumentError(ctx + ".entries: expected an array");
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const std::string ectx = ctx + ".entries[" + std::to_string(k) + "]";
        const auto i = get_as<std::size_t>(require(entries[k], "i", ectx), ectx + ".i");
        const auto j = get_as<std::size_t>(require(entries[k], "j", ectx), ectx + ".j");
        if (i == 0 || j == 0)
            throw DocumentError(ectx + ": indices are 1-based");
        upper.push_back({i - 1, j - 1, expr_value(require(entries[k], "expr", ectx), vars, ectx + ".expr")});
    }
    try {
        StructureMatrix m = make_matrix(n, vars, upper);
        CasimirSet casimirs;
        if (doc.contains("casimirs"))
            casimirs = CasimirSet(expr_list(doc.at("casimirs"), vars, ctx + ".casimirs"));
        std::optional<SampleRegion> region;
        if (doc.contains("region"))
            region = region_from_json(doc.at("region"), vars);
        return {std::move(m), std::move(casimirs), std::move(region)};
    } catch (const std::invalid_argument& e) {
        throw DocumentError(ctx + ": " + e.what());
    }
}

Json dpsi_to_json(const DPsiSpec& spec) {
    Json psi = Json::object();
    for (const auto& [key, value] : spec.psi)
        psi[std::to_string(key.first + 1) + "," + std::to_string(key.second + 1)] = value.to_string();
    Json doc = {{"n", spec.n}, {"rho", spec.rho}, {"a", spec.a}, {"psi", psi}};
    if (spec.permutation) {
        Json perm = Json::array();
        for (std::size_t s : *spec.permutation)
            perm.push_back(s + 1);
        doc["permutation"] = perm;
    }
    return doc;
}

DPsiSpec dpsi_from_json(const Json& doc) {
    const std::string ctx = "dpsi";
    DPsiSpec spec;
    spec.n = get_as<std::size_t>(require(doc, "n", ctx), ctx + ".n");
    spec.rho = get_as<std::size_t>(require(doc, "rho", ctx), ctx + ".rho");
    if (spec.rho > spec.n)
        throw DocumentError(ctx + ": rho exceeds n");
    if (doc.contains("a"))
        spec.a = get_as<std::vector<std::vector<double>>>(doc.at("a"), ctx + ".a");
    const auto y = numbered_names("y", spec.n - spec.rho);
    if (doc.contains("psi")) {
        const Json& psi = doc.at("psi");
        if (!psi.is_object())
            throw DocumentError(ctx + ".psi: expected an object keyed by \"i,j\"");
        for (auto it = psi.begin(); it != psi.end(); ++it)
            spec.psi[parse_pair_key(it.key(), ctx + ".psi")] = expr_value(it.value(), y, ctx + ".psi." + it.key());
    }
    if (doc.contains("permutation")) {
        auto perm = get_as<std::vector<std::size_t>>(doc.at("permutation"), ctx + ".permutation");
        for (std::size_t& s : perm) {
            if (s == 0)
                throw DocumentError(ctx + ".permutation: entries are 1-based");
            --s;
        }
        spec.permutation = std::move(perm);
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw DocumentError(e.what());
    }
    return spec;
}

Json report_to_json(const VerificationReport& r) {
    Json index = Json::array();
    for (std::size_t i : r.worst_index)
        index.push_back(i + 1);
    return {{"property", r.property},
            {"verdict", r.passed ? "pass" : "fail"},
            {"max_residual", format_number(r.max_residual)},
            {"worst_point", r.worst_point},
            {"worst_index", index},
            {"samples", r.samples},
            {"tolerance", r.tolerance},
            {"diagnostics", r.diagnostics}};
}

Json chart_to_json(const DarbouxChart& chart) {
    Json reduced = Json::array();
    for (std::size_t i = 0; i < 3; ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < 3; ++j)
            row.push_back(chart.reduced(i, j).to_string());
        reduced.push_back(row);
    }
    return {{"forward", expr_strings(chart.forward)},
            {"inverse", expr_strings(chart.inverse)},
            {"reduced", reduced},
            {"region", region_to_json(chart.region)},
            {"casimir", chart.casimir.to_string()},
            {"canonical_deviation", format_number(chart.canonical_deviation)},
            {"roundtrip_error", format_number(chart.roundtrip_error)}};
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DocumentError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw DocumentError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
    std::ofstream out(path);
    if (!out)
        throw DocumentError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out)
        throw DocumentError("write failed for " + path.string());
}

TransformOutcome run_transform_request(const Json& request, const std::filesystem::path& base_dir) {
    const std::string ctx = "transform";
    const auto op = get_as<std::string>(require(request, "op", ctx), ctx + ".op");
    const Json& args = require(request, "args", ctx);
    const std::string actx = ctx + ".args";

    std::vector<MatrixDocument> inputs;
    if (args.contains("matrix"))
        inputs.push_back(load_matrix(args.at("matrix"), base_dir, actx + ".matrix"));
    if (args.contains("matrices")) {
        if (!args.at("matrices").is_array())
            throw DocumentError(actx + ".matrices: expected an array of paths");
        for (const Json& p : args.at("matrices"))
            inputs.push_back(load_matrix(p, base_dir, actx + ".matrices"));
    }
    if (inputs.empty())
        throw DocumentError(actx + ": expected \"matrix\" or \"matrices\"");
    const StructureMatrix& j = inputs.front().matrix;
    const std::size_t n = j.dimension();

    TransformOptions options;
    options.region = args.contains("region") ? region_from_json(args.at("region"), j.variables())
                                             : inputs.front().region_or_default();
    if (args.contains("tol"))
        options.tol = get_as<double>(args.at("tol"), actx + ".tol");
    if (args.contains("hypothesis_tol"))
        options.hypothesis_tol = get_as<double>(args.at("hypothesis_tol"), actx + ".hypothesis_tol");
    if (args.contains("entry_cap"))
        options.entry_cap = get_as<std::size_t>(args.at("entry_cap"), actx + ".entry_cap");

    auto casimir_args = [&](const char* key) {
        if (args.contains(key))
            return CasimirSet(expr_list(args.at(key), j.variables(), actx + "." + key));
        return inputs.front().casimirs;
    };

    auto poly = [&](const char* key) { return polynomial_from_json(require(args, key, actx), actx + "." + key); };
    auto amat = [&] { return casimir_matrix_from_json(require(args, "A", actx), n, actx + ".A"); };

    if (op == "thm1a")
        return {thm1_skew_sandwich(j, amat(), poly("P"), power_from_json(args, actx), options), op};
    if (op == "thm1b")
        return {thm1_commuting_sym(j, amat(), poly("P"), power_from_json(args, actx), options), op};
    if (op == "thm1c")
        return {thm1_conjugate(j, amat(), poly("P"), options), op};
    if (op == "thm1d")
        return {thm1_even_sandwich(j, amat(), poly("Q"), power_from_json(args, actx), options), op};
    if (op == "scale") {
        const CasimirSet casimirs = casimir_args("casimirs");
        const Expr eta = expr_value(require(args, "eta", actx), numbered_names("y", casimirs.size()), actx + ".eta");
        return {scale_by_casimir(j, eta, casimirs, options), op};
    }
    if (op == "change") {
        CoordinateChange change;
        change.old_variables = j.variables();
        change.new_variables = args.contains("new_variables")
                                   ? get_as<std::vector<std::string>>(args.at("new_variables"), actx + ".new_variables")
                                   : numbered_names("y", n);
        change.forward = expr_list(require(args, "forward", actx), change.old_variables, actx + ".forward");
        change.inverse = expr_list(require(args, "inverse", actx), change.new_variables, actx + ".inverse");
        const bool flag = args.contains("casimir_jacobian") &&
                          get_as<bool>(args.at("casimir_jacobian"), actx + ".casimir_jacobian");
        return {change_coordinates(j, change, flag, options), op};
    }
    if (op == "sum" || op == "altprod") {
        std::vector<StructureMatrix> matrices;
        for (const MatrixDocument& d : inputs)
            matrices.push_back(d.matrix);
        const CasimirSet shared = casimir_args("shared");
        if (op == "sum") {
            if (matrices.size() != 2)
                throw DocumentError(actx + ".matrices: sum takes exactly two matrices");
            return {sum(matrices[0], matrices[1], shared, options), op};
        }
        return {alternating_product(matrices, shared, options), op};
    }
    throw DocumentError(ctx + ".op: unknown operation \"" + op + "\"");
}

std::string trajectory_csv(const Trajectory& trajectory, const Expr& hamiltonian, const CasimirSet& casimirs) {
    std::ostringstream out;
    out << "t";
    for (const std::string& v : trajectory.variables)
        out << ',' << v;
    out << ",H";
    const auto functions = casimirs.functions();
    for (std::size_t k = 0; k < functions.size(); ++k)
        out << ",C" << k + 1;
    out << '\n';
    for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
        const Point p = trajectory.point(k);
        out << format_number(trajectory.time(k));
        for (double v : p.values())
            out << ',' << format_number(v);
        out << ',' << format_number(hamiltonian.eval(p));
        for (const Expr& f : functions)
            out << ',' << format_number(f.eval(p));
        out << '\n';
    }
    return out.str();
}

}  // namespace dsolkit::io
