#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "azumaya/io.hpp"

namespace {

using namespace az;

struct CommonOpts {
    std::string input;    // file path, "-" for stdin, or a fixture name
    std::string out;      // output file (empty = stdout)
    std::string format = "json";
    int grid = 0;         // 0 = use document/default
    double tol = 0.0;     // 0 = use document/default
    std::string slag = "";
    int threads = 0;
};

double env_default_tol() {
    const char* v = std::getenv("AZUMAYA_TOL");
    if (!v) return kDefaultTol;
    try {
        double t = std::stod(v);
        if (t > 0) return t;
    } catch (...) {
    }
    return kDefaultTol;
}

std::string read_input_text(const std::string& spec) {
    if (spec == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(spec);
    if (!in) throw IOError("cannot open input file " + spec);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Resolve the input to a document: a built-in fixture name or a JSON file.
MapSpecDoc load_doc(const CommonOpts& opts) {
    MapSpecDoc doc;
    doc.tol = env_default_tol();
    if (auto pm = builtin_point_map(opts.input)) {
        doc.point_map = std::move(pm);
    } else if (auto cm = builtin_curve_map(opts.input)) {
        doc.curve_map = std::move(cm);
    } else if (auto fam = builtin_family(opts.input)) {
        doc.family = std::move(fam);
    } else {
        doc = parse_spec(read_input_text(opts.input));
        if (env_default_tol() != kDefaultTol && opts.tol == 0.0) {
            // environment default applies when the document does not say
        }
    }
    if (opts.tol > 0.0) {
        doc.tol = opts.tol;
        if (doc.point_map) doc.point_map->tol = opts.tol;
        if (doc.curve_map) doc.curve_map->tol = opts.tol;
        if (doc.family) doc.family->tol = opts.tol;
    }
    if (opts.grid > 0) doc.grid_size = opts.grid;
    if (!opts.slag.empty())
        doc.slag_convention =
            opts.slag == "re" ? SlagConvention::Re : SlagConvention::Im;
    return doc;
}

void write_output(const CommonOpts& opts, const std::string& text) {
    if (opts.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(opts.out, std::ios::binary);
    if (!out) throw IOError("cannot open output file " + opts.out);
    out << text;
}

const AzumayaPointMap& need_point_map(const MapSpecDoc& doc) {
    if (!doc.point_map) throw InputError("this command needs a point map input");
    return *doc.point_map;
}

MatrixCurveMap need_curve_map(const MapSpecDoc& doc) {
    if (doc.curve_map) return *doc.curve_map;
    if (doc.family) return evaluate_family(*doc.family, doc.family->t1);
    throw InputError("this command needs a curve map input");
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_input = true) {
    if (needs_input)
        cmd->add_option("input", opts.input,
                        "input JSON file, '-' for stdin, or a built-in fixture name")
            ->required();
    cmd->add_option("--out", opts.out, "output path (default stdout)");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "svg"}));
    cmd->add_option("--grid", opts.grid, "grid size for curve analysis");
    cmd->add_option("--tol", opts.tol, "tolerance override");
    cmd->add_option("--slag-convention", opts.slag, "im or re")
        ->check(CLI::IsMember({"im", "re"}));
    cmd->add_option("--threads", opts.threads,
                    "worker threads for fiberwise analysis (0 = all)");
}

int run_all(CLI::App& app, int argc, char** argv) {
    CommonOpts opts;
    std::string fn_text = "y1";
    std::string form_text;
    std::string check_kind = "slag";
    double family_t = 1.0;
    int axis = 1;
    int dga_rank = 3;

    auto* validate_cmd =
        app.add_subcommand("validate", "admissibility report for a point map");
    add_common(validate_cmd, opts);

    auto* support_cmd =
        app.add_subcommand("support", "support scheme of a point map");
    add_common(support_cmd, opts);

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a function along the map");
    add_common(eval_cmd, opts);
    eval_cmd->add_option("-f,--function", fn_text,
                         "function: expression in y1..yn, or FnSpec JSON");

    auto* push_cmd = app.add_subcommand(
        "pushforward", "push-forward module structure of a point map");
    add_common(push_cmd, opts);

    auto* annih_cmd = app.add_subcommand(
        "annihilator", "minimal annihilator polynomial along one axis");
    add_common(annih_cmd, opts);
    annih_cmd->add_option("--axis", axis, "coordinate axis (1-based)");

    auto* dga_cmd = app.add_subcommand(
        "dga-check", "exact differential-graded-algebra law checks");
    dga_cmd->add_option("--rank", dga_rank, "matrix rank r (2..4)")
        ->check(CLI::Range(2, 4));
    dga_cmd->add_option("--out", opts.out, "output path (default stdout)");

    auto* analyze_cmd =
        app.add_subcommand("curve-analyze", "branch diagram of a curve map");
    add_common(analyze_cmd, opts);

    auto* classify_cmd =
        app.add_subcommand("curve-classify", "classification of a curve map");
    add_common(classify_cmd, opts);

    auto* conn_cmd = app.add_subcommand(
        "connection", "push-forward of the trivial connection along a curve map");
    add_common(conn_cmd, opts);

    auto* adapted_cmd = app.add_subcommand(
        "adapted-check", "adaptedness checks on the branch diagram");
    add_common(adapted_cmd, opts);
    adapted_cmd->add_option("--check", check_kind, "slag | lagrangian | rel-dim0")
        ->check(CLI::IsMember({"slag", "lagrangian", "rel-dim0"}));
    adapted_cmd->add_option("--form", form_text, "PolyForm JSON (for lagrangian)");

    auto* family_cmd =
        app.add_subcommand("family-eval", "evaluate a family at a parameter");
    add_common(family_cmd, opts);
    family_cmd->add_option("-t", family_t, "family parameter")->required();

    auto* plot_cmd =
        app.add_subcommand("plot", "SVG rendering of the branch diagram");
    add_common(plot_cmd, opts);

    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);

    auto threads = opts.threads;

    if (validate_cmd->parsed()) {
        auto doc = load_doc(opts);
        auto rep = validate(need_point_map(doc));
        write_output(opts, admissibility_json(rep));
        return rep.admissible ? 0 : 1;
    }
    if (support_cmd->parsed()) {
        auto doc = load_doc(opts);
        write_output(opts, support_json(support(need_point_map(doc))));
        return 0;
    }
    if (eval_cmd->parsed()) {
        auto doc = load_doc(opts);
        const auto& pm = need_point_map(doc);
        FnSpec f = parse_fnspec(fn_text, pm.n);
        write_output(opts, matrix_json(evaluate(pm, f)));
        return 0;
    }
    if (push_cmd->parsed()) {
        auto doc = load_doc(opts);
        write_output(opts, module_json(pushforward_module(need_point_map(doc))));
        return 0;
    }
    if (annih_cmd->parsed()) {
        auto doc = load_doc(opts);
        const auto& pm = need_point_map(doc);
        Poly p = minimal_annihilator(pm, axis - 1);
        std::ostringstream out;
        out << "{\"coeffs\": [";
        for (int i = 0; i <= p.degree(); ++i) {
            if (i) out << ", ";
            out << format_double(p.coeff(i));
        }
        out << "]}";
        write_output(opts, out.str());
        return 0;
    }
    if (dga_cmd->parsed()) {
        const int r = dga_rank;
        std::ostringstream out;
        const int rank = ad_rank(r);
        out << "{\"r\": " << r << ", \"ad_rank\": " << rank
            << ", \"expected\": " << (r * r - 1) << ", \"pass\": "
            << ((rank == r * r - 1) ? "true" : "false") << "}";
        write_output(opts, out.str());
        return rank == r * r - 1 ? 0 : 1;
    }
    if (analyze_cmd->parsed()) {
        auto doc = load_doc(opts);
        auto map = need_curve_map(doc);
        auto diag = analyze(map, doc.grid_size, threads);
        if (opts.format == "csv")
            write_output(opts, branch_csv(diag));
        else if (opts.format == "svg")
            write_output(opts, branch_svg(diag));
        else
            write_output(opts, diagram_json(diag));
        return 0;
    }
    if (classify_cmd->parsed()) {
        auto doc = load_doc(opts);
        auto map = need_curve_map(doc);
        auto diag = analyze(map, doc.grid_size, threads);
        write_output(opts, classification_json(classify(diag)));
        return 0;
    }
    if (conn_cmd->parsed()) {
        auto doc = load_doc(opts);
        auto map = need_curve_map(doc);
        auto diag = analyze(map, doc.grid_size, threads);
        auto conn = pushforward_connection(map, CPolyMat(), diag);
        write_output(opts, connection_json(conn));
        return 0;
    }
    if (adapted_cmd->parsed()) {
        auto doc = load_doc(opts);
        auto map = need_curve_map(doc);
        auto diag = analyze(map, doc.grid_size, threads);
        AdaptedReport rep;
        if (check_kind == "slag") {
            rep = check_slag(diag, doc.slag_convention);
        } else if (check_kind == "rel-dim0") {
            rep = check_relative_dim0(diag);
        } else {
            PolyForm omega =
                form_text.empty() ? PolyForm::area_form_r2() : parse_polyform(form_text);
            rep = check_lagrangian(diag, omega, 1, map.n);
        }
        write_output(opts, adapted_json(rep));
        return rep.pass ? 0 : 1;
    }
    if (family_cmd->parsed()) {
        auto doc = load_doc(opts);
        if (!doc.family) throw InputError("family-eval needs a family input");
        auto map = evaluate_family(*doc.family, family_t);
        MapSpecDoc out_doc;
        out_doc.tol = map.tol;
        out_doc.curve_map = std::move(map);
        write_output(opts, serialize_spec(out_doc));
        return 0;
    }
    if (plot_cmd->parsed()) {
        auto doc = load_doc(opts);
        auto map = need_curve_map(doc);
        auto diag = analyze(map, doc.grid_size, threads);
        write_output(opts, branch_svg(diag));
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"computable matrix-geometry toolkit"};
    try {
        return run_all(app, argc, argv);
    } catch (const az::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const az::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        std::cout << "{\"error\": \"" << e.what() << "\"}\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
