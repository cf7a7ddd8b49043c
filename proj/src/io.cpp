#include "azumaya/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace az {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Parsing helpers.
// ---------------------------------------------------------------------------
namespace {

Smoothness parse_k(const json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return Smoothness::infinite();
        throw SchemaError(path, "k must be a nonnegative integer or \"inf\"");
    }
    if (j.is_number_integer()) {
        int k = j.get<int>();
        if (k < 0) throw SchemaError(path, "k must be nonnegative");
        return Smoothness::finite(k);
    }
    throw SchemaError(path, "k must be a nonnegative integer or \"inf\"");
}

Cplx parse_entry(const json& j, const std::string& path) {
    if (j.is_number()) return Cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Cplx(j[0].get<double>(), j[1].get<double>());
    throw SchemaError(path, "matrix entry must be a number or [re, im]");
}

Mat parse_matrix(const json& j, int r, const std::string& path) {
    if (!j.is_array() || static_cast<int>(j.size()) != r)
        throw SchemaError(path, "matrix must be an array of " + std::to_string(r) +
                                    " rows");
    Mat m(r, r);
    for (int i = 0; i < r; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != r)
            throw SchemaError(path + "/" + std::to_string(i),
                              "matrix row must have " + std::to_string(r) +
                                  " entries");
        for (int c = 0; c < r; ++c)
            m(i, c) = parse_entry(row[c],
                                  path + "/" + std::to_string(i) + "/" +
                                      std::to_string(c));
    }
    return m;
}

CPoly parse_cpoly(const json& j, const std::string& path) {
    // number | [c0, c1, ...] | {"coeffs": [...]}; coefficients may be [re,im]
    if (j.is_number()) return CPoly::constant(Cplx(j.get<double>(), 0.0));
    const json* arr = nullptr;
    if (j.is_array()) {
        arr = &j;
    } else if (j.is_object() && j.contains("coeffs")) {
        arr = &j.at("coeffs");
    } else {
        throw SchemaError(path, "polynomial must be a number, array, or {coeffs}");
    }
    std::vector<Cplx> c;
    for (size_t i = 0; i < arr->size(); ++i)
        c.push_back(parse_entry((*arr)[i], path + "/" + std::to_string(i)));
    return CPoly(std::move(c));
}

Poly2 parse_poly2(const json& j, const std::string& path) {
    // number | {"coeffs_xt": [[...], ...]} with rows indexed by x power
    if (j.is_number()) return Poly2::constant(j.get<double>());
    if (j.is_object() && j.contains("coeffs_xt")) {
        const auto& rows = j.at("coeffs_xt");
        if (!rows.is_array()) throw SchemaError(path, "coeffs_xt must be an array");
        std::vector<std::vector<double>> table;
        for (const auto& row : rows) {
            std::vector<double> r;
            for (const auto& v : row) {
                if (!v.is_number())
                    throw SchemaError(path, "coeffs_xt entries must be numbers");
                r.push_back(v.get<double>());
            }
            table.push_back(std::move(r));
        }
        return Poly2(std::move(table));
    }
    throw SchemaError(path, "family entry must be a number or {coeffs_xt}");
}

TrigPoly parse_trig(const json& j, const std::string& path) {
    if (!j.is_object())
        throw SchemaError(path, "trigonometric entry must be an object");
    double a0 = j.value("a0", 0.0);
    std::vector<double> ac, bs;
    if (j.contains("cos"))
        for (const auto& v : j.at("cos")) ac.push_back(v.get<double>());
    if (j.contains("sin"))
        for (const auto& v : j.at("sin")) bs.push_back(v.get<double>());
    return TrigPoly(a0, std::move(ac), std::move(bs));
}

}  // namespace

MapSpecDoc parse_spec(const std::string& bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("/", "document must be an object");
    MapSpecDoc doc;
    doc.version = j.value("version", "1");
    if (doc.version != "1")
        throw VersionUnsupported("unsupported version " + doc.version);

    if (j.contains("options")) {
        const auto& o = j.at("options");
        doc.tol = o.value("tol", kDefaultTol);
        if (doc.tol <= 0) throw SchemaError("/options/tol", "tol must be positive");
        doc.grid_size = o.value("grid_size", 512);
        if (doc.grid_size < 2)
            throw SchemaError("/options/grid_size", "grid_size must be >= 2");
        std::string conv = o.value("slag_convention", "im");
        if (conv == "im")
            doc.slag_convention = SlagConvention::Im;
        else if (conv == "re")
            doc.slag_convention = SlagConvention::Re;
        else
            throw SchemaError("/options/slag_convention", "must be \"im\" or \"re\"");
    }

    int kinds = int(j.contains("point_map")) + int(j.contains("curve_map")) +
                int(j.contains("family"));
    if (kinds != 1)
        throw SchemaError("/",
                          "document must contain exactly one of point_map, "
                          "curve_map, family");

    if (j.contains("point_map")) {
        const auto& p = j.at("point_map");
        AzumayaPointMap m;
        if (!p.contains("r") || !p.at("r").is_number_integer() || p.at("r") < 1)
            throw SchemaError("/point_map/r", "r must be a positive integer");
        if (!p.contains("n") || !p.at("n").is_number_integer() || p.at("n") < 1)
            throw SchemaError("/point_map/n", "n must be a positive integer");
        m.r = p.at("r").get<int>();
        m.n = p.at("n").get<int>();
        m.k = p.contains("k") ? parse_k(p.at("k"), "/point_map/k")
                              : Smoothness::infinite();
        m.tol = doc.tol;
        if (!p.contains("matrices") || !p.at("matrices").is_array() ||
            static_cast<int>(p.at("matrices").size()) != m.n)
            throw SchemaError("/point_map/matrices",
                              "matrices must list n square matrices");
        for (int i = 0; i < m.n; ++i)
            m.ms.push_back(parse_matrix(p.at("matrices")[i], m.r,
                                        "/point_map/matrices/" + std::to_string(i)));
        doc.point_map = std::move(m);
        return doc;
    }

    if (j.contains("curve_map")) {
        const auto& p = j.at("curve_map");
        MatrixCurveMap m;
        if (!p.contains("r") || !p.at("r").is_number_integer() || p.at("r") < 1)
            throw SchemaError("/curve_map/r", "r must be a positive integer");
        if (!p.contains("n") || !p.at("n").is_number_integer() || p.at("n") < 1)
            throw SchemaError("/curve_map/n", "n must be a positive integer");
        m.r = p.at("r").get<int>();
        m.n = p.at("n").get<int>();
        m.k = p.contains("k") ? parse_k(p.at("k"), "/curve_map/k")
                              : Smoothness::infinite();
        m.tol = doc.tol;
        if (p.contains("base")) {
            const auto& b = p.at("base");
            std::string kind = b.value("kind", "interval");
            if (kind == "circle") {
                m.circle = true;
                m.x0 = b.value("x0", 0.0);
                m.x1 = b.value("x1", 2.0 * M_PI);
            } else if (kind == "interval") {
                m.circle = false;
                if (!b.contains("x0") || !b.contains("x1"))
                    throw SchemaError("/curve_map/base", "interval needs x0, x1");
                m.x0 = b.at("x0").get<double>();
                m.x1 = b.at("x1").get<double>();
            } else {
                throw SchemaError("/curve_map/base/kind",
                                  "must be \"interval\" or \"circle\"");
            }
            if (!(m.x0 < m.x1))
                throw SchemaError("/curve_map/base", "x0 must be less than x1");
        } else {
            throw SchemaError("/curve_map/base", "base is required");
        }
        if (!p.contains("entries") || !p.at("entries").is_array() ||
            static_cast<int>(p.at("entries").size()) != m.n)
            throw SchemaError("/curve_map/entries",
                              "entries must list n matrices of polynomials");
        for (int axis = 0; axis < m.n; ++axis) {
            const auto& mat = p.at("entries")[axis];
            const std::string path = "/curve_map/entries/" + std::to_string(axis);
            if (!mat.is_array() || static_cast<int>(mat.size()) != m.r)
                throw SchemaError(path, "entry matrix must have r rows");
            EntryMat em(m.r, m.r);
            for (int i = 0; i < m.r; ++i) {
                const auto& row = mat[i];
                if (!row.is_array() || static_cast<int>(row.size()) != m.r)
                    throw SchemaError(path + "/" + std::to_string(i),
                                      "entry row must have r entries");
                for (int c = 0; c < m.r; ++c) {
                    const auto& cell = row[c];
                    const std::string cpath =
                        path + "/" + std::to_string(i) + "/" + std::to_string(c);
                    if (cell.is_object() &&
                        (cell.contains("cos") || cell.contains("sin") ||
                         cell.contains("a0"))) {
                        if (!m.circle)
                            throw SchemaError(
                                cpath, "trigonometric entries need a circle base");
                        em(i, c) = CurveEntry(parse_trig(cell, cpath));
                    } else {
                        em(i, c) = CurveEntry(parse_cpoly(cell, cpath));
                    }
                }
            }
            m.ms.push_back(std::move(em));
        }
        doc.curve_map = std::move(m);
        return doc;
    }

    const auto& p = j.at("family");
    FamilySpec f;
    if (!p.contains("r") || !p.at("r").is_number_integer() || p.at("r") < 1)
        throw SchemaError("/family/r", "r must be a positive integer");
    if (!p.contains("n") || !p.at("n").is_number_integer() || p.at("n") < 1)
        throw SchemaError("/family/n", "n must be a positive integer");
    f.r = p.at("r").get<int>();
    f.n = p.at("n").get<int>();
    f.k = p.contains("k") ? parse_k(p.at("k"), "/family/k") : Smoothness::infinite();
    f.tol = doc.tol;
    f.name = p.value("name", "");
    f.t0 = p.value("t0", 0.0);
    f.t1 = p.value("t1", 1.0);
    if (p.contains("base")) {
        const auto& b = p.at("base");
        f.circle = b.value("kind", "interval") == "circle";
        f.x0 = b.value("x0", 0.0);
        f.x1 = b.value("x1", 1.0);
    }
    if (!p.contains("entries") || !p.at("entries").is_array() ||
        static_cast<int>(p.at("entries").size()) != f.n)
        throw SchemaError("/family/entries", "entries must list n matrices");
    for (int axis = 0; axis < f.n; ++axis) {
        const auto& mat = p.at("entries")[axis];
        const std::string path = "/family/entries/" + std::to_string(axis);
        if (!mat.is_array() || static_cast<int>(mat.size()) != f.r)
            throw SchemaError(path, "entry matrix must have r rows");
        std::vector<Poly2> entries(f.r * f.r);
        for (int i = 0; i < f.r; ++i) {
            const auto& row = mat[i];
            if (!row.is_array() || static_cast<int>(row.size()) != f.r)
                throw SchemaError(path + "/" + std::to_string(i),
                                  "entry row must have r entries");
            for (int c = 0; c < f.r; ++c)
                entries[i * f.r + c] = parse_poly2(
                    row[c],
                    path + "/" + std::to_string(i) + "/" + std::to_string(c));
        }
        f.ms.push_back(std::move(entries));
    }
    doc.family = std::move(f);
    return doc;
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------
namespace {

json entry_json(const Cplx& v) {
    if (v.imag() == 0.0) return v.real();
    return json::array({v.real(), v.imag()});
}

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(entry_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json cpoly_to_json(const CPoly& p) {
    json coeffs = json::array();
    for (const auto& c : p.coeffs()) coeffs.push_back(entry_json(c));
    return json{{"coeffs", coeffs}};
}

json options_json(const MapSpecDoc& doc) {
    return json{{"tol", doc.tol},
                {"grid_size", doc.grid_size},
                {"slag_convention",
                 doc.slag_convention == SlagConvention::Im ? "im" : "re"}};
}

}  // namespace

std::string serialize_spec(const MapSpecDoc& doc) {
    json j;
    j["version"] = doc.version;
    j["options"] = options_json(doc);
    if (doc.point_map) {
        const auto& m = *doc.point_map;
        json matrices = json::array();
        for (const auto& mat : m.ms) matrices.push_back(matrix_to_json(mat));
        j["point_map"] = json{{"r", m.r},
                              {"n", m.n},
                              {"k", m.k.is_infinite() ? json("inf") : json(m.k.value)},
                              {"matrices", matrices}};
    } else if (doc.curve_map) {
        const auto& m = *doc.curve_map;
        json entries = json::array();
        for (const auto& em : m.ms) {
            json mat = json::array();
            for (int i = 0; i < m.r; ++i) {
                json row = json::array();
                for (int c = 0; c < m.r; ++c) {
                    const auto& e = em(i, c);
                    if (e.is_trig()) {
                        const auto& t = e.trig_poly();
                        row.push_back(json{{"a0", t.a0()},
                                           {"cos", t.cos_coeffs()},
                                           {"sin", t.sin_coeffs()}});
                    } else {
                        row.push_back(cpoly_to_json(e.poly()));
                    }
                }
                mat.push_back(row);
            }
            entries.push_back(mat);
        }
        j["curve_map"] =
            json{{"r", m.r},
                 {"n", m.n},
                 {"k", m.k.is_infinite() ? json("inf") : json(m.k.value)},
                 {"base",
                  json{{"kind", m.circle ? "circle" : "interval"},
                       {"x0", m.x0},
                       {"x1", m.x1}}},
                 {"entries", entries}};
    } else if (doc.family) {
        const auto& f = *doc.family;
        json entries = json::array();
        for (const auto& axis_entries : f.ms) {
            json mat = json::array();
            for (int i = 0; i < f.r; ++i) {
                json row = json::array();
                for (int c = 0; c < f.r; ++c) {
                    const auto& p = axis_entries[i * f.r + c];
                    json rows = json::array();
                    for (const auto& xrow : p.coeffs()) rows.push_back(xrow);
                    row.push_back(json{{"coeffs_xt", rows}});
                }
                mat.push_back(row);
            }
            entries.push_back(mat);
        }
        j["family"] = json{{"name", f.name},
                           {"r", f.r},
                           {"n", f.n},
                           {"k", f.k.is_infinite() ? json("inf") : json(f.k.value)},
                           {"t0", f.t0},
                           {"t1", f.t1},
                           {"base",
                            json{{"kind", f.circle ? "circle" : "interval"},
                                 {"x0", f.x0},
                                 {"x1", f.x1}}},
                           {"entries", entries}};
    }
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Function expression parser.
// ---------------------------------------------------------------------------
namespace {

struct ExprParser {
    const std::string& s;
    size_t pos = 0;
    int arity;

    explicit ExprParser(const std::string& text, int n) : s(text), arity(n) {}

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }

    MPoly parse_sum() {
        MPoly acc = parse_term();
        while (true) {
            if (eat('+')) {
                acc = acc + parse_term();
            } else if (eat('-')) {
                acc = acc - parse_term();
            } else {
                return acc;
            }
        }
    }
    MPoly parse_term() {
        MPoly acc = parse_factor();
        while (true) {
            skip();
            if (eat('*')) {
                acc = acc * parse_factor();
            } else if (pos < s.size() &&
                       (s[pos] == 'y' || s[pos] == '(' ||
                        std::isdigit(static_cast<unsigned char>(s[pos])))) {
                acc = acc * parse_factor();  // implicit multiplication
            } else {
                return acc;
            }
        }
    }
    MPoly parse_factor() {
        MPoly base = parse_atom();
        skip();
        if (eat('^')) {
            skip();
            size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                ++pos;
            if (start == pos) throw ParseError("expected exponent");
            int e = std::stoi(s.substr(start, pos - start));
            return base.pow(e);
        }
        return base;
    }
    MPoly parse_atom() {
        skip();
        if (eat('(')) {
            MPoly inner = parse_sum();
            if (!eat(')')) throw ParseError("expected )");
            return inner;
        }
        if (eat('-')) return parse_atom() * -1.0;
        if (pos < s.size() && s[pos] == 'y') {
            ++pos;
            size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                ++pos;
            if (start == pos) throw ParseError("expected coordinate index after y");
            int idx = std::stoi(s.substr(start, pos - start));
            if (idx < 1 || idx > arity)
                throw ParseError("coordinate y" + std::to_string(idx) +
                                 " out of range for arity " + std::to_string(arity));
            return MPoly::coordinate(arity, idx - 1);
        }
        size_t start = pos;
        while (pos < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.'))
            ++pos;
        if (start == pos) throw ParseError("unexpected character in expression");
        return MPoly::constant(arity, std::stod(s.substr(start, pos - start)));
    }
};

}  // namespace

FnSpec parse_fnspec(const std::string& text, int arity) {
    // JSON object form
    std::string trimmed = text;
    trimmed.erase(trimmed.begin(),
                  std::find_if(trimmed.begin(), trimmed.end(), [](char c) {
                      return !std::isspace(static_cast<unsigned char>(c));
                  }));
    if (!trimmed.empty() && trimmed.front() == '{') {
        json j;
        try {
            j = json::parse(trimmed);
        } catch (const json::exception& e) {
            throw ParseError(std::string("invalid FnSpec JSON: ") + e.what());
        }
        std::string kind = j.value("kind", "polynomial");
        auto poly_from = [&](const json& node, const std::string& path) {
            if (node.is_string()) {
                ExprParser p(node.get<std::string>(), arity);
                MPoly out = p.parse_sum();
                p.skip();
                if (p.pos != p.s.size()) throw ParseError("trailing characters");
                return out;
            }
            if (!node.is_array()) throw SchemaError(path, "expected term array");
            MPoly acc(arity);
            for (const auto& term : node) {
                if (!term.is_object() || !term.contains("exponents") ||
                    !term.contains("coeff"))
                    throw SchemaError(path, "terms need exponents and coeff");
                std::vector<int> e = term.at("exponents").get<std::vector<int>>();
                if (static_cast<int>(e.size()) != arity)
                    throw SchemaError(path, "exponent tuple length mismatch");
                acc.add_term(e, term.at("coeff").get<double>());
            }
            return acc;
        };
        if (kind == "polynomial")
            return FnSpec::polynomial(poly_from(j.at("terms"), "/terms"));
        if (kind == "rational")
            return FnSpec::rational(poly_from(j.at("num"), "/num"),
                                    poly_from(j.at("den"), "/den"));
        if (kind == "analytic")
            return FnSpec::analytic(j.value("primitive", "sin"),
                                    poly_from(j.at("arg"), "/arg"));
        throw SchemaError("/kind", "unknown FnSpec kind " + kind);
    }

    // expression form; check for sin/cos/exp wrapper and top-level quotient
    std::string expr = trimmed;
    for (const char* prim : {"sin", "cos", "exp"}) {
        if (expr.rfind(prim, 0) == 0) {
            size_t open = expr.find('(');
            if (open != std::string::npos && expr.back() == ')') {
                std::string inner = expr.substr(open + 1, expr.size() - open - 2);
                ExprParser p(inner, arity);
                MPoly arg = p.parse_sum();
                p.skip();
                if (p.pos == p.s.size()) return FnSpec::analytic(prim, arg);
            }
        }
    }
    // top-level quotient: split on the last '/' at depth 0
    int depth = 0;
    size_t slash = std::string::npos;
    for (size_t i = 0; i < expr.size(); ++i) {
        if (expr[i] == '(') ++depth;
        if (expr[i] == ')') --depth;
        if (expr[i] == '/' && depth == 0) slash = i;
    }
    if (slash != std::string::npos) {
        ExprParser pn(expr.substr(0, slash), arity);
        MPoly num = pn.parse_sum();
        std::string den_text = expr.substr(slash + 1);
        ExprParser pd(den_text, arity);
        MPoly den = pd.parse_sum();
        return FnSpec::rational(num, den);
    }
    ExprParser p(expr, arity);
    MPoly poly = p.parse_sum();
    p.skip();
    if (p.pos != p.s.size()) throw ParseError("trailing characters in expression");
    return FnSpec::polynomial(poly);
}

PolyForm parse_polyform(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid PolyForm JSON: ") + e.what());
    }
    PolyForm f;
    if (!j.contains("n") || !j.contains("degree") || !j.contains("terms"))
        throw SchemaError("/", "PolyForm needs n, degree, terms");
    f.n = j.at("n").get<int>();
    f.degree = j.at("degree").get<int>();
    if (f.degree > f.n) throw SchemaError("/degree", "degree exceeds dimension");
    for (const auto& term : j.at("terms")) {
        std::vector<int> idx = term.at("indices").get<std::vector<int>>();
        for (auto& v : idx) v -= 1;  // external form is 1-based
        MPoly coeff(f.n);
        if (term.at("coeff").is_number()) {
            coeff = MPoly::constant(f.n, term.at("coeff").get<double>());
        } else {
            ExprParser p(term.at("coeff").get<std::string>(), f.n);
            coeff = p.parse_sum();
        }
        f.add_term(idx, coeff);
    }
    return f;
}

// ---------------------------------------------------------------------------
// CSV and SVG emission.
// ---------------------------------------------------------------------------
std::string branch_csv(const BranchDiagram& d) {
    std::ostringstream out;
    out << "x,branch_id";
    for (int i = 0; i < d.n; ++i) out << ",lambda" << (i + 1);
    out << ",length,nilpotency_order,filtration\n";
    struct Row {
        double x;
        int id;
        const TrackSample* s;
    };
    std::vector<Row> rows;
    for (const auto& t : d.tracks)
        for (const auto& s : t.samples) rows.push_back({s.x, t.id, &s});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.id < b.id;
    });
    for (const auto& row : rows) {
        out << format_double(row.x) << ',' << row.id;
        for (int i = 0; i < d.n; ++i)
            out << ',' << format_double(row.s->lambda(i));
        out << ',' << row.s->mult << ',' << row.s->nilp_order << ',';
        for (size_t i = 0; i < row.s->filtration.size(); ++i) {
            if (i) out << ';';
            out << row.s->filtration[i];
        }
        out << '\n';
    }
    return out.str();
}

namespace {

std::string svg_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void svg_panel(std::ostringstream& out, const BranchDiagram& d, int axis,
               double ox, double oy, double w, double h) {
    double lo = 1e300, hi = -1e300;
    for (const auto& t : d.tracks)
        for (const auto& s : t.samples) {
            lo = std::min(lo, s.lambda(axis));
            hi = std::max(hi, s.lambda(axis));
        }
    if (hi <= lo) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto mapx = [&](double x) {
        return ox + w * (x - d.x0) / (d.x1 - d.x0);
    };
    auto mapy = [&](double y) { return oy + h * (1.0 - (y - lo) / (hi - lo)); };
    out << "<rect x=\"" << svg_number(ox) << "\" y=\"" << svg_number(oy)
        << "\" width=\"" << svg_number(w) << "\" height=\"" << svg_number(h)
        << "\" fill=\"none\" stroke=\"#888\"/>\n";
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                            "#9467bd", "#ff7f0e", "#8c564b"};
    for (const auto& t : d.tracks) {
        const int max_order = t.max_nilp_order();
        const char* color = colors[t.id % 6];
        if (max_order > 1) {
            // halo stroke width encodes the nilpotency order
            out << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-opacity=\"0.25\" stroke-width=\""
                << svg_number(2.0 + 3.0 * double(max_order)) << "\" points=\"";
            for (const auto& s : t.samples)
                out << svg_number(mapx(s.x)) << ',' << svg_number(mapy(s.lambda(axis)))
                    << ' ';
            out << "\"/>\n";
        }
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.2\" points=\"";
        for (const auto& s : t.samples)
            out << svg_number(mapx(s.x)) << ',' << svg_number(mapy(s.lambda(axis)))
                << ' ';
        out << "\"/>\n";
    }
    for (const auto& ev : d.events) {
        if (ev.kind == BranchEvent::Kind::Overlap) continue;
        // mark event location on the x axis of the panel
        out << "<circle cx=\"" << svg_number(mapx(ev.x)) << "\" cy=\""
            << svg_number(oy + h) << "\" r=\"3\" fill=\"#000\"/>\n";
    }
}

}  // namespace

std::string branch_svg(const BranchDiagram& d) {
    std::ostringstream out;
    const double w = 460, h = 300, margin = 20;
    const double total_w = d.n >= 2 ? 2 * w + 3 * margin : w + 2 * margin;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
        << svg_number(total_w) << "\" height=\"" << svg_number(h + 2 * margin)
        << "\">\n";
    svg_panel(out, d, 0, margin, margin, w, h);
    if (d.n >= 2) svg_panel(out, d, 1, 2 * margin + w, margin, w, h);
    out << "</svg>\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Report JSON.
// ---------------------------------------------------------------------------
std::string admissibility_json(const AdmissibilityReport& r) {
    json j{{"admissible", r.admissible},
           {"commutation_defect", r.commutation_defect},
           {"max_spectral_imag", r.max_spectral_imag},
           {"tol", r.tol}};
    if (!r.reason.empty()) j["reason"] = r.reason;
    return j.dump(2);
}

std::string support_json(const SupportScheme& s) {
    json points = json::array();
    for (const auto& p : s.points) {
        json lambda = json::array();
        for (int i = 0; i < p.lambda.size(); ++i) lambda.push_back(p.lambda(i));
        points.push_back(json{{"lambda", lambda},
                              {"length", p.length},
                              {"nilpotency_orders", p.nilpotency_orders},
                              {"filtration", p.filtration}});
    }
    return json{{"points", points}}.dump(2);
}

std::string module_json(const ModuleStructure& m) {
    json fibers = json::array();
    for (const auto& f : m.fibers) {
        json lambda = json::array();
        for (int i = 0; i < f.lambda.size(); ++i) lambda.push_back(f.lambda(i));
        json gens = json::array();
        for (const auto& g : f.nilpotent_generators)
            gens.push_back(json::parse(matrix_json(g)));
        fibers.push_back(json{{"lambda", lambda},
                              {"dim", f.dim},
                              {"filtration", f.filtration},
                              {"summand_sizes", f.summand_sizes},
                              {"nilpotent_generators", gens}});
    }
    return json{{"fibers", fibers}}.dump(2);
}

std::string matrix_json(const Mat& m) { return matrix_to_json(m).dump(); }

std::string diagram_json(const BranchDiagram& d) {
    json tracks = json::array();
    for (const auto& t : d.tracks) {
        json samples = json::array();
        for (const auto& s : t.samples) {
            json lambda = json::array();
            for (int i = 0; i < s.lambda.size(); ++i) lambda.push_back(s.lambda(i));
            samples.push_back(json{{"x", s.x},
                                   {"lambda", lambda},
                                   {"length", s.mult},
                                   {"block_length", s.block_length},
                                   {"nilpotency_order", s.nilp_order},
                                   {"filtration", s.filtration}});
        }
        tracks.push_back(json{{"id", t.id}, {"samples", samples}});
    }
    json events = json::array();
    for (const auto& ev : d.events) {
        std::string kind = ev.kind == BranchEvent::Kind::Crossing ? "crossing"
                           : ev.kind == BranchEvent::Kind::Overlap
                               ? "overlap"
                               : "structure-change";
        json e{{"kind", kind}, {"x", ev.x}, {"tracks", ev.tracks}};
        if (ev.kind == BranchEvent::Kind::Overlap) e["x_end"] = ev.x_end;
        events.push_back(e);
    }
    return json{{"x0", d.x0},
                {"x1", d.x1},
                {"r", d.r},
                {"n", d.n},
                {"tracks", tracks},
                {"events", events},
                {"components", d.components}}
        .dump(2);
}

std::string classification_json(const Classification& c) {
    return json{{"label", c.label},
                {"crossings", c.crossings},
                {"overlaps", c.overlaps},
                {"simple_tracks", c.simple_tracks},
                {"nilpotent_tracks", c.nilpotent_tracks},
                {"max_cloud_order", c.max_cloud_order},
                {"intervals", c.interval_labels}}
        .dump(2);
}

std::string connection_json(const BranchConnection& c) {
    json simple = json::array();
    for (const auto& s : c.simple) {
        json coeffs = json::array();
        for (const auto& v : s.coefficient) {
            if (std::isnan(v.real()))
                coeffs.push_back(nullptr);
            else
                coeffs.push_back(entry_json(v));
        }
        simple.push_back(json{{"track", s.track_id}, {"coefficient", coeffs}});
    }
    json filtered = json::array();
    for (const auto& f : c.filtered)
        filtered.push_back(json{{"track", f.track_id},
                                {"filtration_residual", f.filtration_residual}});
    return json{{"simple", simple},
                {"filtered", filtered},
                {"singular_locus", c.singular_locus}}
        .dump(2);
}

std::string adapted_json(const AdaptedReport& r) {
    json comps = json::array();
    for (const auto& c : r.components)
        comps.push_back(json{{"component", c.component},
                             {"tracks", c.tracks},
                             {"pass", c.pass},
                             {"residual", c.residual},
                             {"theta", c.theta}});
    json j{{"pass", r.pass}, {"residual", r.residual}, {"components", comps}};
    if (!r.detail.empty()) j["detail"] = r.detail;
    return j.dump(2);
}

}  // namespace az
