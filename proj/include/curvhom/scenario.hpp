#ifndef CURVHOM_SCENARIO_HPP
#define CURVHOM_SCENARIO_HPP

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "invariants.hpp"
#include "stabilizer.hpp"

namespace curvhom {

using ordered_json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

namespace detail {

struct Cursor {
    const std::string& text;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    Cursor(const std::string& t, int line0, int col0) : text(t), line(line0), col(col0) {}

    bool eof() const { return pos >= text.size(); }
    char peek() const { return eof() ? '\0' : text[pos]; }
    char get() {
        char c = text[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }
    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n'))
            get();
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, col, msg); }
};

// expr   := ['-'] term (('+'|'-') term)*
// term   := factor ('*' factor)*
// factor := base ('^' nat)?
// base   := rational | 'y' | 'z' nat | 'exp' '(' ['-'] [nat] ['*'] 'y' ')' | '(' expr ')'
// The exponential coefficient and the leading sign are slightly laxer than a
// minimal grammar so that printed expressions like "exp(y)" and "-exp(y)"
// read back.
class ExprParser {
public:
    ExprParser(const std::string& text, int p, int line0, int col0)
        : cur_(text, line0, col0), p_(p) {}

    Expr parse() {
        Expr e = parse_expr();
        cur_.skip_ws();
        if (!cur_.eof()) cur_.fail(std::string("unexpected character '") + cur_.peek() + "'");
        return e;
    }

private:
    Cursor cur_;
    int p_;

    Expr parse_expr() {
        cur_.skip_ws();
        bool neg = false;
        if (cur_.peek() == '-') {
            cur_.get();
            neg = true;
        }
        Expr acc = parse_term();
        if (neg) acc = -acc;
        for (;;) {
            cur_.skip_ws();
            char c = cur_.peek();
            if (c != '+' && c != '-') break;
            cur_.get();
            Expr t = parse_term();
            acc = c == '+' ? acc + t : acc - t;
        }
        return acc;
    }

    Expr parse_term() {
        Expr acc = parse_factor();
        for (;;) {
            cur_.skip_ws();
            if (cur_.peek() != '*') break;
            cur_.get();
            acc = acc * parse_factor();
        }
        return acc;
    }

    Expr parse_factor() {
        Expr b = parse_base();
        cur_.skip_ws();
        if (cur_.peek() != '^') return b;
        cur_.get();
        cur_.skip_ws();
        int line = cur_.line, col = cur_.col;
        long long n = parse_nat();
        if (n > 64) throw ParseError(line, col, "exponent exceeds 64");
        return b.pow(int(n));
    }

    Expr parse_base() {
        cur_.skip_ws();
        char c = cur_.peek();
        if (c == '(') {
            cur_.get();
            Expr e = parse_expr();
            cur_.skip_ws();
            if (cur_.peek() != ')') cur_.fail("expected ')'");
            cur_.get();
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') return parse_rational();
        if (c == 'y') {
            cur_.get();
            return Expr::var(kYVar);
        }
        if (c == 'z') {
            cur_.get();
            cur_.skip_ws();
            int line = cur_.line, col = cur_.col;
            if (!std::isdigit(static_cast<unsigned char>(cur_.peek())))
                cur_.fail("expected an index after 'z'");
            long long idx = parse_nat();
            if (idx < 1 || idx > p_)
                throw ParseError(line, col,
                                 "z index " + std::to_string(idx) + " out of range for p = " +
                                     std::to_string(p_));
            return Expr::var(Coordinates(p_).z(int(idx)));
        }
        if (c == 'e') return parse_exp();
        if (cur_.eof()) cur_.fail("unexpected end of input");
        cur_.fail(std::string("unexpected character '") + c + "'");
    }

    Expr parse_exp() {
        for (char want : {'e', 'x', 'p'}) {
            if (cur_.peek() != want) cur_.fail("expected 'exp'");
            cur_.get();
        }
        cur_.skip_ws();
        if (cur_.peek() != '(') cur_.fail("expected '(' after 'exp'");
        cur_.get();
        cur_.skip_ws();
        int aline = cur_.line, acol = cur_.col;
        bool neg = false;
        long long coef = 1;
        if (cur_.peek() == '-') {
            cur_.get();
            neg = true;
            cur_.skip_ws();
        }
        if (std::isdigit(static_cast<unsigned char>(cur_.peek()))) {
            coef = parse_nat();
            cur_.skip_ws();
            if (cur_.peek() == '*') {
                cur_.get();
                cur_.skip_ws();
            }
        }
        if (cur_.peek() != 'y')
            throw ParseError(aline, acol, "exp argument must be an integer multiple of y");
        cur_.get();
        cur_.skip_ws();
        if (cur_.peek() != ')') cur_.fail("expected ')'");
        cur_.get();
        long long m = neg ? -coef : coef;
        if (m == 0) return Expr::constant(1);
        return Expr::exp_y(int(m));
    }

    long long parse_nat() {
        std::string digits;
        while (std::isdigit(static_cast<unsigned char>(cur_.peek()))) digits.push_back(cur_.get());
        if (digits.empty()) cur_.fail("expected digits");
        if (digits.size() > 9) cur_.fail("number has too many digits");
        return std::stoll(digits);
    }

    Expr parse_rational() {
        bool neg = false;
        if (cur_.peek() == '-') {
            cur_.get();
            cur_.skip_ws();
            if (!std::isdigit(static_cast<unsigned char>(cur_.peek())))
                cur_.fail("expected digits after '-'");
            neg = true;
        }
        Integer num = parse_integer();
        Integer den = 1;
        cur_.skip_ws();
        if (cur_.peek() == '/') {
            cur_.get();
            cur_.skip_ws();
            int dline = cur_.line, dcol = cur_.col;
            if (!std::isdigit(static_cast<unsigned char>(cur_.peek())))
                cur_.fail("expected digits in denominator");
            den = parse_integer();
            if (den == 0) throw ParseError(dline, dcol, "zero denominator");
        }
        Rational r(num, den);
        if (neg) r = -r;
        return Expr::constant(r);
    }

    Integer parse_integer() {
        std::string digits;
        while (std::isdigit(static_cast<unsigned char>(cur_.peek()))) digits.push_back(cur_.get());
        if (digits.empty()) cur_.fail("expected digits");
        if (digits.size() > 18) cur_.fail("number has too many digits");
        return Integer(digits);
    }
};

} // namespace detail

inline Expr parse_expression(const std::string& text, int p, int line0 = 1, int col0 = 1) {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    detail::ExprParser parser(text, p, line0, col0);
    return parser.parse();
}

struct TaskSpec {
    int index = 0;
    int line = 0;
    std::string name;
    std::vector<std::pair<std::string, std::string>> options;

    std::optional<std::string> option(const std::string& key) const {
        for (auto& [k, v] : options)
            if (k == key) return v;
        return std::nullopt;
    }
};

struct ScenarioConfig {
    int p = 0;
    std::string family; // "Mk" or "Npsi"
    int k = 0;
    Expr psi;
    std::optional<Expr> custom_F; // command-line override; not part of the file format
    Point point;
    std::vector<TaskSpec> tasks;
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline const std::map<std::string, std::vector<std::string>>& task_option_names() {
    static const std::map<std::string, std::vector<std::string>> names = {
        {"curvature", {"order", "check_closed_form"}},
        {"model", {"k"}},
        {"stabdim", {"k", "affine"}},
        {"verify-thm15", {"check_closure"}},
        {"alpha", {"nu", "tolerance"}},
        {"classify-psi", {"nu_max"}},
        {"okp", {"k"}},
        {"orbit-map", {"xi", "k"}},
        {"jacobi", {"xi"}},
    };
    return names;
}

inline int parse_int_field(const std::string& value, int line, int col, const std::string& what) {
    try {
        size_t used = 0;
        int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ParseError(line, col, what + " must be an integer, got '" + value + "'");
    }
}

} // namespace detail

// Line-oriented key=value format.  Keys: p, family, k (Mk only), psi (Npsi
// only), point.<coord>, task.<n>.  '#' starts a comment line.  Unknown keys
// are rejected.
inline ScenarioConfig parse_scenario(const std::string& text) {
    struct RawLine {
        int no = 0;
        int value_col = 0;
        std::string key;
        std::string value;
    };
    std::vector<RawLine> raw;
    {
        size_t start = 0;
        int lineno = 0;
        while (start <= text.size()) {
            size_t end = text.find('\n', start);
            std::string line = end == std::string::npos ? text.substr(start)
                                                        : text.substr(start, end - start);
            ++lineno;
            std::string stripped = detail::trim(line);
            if (!stripped.empty() && stripped[0] != '#') {
                size_t eq = line.find('=');
                if (eq == std::string::npos) throw ParseError(lineno, 1, "expected key=value");
                RawLine rl;
                rl.no = lineno;
                rl.key = detail::trim(line.substr(0, eq));
                size_t vstart = line.find_first_not_of(" \t", eq + 1);
                if (vstart == std::string::npos) vstart = eq + 1;
                rl.value_col = int(vstart) + 1;
                rl.value = detail::trim(line.substr(eq + 1));
                if (rl.key.empty()) throw ParseError(lineno, 1, "empty key");
                raw.push_back(std::move(rl));
            }
            if (end == std::string::npos) break;
            start = end + 1;
        }
    }

    std::map<std::string, RawLine> scalar;
    std::vector<RawLine> points;
    std::map<int, RawLine> tasks;
    for (auto& rl : raw) {
        if (rl.key == "p" || rl.key == "family" || rl.key == "k" || rl.key == "psi") {
            if (scalar.count(rl.key))
                throw ParseError(rl.no, 1, "duplicate key '" + rl.key + "'");
            scalar[rl.key] = rl;
        } else if (rl.key.rfind("point.", 0) == 0) {
            points.push_back(rl);
        } else if (rl.key.rfind("task.", 0) == 0) {
            std::string idx = rl.key.substr(5);
            int n = detail::parse_int_field(idx, rl.no, 1, "task index");
            if (n < 1) throw ParseError(rl.no, 1, "task index must be >= 1");
            if (tasks.count(n)) throw ParseError(rl.no, 1, "duplicate task index " + idx);
            tasks[n] = rl;
        } else {
            throw ParseError(rl.no, 1, "unknown key '" + rl.key + "'");
        }
    }

    ScenarioConfig cfg;
    if (!scalar.count("p")) throw ParseError(1, 1, "missing mandatory key 'p'");
    if (!scalar.count("family")) throw ParseError(1, 1, "missing mandatory key 'family'");
    {
        auto& rl = scalar["p"];
        cfg.p = detail::parse_int_field(rl.value, rl.no, rl.value_col, "p");
        if (cfg.p < 1 || cfg.p > 9)
            throw ParseError(rl.no, rl.value_col, "p must lie in [1, 9]");
    }
    {
        auto& rl = scalar["family"];
        cfg.family = rl.value;
        if (cfg.family != "Mk" && cfg.family != "Npsi")
            throw ParseError(rl.no, rl.value_col, "family must be 'Mk' or 'Npsi'");
    }
    if (scalar.count("k")) {
        auto& rl = scalar["k"];
        if (cfg.family != "Mk")
            throw ParseError(rl.no, 1, "key 'k' is only valid for family Mk");
        cfg.k = detail::parse_int_field(rl.value, rl.no, rl.value_col, "k");
        if (cfg.k < 0 || cfg.k > cfg.p + 2)
            throw ParseError(rl.no, rl.value_col,
                             "k must lie in [0, " + std::to_string(cfg.p + 2) + "]");
    }
    if (scalar.count("psi")) {
        auto& rl = scalar["psi"];
        if (cfg.family != "Npsi")
            throw ParseError(rl.no, 1, "key 'psi' is only valid for family Npsi");
        cfg.psi = parse_expression(rl.value, cfg.p, rl.no, rl.value_col);
        if (!cfg.psi.depends_only_on_y())
            throw ParseError(rl.no, rl.value_col, "psi must depend on y only");
    } else if (cfg.family == "Npsi") {
        throw ParseError(1, 1, "family Npsi requires key 'psi'");
    }

    Coordinates co(cfg.p);
    for (auto& rl : points) {
        std::string cname = rl.key.substr(6);
        auto idx = co.parse_name(cname);
        if (!idx) throw ParseError(rl.no, 1, "unknown coordinate '" + cname + "'");
        if (cfg.point.v.count(*idx))
            throw ParseError(rl.no, 1, "duplicate coordinate '" + cname + "'");
        Expr e = parse_expression(rl.value, cfg.p, rl.no, rl.value_col);
        if (!e.is_constant())
            throw ParseError(rl.no, rl.value_col, "point coordinate must be a rational constant");
        cfg.point.v[*idx] = e.constant_value();
    }

    for (auto& [n, rl] : tasks) {
        TaskSpec spec;
        spec.index = n;
        spec.line = rl.no;
        std::vector<std::string> tokens;
        {
            size_t i = 0;
            while (i < rl.value.size()) {
                while (i < rl.value.size() && std::isspace(static_cast<unsigned char>(rl.value[i])))
                    ++i;
                size_t j = i;
                while (j < rl.value.size() && !std::isspace(static_cast<unsigned char>(rl.value[j])))
                    ++j;
                if (j > i) tokens.push_back(rl.value.substr(i, j - i));
                i = j;
            }
        }
        if (tokens.empty()) throw ParseError(rl.no, rl.value_col, "empty task");
        spec.name = tokens[0];
        auto& known = detail::task_option_names();
        auto it = known.find(spec.name);
        if (it == known.end())
            throw ParseError(rl.no, rl.value_col, "unknown task '" + spec.name + "'");
        for (size_t t = 1; t < tokens.size(); ++t) {
            size_t eq = tokens[t].find('=');
            if (eq == std::string::npos)
                throw ParseError(rl.no, rl.value_col,
                                 "task option '" + tokens[t] + "' must be key=value");
            std::string key = tokens[t].substr(0, eq);
            std::string val = tokens[t].substr(eq + 1);
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                throw ParseError(rl.no, rl.value_col,
                                 "unknown option '" + key + "' for task '" + spec.name + "'");
            if (spec.option(key))
                throw ParseError(rl.no, rl.value_col, "duplicate option '" + key + "'");
            spec.options.emplace_back(key, val);
        }
        cfg.tasks.push_back(std::move(spec));
    }
    return cfg;
}

// canonical text form; parse_scenario(scenario_to_text(cfg)) reproduces cfg
inline std::string scenario_to_text(const ScenarioConfig& cfg) {
    Coordinates co(cfg.p);
    std::string out;
    out += "p = " + std::to_string(cfg.p) + "\n";
    out += "family = " + cfg.family + "\n";
    if (cfg.family == "Mk") out += "k = " + std::to_string(cfg.k) + "\n";
    else out += "psi = " + cfg.psi.to_string(co) + "\n";
    for (auto& [c, v] : cfg.point.v)
        out += "point." + co.name(c) + " = " + rational_to_string(v) + "\n";
    for (auto& t : cfg.tasks) {
        out += "task." + std::to_string(t.index) + " = " + t.name;
        for (auto& [k, v] : t.options) out += " " + k + "=" + v;
        out += "\n";
    }
    return out;
}

struct TaskResult {
    int index = 0;
    std::string task;
    std::string status; // "ok" | "fail" | "error"
    std::string message;
    ordered_json values = ordered_json::object();
    ordered_json residuals = ordered_json::object();
};

// ---- JSON helpers (rationals as "num/den" strings, floats as 17-digit strings)

inline ordered_json scalar_json(const Rational& r) { return rational_to_string(r); }
inline ordered_json scalar_json(double d) { return double_to_string(d); }

template <class S>
inline ordered_json matrix_json(const Matrix<S>& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(scalar_json(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class S>
inline ordered_json model_json(const Model<S>& m, int k) {
    ordered_json j;
    j["p"] = m.p;
    j["k"] = k;
    j["inner"] = matrix_json(m.inner);
    ordered_json tensors = ordered_json::array();
    for (auto& t : m.tensors) {
        ordered_json tj;
        tj["rank"] = t.arity();
        ordered_json entries = ordered_json::array();
        for (auto& [idx, v] : t.entries()) {
            ordered_json e;
            e["index"] = idx;
            e["value"] = scalar_json(v);
            entries.push_back(std::move(e));
        }
        tj["entries"] = std::move(entries);
        tensors.push_back(std::move(tj));
    }
    j["tensors"] = std::move(tensors);
    return j;
}

inline ordered_json dim_table_json(const DimTable& t) {
    ordered_json j;
    j["p"] = t.p;
    ordered_json rows = ordered_json::array();
    for (auto& r : t.rows) {
        ordered_json row;
        if (r.k >= 0) row["k"] = r.k;
        else row["k"] = "psi";
        row["computed"] = r.computed;
        row["formula"] = r.formula;
        row["pass"] = r.pass;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline ordered_json point_json(const Point& P, const Coordinates& co) {
    ordered_json j = ordered_json::object();
    for (auto& [c, v] : P.v) j[co.name(c)] = rational_to_string(v);
    return j;
}

namespace detail {

inline int option_int(const TaskSpec& t, const std::string& key, std::optional<int> def = {}) {
    auto v = t.option(key);
    if (!v) {
        if (def) return *def;
        throw std::runtime_error("task '" + t.name + "' requires option '" + key + "'");
    }
    try {
        size_t used = 0;
        int out = std::stoi(*v, &used);
        if (used != v->size()) throw std::invalid_argument("");
        return out;
    } catch (...) {
        throw std::runtime_error("option '" + key + "' must be an integer, got '" + *v + "'");
    }
}

inline bool option_bool(const TaskSpec& t, const std::string& key, bool def) {
    auto v = t.option(key);
    if (!v) return def;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw std::runtime_error("option '" + key + "' must be true or false, got '" + *v + "'");
}

inline std::vector<Rational> option_vector(const TaskSpec& t, const std::string& key, int p,
                                           int expected) {
    auto v = t.option(key);
    if (!v) throw std::runtime_error("task '" + t.name + "' requires option '" + key + "'");
    std::vector<Rational> out;
    size_t start = 0;
    while (start <= v->size()) {
        size_t comma = v->find(',', start);
        std::string piece = comma == std::string::npos ? v->substr(start)
                                                       : v->substr(start, comma - start);
        Expr e = parse_expression(piece, p);
        if (!e.is_constant())
            throw std::runtime_error("components of '" + key + "' must be rational constants");
        out.push_back(e.constant_value());
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (int(out.size()) != expected)
        throw std::runtime_error("option '" + key + "' needs " + std::to_string(expected) +
                                 " comma-separated components, got " +
                                 std::to_string(out.size()));
    return out;
}

inline Expr scenario_F(const ScenarioConfig& cfg) {
    if (cfg.custom_F) return *cfg.custom_F;
    if (cfg.family == "Mk") return builtin_F(cfg.p, cfg.k);
    return psi_family_F(cfg.p, cfg.psi);
}

inline double option_double(const TaskSpec& t, const std::string& key, double def) {
    auto v = t.option(key);
    if (!v) return def;
    try {
        size_t used = 0;
        double out = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument("");
        return out;
    } catch (...) {
        throw std::runtime_error("option '" + key + "' must be a number, got '" + *v + "'");
    }
}

inline int require_model_k(const ScenarioConfig& cfg, const TaskSpec& t, int cap) {
    std::optional<int> def;
    if (cfg.family == "Mk") def = cfg.k;
    int k = option_int(t, "k", def);
    if (k < 0 || k > cap)
        throw std::runtime_error("k must lie in [0, " + std::to_string(cap) + "]");
    return k;
}

} // namespace detail

inline TaskResult run_task(const ScenarioConfig& cfg, const TaskSpec& t) {
    TaskResult r;
    r.index = t.index;
    r.task = t.name;
    r.status = "ok";
    Coordinates co(cfg.p);
    try {
        if (t.name == "curvature") {
            int order = detail::option_int(t, "order", 0);
            if (order < 0 || order > 12) throw std::runtime_error("order must lie in [0, 12]");
            bool check = detail::option_bool(t, "check_closed_form", false);
            Manifold man(cfg.p, detail::scenario_F(cfg));
            const TensorField& top = man.curvature(order);
            r.values["order"] = order;
            r.values["nonzero_entries"] = int(top.entries.size());
            r.values["symmetric_space"] = man.is_symmetric_space();
            if (check) {
                auto rep = man.check_closed_form(order);
                r.values["closed_form"] = rep.ok ? "pass" : "fail";
                if (!rep.ok) {
                    r.status = "fail";
                    r.message = rep.detail;
                }
            }
        } else if (t.name == "model") {
            int k = detail::require_model_k(cfg, t, 12);
            Manifold man(cfg.p, detail::scenario_F(cfg));
            if (can_extract_exactly(man, cfg.point)) {
                Model<Rational> m = extract_model<Rational>(man, cfg.point, k);
                r.values["exact"] = true;
                r.values["model"] = model_json(m, k);
            } else {
                Model<double> m = extract_model<double>(man, cfg.point, k);
                r.values["exact"] = false;
                r.values["model"] = model_json(m, k);
            }
        } else if (t.name == "stabdim") {
            int k = detail::require_model_k(cfg, t, cfg.p + 2);
            bool affine = detail::option_bool(t, "affine", false);
            StabilizerResult st = affine ? stabilizer_algebra(affine_model(cfg.p, k))
                                         : stabilizer_algebra(standard_model(cfg.p, k));
            r.values["p"] = cfg.p;
            r.values["k"] = k;
            r.values["affine"] = affine;
            r.values["dim"] = st.dim;
            r.values["closed_under_bracket"] = st.closed_under_bracket;
        } else if (t.name == "verify-thm15") {
            bool cc = detail::option_bool(t, "check_closure", false);
            DimTable table = manifold_isometry_dims(cfg.p, cc);
            r.values = dim_table_json(table);
            if (cc) r.values["closed_under_bracket"] = table.all_closed;
            bool all = true;
            for (auto& row : table.rows) all = all && row.pass;
            if (cc) all = all && table.all_closed;
            if (!all) {
                r.status = "fail";
                r.message = "computed dimensions differ from the closed formulas";
            }
        } else if (t.name == "alpha") {
            if (cfg.family != "Npsi") throw std::runtime_error("alpha requires family Npsi");
            int nu = detail::option_int(t, "nu");
            if (nu < 1 || nu > 9) throw std::runtime_error("nu must lie in [1, 9]");
            double tol = detail::option_double(t, "tolerance", 1e-8);
            PsiProfile prof{cfg.p, cfg.psi};
            AlphaCurvatureCheck chk = verify_alpha_as_curvature(prof, nu, cfg.point, tol);
            r.values["nu"] = nu;
            r.values["alpha"] = scalar_json(chk.alpha_value);
            r.values["model_value"] = scalar_json(chk.model_value);
            if (chk.exact) {
                r.values["exact_alpha"] = scalar_json(chk.exact_alpha);
                r.values["exact_model"] = scalar_json(chk.exact_model);
            }
            r.residuals["relative"] = scalar_json(chk.rel_error);
            if (!chk.ok) {
                r.status = "fail";
                r.message = chk.detail.empty() ? "model component disagrees with the closed formula"
                                               : chk.detail;
            }
        } else if (t.name == "classify-psi") {
            if (cfg.family != "Npsi") throw std::runtime_error("classify-psi requires family Npsi");
            int nu_max = detail::option_int(t, "nu_max", 6);
            ClassifyReport rep = classify(PsiProfile{cfg.p, cfg.psi}, nu_max);
            r.values["verdict"] = verdict_name(rep.verdict);
            r.values["detail"] = rep.detail;
            if (rep.witness_nu > 0) r.values["witness_nu"] = rep.witness_nu;
        } else if (t.name == "okp") {
            int k = detail::require_model_k(cfg, t, cfg.p);
            OkpResult res = okp_algebra(cfg.p, k);
            bool pass = res.dim == res.formula && res.orbit_rank == 2 * cfg.p - k - 1;
            r.values["dim"] = res.dim;
            r.values["formula"] = res.formula;
            r.values["orbit_rank"] = res.orbit_rank;
            r.values["pass"] = pass;
            if (!pass) {
                r.status = "fail";
                r.message = "dimension or orbit rank differs from the closed formula";
            }
        } else if (t.name == "orbit-map") {
            int k = detail::require_model_k(cfg, t, cfg.p + 2);
            std::vector<Rational> xi = detail::option_vector(t, "xi", cfg.p, co.half());
            OrbitMapResult res = construct_orbit_map(cfg.p, k, xi);
            switch (res.status) {
                case OrbitMapResult::Status::Verified: r.values["status"] = "verified"; break;
                case OrbitMapResult::Status::NoMap: r.values["status"] = "no-map"; break;
                default: r.values["status"] = "condition-held-but-unverified"; break;
            }
            r.values["note"] = res.note;
            r.values["exact"] = res.exact;
            if (res.status != OrbitMapResult::Status::NoMap) {
                if (res.exact) r.values["map"] = matrix_json(res.exact_map);
                else r.values["map"] = matrix_json(res.float_map);
            }
            r.residuals["verification"] = scalar_json(res.residual);
            if (res.status == OrbitMapResult::Status::ConditionHeldButUnverified) {
                r.status = "fail";
                r.message = "orbit condition holds but the candidate map fails verification";
            }
        } else if (t.name == "jacobi") {
            std::vector<Rational> xi = detail::option_vector(t, "xi", cfg.p, co.half());
            JacobiResult res = jacobi_form(affine_model(cfg.p, 0), xi);
            r.values["rank"] = res.rank;
            ordered_json sig;
            sig["positive"] = res.signature.positive;
            sig["negative"] = res.signature.negative;
            sig["zero"] = res.signature.zero;
            r.values["signature"] = std::move(sig);
            r.values["form"] = matrix_json(res.form);
        } else {
            throw std::runtime_error("unknown task '" + t.name + "'");
        }
    } catch (const std::exception& e) {
        r.status = "error";
        r.message = e.what();
        r.values = ordered_json::object();
        r.residuals = ordered_json::object();
    }
    return r;
}

inline std::vector<TaskResult> run_scenario(const ScenarioConfig& cfg) {
    std::vector<TaskResult> out;
    for (auto& t : cfg.tasks) out.push_back(run_task(cfg, t));
    return out;
}

inline ordered_json scenario_json(const ScenarioConfig& cfg) {
    Coordinates co(cfg.p);
    ordered_json j;
    j["p"] = cfg.p;
    j["family"] = cfg.family;
    if (cfg.family == "Mk") j["k"] = cfg.k;
    else j["psi"] = cfg.psi.to_string(co);
    if (cfg.custom_F) j["F"] = cfg.custom_F->to_string(co);
    j["point"] = point_json(cfg.point, co);
    ordered_json tasks = ordered_json::array();
    for (auto& t : cfg.tasks) {
        ordered_json tj;
        tj["index"] = t.index;
        tj["name"] = t.name;
        ordered_json opts = ordered_json::object();
        for (auto& [k, v] : t.options) opts[k] = v;
        tj["options"] = std::move(opts);
        tasks.push_back(std::move(tj));
    }
    j["tasks"] = std::move(tasks);
    return j;
}

inline ordered_json report_json(const ScenarioConfig& cfg, const std::vector<TaskResult>& results) {
    ordered_json j;
    j["scenario"] = scenario_json(cfg);
    ordered_json arr = ordered_json::array();
    for (auto& r : results) {
        ordered_json rj;
        rj["task"] = r.task;
        rj["status"] = r.status;
        rj["message"] = r.message;
        rj["values"] = r.values;
        rj["residuals"] = r.residuals;
        arr.push_back(std::move(rj));
    }
    j["results"] = std::move(arr);
    return j;
}

inline std::string emit_report(const ScenarioConfig& cfg, const std::vector<TaskResult>& results) {
    return report_json(cfg, results).dump(2) + "\n";
}

} // namespace curvhom

#endif
