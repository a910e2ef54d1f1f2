#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>

#include "tutorforge/errors.hpp"
#include "tutorforge/sheet.hpp"

namespace tutorforge {

std::optional<double> parse_number(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (end != begin + text.size() || errno == ERANGE) return std::nullopt;
    if (std::isnan(v) || std::isinf(v)) return std::nullopt;
    return v;
}

std::string format_number(double value) {
    if (value == 0.0) return "0";  // normalises -0
    if (value == std::floor(value) && std::abs(value) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", value);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

CellContent classify_cell(const std::string& raw) {
    CellContent c;
    c.raw = raw;
    if (raw.empty()) {
        c.kind = CellKind::Empty;
        return c;
    }
    if (raw.front() == '=') {
        c.kind = CellKind::Formula;
        c.computed = "#ERROR";  // placeholder until recompute_formulas runs
        return c;
    }
    if (auto num = parse_number(raw)) {
        c.kind = CellKind::Number;
        c.computed = format_number(*num);
        return c;
    }
    c.kind = CellKind::Text;
    c.computed = raw;
    return c;
}

namespace {

// Supported formula subset: "=<number>", "=<cell>", "=SUM(range)", "=AVERAGE(range)".
struct FormulaExpr {
    enum class Kind { Literal, Ref, Sum, Average } kind = Kind::Literal;
    double literal = 0.0;
    CellAddress ref;
    RangeRef range;
};

std::string strip_spaces(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

std::optional<FormulaExpr> parse_formula(const std::string& raw) {
    std::string body = strip_spaces(raw.substr(1));  // drop '='
    if (body.empty()) return std::nullopt;

    if (auto num = parse_number(body)) {
        FormulaExpr e;
        e.kind = FormulaExpr::Kind::Literal;
        e.literal = *num;
        return e;
    }

    std::string upper = body;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (auto [name, kind] : {std::pair{std::string("SUM("), FormulaExpr::Kind::Sum},
                              std::pair{std::string("AVERAGE("), FormulaExpr::Kind::Average}}) {
        if (upper.rfind(name, 0) == 0 && body.back() == ')') {
            std::string arg = body.substr(name.size(), body.size() - name.size() - 1);
            try {
                FormulaExpr e;
                e.kind = kind;
                e.range = parse_range(arg);
                return e;
            } catch (const MalformedRange&) {
                return std::nullopt;
            }
        }
    }

    try {
        FormulaExpr e;
        e.kind = FormulaExpr::Kind::Ref;
        e.ref = parse_cell(body);
        return e;
    } catch (const MalformedRange&) {
        return std::nullopt;
    }
}

// Evaluates against the sheet's current computed values. Error cells and text
// are skipped by the aggregate functions; a plain reference copies the display.
std::string evaluate(const FormulaExpr& e, const Sheet& sheet) {
    switch (e.kind) {
        case FormulaExpr::Kind::Literal:
            return format_number(e.literal);
        case FormulaExpr::Kind::Ref: {
            const CellContent* c = sheet.cell(e.ref);
            return c ? c->computed : "";
        }
        case FormulaExpr::Kind::Sum:
        case FormulaExpr::Kind::Average: {
            double sum = 0.0;
            int count = 0;
            for (const auto& [addr, content] : sheet.cells) {
                if (!e.range.contains(addr)) continue;
                if (auto num = parse_number(content.computed)) {
                    sum += *num;
                    ++count;
                }
            }
            if (e.kind == FormulaExpr::Kind::Sum) return format_number(sum);
            if (count == 0) return "#ERROR";
            return format_number(sum / count);
        }
    }
    return "#ERROR";
}

void recompute_sheet(Sheet& sheet) {
    std::vector<CellAddress> formulas;
    for (const auto& [addr, content] : sheet.cells)
        if (content.kind == CellKind::Formula) formulas.push_back(addr);
    if (formulas.empty()) return;

    // Fixpoint iteration handles chains of references without explicit
    // dependency analysis; cycles never settle and resolve to #ERROR.
    const size_t max_passes = formulas.size() + 1;
    std::set<CellAddress> changed_last;
    for (size_t pass = 0; pass < max_passes; ++pass) {
        changed_last.clear();
        for (const CellAddress& addr : formulas) {
            CellContent& cell = sheet.cells.at(addr);
            auto expr = parse_formula(cell.raw);
            std::string value = expr ? evaluate(*expr, sheet) : "#ERROR";
            if (value != cell.computed) {
                cell.computed = value;
                changed_last.insert(addr);
            }
        }
        if (changed_last.empty()) return;
    }
    for (const CellAddress& addr : changed_last) sheet.cells.at(addr).computed = "#ERROR";
}

}  // namespace

void recompute_formulas(AppState& state) {
    for (Sheet& sheet : state.workbook) recompute_sheet(sheet);
}

}  // namespace tutorforge
