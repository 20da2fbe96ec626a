#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace smartws {

// Datatypes a literal may carry. Anything not explicitly typed is a string.
enum class Datatype { string, integer, decimal, boolean };

inline const char* datatype_name(Datatype dt) {
    switch (dt) {
        case Datatype::string: return "string";
        case Datatype::integer: return "integer";
        case Datatype::decimal: return "decimal";
        case Datatype::boolean: return "boolean";
    }
    return "string";
}

inline bool valid_iri(std::string_view v) {
    if (v.empty()) return false;
    auto colon = v.find(':');
    if (colon == std::string_view::npos || colon == 0) return false;
    char first = v.front();
    if (!((first >= 'A' && first <= 'Z') || (first >= 'a' && first <= 'z'))) return false;
    for (std::size_t i = 1; i < colon; ++i) {
        char c = v[i];
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                  (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
        if (!ok) return false;
    }
    for (char c : v) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '<' || c == '>') return false;
    }
    return true;
}

inline bool valid_variable_name(std::string_view v) {
    if (v.empty()) return false;
    char first = v.front();
    if (!((first >= 'A' && first <= 'Z') || (first >= 'a' && first <= 'z') || first == '_'))
        return false;
    for (char c : v.substr(1)) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                  (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

inline bool lexical_valid(std::string_view lex, Datatype dt) {
    switch (dt) {
        case Datatype::string:
            return true;
        case Datatype::boolean:
            return lex == "true" || lex == "false";
        case Datatype::integer: {
            std::size_t i = 0;
            if (i < lex.size() && (lex[i] == '+' || lex[i] == '-')) ++i;
            if (i >= lex.size()) return false;
            for (; i < lex.size(); ++i)
                if (lex[i] < '0' || lex[i] > '9') return false;
            return true;
        }
        case Datatype::decimal: {
            std::size_t i = 0;
            if (i < lex.size() && (lex[i] == '+' || lex[i] == '-')) ++i;
            std::size_t digits = 0, dots = 0;
            for (; i < lex.size(); ++i) {
                if (lex[i] == '.') ++dots;
                else if (lex[i] >= '0' && lex[i] <= '9') ++digits;
                else return false;
            }
            return dots == 1 && digits > 0;
        }
    }
    return false;
}

struct Iri {
    std::string value;
    friend bool operator==(const Iri&, const Iri&) = default;
    friend bool operator<(const Iri& a, const Iri& b) { return a.value < b.value; }
};

struct Literal {
    std::string lexical;
    Datatype datatype = Datatype::string;
    friend bool operator==(const Literal&, const Literal&) = default;
};

using Term = std::variant<Iri, Literal>;

inline bool is_iri(const Term& t) { return std::holds_alternative<Iri>(t); }
inline const Iri& as_iri(const Term& t) { return std::get<Iri>(t); }
inline bool is_literal(const Term& t) { return std::holds_alternative<Literal>(t); }
inline const Literal& as_literal(const Term& t) { return std::get<Literal>(t); }

struct Triple {
    Iri subject;
    Iri predicate;
    Term object;
    friend bool operator==(const Triple&, const Triple&) = default;
};

struct Variable {
    std::string name;  // without the leading '?'
    friend bool operator==(const Variable&, const Variable&) = default;
    friend bool operator<(const Variable& a, const Variable& b) { return a.name < b.name; }
};

struct TriplePattern {
    std::variant<Variable, Iri> subject;
    std::variant<Variable, Iri> predicate;
    std::variant<Variable, Iri, Literal> object;
    friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

struct GraphPattern {
    std::vector<TriplePattern> patterns;

    // Union of all variables occurring anywhere in the patterns.
    std::set<std::string> vars() const {
        std::set<std::string> out;
        for (const auto& p : patterns) {
            if (auto* v = std::get_if<Variable>(&p.subject)) out.insert(v->name);
            if (auto* v = std::get_if<Variable>(&p.predicate)) out.insert(v->name);
            if (auto* v = std::get_if<Variable>(&p.object)) out.insert(v->name);
        }
        return out;
    }

    bool empty() const { return patterns.empty(); }
    friend bool operator==(const GraphPattern&, const GraphPattern&) = default;
};

// Solution mapping: variable name -> ground term. Kept sorted by name so
// iteration order is canonical.
using Binding = std::map<std::string, Term>;

// ---- canonical text forms -------------------------------------------------

inline std::string escape_lexical(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string iri_text(const Iri& i) { return "<" + i.value + ">"; }

inline std::string literal_text(const Literal& l) {
    std::string out = "\"" + escape_lexical(l.lexical) + "\"";
    if (l.datatype != Datatype::string) {
        out += "^^";
        out += datatype_name(l.datatype);
    }
    return out;
}

inline std::string term_text(const Term& t) {
    return is_iri(t) ? iri_text(as_iri(t)) : literal_text(as_literal(t));
}

inline std::string triple_line(const Triple& t) {
    return iri_text(t.subject) + " " + iri_text(t.predicate) + " " + term_text(t.object) + " .";
}

inline bool triple_less(const Triple& a, const Triple& b) {
    if (a.subject.value != b.subject.value) return a.subject.value < b.subject.value;
    if (a.predicate.value != b.predicate.value) return a.predicate.value < b.predicate.value;
    return term_text(a.object) < term_text(b.object);
}

inline std::string pattern_term_text(const std::variant<Variable, Iri>& t) {
    if (auto* v = std::get_if<Variable>(&t)) return "?" + v->name;
    return iri_text(std::get<Iri>(t));
}

inline std::string pattern_term_text(const std::variant<Variable, Iri, Literal>& t) {
    if (auto* v = std::get_if<Variable>(&t)) return "?" + v->name;
    if (auto* i = std::get_if<Iri>(&t)) return iri_text(*i);
    return literal_text(std::get<Literal>(t));
}

inline std::string pattern_line(const TriplePattern& p) {
    return pattern_term_text(p.subject) + " " + pattern_term_text(p.predicate) + " " +
           pattern_term_text(p.object) + " .";
}

inline std::string pattern_text(const GraphPattern& g) {
    std::string out;
    for (const auto& p : g.patterns) {
        out += pattern_line(p);
        out += "\n";
    }
    return out;
}

// Canonical one-line form of a binding; variables appear in name order.
inline std::string binding_text(const Binding& b) {
    std::string out;
    for (const auto& [name, term] : b) {
        out += "?" + name + "=" + term_text(term) + ";";
    }
    return out;
}

}  // namespace smartws
