#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smartws/kb.hpp"
#include "smartws/model.hpp"
#include "smartws/naming.hpp"
#include "smartws/text.hpp"

namespace smartws {

enum class Comparator { lt, le, gt, ge, eq, ne };

inline const char* comparator_symbol(Comparator c) {
    switch (c) {
        case Comparator::lt: return "<";
        case Comparator::le: return "<=";
        case Comparator::gt: return ">";
        case Comparator::ge: return ">=";
        case Comparator::eq: return "==";
        case Comparator::ne: return "!=";
    }
    return "==";
}

struct Guard {
    std::string variable;  // must be a condition variable
    Comparator comparator = Comparator::eq;
    Literal threshold;
    friend bool operator==(const Guard&, const Guard&) = default;
};

// Condition -> action rule evaluated inside a service wrapper against the
// request graph. Emit variables outside the condition are fresh outputs and
// get minted IRIs.
struct SmartRule {
    std::string name;
    GraphPattern condition;
    std::vector<Guard> guards;
    std::vector<TriplePattern> emit;
    friend bool operator==(const SmartRule&, const SmartRule&) = default;
};

struct RuleOutcome {
    bool fired = false;
    std::vector<Triple> emitted;
    std::optional<std::string> rule_name;
};

struct RuleParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::optional<long double> numeric_value(const Literal& l) {
    if (l.datatype != Datatype::integer && l.datatype != Datatype::decimal) return std::nullopt;
    try {
        return std::stold(l.lexical);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace detail

// True/false when the comparison is defined, nullopt on unbound variable or
// datatype mismatch (ordering needs two numerics; eq/ne also accepts two
// literals of one datatype).
inline std::optional<bool> evaluate_guard(const Guard& g, const Binding& binding) {
    auto it = binding.find(g.variable);
    if (it == binding.end() || !is_literal(it->second)) return std::nullopt;
    const Literal& value = as_literal(it->second);

    auto lhs = detail::numeric_value(value);
    auto rhs = detail::numeric_value(g.threshold);
    if (lhs && rhs) {
        switch (g.comparator) {
            case Comparator::lt: return *lhs < *rhs;
            case Comparator::le: return *lhs <= *rhs;
            case Comparator::gt: return *lhs > *rhs;
            case Comparator::ge: return *lhs >= *rhs;
            case Comparator::eq: return *lhs == *rhs;
            case Comparator::ne: return *lhs != *rhs;
        }
    }
    if (g.comparator == Comparator::eq || g.comparator == Comparator::ne) {
        if (value.datatype != g.threshold.datatype) return std::nullopt;
        bool eq = value.lexical == g.threshold.lexical;
        return g.comparator == Comparator::eq ? eq : !eq;
    }
    return std::nullopt;
}

using Minter = std::function<Iri(const std::string& output_variable)>;

namespace detail {

inline std::optional<std::vector<Triple>> instantiate_emit(const std::vector<TriplePattern>& emit,
                                                           const Binding& binding,
                                                           const Minter& mint) {
    std::map<std::string, Iri> fresh;
    auto resolve_iri = [&](const std::variant<Variable, Iri>& field) -> std::optional<Iri> {
        if (auto* i = std::get_if<Iri>(&field)) return *i;
        const auto& name = std::get<Variable>(field).name;
        auto bound = binding.find(name);
        if (bound != binding.end()) {
            if (!is_iri(bound->second)) return std::nullopt;
            return as_iri(bound->second);
        }
        auto it = fresh.find(name);
        if (it == fresh.end()) it = fresh.emplace(name, mint(name)).first;
        return it->second;
    };
    std::vector<Triple> out;
    for (const auto& tp : emit) {
        Triple t;
        auto s = resolve_iri(tp.subject);
        auto p = resolve_iri(tp.predicate);
        if (!s || !p) return std::nullopt;
        t.subject = *s;
        t.predicate = *p;
        if (auto* v = std::get_if<Variable>(&tp.object)) {
            auto bound = binding.find(v->name);
            if (bound != binding.end()) {
                t.object = bound->second;
            } else {
                auto it = fresh.find(v->name);
                if (it == fresh.end()) it = fresh.emplace(v->name, mint(v->name)).first;
                t.object = it->second;
            }
        } else if (auto* i = std::get_if<Iri>(&tp.object)) {
            t.object = *i;
        } else {
            t.object = std::get<Literal>(tp.object);
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace detail

// First-match-wins over the rule list. A rule fires iff its condition
// matches the request graph (seeded with the caller's binding where variable
// names coincide) and every guard holds under that match; guard type
// mismatches disqualify the match rather than erroring.
inline RuleOutcome evaluate_rules(const std::vector<SmartRule>& rules,
                                  const std::vector<Triple>& request_graph,
                                  const Binding& binding, const Minter& mint = {}) {
    KnowledgeBase graph = kb_from(request_graph);
    for (const auto& rule : rules) {
        auto matches = graph.match(rule.condition, binding);
        for (const auto& m : matches) {
            bool guards_hold = true;
            for (const auto& g : rule.guards) {
                auto verdict = evaluate_guard(g, m);
                if (!verdict || !*verdict) {
                    guards_hold = false;
                    break;
                }
            }
            if (!guards_hold) continue;
            Minter minter = mint;
            if (!minter) {
                std::string fp = binding_fingerprint(m);
                std::string service = rule.name;
                minter = [fp, service](const std::string& var) {
                    return mint_output_iri(service, fp, var);
                };
            }
            auto emitted = detail::instantiate_emit(rule.emit, m, minter);
            if (!emitted) continue;  // template resolved a literal into an IRI slot
            return RuleOutcome{true, std::move(*emitted), rule.name};
        }
    }
    return RuleOutcome{};
}

// Parses one guard expression of the form `?var OP value` where OP is one of
// < <= > >= == != and value is a number (integer when dot-free), a quoted
// string, or true/false.
inline Guard parse_guard(const std::string& text) {
    auto first = text.find_first_not_of(" \t");
    if (first == std::string::npos) throw RuleParseError("empty guard expression");
    auto sp1 = text.find_first_of(" \t", first);
    if (sp1 == std::string::npos) throw RuleParseError("guard '" + text + "': expected 3 parts");
    auto op_start = text.find_first_not_of(" \t", sp1);
    auto sp2 = text.find_first_of(" \t", op_start);
    if (op_start == std::string::npos || sp2 == std::string::npos)
        throw RuleParseError("guard '" + text + "': expected 3 parts");
    auto val_start = text.find_first_not_of(" \t", sp2);
    if (val_start == std::string::npos)
        throw RuleParseError("guard '" + text + "': missing value");

    std::string var = text.substr(first, sp1 - first);
    std::string op = text.substr(op_start, sp2 - op_start);
    std::string value = text.substr(val_start);
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t')) value.pop_back();

    Guard g;
    if (var.size() < 2 || var.front() != '?' || !valid_variable_name(var.substr(1)))
        throw RuleParseError("guard '" + text + "': left side must be a ?variable");
    g.variable = var.substr(1);

    if (op == "<") g.comparator = Comparator::lt;
    else if (op == "<=") g.comparator = Comparator::le;
    else if (op == ">") g.comparator = Comparator::gt;
    else if (op == ">=") g.comparator = Comparator::ge;
    else if (op == "==") g.comparator = Comparator::eq;
    else if (op == "!=") g.comparator = Comparator::ne;
    else throw RuleParseError("guard '" + text + "': unknown comparator '" + op + "'");

    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        g.threshold = Literal{value.substr(1, value.size() - 2), Datatype::string};
    } else if (value == "true" || value == "false") {
        g.threshold = Literal{value, Datatype::boolean};
    } else {
        Datatype dt = value.find('.') == std::string::npos ? Datatype::integer : Datatype::decimal;
        if (!lexical_valid(value, dt))
            throw RuleParseError("guard '" + text + "': malformed value '" + value + "'");
        g.threshold = Literal{value, dt};
    }
    return g;
}

inline std::string guard_text(const Guard& g) {
    std::string value = g.threshold.datatype == Datatype::string
                            ? "\"" + g.threshold.lexical + "\""
                            : g.threshold.lexical;
    return "?" + g.variable + " " + comparator_symbol(g.comparator) + " " + value;
}

// Structural checks shared by every rule source: guards must test condition
// variables and a rule must emit something.
inline void validate_rule(const SmartRule& rule) {
    if (rule.emit.empty())
        throw RuleParseError("rule '" + rule.name + "': emit must not be empty");
    auto condition_vars = rule.condition.vars();
    for (const auto& g : rule.guards) {
        if (!condition_vars.count(g.variable))
            throw RuleParseError("rule '" + rule.name + "': guard variable ?" + g.variable +
                                 " does not occur in the condition");
    }
}

// Rule blocks as they appear in description files:
//   {"name": ..., "condition": "<patterns>", "guards": ["?v >= 20"], "emit": "<patterns>"}
inline SmartRule parse_rule(const nlohmann::json& block, const PrefixMap& prefixes = {}) {
    if (!block.is_object()) throw RuleParseError("rule block must be a JSON object");
    SmartRule rule;
    auto text_field = [&](const char* key) -> std::string {
        if (!block.contains(key) || !block.at(key).is_string())
            throw RuleParseError(std::string("rule block: missing string field '") + key + "'");
        return block.at(key).get<std::string>();
    };
    rule.name = text_field("name");
    try {
        rule.condition = parse_pattern(text_field("condition"), prefixes);
        rule.emit = parse_pattern(text_field("emit"), prefixes).patterns;
    } catch (const ParseError& e) {
        throw RuleParseError("rule '" + rule.name + "': " + e.what());
    }
    if (block.contains("guards")) {
        if (!block.at("guards").is_array())
            throw RuleParseError("rule '" + rule.name + "': guards must be an array");
        for (const auto& g : block.at("guards")) {
            if (!g.is_string())
                throw RuleParseError("rule '" + rule.name + "': guards must be strings");
            rule.guards.push_back(parse_guard(g.get<std::string>()));
        }
    }
    validate_rule(rule);
    return rule;
}

inline SmartRule parse_rule(std::string_view text, const PrefixMap& prefixes = {}) {
    nlohmann::json block;
    try {
        block = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw RuleParseError(std::string("rule block: ") + e.what());
    }
    return parse_rule(block, prefixes);
}

inline nlohmann::ordered_json rule_to_json(const SmartRule& rule) {
    nlohmann::ordered_json out;
    out["name"] = rule.name;
    out["condition"] = pattern_text(rule.condition);
    std::vector<std::string> guards;
    for (const auto& g : rule.guards) guards.push_back(guard_text(g));
    out["guards"] = guards;
    GraphPattern emit{rule.emit};
    out["emit"] = pattern_text(emit);
    return out;
}

}  // namespace smartws
