#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smartws/model.hpp"
#include "smartws/rules.hpp"
#include "smartws/text.hpp"

namespace smartws {

struct DescriptionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One declared input or output of a service.
struct IoSpec {
    enum class Kind { file, parameter };
    std::string variable;  // without the leading '?'
    Kind kind = Kind::file;
    std::string datatype;
    Iri concept_iri;
    std::string format;  // physical format, media-type-like
    bool required = true;
    friend bool operator==(const IoSpec&, const IoSpec&) = default;
};

struct EvaluationMetric {
    std::string metric_name;
    double score = 0.0;  // static quality score in [0,1], higher is better
    friend bool operator==(const EvaluationMetric&, const EvaluationMetric&) = default;
};

struct ServiceDescription {
    std::string name;
    std::vector<std::string> contributors;
    std::string description;
    std::vector<EvaluationMetric> evaluation_metrics;
    std::vector<Iri> source_code;
    std::vector<std::string> implementation_languages;
    Iri endpoint;
    std::vector<Iri> example_requests;
    std::vector<Iri> example_responses;
    std::vector<IoSpec> inputs;
    std::vector<IoSpec> outputs;
    GraphPattern precondition;
    GraphPattern postcondition;
    Iri algorithm_class;
    std::vector<SmartRule> rules;
    std::vector<std::string> declared_formats;
    friend bool operator==(const ServiceDescription&, const ServiceDescription&) = default;

    double metric_score(const std::string& metric_name) const {
        for (const auto& m : evaluation_metrics)
            if (m.metric_name == metric_name) return m.score;
        return 0.0;
    }

    // Variables of inputs declared required=false; their precondition
    // conjuncts are matched opportunistically, not as eligibility gates.
    std::set<std::string> optional_input_vars() const {
        std::set<std::string> out;
        for (const auto& in : inputs)
            if (!in.required) out.insert(in.variable);
        return out;
    }
};

namespace detail {

// SAX pass that only checks for duplicate keys among the top-level fields.
class DuplicateKeyCheck : public nlohmann::json_sax<nlohmann::json> {
public:
    bool null() override { return true; }
    bool boolean(bool) override { return true; }
    bool number_integer(number_integer_t) override { return true; }
    bool number_unsigned(number_unsigned_t) override { return true; }
    bool number_float(number_float_t, const string_t&) override { return true; }
    bool string(string_t&) override { return true; }
    bool binary(binary_t&) override { return true; }
    bool start_object(std::size_t) override {
        ++depth_;
        return true;
    }
    bool key(string_t& k) override {
        if (depth_ == 1 && !seen_.insert(k).second)
            throw DescriptionError("duplicate field '" + k + "'");
        return true;
    }
    bool end_object() override {
        --depth_;
        return true;
    }
    bool start_array(std::size_t) override { return true; }
    bool end_array() override { return true; }
    bool parse_error(std::size_t position, const std::string&,
                     const nlohmann::json::exception& ex) override {
        throw DescriptionError(std::string(ex.what()) + " (byte " + std::to_string(position) + ")");
    }

private:
    int depth_ = 0;
    std::set<std::string> seen_;
};

inline std::string require_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw DescriptionError(std::string("missing required field '") + key + "'");
    if (!j.at(key).is_string())
        throw DescriptionError(std::string("field '") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

inline std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    if (!j.at(key).is_array())
        throw DescriptionError(std::string("field '") + key + "' must be an array");
    for (const auto& v : j.at(key)) {
        if (!v.is_string())
            throw DescriptionError(std::string("field '") + key + "' must contain strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

inline Iri parse_iri_field(const std::string& raw, const PrefixMap& prefixes, const char* key) {
    std::string value = raw;
    if (!raw.empty() && raw.front() != '<' && !valid_iri(raw)) {
        // allow prefixed names in IRI-valued fields
        auto colon = raw.find(':');
        if (colon != std::string::npos) {
            auto it = prefixes.find(raw.substr(0, colon));
            if (it != prefixes.end()) value = it->second + raw.substr(colon + 1);
        }
    }
    if (!value.empty() && value.front() == '<' && value.back() == '>')
        value = value.substr(1, value.size() - 2);
    if (!valid_iri(value))
        throw DescriptionError(std::string("field '") + key + "': malformed IRI '" + raw + "'");
    return Iri{value};
}

inline std::vector<IoSpec> parse_io_list(const nlohmann::json& j, const char* key,
                                         const PrefixMap& prefixes) {
    std::vector<IoSpec> out;
    if (!j.contains(key)) throw DescriptionError(std::string("missing required field '") + key + "'");
    if (!j.at(key).is_array())
        throw DescriptionError(std::string("field '") + key + "' must be an array");
    for (const auto& entry : j.at(key)) {
        IoSpec io;
        std::string var = require_string(entry, "variable");
        if (!var.empty() && var.front() == '?') var = var.substr(1);
        if (!valid_variable_name(var))
            throw DescriptionError(std::string(key) + ": malformed variable name '" + var + "'");
        io.variable = var;
        std::string kind = require_string(entry, "kind");
        if (kind == "file") io.kind = IoSpec::Kind::file;
        else if (kind == "parameter") io.kind = IoSpec::Kind::parameter;
        else throw DescriptionError(std::string(key) + ": kind must be file or parameter, got '" +
                                    kind + "'");
        io.datatype = require_string(entry, "datatype");
        io.concept_iri = parse_iri_field(require_string(entry, "concept"), prefixes, "concept");
        io.format = require_string(entry, "format");
        if (entry.contains("required")) {
            if (!entry.at("required").is_boolean())
                throw DescriptionError(std::string(key) + ": required must be a boolean");
            io.required = entry.at("required").get<bool>();
        }
        out.push_back(std::move(io));
    }
    return out;
}

}  // namespace detail

// Parses a description document (UTF-8 JSON). Enforces the format-level
// constraints: each input variable must occur in the precondition and each
// output variable in the postcondition. Everything else (scores, endpoint
// scheme, non-empty conditions) is left to validate_description so that
// imperfect descriptions can still be inspected and classified.
inline ServiceDescription parse_description(const std::string& document) {
    detail::DuplicateKeyCheck dup;
    nlohmann::json::sax_parse(document, &dup);
    nlohmann::json j = nlohmann::json::parse(document);
    if (!j.is_object()) throw DescriptionError("description must be a JSON object");

    PrefixMap prefixes;
    if (j.contains("prefixes")) {
        if (!j.at("prefixes").is_object())
            throw DescriptionError("field 'prefixes' must be an object");
        for (const auto& [name, iri] : j.at("prefixes").items()) {
            if (!iri.is_string()) throw DescriptionError("prefix '" + name + "' must map to a string");
            prefixes[name] = iri.get<std::string>();
        }
    }

    ServiceDescription d;
    d.name = detail::require_string(j, "name");
    d.endpoint = detail::parse_iri_field(detail::require_string(j, "endpoint"), prefixes, "endpoint");
    d.algorithm_class =
        detail::parse_iri_field(detail::require_string(j, "algorithmClass"), prefixes, "algorithmClass");

    if (j.contains("description")) d.description = detail::require_string(j, "description");
    d.contributors = detail::string_list(j, "contributors");
    d.implementation_languages = detail::string_list(j, "implementationLanguages");
    d.declared_formats = detail::string_list(j, "declaredFormats");
    for (const auto& s : detail::string_list(j, "sourceCode"))
        d.source_code.push_back(detail::parse_iri_field(s, prefixes, "sourceCode"));
    for (const auto& s : detail::string_list(j, "exampleRequests"))
        d.example_requests.push_back(detail::parse_iri_field(s, prefixes, "exampleRequests"));
    for (const auto& s : detail::string_list(j, "exampleResponses"))
        d.example_responses.push_back(detail::parse_iri_field(s, prefixes, "exampleResponses"));

    if (j.contains("evaluationMetrics")) {
        if (!j.at("evaluationMetrics").is_array())
            throw DescriptionError("field 'evaluationMetrics' must be an array");
        for (const auto& entry : j.at("evaluationMetrics")) {
            EvaluationMetric m;
            m.metric_name = detail::require_string(entry, "metric");
            if (!entry.contains("score") || !entry.at("score").is_number())
                throw DescriptionError("evaluationMetrics: missing numeric 'score'");
            m.score = entry.at("score").get<double>();
            d.evaluation_metrics.push_back(std::move(m));
        }
    }

    d.inputs = detail::parse_io_list(j, "inputs", prefixes);
    d.outputs = detail::parse_io_list(j, "outputs", prefixes);

    auto pattern_field = [&](const char* key) -> GraphPattern {
        std::string text = detail::require_string(j, key);
        try {
            return parse_pattern(text, prefixes);
        } catch (const ParseError& e) {
            throw DescriptionError(std::string("field '") + key + "': " + e.what());
        }
    };
    d.precondition = pattern_field("precondition");
    d.postcondition = pattern_field("postcondition");

    if (j.contains("rules")) {
        if (!j.at("rules").is_array()) throw DescriptionError("field 'rules' must be an array");
        for (const auto& block : j.at("rules")) {
            try {
                d.rules.push_back(parse_rule(block, prefixes));
            } catch (const RuleParseError& e) {
                throw DescriptionError(e.what());
            }
        }
    }

    auto pre_vars = d.precondition.vars();
    for (const auto& in : d.inputs) {
        if (!pre_vars.count(in.variable))
            throw DescriptionError("input variable ?" + in.variable +
                                   " does not occur in the precondition");
    }
    auto post_vars = d.postcondition.vars();
    for (const auto& out : d.outputs) {
        if (!post_vars.count(out.variable))
            throw DescriptionError("output variable ?" + out.variable +
                                   " does not occur in the postcondition");
    }
    return d;
}

// Description invariants as data. Empty result means the description is fit
// for registration and execution.
inline std::vector<std::string> validate_description(const ServiceDescription& d) {
    std::vector<std::string> violations;
    if (d.name.empty()) violations.push_back("name: must be non-empty");
    if (!valid_iri(d.endpoint.value) ||
        (d.endpoint.value.rfind("http://", 0) != 0 && d.endpoint.value.rfind("https://", 0) != 0))
        violations.push_back("endpoint: must be an http(s) IRI");
    if (!valid_iri(d.algorithm_class.value))
        violations.push_back("algorithmClass: must be an IRI");
    for (std::size_t i = 0; i < d.evaluation_metrics.size(); ++i) {
        const auto& m = d.evaluation_metrics[i];
        if (m.score < 0.0 || m.score > 1.0)
            violations.push_back("evaluationMetrics[" + std::to_string(i) +
                                 "]: score out of [0,1]");
    }
    if (d.precondition.empty())
        violations.push_back("precondition: must contain at least one pattern");
    if (d.postcondition.empty())
        violations.push_back("postcondition: must contain at least one pattern");

    auto pre_vars = d.precondition.vars();
    auto post_vars = d.postcondition.vars();
    for (const auto& in : d.inputs)
        if (!pre_vars.count(in.variable))
            violations.push_back("inputs: variable ?" + in.variable +
                                 " does not occur in the precondition");
    std::set<std::string> output_vars;
    for (const auto& out : d.outputs) {
        output_vars.insert(out.variable);
        if (!post_vars.count(out.variable))
            violations.push_back("outputs: variable ?" + out.variable +
                                 " does not occur in the postcondition");
    }
    for (const auto& v : post_vars) {
        if (!output_vars.count(v) && !pre_vars.count(v))
            violations.push_back("postcondition: variable ?" + v +
                                 " is neither an output nor bound by the precondition");
    }
    return violations;
}

inline nlohmann::ordered_json description_to_json(const ServiceDescription& d) {
    nlohmann::ordered_json j;
    j["name"] = d.name;
    j["contributors"] = d.contributors;
    j["description"] = d.description;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::array();
    for (const auto& m : d.evaluation_metrics)
        metrics.push_back({{"metric", m.metric_name}, {"score", m.score}});
    j["evaluationMetrics"] = metrics;
    std::vector<std::string> sources;
    for (const auto& i : d.source_code) sources.push_back(i.value);
    j["sourceCode"] = sources;
    j["implementationLanguages"] = d.implementation_languages;
    j["endpoint"] = d.endpoint.value;
    std::vector<std::string> reqs, resps;
    for (const auto& i : d.example_requests) reqs.push_back(i.value);
    for (const auto& i : d.example_responses) resps.push_back(i.value);
    j["exampleRequests"] = reqs;
    j["exampleResponses"] = resps;
    j["algorithmClass"] = d.algorithm_class.value;
    j["declaredFormats"] = d.declared_formats;
    auto io_json = [](const std::vector<IoSpec>& list) {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (const auto& io : list) {
            out.push_back({{"variable", "?" + io.variable},
                           {"kind", io.kind == IoSpec::Kind::file ? "file" : "parameter"},
                           {"datatype", io.datatype},
                           {"concept", io.concept_iri.value},
                           {"format", io.format},
                           {"required", io.required}});
        }
        return out;
    };
    j["inputs"] = io_json(d.inputs);
    j["outputs"] = io_json(d.outputs);
    j["precondition"] = pattern_text(d.precondition);
    j["postcondition"] = pattern_text(d.postcondition);
    nlohmann::ordered_json rules = nlohmann::ordered_json::array();
    for (const auto& r : d.rules) rules.push_back(rule_to_json(r));
    j["rules"] = rules;
    return j;
}

// Inverse of parse_description up to field equality.
inline std::string emit_description(const ServiceDescription& d) {
    return description_to_json(d).dump(2) + "\n";
}

inline ServiceDescription with_endpoint(ServiceDescription d, Iri endpoint) {
    d.endpoint = std::move(endpoint);
    return d;
}

// Name-keyed set of valid descriptions. Registration replaces an existing
// entry with the same name, so fixture reloads are idempotent.
class Registry {
public:
    void register_service(ServiceDescription d) {
        auto violations = validate_description(d);
        if (!violations.empty()) {
            std::string msg = "description '" + d.name + "' is invalid:";
            for (const auto& v : violations) msg += "\n  " + v;
            throw DescriptionError(msg);
        }
        services_.insert_or_assign(d.name, std::move(d));
    }

    const ServiceDescription* find(const std::string& name) const {
        auto it = services_.find(name);
        return it == services_.end() ? nullptr : &it->second;
    }

    std::vector<const ServiceDescription*> find_by_class(const Iri& algorithm_class) const {
        std::vector<const ServiceDescription*> out;
        for (const auto& [name, d] : services_)
            if (d.algorithm_class == algorithm_class) out.push_back(&d);
        return out;  // map iteration is already name-sorted
    }

    std::size_t size() const { return services_.size(); }
    const std::map<std::string, ServiceDescription>& services() const { return services_; }

private:
    std::map<std::string, ServiceDescription> services_;
};

}  // namespace smartws
