#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "smartws/description.hpp"
#include "smartws/model.hpp"

namespace smartws {

struct CriterionResult {
    std::string id;
    int level = 1;
    bool passed = false;
    std::string evidence;
};

struct MaturityReport {
    int level = 0;
    bool probed = false;
    std::vector<CriterionResult> criteria;
};

// Read-only findings from GETs against a live endpoint. Unreachability is a
// result, never an error.
struct ProbeResults {
    bool health_ok = false;
    std::string health_detail;
    bool description_ok = false;  // retrievable and re-parseable
    std::string description_detail;
    bool invoke_format_declared = false;  // served description declares an RDF wire format
    std::string invoke_detail;
};

namespace detail {

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline const std::set<std::string>& standard_format_names() {
    static const std::set<std::string> names{
        "xml", "text/xml", "application/xml", "json", "application/json",
        "rdf", "rdf/xml", "application/rdf+xml", "n-triples", "application/n-triples",
        "turtle", "text/turtle", "json-ld", "application/ld+json"};
    return names;
}

inline const std::set<std::string>& rdf_format_names() {
    static const std::set<std::string> names{
        "rdf", "rdf/xml", "application/rdf+xml", "n-triples", "application/n-triples",
        "turtle", "text/turtle", "json-ld", "application/ld+json"};
    return names;
}

inline std::vector<std::string> matching_formats(const std::vector<std::string>& declared,
                                                 const std::set<std::string>& known) {
    std::vector<std::string> out;
    for (const auto& f : declared)
        if (known.count(lower(f))) out.push_back(f);
    return out;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace detail

inline ProbeResults probe_endpoint(const Iri& endpoint) {
    ProbeResults out;
    httplib::Client client(endpoint.value);
    client.set_connection_timeout(std::chrono::seconds(2));
    client.set_read_timeout(std::chrono::seconds(5));

    auto health = client.Get("/health");
    if (!health) {
        out.health_detail = "GET /health failed: " + to_string(health.error());
    } else if (health->status == 200) {
        out.health_ok = true;
        out.health_detail = "GET /health -> 200";
    } else {
        out.health_detail = "GET /health -> " + std::to_string(health->status);
    }

    auto desc = client.Get("/description");
    if (!desc) {
        out.description_detail = "GET /description failed: " + to_string(desc.error());
    } else if (desc->status != 200) {
        out.description_detail = "GET /description -> " + std::to_string(desc->status);
    } else {
        try {
            ServiceDescription served = parse_description(desc->body);
            out.description_ok = true;
            out.description_detail = "GET /description -> 200, re-parses as '" + served.name + "'";
            auto rdf = detail::matching_formats(served.declared_formats,
                                                detail::rdf_format_names());
            if (!rdf.empty()) {
                out.invoke_format_declared = true;
                out.invoke_detail = "served description declares " + detail::join(rdf, ", ") +
                                    " for invocation payloads";
            } else {
                out.invoke_detail = "served description declares no RDF invocation format";
            }
        } catch (const std::exception& e) {
            out.description_detail = std::string("GET /description -> 200 but re-parse failed: ") +
                                     e.what();
            out.invoke_detail = "no parseable served description";
        }
    }
    return out;
}

// Ladder classification. Criteria beyond the first failed level are still
// evaluated so an audit shows everything at once; the level is the highest N
// with every criterion of levels <= N passed.
inline MaturityReport classify(const ServiceDescription& d,
                               const std::optional<ProbeResults>& probe = std::nullopt) {
    MaturityReport report;
    report.probed = probe.has_value();

    auto add = [&](std::string id, int level, bool passed, std::string evidence) {
        report.criteria.push_back(CriterionResult{std::move(id), level, passed,
                                                  std::move(evidence)});
    };

    // Level 1: plain technical accessibility.
    bool http_endpoint = d.endpoint.value.rfind("http://", 0) == 0 ||
                         d.endpoint.value.rfind("https://", 0) == 0;
    add("L1.http-endpoint", 1, http_endpoint,
        http_endpoint ? "endpoint <" + d.endpoint.value + "> is addressable over http(s)"
                      : "endpoint <" + d.endpoint.value + "> is not an http(s) URI");

    auto standard = detail::matching_formats(d.declared_formats, detail::standard_format_names());
    add("L1.standard-formats", 1, !standard.empty(),
        !standard.empty()
            ? "declares standard exchange format(s): " + detail::join(standard, ", ")
            : "declaredFormats lists no standard exchange format (XML, JSON or an RDF serialization)");

    bool rest_ok = http_endpoint;
    std::string rest_evidence =
        http_endpoint
            ? "endpoint exposes the uniform resource contract (/invoke, /description, /health "
              "addressed by URI and HTTP verb)"
            : "no http(s) endpoint, so no URI-addressed resources";
    if (probe) {
        rest_ok = probe->health_ok;
        rest_evidence = probe->health_detail;
        if (!probe->invoke_detail.empty()) rest_evidence += "; " + probe->invoke_detail;
    }
    add("L1.rest-resources", 1, rest_ok, rest_evidence);

    // Level 2: semantics of data and description.
    auto rdf = detail::matching_formats(d.declared_formats, detail::rdf_format_names());
    add("L2.rdf-io", 2, !rdf.empty(),
        !rdf.empty() ? "declares RDF input/output format(s): " + detail::join(rdf, ", ")
                     : "no RDF serialization among declaredFormats");

    bool conditions = !d.precondition.empty() && !d.postcondition.empty();
    add("L2.conditions", 2, conditions,
        conditions ? "precondition (" + std::to_string(d.precondition.patterns.size()) +
                         " patterns) and postcondition (" +
                         std::to_string(d.postcondition.patterns.size()) + " patterns) declared"
                   : "precondition or postcondition is empty");

    bool described = true;
    std::string described_evidence = "machine-readable description document parsed";
    if (probe) {
        described = probe->description_ok;
        described_evidence = probe->description_detail;
    }
    add("L2.description-retrievable", 2, described, described_evidence);

    // Level 3: encapsulated decision logic.
    add("L3.rules", 3, !d.rules.empty(),
        !d.rules.empty()
            ? std::to_string(d.rules.size()) + " decision rule(s) embedded in the interface"
            : "no decision rules embedded");

    for (int level = 1; level <= 3; ++level) {
        bool all = true;
        for (const auto& c : report.criteria)
            if (c.level == level && !c.passed) all = false;
        if (!all) break;
        report.level = level;
    }
    return report;
}

inline nlohmann::ordered_json maturity_report_to_json(const MaturityReport& report) {
    nlohmann::ordered_json j;
    j["level"] = report.level;
    j["probed"] = report.probed;
    nlohmann::ordered_json criteria = nlohmann::ordered_json::array();
    for (const auto& c : report.criteria)
        criteria.push_back({{"id", c.id}, {"passed", c.passed}, {"evidence", c.evidence}});
    j["criteria"] = criteria;
    return j;
}

}  // namespace smartws
