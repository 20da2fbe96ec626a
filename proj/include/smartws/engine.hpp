#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "smartws/description.hpp"
#include "smartws/kb.hpp"
#include "smartws/model.hpp"
#include "smartws/naming.hpp"
#include "smartws/transport.hpp"

namespace smartws {

struct EngineConfig {
    int max_rounds = 32;
    int concurrency_width = 4;
    std::optional<GraphPattern> scope_filter;            // restricts processed bindings
    std::optional<std::set<std::string>> allowed_services;  // service name allow-list
    std::string selection_metric = "accuracy";
};

struct InvocationKey {
    std::string service_name;
    std::string binding_fingerprint;
    friend bool operator==(const InvocationKey&, const InvocationKey&) = default;
    friend bool operator<(const InvocationKey& a, const InvocationKey& b) {
        if (a.service_name != b.service_name) return a.service_name < b.service_name;
        return a.binding_fingerprint < b.binding_fingerprint;
    }
};

enum class InvocationOutcome { ok, rule_short_circuit, http_error, postcondition_violation };

inline const char* outcome_name(InvocationOutcome o) {
    switch (o) {
        case InvocationOutcome::ok: return "ok";
        case InvocationOutcome::rule_short_circuit: return "rule_short_circuit";
        case InvocationOutcome::http_error: return "http_error";
        case InvocationOutcome::postcondition_violation: return "postcondition_violation";
    }
    return "ok";
}

struct InvocationRecord {
    InvocationKey key;
    int round = 0;
    InvocationOutcome outcome = InvocationOutcome::ok;
    std::int64_t triples_added = 0;
    std::int64_t duration_ms = 0;
};

enum class Termination { fixpoint, max_rounds };

struct RunReport {
    int rounds_executed = 0;
    std::vector<InvocationRecord> records;
    std::size_t final_kb_size = 0;
    Termination terminated_by = Termination::fixpoint;
};

using Candidate = std::pair<const ServiceDescription*, Binding>;
using Invoker = std::function<InvocationResponse(const Iri& endpoint, const InvocationRequest&)>;

inline Invoker http_invoker() {
    return [](const Iri& endpoint, const InvocationRequest& request) {
        return invoke(endpoint, request);
    };
}

namespace detail {

// Bindings of the service's precondition against the knowledge base. The
// mandatory core is the precondition minus conjuncts that mention optional
// inputs; those conjuncts only extend a core binding when they match too.
inline std::vector<Binding> precondition_bindings(const ServiceDescription& d,
                                                  const KnowledgeBase& kb) {
    auto optional_vars = d.optional_input_vars();
    GraphPattern core, optional_part;
    for (const auto& p : d.precondition.patterns) {
        bool is_optional = false;
        for (const auto& v : GraphPattern{{p}}.vars())
            if (optional_vars.count(v)) is_optional = true;
        (is_optional ? optional_part : core).patterns.push_back(p);
    }
    std::vector<Binding> out;
    for (const auto& base : kb.match(core)) {
        Binding merged = base;
        if (!optional_part.empty()) {
            auto extensions = kb.match(optional_part, base);
            if (!extensions.empty())
                for (const auto& [name, term] : extensions.front()) merged[name] = term;
        }
        out.push_back(std::move(merged));
    }
    return out;
}

// Ground triples of the precondition under a binding; conjuncts left with
// unbound variables (unmatched optional inputs) are dropped.
inline std::vector<Triple> instantiate_precondition(const ServiceDescription& d,
                                                    const Binding& binding) {
    std::vector<Triple> out;
    for (const auto& p : d.precondition.patterns) {
        Triple t;
        bool complete = true;
        auto resolve_iri = [&](const std::variant<Variable, Iri>& field, Iri& slot) {
            if (auto* i = std::get_if<Iri>(&field)) {
                slot = *i;
                return;
            }
            auto it = binding.find(std::get<Variable>(field).name);
            if (it == binding.end() || !is_iri(it->second)) complete = false;
            else slot = as_iri(it->second);
        };
        resolve_iri(p.subject, t.subject);
        resolve_iri(p.predicate, t.predicate);
        if (auto* v = std::get_if<Variable>(&p.object)) {
            auto it = binding.find(v->name);
            if (it == binding.end()) complete = false;
            else t.object = it->second;
        } else if (auto* i = std::get_if<Iri>(&p.object)) {
            t.object = *i;
        } else {
            t.object = std::get<Literal>(p.object);
        }
        if (complete) out.push_back(std::move(t));
    }
    return out;
}

}  // namespace detail

// All (service, binding) pairs whose precondition currently matches, that
// pass the allow-list and scope filter, and that have not been decided
// before. Order: service name, then binding fingerprint.
inline std::vector<Candidate> eligible_invocations(const Registry& registry,
                                                   const KnowledgeBase& kb,
                                                   const EngineConfig& config,
                                                   const std::set<InvocationKey>& history) {
    std::vector<Candidate> out;
    for (const auto& [name, d] : registry.services()) {
        if (config.allowed_services && !config.allowed_services->count(name)) continue;
        for (auto& b : detail::precondition_bindings(d, kb)) {
            if (config.scope_filter && kb.match(*config.scope_filter, b).empty()) continue;
            if (history.count(InvocationKey{name, binding_fingerprint(b)})) continue;
            out.emplace_back(&d, std::move(b));
        }
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.first->name != b.first->name) return a.first->name < b.first->name;
        return binding_fingerprint(a.second) < binding_fingerprint(b.second);
    });
    return out;
}

// Candidates of the same algorithm class competing for the same inputs are
// reduced to the best-scoring description; everything else passes through.
// "Same inputs" is judged on the variables every competitor in the class
// group binds, so competitors may differ in optional extras.
inline std::vector<Candidate> select_among_competitors(const std::vector<Candidate>& candidates,
                                                       const std::string& metric) {
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        by_class[candidates[i].first->algorithm_class.value].push_back(i);

    std::vector<bool> keep(candidates.size(), true);
    for (const auto& [cls, members] : by_class) {
        if (members.size() < 2) continue;
        std::set<std::string> shared;
        bool first = true;
        for (auto i : members) {
            std::set<std::string> vars;
            for (const auto& [name, term] : candidates[i].second) vars.insert(name);
            if (first) {
                shared = std::move(vars);
                first = false;
            } else {
                std::set<std::string> inter;
                std::set_intersection(shared.begin(), shared.end(), vars.begin(), vars.end(),
                                      std::inserter(inter, inter.begin()));
                shared = std::move(inter);
            }
        }
        std::map<std::string, std::vector<std::size_t>> groups;
        for (auto i : members) {
            Binding restricted;
            for (const auto& v : shared) {
                auto it = candidates[i].second.find(v);
                if (it != candidates[i].second.end()) restricted[v] = it->second;
            }
            groups[binding_fingerprint(restricted)].push_back(i);
        }
        for (const auto& [fp, group] : groups) {
            if (group.size() < 2) continue;
            std::size_t best = group.front();
            for (auto i : group) {
                double si = candidates[i].first->metric_score(metric);
                double sb = candidates[best].first->metric_score(metric);
                if (si > sb || (si == sb && candidates[i].first->name < candidates[best].first->name))
                    best = i;
            }
            for (auto i : group)
                if (i != best) keep[i] = false;
        }
    }
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (keep[i]) out.push_back(candidates[i]);
    return out;
}

struct RoundResult {
    std::vector<InvocationRecord> records;
    std::size_t invocations = 0;
    std::size_t triples_added = 0;
};

// One engine round: match against a frozen view of the knowledge base, pick
// winners among competitors, invoke them (concurrently up to the configured
// width), then merge all staged outputs in one exclusive step so invocation
// order can never leak into the result. Keys of everything decided this
// round — invoked or out-competed — go into the history.
inline RoundResult run_round(const Registry& registry, KnowledgeBase& kb,
                             const EngineConfig& config, std::set<InvocationKey>& history,
                             const Invoker& invoker, int round) {
    auto eligible = eligible_invocations(registry, kb, config, history);
    auto survivors = select_among_competitors(eligible, config.selection_metric);

    std::set<InvocationKey> surviving;
    for (const auto& [d, b] : survivors)
        surviving.insert(InvocationKey{d->name, binding_fingerprint(b)});
    for (const auto& [d, b] : eligible) {
        InvocationKey key{d->name, binding_fingerprint(b)};
        if (!surviving.count(key)) history.insert(key);  // lost the selection, stays suppressed
    }

    RoundResult result;
    result.invocations = survivors.size();
    if (survivors.empty()) return result;

    struct Staged {
        InvocationRecord record;
        std::vector<Triple> graph;
    };
    std::vector<Staged> staged(survivors.size());

    auto work = [&](std::size_t i) {
        const auto& [d, b] = survivors[i];
        Staged& slot = staged[i];
        slot.record.key = InvocationKey{d->name, binding_fingerprint(b)};
        slot.record.round = round;
        InvocationRequest request{detail::instantiate_precondition(*d, b), b};
        auto started = std::chrono::steady_clock::now();
        try {
            InvocationResponse response = invoker(d->endpoint, request);
            KnowledgeBase response_kb = kb_from(response.graph);
            if (response_kb.match(d->postcondition, b).empty()) {
                slot.record.outcome = InvocationOutcome::postcondition_violation;
            } else {
                slot.record.outcome = response.short_circuited
                                          ? InvocationOutcome::rule_short_circuit
                                          : InvocationOutcome::ok;
                slot.graph = std::move(response.graph);
            }
        } catch (const InvokeError&) {
            slot.record.outcome = InvocationOutcome::http_error;
        }
        auto elapsed = std::chrono::steady_clock::now() - started;
        slot.record.duration_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    };

    std::size_t width = std::min<std::size_t>(std::max(config.concurrency_width, 1),
                                              survivors.size());
    if (width <= 1) {
        for (std::size_t i = 0; i < survivors.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < width; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < survivors.size();
                     i = next.fetch_add(1))
                    work(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    // Exclusive merge, in candidate order, each staged graph canonically sorted.
    for (auto& slot : staged) {
        std::sort(slot.graph.begin(), slot.graph.end(), triple_less);
        slot.record.triples_added = static_cast<std::int64_t>(kb.insert(slot.graph));
        result.triples_added += static_cast<std::size_t>(slot.record.triples_added);
        history.insert(slot.record.key);
        result.records.push_back(std::move(slot.record));
    }
    return result;
}

// Rounds repeat until one produces no invocations and adds no triples, or
// the round cap is hit. With deterministic output minting and the key
// history, total work is bounded and re-runs are idempotent.
inline RunReport run_to_fixpoint(const Registry& registry, KnowledgeBase& kb,
                                 const EngineConfig& config = {},
                                 const Invoker& invoker = http_invoker()) {
    for (const auto& [name, d] : registry.services()) {
        auto violations = validate_description(d);
        if (!violations.empty())
            throw DescriptionError("description '" + name + "' is invalid");
    }
    RunReport report;
    std::set<InvocationKey> history;
    for (int round = 1; round <= config.max_rounds; ++round) {
        RoundResult rr = run_round(registry, kb, config, history, invoker, round);
        for (auto& r : rr.records) report.records.push_back(std::move(r));
        report.rounds_executed = round;
        if (rr.invocations == 0 && rr.triples_added == 0) {
            report.terminated_by = Termination::fixpoint;
            report.final_kb_size = kb.size();
            return report;
        }
    }
    report.terminated_by = Termination::max_rounds;
    report.final_kb_size = kb.size();
    return report;
}

inline nlohmann::ordered_json report_to_json(const RunReport& report) {
    nlohmann::ordered_json j;
    j["roundsExecuted"] = report.rounds_executed;
    j["terminatedBy"] = report.terminated_by == Termination::fixpoint ? "fixpoint" : "max_rounds";
    j["finalKbSize"] = report.final_kb_size;
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const auto& r : report.records) {
        records.push_back({{"key",
                            {{"service", r.key.service_name},
                             {"fingerprint", r.key.binding_fingerprint}}},
                           {"round", r.round},
                           {"outcome", outcome_name(r.outcome)},
                           {"triplesAdded", r.triples_added},
                           {"durationMs", r.duration_ms}});
    }
    j["records"] = records;
    return j;
}

}  // namespace smartws
