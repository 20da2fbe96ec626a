#pragma once

// Shared test helpers: fixture loading, independent matching oracle, random
// case generators, and an in-process invoker so engine suites can skip the
// socket layer where they only exercise composition logic.

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smartws/smartws.hpp"

namespace testutil {

using namespace smartws;

inline std::string fixture_dir() { return SMARTWS_FIXTURE_DIR; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string fixture_text(const std::string& relative) {
    return read_file(fixture_dir() + "/" + relative);
}

inline ServiceDescription fixture_description(const std::string& relative) {
    return parse_description(fixture_text(relative));
}

inline std::vector<Triple> seed_triples() {
    return parse_document(fixture_text("kb/seed.nt"));
}

// ---- independent matching oracle -------------------------------------------
//
// Enumerates every assignment of the pattern's variables over the full term
// universe (kb terms plus pattern constants) and keeps the assignments under
// which all pattern triples are kb members. Deliberately brute force; the
// only concession to speed is integer coding of terms.
inline std::vector<Binding> oracle_match(const GraphPattern& pattern,
                                         const std::vector<Triple>& kb_triples) {
    std::vector<Term> universe;
    std::map<std::string, int> term_ids;
    auto intern = [&](const Term& t) {
        auto key = term_text(t);
        auto it = term_ids.find(key);
        if (it != term_ids.end()) return it->second;
        int id = static_cast<int>(universe.size());
        universe.push_back(t);
        term_ids.emplace(key, id);
        return id;
    };

    std::set<std::array<int, 3>> facts;
    for (const auto& t : kb_triples)
        facts.insert({intern(Term{t.subject}), intern(Term{t.predicate}), intern(t.object)});

    auto var_set = pattern.vars();
    std::vector<std::string> vars(var_set.begin(), var_set.end());
    std::map<std::string, int> var_index;
    for (std::size_t i = 0; i < vars.size(); ++i) var_index[vars[i]] = static_cast<int>(i);

    // Pattern triples as (id or variable slot) per position; -1-v encodes
    // variable v. Constants missing from the kb still enter the universe.
    struct Coded {
        int s, p, o;
    };
    std::vector<Coded> coded;
    auto code_position = [&](const auto& field) -> int {
        using T = std::decay_t<decltype(field)>;
        if constexpr (std::is_same_v<T, std::variant<Variable, Iri>>) {
            if (auto* v = std::get_if<Variable>(&field)) return -1 - var_index[v->name];
            return intern(Term{std::get<Iri>(field)});
        } else {
            if (auto* v = std::get_if<Variable>(&field)) return -1 - var_index[v->name];
            if (auto* i = std::get_if<Iri>(&field)) return intern(Term{*i});
            return intern(Term{std::get<Literal>(field)});
        }
    };
    for (const auto& tp : pattern.patterns)
        coded.push_back(Coded{code_position(tp.subject), code_position(tp.predicate),
                              code_position(tp.object)});

    std::vector<Binding> results;
    std::vector<int> assignment(vars.size(), 0);
    const int n = static_cast<int>(universe.size());

    auto assignment_holds = [&]() {
        for (const auto& c : coded) {
            auto value = [&](int slot) { return slot < 0 ? assignment[-1 - slot] : slot; };
            int s = value(c.s), p = value(c.p), o = value(c.o);
            if (!is_iri(universe[s]) || !is_iri(universe[p])) return false;
            if (!facts.count({s, p, o})) return false;
        }
        return true;
    };

    if (vars.empty()) {
        if (assignment_holds()) results.push_back({});
    } else if (n > 0) {
        while (true) {
            if (assignment_holds()) {
                Binding b;
                for (std::size_t i = 0; i < vars.size(); ++i)
                    b[vars[i]] = universe[assignment[i]];
                results.push_back(std::move(b));
            }
            std::size_t pos = 0;
            while (pos < assignment.size()) {
                if (++assignment[pos] < n) break;
                assignment[pos] = 0;
                ++pos;
            }
            if (pos == assignment.size()) break;
        }
    }

    std::sort(results.begin(), results.end(), [](const Binding& a, const Binding& b) {
        return binding_text(a) < binding_text(b);
    });
    results.erase(std::unique(results.begin(), results.end()), results.end());
    return results;
}

// ---- random case generation -------------------------------------------------

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    int below(int n) { return static_cast<int>(engine() % static_cast<std::uint64_t>(n)); }
    bool chance(double p) {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine) < p;
    }
};

struct TermPools {
    std::vector<Iri> subjects;
    std::vector<Iri> predicates;
    std::vector<Term> objects;
};

inline TermPools make_pools(Rng& rng, int max_subjects = 4, int max_predicates = 3,
                            int max_objects = 5) {
    TermPools pools;
    int ns = 1 + rng.below(max_subjects);
    int np = 1 + rng.below(max_predicates);
    int no = 1 + rng.below(max_objects);
    for (int i = 0; i < ns; ++i) pools.subjects.push_back(Iri{"http://t/s" + std::to_string(i)});
    for (int i = 0; i < np; ++i) pools.predicates.push_back(Iri{"http://t/p" + std::to_string(i)});
    for (int i = 0; i < no; ++i) {
        switch (rng.below(4)) {
            case 0: pools.objects.push_back(Iri{"http://t/o" + std::to_string(i)}); break;
            case 1: pools.objects.push_back(Literal{std::to_string(rng.below(50)), Datatype::integer}); break;
            case 2: pools.objects.push_back(Literal{"v" + std::to_string(i)}); break;
            default: pools.objects.push_back(pools.subjects[rng.below(ns)]); break;
        }
    }
    return pools;
}

inline std::vector<Triple> random_kb(Rng& rng, const TermPools& pools, int max_triples = 30) {
    std::vector<Triple> out;
    int n = rng.below(max_triples + 1);
    for (int i = 0; i < n; ++i) {
        Triple t;
        t.subject = pools.subjects[rng.below(static_cast<int>(pools.subjects.size()))];
        t.predicate = pools.predicates[rng.below(static_cast<int>(pools.predicates.size()))];
        t.object = pools.objects[rng.below(static_cast<int>(pools.objects.size()))];
        out.push_back(std::move(t));
    }
    return out;
}

inline GraphPattern random_pattern(Rng& rng, const TermPools& pools, int max_patterns = 4,
                                   int max_vars = 4) {
    static const std::vector<std::string> names{"a", "b", "c", "d"};
    int nvars = 1 + rng.below(max_vars);
    GraphPattern out;
    int n = 1 + rng.below(max_patterns);
    for (int i = 0; i < n; ++i) {
        TriplePattern tp;
        auto var = [&] { return Variable{names[rng.below(nvars)]}; };
        if (rng.chance(0.45)) tp.subject = var();
        else tp.subject = pools.subjects[rng.below(static_cast<int>(pools.subjects.size()))];
        if (rng.chance(0.3)) tp.predicate = var();
        else tp.predicate = pools.predicates[rng.below(static_cast<int>(pools.predicates.size()))];
        if (rng.chance(0.45)) tp.object = var();
        else if (rng.chance(0.1)) tp.object = Iri{"http://t/fresh" + std::to_string(i)};
        else {
            const Term& o = pools.objects[rng.below(static_cast<int>(pools.objects.size()))];
            if (is_iri(o)) tp.object = as_iri(o);
            else tp.object = as_literal(o);
        }
        out.patterns.push_back(std::move(tp));
    }
    return out;
}

inline std::vector<Triple> random_graph(Rng& rng, int max_triples = 12) {
    std::vector<Triple> out;
    int n = 1 + rng.below(max_triples);
    auto random_string = [&] {
        static const std::string alphabet =
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 \"\\\n\t#<>.?:^";
        std::string s;
        int len = rng.below(14);
        for (int i = 0; i < len; ++i) s += alphabet[rng.below(static_cast<int>(alphabet.size()))];
        return s;
    };
    for (int i = 0; i < n; ++i) {
        Triple t;
        t.subject = Iri{"http://g/s" + std::to_string(rng.below(6))};
        t.predicate = Iri{"http://g/p" + std::to_string(rng.below(4))};
        switch (rng.below(4)) {
            case 0: t.object = Iri{"http://g/o" + std::to_string(rng.below(6))}; break;
            case 1: t.object = Literal{std::to_string(rng.below(1000)), Datatype::integer}; break;
            case 2: t.object = Literal{std::to_string(rng.below(100)) + "." +
                                           std::to_string(rng.below(100)),
                                       Datatype::decimal};
                break;
            default: t.object = Literal{random_string()}; break;
        }
        out.push_back(std::move(t));
    }
    return out;
}

// ---- in-process service cluster ---------------------------------------------

// Services addressed by fake endpoint IRIs and invoked through handle_invoke
// directly. Exercises validation, rules and the backend path without sockets.
class LocalCluster {
public:
    Iri add(ServiceDescription description) {
        Iri endpoint{"http://local.test/" + description.name};
        auto handler = std::make_unique<ServiceHandler>(handler_fn_for(description.name),
                                                        description.rules);
        entries_[endpoint.value] =
            Entry{with_endpoint(std::move(description), endpoint), std::move(handler)};
        return endpoint;
    }

    Iri add(ServiceDescription description, ServiceHandler::Fn fn) {
        Iri endpoint{"http://local.test/" + description.name};
        auto handler = std::make_unique<ServiceHandler>(std::move(fn), description.rules);
        entries_[endpoint.value] =
            Entry{with_endpoint(std::move(description), endpoint), std::move(handler)};
        return endpoint;
    }

    const ServiceDescription& description(const Iri& endpoint) const {
        return entries_.at(endpoint.value).description;
    }

    Registry registry() const {
        Registry r;
        for (const auto& [endpoint, entry] : entries_) r.register_service(entry.description);
        return r;
    }

    Invoker invoker() {
        return [this](const Iri& endpoint, const InvocationRequest& request) {
            auto it = entries_.find(endpoint.value);
            if (it == entries_.end())
                throw InvokeError(InvokeError::Kind::connection, 0,
                                  "no service at " + endpoint.value);
            HandleResult result =
                handle_invoke(it->second.description, *it->second.handler, request);
            if (result.status != 200)
                throw InvokeError(InvokeError::Kind::http_status, result.status, result.body);
            InvocationResponse response;
            response.graph = parse_document(result.body);
            response.short_circuited = result.short_circuit;
            return response;
        };
    }

private:
    struct Entry {
        ServiceDescription description;
        std::unique_ptr<ServiceHandler> handler;
    };
    std::map<std::string, Entry> entries_;

    static ServiceHandler::Fn handler_fn_for(const std::string& service_name) {
        static const std::map<std::string, std::string> by_service{
            {"BrainMaskGeneration", "brain_mask_generation"},
            {"BatchedFolderRegistration", "batched_folder_registration"},
            {"RobustNormalization", "robust_normalization"},
            {"StandardNormalization", "standard_normalization"},
            {"TumorSegmentation", "tumor_segmentation"},
            {"MapGeneration", "map_generation"},
            {"TemperatureControl", "temperature"},
        };
        return handler_catalog().at(by_service.at(service_name));
    }
};

// The full pipeline fixture set as live HTTP hosts on ephemeral ports, with
// a registry whose endpoints point at them.
struct TpmCluster {
    std::vector<std::unique_ptr<ServiceHost>> hosts;
    Registry registry;
};

inline const std::vector<std::pair<std::string, std::string>>& tpm_fixture_files() {
    static const std::vector<std::pair<std::string, std::string>> files{
        {"descriptions/brain_mask_generation.json", "brain_mask_generation"},
        {"descriptions/batched_folder_registration.json", "batched_folder_registration"},
        {"descriptions/robust_normalization.json", "robust_normalization"},
        {"descriptions/standard_normalization.json", "standard_normalization"},
        {"descriptions/tumor_segmentation.json", "tumor_segmentation"},
        {"descriptions/map_generation.json", "map_generation"},
    };
    return files;
}

inline TpmCluster host_tpm_cluster() {
    TpmCluster cluster;
    for (const auto& [file, handler] : tpm_fixture_files()) {
        auto description = fixture_description(file);
        auto host = host_service(description, handler_catalog().at(handler), 0);
        cluster.registry.register_service(with_endpoint(description, host->endpoint()));
        cluster.hosts.push_back(std::move(host));
    }
    return cluster;
}

inline nlohmann::ordered_json normalized_report_json(const RunReport& report) {
    auto j = report_to_json(report);
    for (auto& record : j["records"]) record["durationMs"] = 0;
    return j;
}

}  // namespace testutil
