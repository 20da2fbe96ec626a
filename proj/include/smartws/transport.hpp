#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "smartws/description.hpp"
#include "smartws/kb.hpp"
#include "smartws/model.hpp"
#include "smartws/naming.hpp"
#include "smartws/rules.hpp"
#include "smartws/text.hpp"

namespace smartws {

inline constexpr const char* kNTriplesMediaType = "application/n-triples";
inline constexpr const char* kShortCircuitHeader = "X-SmartWS-Short-Circuit";
inline constexpr const char* kBindsPredicate = "urn:smartws:binds";
inline constexpr const char* kVarIriPrefix = "urn:smartws:var:";

// Graph plus the role assignment that tells the service which resources play
// which declared inputs. The binding travels as reserved triples
// `<urn:smartws:var:NAME> <urn:smartws:binds> term` alongside the payload.
struct InvocationRequest {
    std::vector<Triple> graph;
    Binding binding;
};

struct InvocationResponse {
    std::vector<Triple> graph;
    bool short_circuited = false;
};

struct InvokeError : std::runtime_error {
    enum class Kind { connection, http_status, bad_body };
    Kind kind;
    int status;  // meaningful for http_status only
    InvokeError(Kind kind_, int status_, const std::string& msg)
        : std::runtime_error(msg), kind(kind_), status(status_) {}
};

inline std::string encode_request(const InvocationRequest& request) {
    std::vector<Triple> wire = request.graph;
    for (const auto& [name, term] : request.binding)
        wire.push_back(Triple{Iri{kVarIriPrefix + name}, Iri{kBindsPredicate}, term});
    return serialize_triples(std::move(wire));
}

inline InvocationRequest decode_request(const std::string& body) {
    InvocationRequest request;
    for (auto& t : parse_document(body)) {
        if (t.predicate.value == kBindsPredicate &&
            t.subject.value.rfind(kVarIriPrefix, 0) == 0) {
            std::string name = t.subject.value.substr(std::string(kVarIriPrefix).size());
            if (valid_variable_name(name)) {
                request.binding[name] = t.object;
                continue;
            }
        }
        request.graph.push_back(std::move(t));
    }
    return request;
}

// The wrapped source plus the smartness attached to it at hosting time. The
// counter tracks how often the wrapped function actually ran, which is what
// rule short-circuits are meant to save.
struct ServiceHandler {
    using Fn = std::function<std::vector<Triple>(const std::vector<Triple>& input_graph,
                                                 const Binding& binding)>;
    Fn fn;
    std::vector<SmartRule> rules;
    std::atomic<std::uint64_t> backend_calls{0};

    explicit ServiceHandler(Fn fn_, std::vector<SmartRule> rules_ = {})
        : fn(std::move(fn_)), rules(std::move(rules_)) {}
    ServiceHandler(const ServiceHandler&) = delete;
    ServiceHandler& operator=(const ServiceHandler&) = delete;
};

struct HandleResult {
    int status = 200;
    std::string body;
    bool short_circuit = false;
};

namespace detail {

// Precondition check against the request. Patterns that mention an optional
// input variable the caller did not bind are skipped; everything else must
// match the request graph under the provided binding.
inline bool request_satisfies_precondition(const ServiceDescription& d,
                                           const InvocationRequest& request) {
    auto optional_vars = d.optional_input_vars();
    GraphPattern relevant;
    for (const auto& p : d.precondition.patterns) {
        bool skip = false;
        for (const auto& v : GraphPattern{{p}}.vars())
            if (optional_vars.count(v) && !request.binding.count(v)) skip = true;
        if (!skip) relevant.patterns.push_back(p);
    }
    if (relevant.empty()) return true;
    KnowledgeBase graph = kb_from(request.graph);
    return !graph.match(relevant, request.binding).empty();
}

}  // namespace detail

// Request processing shared by the HTTP route and in-process invocation:
// validate the precondition (422 on violation), let an attached rule answer
// without touching the backend, otherwise run the wrapped function.
inline HandleResult handle_invoke(const ServiceDescription& description, ServiceHandler& handler,
                                  const InvocationRequest& request) {
    if (!detail::request_satisfies_precondition(description, request)) {
        return HandleResult{422,
                            "precondition of '" + description.name +
                                "' is not satisfied by the request graph\n",
                            false};
    }
    std::string fp = binding_fingerprint(request.binding);
    Minter minter = [&description, fp](const std::string& var) {
        return mint_output_iri(description.name, fp, var);
    };
    RuleOutcome outcome = evaluate_rules(handler.rules, request.graph, request.binding, minter);
    if (outcome.fired) {
        return HandleResult{200, serialize_triples(outcome.emitted), true};
    }
    handler.backend_calls.fetch_add(1);
    try {
        auto output = handler.fn(request.graph, request.binding);
        return HandleResult{200, serialize_triples(std::move(output)), false};
    } catch (const std::exception& e) {
        return HandleResult{500, std::string("handler error: ") + e.what() + "\n", false};
    }
}

// Hosts one described service on localhost:
//   POST /invoke       n-triples request -> n-triples response
//   GET  /description  the description document, byte for byte
//   GET  /health       200 "ok"
class ServiceHost {
public:
    ServiceHost(ServiceDescription description, ServiceHandler::Fn fn, int port,
                std::string raw_description = "")
        : description_(std::move(description)),
          handler_(std::move(fn), description_.rules),
          raw_description_(raw_description.empty() ? emit_description(description_)
                                                   : std::move(raw_description)) {
        server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("ok", "text/plain");
        });
        server_.Get("/description", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(raw_description_, "application/json");
        });
        server_.Post("/invoke", [this](const httplib::Request& req, httplib::Response& res) {
            InvocationRequest request;
            try {
                request = decode_request(req.body);
            } catch (const ParseError& e) {
                res.status = 400;
                res.set_content(std::string("unparseable request body: ") + e.what() + "\n",
                                "text/plain");
                return;
            }
            HandleResult result = handle_invoke(description_, handler_, request);
            res.status = result.status;
            if (result.short_circuit) res.set_header(kShortCircuitHeader, "true");
            res.set_content(result.body, result.status == 200 ? kNTriplesMediaType : "text/plain");
        });

        if (port == 0) {
            port_ = server_.bind_to_any_port("127.0.0.1");
            if (port_ < 0) throw std::runtime_error("could not bind a port");
        } else {
            if (!server_.bind_to_port("127.0.0.1", port))
                throw std::runtime_error("could not bind port " + std::to_string(port));
            port_ = port;
        }
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~ServiceHost() { stop(); }
    ServiceHost(const ServiceHost&) = delete;
    ServiceHost& operator=(const ServiceHost&) = delete;

    void stop() {
        if (thread_.joinable()) {
            server_.stop();
            thread_.join();
        }
    }

    int port() const { return port_; }
    Iri endpoint() const { return Iri{"http://127.0.0.1:" + std::to_string(port_)}; }
    const ServiceDescription& description() const { return description_; }
    std::uint64_t backend_calls() const { return handler_.backend_calls.load(); }

private:
    ServiceDescription description_;
    ServiceHandler handler_;
    std::string raw_description_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

inline std::unique_ptr<ServiceHost> host_service(ServiceDescription description,
                                                 ServiceHandler::Fn fn, int port = 0,
                                                 std::string raw_description = "") {
    return std::make_unique<ServiceHost>(std::move(description), std::move(fn), port,
                                         std::move(raw_description));
}

// POSTs the request to <endpoint>/invoke and parses the response graph.
// Connection failures, non-200 statuses and unparseable bodies each raise a
// distinct InvokeError kind.
inline InvocationResponse invoke(const Iri& endpoint, const InvocationRequest& request) {
    httplib::Client client(endpoint.value);
    client.set_connection_timeout(std::chrono::seconds(5));
    client.set_read_timeout(std::chrono::seconds(30));
    httplib::Headers headers{{"Accept", kNTriplesMediaType}};
    auto res = client.Post("/invoke", headers, encode_request(request), kNTriplesMediaType);
    if (!res) {
        throw InvokeError(InvokeError::Kind::connection, 0,
                          "connection to " + endpoint.value + " failed: " + to_string(res.error()));
    }
    if (res->status != 200) {
        throw InvokeError(InvokeError::Kind::http_status, res->status,
                          endpoint.value + " answered " + std::to_string(res->status) + ": " +
                              res->body);
    }
    InvocationResponse response;
    try {
        response.graph = parse_document(res->body);
    } catch (const ParseError& e) {
        throw InvokeError(InvokeError::Kind::bad_body, 200,
                          "unparseable response body: " + std::string(e.what()));
    }
    response.short_circuited = res->get_header_value(kShortCircuitHeader) == "true";
    return response;
}

}  // namespace smartws
