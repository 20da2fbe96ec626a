#pragma once

#include <cstdlib>
#include <string>
#include <string_view>

#include "smartws/model.hpp"
#include "smartws/sha256.hpp"

namespace smartws {

// Collision-resistant fingerprint of a binding's canonical text. Equal
// bindings always fingerprint equally.
inline std::string binding_fingerprint(const Binding& b) { return sha256_hex(binding_text(b)); }

inline std::string mint_base() {
    const char* v = std::getenv("SMARTWS_BASE_IRI");
    return (v && *v) ? std::string(v) : std::string("http://smartws.example/resource");
}

// Deterministic IRI for a produced resource:
//   <base>/<service>/<fingerprint prefix>/<output variable>
inline Iri mint_output_iri(std::string_view service_name, std::string_view binding_fingerprint,
                           std::string_view output_variable, std::string_view base = {}) {
    std::string b = base.empty() ? mint_base() : std::string(base);
    while (!b.empty() && b.back() == '/') b.pop_back();
    if (!output_variable.empty() && output_variable.front() == '?')
        output_variable.remove_prefix(1);
    std::string fp(binding_fingerprint.substr(0, std::min<std::size_t>(12, binding_fingerprint.size())));
    return Iri{b + "/" + std::string(service_name) + "/" + fp + "/" + std::string(output_variable)};
}

}  // namespace smartws
