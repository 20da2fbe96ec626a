#pragma once

#include <map>
#include <string>
#include <vector>

#include "smartws/model.hpp"
#include "smartws/naming.hpp"
#include "smartws/sha256.hpp"
#include "smartws/transport.hpp"

namespace smartws {

// Shared vocabulary of the imaging pipeline fixtures and the device demo.
namespace vocab {

inline constexpr const char* kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr const char* kDc = "http://purl.org/dc/elements/1.1/";
inline constexpr const char* kSp = "http://surgipedia.sfb25.de/wiki/Special:URIResolver/";
inline constexpr const char* kThings = "http://smartws.example/things#";

inline Iri rdf_type() { return Iri{std::string(kRdf) + "type"}; }
inline Iri dc_format() { return Iri{std::string(kDc) + "format"}; }

inline Iri sp(const std::string& local) { return Iri{std::string(kSp) + local}; }
inline Iri headscan() { return sp("Category-3AHeadscan"); }
inline Iri brain_atlas_image() { return sp("Category-3ABrainAtlasImage"); }
inline Iri brain_atlas_mask() { return sp("Category-3ABrainAtlasMask"); }
inline Iri brain_image() { return sp("Category-3ABrainImage"); }
inline Iri brain_mask() { return sp("Category-3ABrainMask"); }
inline Iri registered_image() { return sp("RegisteredImage"); }
inline Iri normalized_image() { return sp("NormalizedImage"); }
inline Iri tumor_segmentation() { return sp("TumorSegmentation"); }
inline Iri progression_map() { return sp("ProgressionMap"); }
inline Iri patient_annotation() { return sp("PatientAnnotation"); }
inline Iri derived_from() { return sp("derivedFrom"); }
inline Iri content_hash() { return sp("contentHash"); }
inline Iri method() { return sp("method"); }
inline Iri of_patient() { return sp("ofPatient"); }

inline Iri thing(const std::string& local) { return Iri{std::string(kThings) + local}; }
inline Iri temperature() { return thing("Temperature"); }
inline Iri has_value() { return thing("hasValue"); }
inline Iri heater() { return thing("Heater"); }
inline Iri has_state() { return thing("hasState"); }

inline PrefixMap prefixes() {
    return PrefixMap{{"rdf", kRdf}, {"dc", kDc}, {"sp", kSp}, {"things", kThings}};
}

}  // namespace vocab

// Stand-in for a produced image payload: no pixels, just a hash that is a
// deterministic function of the producing service and the input lineage.
struct MockArtifactContent {
    std::string service_name;
    std::vector<std::string> lineage;  // input IRIs

    std::string hash() const {
        std::string seed = service_name;
        for (const auto& l : lineage) {
            seed += "\n";
            seed += l;
        }
        return sha256_hex(seed).substr(0, 12);
    }
};

namespace detail {

inline Iri binding_iri(const Binding& b, const std::string& var) {
    auto it = b.find(var);
    if (it == b.end() || !is_iri(it->second))
        throw std::runtime_error("missing input binding ?" + var);
    return as_iri(it->second);
}

// One pipeline stage: consumes the IRI bound to `input_var`, produces one
// resource typed `output_type` with the given format, linked back to its
// input.
inline ServiceHandler::Fn stage_mock(std::string service_name, std::string input_var,
                                     std::string output_var, Iri output_type, std::string format,
                                     std::string method_tag = "", bool with_content_hash = false) {
    return [=](const std::vector<Triple>&, const Binding& binding) {
        Iri input = binding_iri(binding, input_var);
        Iri output = mint_output_iri(service_name, binding_fingerprint(binding), output_var);
        std::vector<Triple> out{
            Triple{output, vocab::rdf_type(), output_type},
            Triple{output, vocab::dc_format(), Literal{format}},
            Triple{output, vocab::derived_from(), input},
        };
        if (!method_tag.empty())
            out.push_back(Triple{output, vocab::method(), Literal{method_tag}});
        if (binding.count("annotation") && is_iri(binding.at("annotation")))
            out.push_back(Triple{output, vocab::derived_from(), as_iri(binding.at("annotation"))});
        if (with_content_hash) {
            MockArtifactContent content{service_name, {input.value}};
            out.push_back(Triple{output, vocab::content_hash(), Literal{content.hash()}});
        }
        return out;
    };
}

}  // namespace detail

// Skull-stripping mock: emits the brain image and brain mask for the bound
// headscan, each linked back to it.
inline ServiceHandler::Fn brain_mask_generation_mock() {
    return [](const std::vector<Triple>&, const Binding& binding) {
        Iri scan = detail::binding_iri(binding, "inputImage");
        std::string fp = binding_fingerprint(binding);
        Iri brain_image = mint_output_iri("BrainMaskGeneration", fp, "brainImage");
        Iri brain_mask = mint_output_iri("BrainMaskGeneration", fp, "brainMask");
        return std::vector<Triple>{
            Triple{brain_image, vocab::rdf_type(), vocab::brain_image()},
            Triple{brain_image, vocab::dc_format(), Literal{"image/nrrd"}},
            Triple{brain_mask, vocab::rdf_type(), vocab::brain_mask()},
            Triple{brain_mask, vocab::dc_format(), Literal{"image/nrrd"}},
            Triple{brain_image, vocab::derived_from(), scan},
            Triple{brain_mask, vocab::derived_from(), scan},
        };
    };
}

inline ServiceHandler::Fn batched_folder_registration_mock() {
    return detail::stage_mock("BatchedFolderRegistration", "brainImage", "registeredImage",
                              vocab::registered_image(), "image/nrrd");
}

inline ServiceHandler::Fn robust_normalization_mock() {
    return detail::stage_mock("RobustNormalization", "registeredImage", "normalizedImage",
                              vocab::normalized_image(), "image/nrrd", "robust");
}

inline ServiceHandler::Fn standard_normalization_mock() {
    return detail::stage_mock("StandardNormalization", "registeredImage", "normalizedImage",
                              vocab::normalized_image(), "image/nrrd", "standard");
}

inline ServiceHandler::Fn tumor_segmentation_mock() {
    return detail::stage_mock("TumorSegmentation", "normalizedImage", "tumorSegmentation",
                              vocab::tumor_segmentation(), "image/nrrd");
}

inline ServiceHandler::Fn map_generation_mock() {
    return detail::stage_mock("MapGeneration", "tumorSegmentation", "progressionMap",
                              vocab::progression_map(), "image/png", "", true);
}

// The heater backend knows only how to switch a heater on; turning it off at
// warm readings is the job of the rule attached in the service description,
// which answers before this function is ever reached.
inline ServiceHandler::Fn temperature_device_mock() {
    return [](const std::vector<Triple>&, const Binding& binding) {
        Iri heater = mint_output_iri("TemperatureControl", binding_fingerprint(binding), "heater");
        return std::vector<Triple>{
            Triple{heater, vocab::rdf_type(), vocab::heater()},
            Triple{heater, vocab::has_state(), Literal{"on"}},
        };
    };
}

inline ServiceHandler::Fn echo_mock() {
    return [](const std::vector<Triple>& graph, const Binding&) { return graph; };
}

// Named catalog used by the CLI's serve subcommand.
inline const std::map<std::string, ServiceHandler::Fn>& handler_catalog() {
    static const std::map<std::string, ServiceHandler::Fn> catalog{
        {"brain_mask_generation", brain_mask_generation_mock()},
        {"batched_folder_registration", batched_folder_registration_mock()},
        {"robust_normalization", robust_normalization_mock()},
        {"standard_normalization", standard_normalization_mock()},
        {"tumor_segmentation", tumor_segmentation_mock()},
        {"map_generation", map_generation_mock()},
        {"temperature", temperature_device_mock()},
        {"echo", echo_mock()},
    };
    return catalog;
}

}  // namespace smartws
