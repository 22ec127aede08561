#include "uqp/pulse.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pulse_library_data.hpp"
#include "uqp/error.hpp"

namespace uqp {

std::string_view modality_name(isa::Modality modality) {
    return modality == isa::Modality::NeutralAtom ? "neutral_atom" : "superconducting";
}

std::optional<isa::Modality> modality_from_name(std::string_view name) {
    if (name == "superconducting" || name == "sc") return isa::Modality::Superconducting;
    if (name == "neutral_atom" || name == "na") return isa::Modality::NeutralAtom;
    return std::nullopt;
}

PulseLibrary PulseLibrary::parse(std::string_view json_text) {
    PulseLibrary lib;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("pulse library is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "pulse library must be a JSON object");
    for (const auto& [mod_name, gates] : doc.items()) {
        auto modality = modality_from_name(mod_name);
        if (!modality) throw Error(ErrorCode::ConfigError, "unknown modality '" + mod_name + "' in pulse library");
        if (!gates.is_object()) throw Error(ErrorCode::ConfigError, "modality '" + mod_name + "' must map gates");
        for (const auto& [gate_name, entry] : gates.items()) {
            auto info = gate_by_name(gate_name);
            if (!info) throw Error(ErrorCode::ConfigError, "unknown gate '" + gate_name + "' in pulse library");
            if (!entry.is_object() || !entry.contains("waveform") || !entry["waveform"].is_string()) {
                throw Error(ErrorCode::ConfigError, mod_name + "." + gate_name + " lacks a waveform id");
            }
            Waveform w{entry["waveform"].get<std::string>(), {}};
            if (entry.contains("params")) {
                for (const auto& [k, v] : entry["params"].items()) {
                    if (!v.is_number()) {
                        throw Error(ErrorCode::ConfigError, mod_name + "." + gate_name + ".params." + k +
                                                                " is not a number");
                    }
                    w.params[k] = v.get<double>();
                }
            }
            lib.set(*modality, info->gate, std::move(w));
        }
    }
    return lib;
}

PulseLibrary PulseLibrary::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open pulse library '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

PulseLibrary PulseLibrary::builtin() { return parse(kBuiltinPulseLibrary); }

PulseLibrary PulseLibrary::from_environment() {
    if (const char* path = std::getenv("UQP_PULSE_LIB"); path != nullptr && *path != '\0') return load_file(path);
    return builtin();
}

const Waveform* PulseLibrary::find(isa::Modality modality, Gate gate) const {
    auto it = entries_.find({modality, gate});
    return it == entries_.end() ? nullptr : &it->second;
}

void PulseLibrary::set(isa::Modality modality, Gate gate, Waveform waveform) {
    entries_[{modality, gate}] = std::move(waveform);
}

void PulseLibrary::erase(isa::Modality modality, Gate gate) { entries_.erase({modality, gate}); }

void PulseLibrary::erase(isa::Modality modality) {
    std::erase_if(entries_, [&](const auto& e) { return e.first.first == modality; });
}

}  // namespace uqp
