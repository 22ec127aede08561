#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "uqp/gates.hpp"
#include "uqp/isa.hpp"

namespace uqp {

struct Waveform {
    std::string id;
    std::map<std::string, double> params;
};

/// (modality, gate) -> waveform table. The JSON form maps modality names
/// ("superconducting", "neutral_atom") to objects keyed by gate name, each
/// holding {"waveform": id, "params": {name: number}}.
class PulseLibrary {
  public:
    static PulseLibrary parse(std::string_view json_text);
    static PulseLibrary load_file(const std::string& path);
    /// The library compiled in from data/pulse_library.json.
    static PulseLibrary builtin();
    /// $UQP_PULSE_LIB when set, otherwise builtin().
    static PulseLibrary from_environment();

    const Waveform* find(isa::Modality modality, Gate gate) const;
    void set(isa::Modality modality, Gate gate, Waveform waveform);
    void erase(isa::Modality modality, Gate gate);
    void erase(isa::Modality modality);
    std::size_t size() const { return entries_.size(); }

  private:
    std::map<std::pair<isa::Modality, Gate>, Waveform> entries_;
};

std::string_view modality_name(isa::Modality modality);
std::optional<isa::Modality> modality_from_name(std::string_view name);

}  // namespace uqp
