#include "uqp/gates.hpp"

#include <array>

namespace uqp {

namespace {

constexpr std::array kGates{
    GateInfo{Gate::X, "x", "X", "Pauli-X operation", 1, false},
    GateInfo{Gate::Y, "y", "Y", "Pauli-Y operation", 1, false},
    GateInfo{Gate::Z, "z", "Z", "Pauli-Z operation", 1, false},
    GateInfo{Gate::S, "s", "S", "S phase operation", 1, false},
    GateInfo{Gate::T, "t", "T", "T phase operation", 1, false},
    GateInfo{Gate::SX, "sx", "SX", "Square-root X operation", 1, false},
    GateInfo{Gate::MZ, "mz", "MZ", "measurement operation", 1, false},
    GateInfo{Gate::Reset, "reset", "RESET", "Qubit reset operation", 1, false},
    GateInfo{Gate::RX, "rx", "RX", "X rotation operation", 1, true},
    GateInfo{Gate::RY, "ry", "RY", "Y rotation operation", 1, true},
    GateInfo{Gate::RZ, "rz", "RZ", "Z rotation operation", 1, true},
    GateInfo{Gate::H, "h", "H", "Hadamard operation", 1, false},
    GateInfo{Gate::CNOT, "cnot", "CNOT", "CNOT operation", 2, false},
    GateInfo{Gate::CZ, "cz", "CZ", "CZ operation", 2, false},
    GateInfo{Gate::Swap, "swap", "SWAP", "SWAP operation", 2, false},
};

}  // namespace

std::span<const GateInfo> gate_table() { return kGates; }

std::optional<GateInfo> gate_info(std::uint8_t code) {
    for (const auto& g : kGates) {
        if (static_cast<std::uint8_t>(g.gate) == code) return g;
    }
    return std::nullopt;
}

GateInfo gate_info(Gate gate) { return *gate_info(static_cast<std::uint8_t>(gate)); }

std::optional<GateInfo> gate_by_name(std::string_view name) {
    if (name == "cx") name = "cnot";
    for (const auto& g : kGates) {
        if (g.name == name) return g;
    }
    return std::nullopt;
}

}  // namespace uqp
