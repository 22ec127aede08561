#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace uqp {

/// Six-bit gate codes carried in bits [27:22] of a quantum-operation word.
///
/// H, CNOT and MZ are fixed by the reference Bell-state encoding; the rest are
/// assigned here and documented in docs/isa.md.
enum class Gate : std::uint8_t {
    X = 0b000001,
    Y = 0b000010,
    Z = 0b000011,
    S = 0b000100,
    T = 0b000101,
    SX = 0b000110,
    MZ = 0b000111,
    Reset = 0b001000,
    RX = 0b001001,
    RY = 0b001010,
    RZ = 0b001011,
    H = 0b001111,
    CNOT = 0b010000,
    CZ = 0b010001,
    Swap = 0b010010,
};

struct GateInfo {
    Gate gate;
    std::string_view name;        // canonical QIR intrinsic stem
    std::string_view mnemonic;    // disassembly mnemonic
    std::string_view annotation;  // disassembly annotation
    int arity;                    // qubit operands
    bool rotation;                // carries an angle-pool index
};

std::span<const GateInfo> gate_table();

/// Lookup by 6-bit code; nullopt for unassigned codes.
std::optional<GateInfo> gate_info(std::uint8_t code);
GateInfo gate_info(Gate gate);

/// Lookup by QIR stem, accepting the `cx` alias for `cnot`.
std::optional<GateInfo> gate_by_name(std::string_view name);

}  // namespace uqp
