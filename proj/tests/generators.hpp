#pragma once

#include <random>

#include "uqp/isa.hpp"

namespace uqp::test {

using namespace uqp::isa;

inline Instruction random_instruction(std::mt19937_64& g) {
    static const auto& table = gate_table();
    switch (g() % 6) {
        case 0: return EnvInit{static_cast<std::uint32_t>(g() % (1u << 28))};
        case 1: {
            if (g() % 3 == 0) return MemLoad{MemLoad::kPairMode, static_cast<std::uint8_t>(g()), static_cast<std::uint16_t>(g())};
            auto mode = static_cast<std::uint8_t>(g() % MemLoad::kSegments);
            std::uint16_t field = g() % 17 == 0 ? 0 : static_cast<std::uint16_t>(1u << (g() % 16));
            return MemLoad{mode, static_cast<std::uint8_t>(g()), field};
        }
        case 2: {
            const auto& info = table[g() % table.size()];
            return QuantumOp{info.gate, static_cast<std::uint16_t>(g()), static_cast<std::uint8_t>(g() % 64)};
        }
        case 3: return FetchResult{static_cast<std::uint8_t>(g()), static_cast<std::uint16_t>(1u << (g() % 16))};
        case 4: return AtomPrep{static_cast<AtomPrepKind>(1 + g() % 4)};
        default: return Halt{};
    }
}

inline BinaryProgram random_program(std::mt19937_64& g) {
    BinaryProgram p;
    p.target = g() % 2 ? Modality::NeutralAtom : Modality::Superconducting;
    p.num_qubits = static_cast<std::uint16_t>(g() % 101);
    p.num_results = static_cast<std::uint16_t>(g() % 300);
    p.shots = static_cast<std::uint32_t>(g());
    auto n_angles = g() % 50;
    for (std::size_t i = 0; i < n_angles; ++i) p.angles.intern(std::bit_cast<double>(g()));
    p.words.push_back(encode(EnvInit{p.num_qubits}));
    auto n = g() % 200;
    for (std::size_t i = 0; i < n; ++i) {
        auto instr = random_instruction(g);
        if (auto* q = std::get_if<QuantumOp>(&instr); q && gate_info(q->gate).rotation) {
            if (p.angles.empty()) continue;
            q->operand = static_cast<std::uint16_t>((q->operand & 0xF000) | (g() % p.angles.size()));
        }
        p.words.push_back(encode(instr));
    }
    return p;
}

}  // namespace uqp::test
