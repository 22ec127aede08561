#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "uqp/gates.hpp"
#include "uqp/isa.hpp"
#include "uqp/qir.hpp"

namespace uqp {

struct JobOptions {
    isa::Modality target = isa::Modality::Superconducting;
    std::uint32_t shots = 1;
    std::optional<std::uint64_t> seed;
    /// Per-gate timing overrides in cycles; gates not listed use 4.
    std::map<Gate, std::uint8_t> durations;
};

struct LoweringReport {
    std::size_t word_count = 0;
    std::size_t angle_count = 0;
    std::size_t peak_bytes = 0;  // filled by callers that install an allocation counter
    double wall_time = 0.0;      // seconds
    std::vector<std::uint32_t> recorded_results;
};

struct LoweredProgram {
    isa::BinaryProgram program;
    LoweringReport report;
};

/// Translates a validated kernel into the instruction stream:
/// EnvInit, the atom-preparation prologue for neutral-atom targets, one
/// MemLoad + QuantumOp per gate, MemLoad + MZ + FetchResult per measurement,
/// and a trailing Halt. No optimization is performed.
LoweredProgram lower(const qir::QuantumKernel& kernel, const JobOptions& opts);

/// Closed-form word count of lower(kernel, opts).
std::size_t emission_cost(const qir::QuantumKernel& kernel,
                          isa::Modality target = isa::Modality::Superconducting);

}  // namespace uqp
