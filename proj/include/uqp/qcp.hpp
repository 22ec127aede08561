#pragma once

#include <bitset>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uqp/atoms.hpp"
#include "uqp/isa.hpp"
#include "uqp/pulse.hpp"
#include "uqp/statevector.hpp"

// Simulated cross-technology quantum control processor: decodes the word
// stream, keeps the classical/quantum control registers, dispatches atom
// preparation to the neutral-atom blocks and drives a state-vector backend
// (up to 20 qubits; larger programs run trace-only).

namespace uqp::qcp {

struct Channel {
    std::uint32_t qubit = 0;
    std::optional<std::uint32_t> partner;  // target of a two-qubit pulse

    std::string to_string() const;
    friend bool operator==(const Channel&, const Channel&) = default;
};

struct PulseEvent {
    std::uint64_t t = 0;  // cycle
    Channel channel;
    std::string waveform_id;
    std::map<std::string, double> params;
    friend bool operator==(const PulseEvent&, const PulseEvent&) = default;
};

struct MachineState {
    std::size_t pc = 0;
    std::bitset<128> qubit_addr_reg;
    std::optional<std::pair<std::uint32_t, std::uint32_t>> pair_reg;
    std::optional<std::uint32_t> pending_result;
    std::optional<int> latch;  // last measurement
    std::vector<std::uint8_t> result_regs;
    std::uint64_t clock = 0;
    bool halted = false;
    isa::Modality modality = isa::Modality::Superconducting;
    std::uint64_t measurement_ordinal = 0;
};

struct AtomPrepConfig {
    double load_probability = 0.6;
    double brightness = 5000.0;
    double noise_sd = 100.0;
    std::uint32_t pixels_per_cell = atoms::kPixelsPerCell;
    std::uint32_t max_load_attempts = 32;
    /// Grid side; 0 picks the smallest square with at least twice the qubits.
    std::uint32_t grid_side = 0;
};

struct AtomPrepLog {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::uint32_t load_attempts = 0;
    std::size_t loaded_atoms = 0;
    std::size_t detected_atoms = 0;
    std::size_t detection_errors = 0;
    std::size_t target_sites = 0;
    std::size_t plan_moves = 0;
    std::uint64_t plan_cost = 0;
    std::size_t awg_records = 0;
    bool defect_free = false;
};

struct ExecutionReport {
    std::uint32_t shots = 0;
    bool trace_only = false;
    std::vector<std::string> records;  // per shot; result 0 is the leftmost bit
    std::map<std::string, std::uint64_t> histogram;
    std::vector<PulseEvent> pulse_trace;  // shot 0
    std::uint64_t final_clock = 0;        // shot 0
    std::optional<AtomPrepLog> atom_prep_log;

    std::string to_json() const;
    std::string histogram_csv() const;
    std::string pulse_trace_csv() const;
};

enum class StepOutcome { Continue, Halted };

class QcpInstance {
  public:
    /// Throws Error{BadProgram} if the first word is not EnvInit and
    /// Error{MissingWaveform} if a gate lacks a waveform for the target.
    static QcpInstance load(isa::BinaryProgram program, const PulseLibrary& library,
                            AtomPrepConfig atom_config = {});

    /// Prepares replay `shot`; measurement draws are keyed by (seed, shot, ordinal).
    void begin_shot(std::uint64_t seed, std::uint64_t shot);
    StepOutcome step();
    ExecutionReport run(std::uint64_t seed);

    const MachineState& state() const { return state_; }
    const StateVector* statevector() const { return sv_ ? &*sv_ : nullptr; }
    bool trace_only() const { return program_.num_qubits > StateVector::kMaxQubits; }
    const std::vector<PulseEvent>& pulses() const { return pulses_; }
    const std::optional<AtomPrepLog>& atom_log() const { return atom_log_; }
    const isa::BinaryProgram& program() const { return program_; }

  private:
    QcpInstance(isa::BinaryProgram program, const PulseLibrary& library, AtomPrepConfig atom_config);

    void exec(const isa::Instruction& instr);
    void exec_quantum(const isa::QuantumOp& op);
    void exec_atom(isa::AtomPrepKind kind);
    std::uint32_t addressed_qubit() const;
    double draw();

    isa::BinaryProgram program_;
    std::map<Gate, Waveform> waveforms_;
    AtomPrepConfig atom_config_;
    MachineState state_;
    std::optional<StateVector> sv_;
    std::vector<PulseEvent> pulses_;
    CounterRng rng_;
    std::uint64_t shot_ = 0;
    bool started_ = false;

    struct AtomContext {
        atoms::AtomGrid loaded;
        std::optional<atoms::AtomImage> image;
        std::optional<atoms::AtomGrid> detected;
        std::optional<atoms::SortPlan> plan;
        atoms::TargetPattern target;
        AtomPrepLog log;
    };
    std::optional<AtomContext> atoms_;
    std::optional<AtomPrepLog> atom_log_;
};

}  // namespace uqp::qcp
