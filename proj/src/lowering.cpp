#include "uqp/lowering.hpp"

#include <algorithm>
#include <chrono>

#include "uqp/error.hpp"

namespace uqp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t kPrologueWords = 4;
constexpr std::size_t kGateWords = 2;
constexpr std::size_t kMeasureWords = 3;

class Emitter {
  public:
    Emitter(isa::BinaryProgram& program, const JobOptions& opts) : program_(program), opts_(opts) {}

    void emit(const isa::Instruction& instr) { program_.words.push_back(isa::encode(instr)); }

    std::uint8_t timing(Gate g) const {
        auto it = opts_.durations.find(g);
        return it == opts_.durations.end() ? isa::kDefaultTiming : it->second;
    }

    Gate gate_of(const std::string& name) const {
        auto info = gate_by_name(name);
        if (!info) throw Error(ErrorCode::UnknownGate, "unsupported gate '" + name + "'");
        return info->gate;
    }

    void operator()(const qir::Gate1Q& g) {
        auto gate = gate_of(g.gate_name);
        emit(isa::MemLoad::single(g.qubit));
        emit(isa::QuantumOp::single(gate, timing(gate)));
    }

    void operator()(const qir::Gate1QAngle& g) {
        auto gate = gate_of(g.gate_name);
        auto index = program_.angles.intern(g.angle);
        emit(isa::MemLoad::single(g.qubit));
        emit(isa::QuantumOp::rotation(gate, index, timing(gate)));
    }

    void operator()(const qir::Gate2Q& g) {
        auto gate = gate_of(g.gate_name);
        emit(isa::MemLoad::pair(g.control, g.target));
        emit(isa::QuantumOp::two_qubit(gate, timing(gate)));
    }

    void operator()(const qir::Measure& m) {
        emit(isa::MemLoad::single(m.qubit, m.result));
        emit(isa::QuantumOp::measure(m.qubit, timing(Gate::MZ)));
        emit(isa::FetchResult::for_result(m.result));
    }

    void operator()(const qir::ResultRecord& r) { recorded.push_back(r.result); }

    std::vector<std::uint32_t> recorded;

  private:
    isa::BinaryProgram& program_;
    const JobOptions& opts_;
};

}  // namespace

std::size_t emission_cost(const qir::QuantumKernel& kernel, isa::Modality target) {
    std::size_t gates = 0;
    std::size_t measures = 0;
    for (const auto& op : kernel.ops) {
        if (std::holds_alternative<qir::Measure>(op)) {
            ++measures;
        } else if (!std::holds_alternative<qir::ResultRecord>(op)) {
            ++gates;
        }
    }
    std::size_t prologue = target == isa::Modality::NeutralAtom ? kPrologueWords : 0;
    return 2 + prologue + kGateWords * gates + kMeasureWords * measures;
}

LoweredProgram lower(const qir::QuantumKernel& kernel, const JobOptions& opts) {
    auto start = std::chrono::steady_clock::now();
    const auto& meta = kernel.metadata;
    if (meta.num_qubits > isa::kMaxQubits) {
        throw Error(ErrorCode::QubitCountExceeded, std::to_string(meta.num_qubits) + " qubits exceeds the " +
                                                       std::to_string(isa::kMaxQubits) + "-qubit address space");
    }
    if (meta.num_results > 0xFFFF) throw Error(ErrorCode::FieldOverflow, "result register exceeds 16 bits");
    if (opts.shots == 0) throw Error(ErrorCode::InvalidProgram, "shots must be at least 1");

    LoweredProgram out;
    auto& p = out.program;
    p.target = opts.target;
    p.num_qubits = static_cast<std::uint16_t>(meta.num_qubits);
    p.num_results = static_cast<std::uint16_t>(meta.num_results);
    p.shots = opts.shots;
    p.words.reserve(emission_cost(kernel, opts.target));

    Emitter emitter(p, opts);
    emitter.emit(isa::EnvInit{std::max(meta.num_qubits, meta.num_results)});
    if (opts.target == isa::Modality::NeutralAtom) {
        for (auto kind : {isa::AtomPrepKind::ImageFetch, isa::AtomPrepKind::AtomDetect, isa::AtomPrepKind::AtomSort,
                          isa::AtomPrepKind::AtomMove}) {
            emitter.emit(isa::AtomPrep{kind});
        }
    }
    for (const auto& op : kernel.ops) std::visit(emitter, op);
    emitter.emit(isa::Halt{});

    auto& r = out.report;
    r.word_count = p.words.size();
    r.angle_count = p.angles.size();
    r.recorded_results = std::move(emitter.recorded);
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace uqp
