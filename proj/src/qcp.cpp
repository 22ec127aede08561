#include "uqp/qcp.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "uqp/error.hpp"

namespace uqp::qcp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Separates atom-loading draws from measurement draws for the same seed.
constexpr std::uint64_t kAtomStream = 0xA70A70A70A70A70Aull;

Error bad_program(const std::string& what) { return Error(ErrorCode::BadProgram, what); }

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string Channel::to_string() const {
    auto s = std::to_string(qubit);
    if (partner) s += ":" + std::to_string(*partner);
    return s;
}

QcpInstance::QcpInstance(isa::BinaryProgram program, const PulseLibrary& library, AtomPrepConfig atom_config)
    : program_(std::move(program)), atom_config_(atom_config) {
    if (program_.words.empty()) throw bad_program("program has no instructions");
    bool leading_env_init = false;
    try {
        leading_env_init = std::holds_alternative<isa::EnvInit>(isa::decode(program_.words.front()));
    } catch (const Error&) {
    }
    if (!leading_env_init) throw bad_program("first word is not EnvInit").at_word(0);

    for (std::size_t i = 0; i < program_.words.size(); ++i) {
        isa::Instruction instr;
        try {
            instr = isa::decode(program_.words[i]);
        } catch (const Error&) {
            continue;  // reported when execution reaches it
        }
        const auto* op = std::get_if<isa::QuantumOp>(&instr);
        if (op == nullptr || waveforms_.contains(op->gate)) continue;
        const auto* w = library.find(program_.target, op->gate);
        if (w == nullptr) {
            throw Error(ErrorCode::MissingWaveform, "no " + std::string(modality_name(program_.target)) +
                                                        " waveform for gate " +
                                                        std::string(gate_info(op->gate).mnemonic))
                .at_word(i);
        }
        waveforms_.emplace(op->gate, *w);
    }
}

QcpInstance QcpInstance::load(isa::BinaryProgram program, const PulseLibrary& library, AtomPrepConfig atom_config) {
    return QcpInstance(std::move(program), library, atom_config);
}

void QcpInstance::begin_shot(std::uint64_t seed, std::uint64_t shot) {
    rng_.seed = seed;
    shot_ = shot;
    state_ = MachineState{};
    state_.modality = program_.target;
    state_.result_regs.assign(program_.num_results, 0);
    sv_.reset();
    pulses_.clear();
    atoms_.reset();
    started_ = true;
}

double QcpInstance::draw() { return rng_.uniform(shot_, state_.measurement_ordinal++); }

StepOutcome QcpInstance::step() {
    if (!started_) begin_shot(0, 0);
    if (state_.halted) throw bad_program("step after halt").at_word(state_.pc);
    if (state_.pc >= program_.words.size()) throw bad_program("execution ran past the last word").at_word(state_.pc);
    try {
        exec(isa::decode(program_.words[state_.pc]));
    } catch (Error& e) {
        if (!e.offset) e.offset = state_.pc;
        throw;
    }
    ++state_.pc;
    return state_.halted ? StepOutcome::Halted : StepOutcome::Continue;
}

void QcpInstance::exec(const isa::Instruction& instr) {
    std::visit(overloaded{
                   [&](const isa::EnvInit&) {
                       auto pc = state_.pc;
                       auto ordinal = state_.measurement_ordinal;
                       state_ = MachineState{};
                       state_.pc = pc;
                       state_.measurement_ordinal = ordinal;
                       state_.modality = program_.target;
                       state_.result_regs.assign(program_.num_results, 0);
                       if (trace_only()) {
                           sv_.reset();
                       } else {
                           sv_.emplace(program_.num_qubits);
                       }
                   },
                   [&](const isa::MemLoad& m) {
                       if (m.is_pair()) {
                           if (m.control() >= program_.num_qubits || m.target() >= program_.num_qubits) {
                               throw Error(ErrorCode::IndexOutOfRange, "pair register operand out of range");
                           }
                           state_.pair_reg = std::pair{m.control(), m.target()};
                       } else {
                           state_.qubit_addr_reg.reset();
                           if (auto q = m.qubit()) {
                               if (*q >= program_.num_qubits) {
                                   throw Error(ErrorCode::IndexOutOfRange, "qubit " + std::to_string(*q) + " out of range");
                               }
                               state_.qubit_addr_reg.set(*q);
                           }
                       }
                       state_.pending_result = m.result();
                       if (state_.pending_result && *state_.pending_result >= program_.num_results) {
                           throw Error(ErrorCode::IndexOutOfRange, "result selector out of range");
                       }
                   },
                   [&](const isa::QuantumOp& op) { exec_quantum(op); },
                   [&](const isa::FetchResult& f) {
                       if (!state_.latch) throw Error(ErrorCode::FetchWithoutMeasurement, "measurement latch is empty");
                       auto r = f.result();
                       if (r >= state_.result_regs.size()) {
                           throw Error(ErrorCode::IndexOutOfRange, "result register " + std::to_string(r) + " out of range");
                       }
                       state_.result_regs[r] = static_cast<std::uint8_t>(*state_.latch);
                   },
                   [&](const isa::AtomPrep& a) {
                       if (state_.modality != isa::Modality::NeutralAtom) {
                           throw Error(ErrorCode::AtomPrepOnSuperconducting,
                                       "atom preparation on a superconducting target");
                       }
                       exec_atom(a.kind);
                   },
                   [&](const isa::Halt&) { state_.halted = true; },
               },
               instr);
}

std::uint32_t QcpInstance::addressed_qubit() const {
    const auto& reg = state_.qubit_addr_reg;
    if (reg.count() != 1) throw bad_program("quantum operation without exactly one addressed qubit");
    for (std::uint32_t q = 0; q < reg.size(); ++q) {
        if (reg.test(q)) return q;
    }
    return 0;
}

void QcpInstance::exec_quantum(const isa::QuantumOp& op) {
    const auto info = gate_info(op.gate);
    const auto& wf = waveforms_.at(op.gate);
    PulseEvent ev{state_.clock, {}, wf.id, wf.params};

    if (info.arity == 2) {
        if (!state_.pair_reg) throw bad_program("two-qubit operation without a loaded pair register");
        auto [c, t] = *state_.pair_reg;
        ev.channel = {c, t};
        if (sv_) {
            const std::uint32_t targets[] = {c, t};
            sv_->apply(op.gate, targets);
        }
    } else {
        const auto q = addressed_qubit();
        ev.channel = {q, std::nullopt};
        if (op.gate == Gate::MZ) {
            if (!state_.pending_result) {
                throw Error(ErrorCode::MeasureWithoutPendingResult, "measurement without a pending result selector");
            }
            if (auto inline_q = op.measured_qubit(); inline_q && *inline_q != q) {
                throw bad_program("measurement operand names qubit " + std::to_string(*inline_q) +
                                  " but qubit " + std::to_string(q) + " is addressed");
            }
            const double u = draw();
            state_.latch = sv_ ? sv_->measure(q, u) : 0;
        } else if (op.gate == Gate::Reset) {
            const double u = draw();
            if (sv_) sv_->reset(q, u);
        } else {
            double angle = 0.0;
            if (auto idx = op.angle_index()) {
                if (*idx >= program_.angles.size()) throw bad_program("angle index outside the constant pool");
                angle = program_.angles.at(*idx);
                ev.params["angle"] = angle;
            }
            if (sv_) {
                const std::uint32_t targets[] = {q};
                sv_->apply(op.gate, targets, angle);
            }
        }
    }
    if (shot_ == 0) pulses_.push_back(std::move(ev));
    state_.clock += op.timing;
}

void QcpInstance::exec_atom(isa::AtomPrepKind kind) {
    using isa::AtomPrepKind;
    const auto& cfg = atom_config_;
    const CounterRng atom_rng{CounterRng::mix(rng_.seed ^ kAtomStream)};

    switch (kind) {
        case AtomPrepKind::ImageFetch: {
            const std::size_t needed = program_.num_qubits;
            std::uint32_t side = cfg.grid_side;
            if (side == 0) {
                side = 2;
                while (std::size_t{side} * side < 2 * needed) ++side;
            }
            AtomContext ctx;
            ctx.target = atoms::TargetPattern::dense_rectangle(side, side, needed);
            ctx.log.rows = side;
            ctx.log.cols = side;
            ctx.log.target_sites = needed;
            const std::uint64_t sites = std::uint64_t{side} * side;
            for (std::uint32_t attempt = 0; attempt < cfg.max_load_attempts; ++attempt) {
                atoms::AtomGrid grid(side, side);
                for (std::uint64_t i = 0; i < sites; ++i) {
                    if (atom_rng.uniform(shot_, attempt * sites + i) < cfg.load_probability) {
                        grid.set({static_cast<std::uint32_t>(i / side), static_cast<std::uint32_t>(i % side)}, true);
                    }
                }
                ctx.log.load_attempts = attempt + 1;
                if (grid.count() >= needed) {
                    ctx.loaded = std::move(grid);
                    break;
                }
            }
            if (ctx.loaded.count() < needed || ctx.loaded.rows() != side) {
                throw Error(ErrorCode::InsufficientAtoms, "atom loading failed to provide " + std::to_string(needed) +
                                                              " atoms");
            }
            ctx.log.loaded_atoms = ctx.loaded.count();
            ctx.image = atoms::synth_image(ctx.loaded, cfg.brightness, cfg.noise_sd,
                                           atom_rng.bits(shot_, ~std::uint64_t{0}), cfg.pixels_per_cell);
            atoms_ = std::move(ctx);
            break;
        }
        case AtomPrepKind::AtomDetect: {
            if (!atoms_ || !atoms_->image) throw bad_program("atom detection before image fetch");
            const double threshold = atoms::cell_signal(cfg.brightness, cfg.pixels_per_cell) / 2;
            atoms_->detected = atoms::detect(*atoms_->image, atoms_->log.rows, atoms_->log.cols, threshold);
            atoms_->log.detected_atoms = atoms_->detected->count();
            std::size_t errors = 0;
            for (std::uint32_t r = 0; r < atoms_->log.rows; ++r) {
                for (std::uint32_t c = 0; c < atoms_->log.cols; ++c) {
                    if (atoms_->detected->occupied({r, c}) != atoms_->loaded.occupied({r, c})) ++errors;
                }
            }
            atoms_->log.detection_errors = errors;
            break;
        }
        case AtomPrepKind::AtomSort: {
            if (!atoms_ || !atoms_->detected) throw bad_program("atom sorting before detection");
            atoms_->plan = atoms::plan_sort(*atoms_->detected, atoms_->target);
            atoms_->log.plan_moves = atoms_->plan->moves.size();
            atoms_->log.plan_cost = atoms_->plan->cost();
            break;
        }
        case AtomPrepKind::AtomMove: {
            if (!atoms_ || !atoms_->plan) throw bad_program("atom moving before a sort plan exists");
            atoms_->log.awg_records = atoms::emit_moves(*atoms_->plan).size();
            atoms::apply_plan(atoms_->loaded, *atoms_->plan);
            atoms_->log.defect_free = atoms::satisfies(atoms_->loaded, atoms_->target);
            if (shot_ == 0) atom_log_ = atoms_->log;
            break;
        }
    }
}

ExecutionReport QcpInstance::run(std::uint64_t seed) {
    ExecutionReport report;
    report.shots = program_.shots;
    report.trace_only = trace_only();
    // Without a state vector every replay is identical, so one suffices.
    const std::uint64_t replays = report.trace_only ? 1 : program_.shots;
    if (!report.trace_only) report.records.reserve(replays);
    atom_log_.reset();
    for (std::uint64_t shot = 0; shot < replays; ++shot) {
        begin_shot(seed, shot);
        try {
            while (step() == StepOutcome::Continue) {
            }
        } catch (Error& e) {
            e.shot = shot;
            throw;
        }
        if (shot == 0) {
            report.pulse_trace = pulses_;
            report.final_clock = state_.clock;
            report.atom_prep_log = atom_log_;
        }
        if (!report.trace_only) {
            std::string bits(state_.result_regs.size(), '0');
            for (std::size_t r = 0; r < bits.size(); ++r) {
                if (state_.result_regs[r]) bits[r] = '1';
            }
            ++report.histogram[bits];
            report.records.push_back(std::move(bits));
        }
    }
    return report;
}

std::string ExecutionReport::to_json() const {
    nlohmann::json j;
    j["shots"] = shots;
    j["trace_only"] = trace_only;
    j["histogram"] = nlohmann::json::object();
    for (const auto& [k, v] : histogram) j["histogram"][k] = v;
    j["records"] = records;
    j["final_clock"] = final_clock;
    auto trace = nlohmann::json::array();
    for (const auto& ev : pulse_trace) {
        trace.push_back({{"t", ev.t}, {"channel", ev.channel.to_string()}, {"waveform_id", ev.waveform_id},
                         {"params", ev.params}});
    }
    j["pulse_trace"] = std::move(trace);
    if (atom_prep_log) {
        const auto& a = *atom_prep_log;
        j["atom_prep_log"] = {{"rows", a.rows},
                              {"cols", a.cols},
                              {"load_attempts", a.load_attempts},
                              {"loaded_atoms", a.loaded_atoms},
                              {"detected_atoms", a.detected_atoms},
                              {"detection_errors", a.detection_errors},
                              {"target_sites", a.target_sites},
                              {"plan_moves", a.plan_moves},
                              {"plan_cost", a.plan_cost},
                              {"awg_records", a.awg_records},
                              {"defect_free", a.defect_free}};
    }
    return j.dump(2) + "\n";
}

std::string ExecutionReport::histogram_csv() const {
    std::string out = "bitstring,count\n";
    for (const auto& [k, v] : histogram) out += k + "," + std::to_string(v) + "\n";
    return out;
}

std::string ExecutionReport::pulse_trace_csv() const {
    std::string out = "t,channel,waveform_id,params\n";
    for (const auto& ev : pulse_trace) {
        out += std::to_string(ev.t) + "," + ev.channel.to_string() + "," + ev.waveform_id;
        for (const auto& [k, v] : ev.params) out += "," + k + "=" + format_number(v);
        out += "\n";
    }
    return out;
}

}  // namespace uqp::qcp
