#include "uqp/isa.hpp"

#include <bit>
#include <cstring>
#include <sstream>

#include "uqp/error.hpp"

namespace uqp::isa {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint8_t kFetchLast = 0b1010;
constexpr std::uint32_t kEnvInitMax = (1u << 28) - 1;

Error overflow(const std::string& what) { return Error(ErrorCode::FieldOverflow, what); }

Error illegal(Word32 w, const std::string& what) {
    return Error(ErrorCode::IllegalOpcode, what + " in word " + to_binary(w));
}

std::uint32_t bits(std::uint32_t v, int hi, int lo) { return (v >> lo) & ((1u << (hi - lo + 1)) - 1u); }

bool valid_load_mode(std::uint8_t mode) { return mode < MemLoad::kSegments || mode == MemLoad::kPairMode; }

std::string ordinal(std::uint32_t n) {
    static constexpr const char* kWords[] = {"First", "Second", "Third", "Fourth", "Fifth",
                                             "Sixth", "Seventh", "Eighth", "Ninth", "Tenth"};
    if (n >= 1 && n <= 10) return kWords[n - 1];
    const char* suffix = "th";
    if (n % 100 < 11 || n % 100 > 13) {
        if (n % 10 == 1) suffix = "st";
        if (n % 10 == 2) suffix = "nd";
        if (n % 10 == 3) suffix = "rd";
    }
    return std::to_string(n) + suffix;
}

}  // namespace

MemLoad MemLoad::single(std::uint32_t qubit, std::optional<std::uint32_t> result) {
    if (qubit >= 16u * kSegments) throw overflow("qubit " + std::to_string(qubit) + " exceeds the address segments");
    MemLoad m;
    m.mode = static_cast<std::uint8_t>(qubit / 16);
    m.qubit_field = static_cast<std::uint16_t>(1u << (qubit % 16));
    if (result) {
        if (*result >= 255) throw overflow("result " + std::to_string(*result) + " exceeds the selector field");
        m.result_sel = std::rotl(static_cast<std::uint8_t>(*result + 1), 4);
    }
    return m;
}

MemLoad MemLoad::pair(std::uint32_t control, std::uint32_t target) {
    if (control > 0xFF || target > 0xFF) throw overflow("pair operand exceeds the 8-bit index field");
    return MemLoad{kPairMode, 0, static_cast<std::uint16_t>(control << 8 | target)};
}

std::optional<std::uint32_t> MemLoad::qubit() const {
    if (is_pair() || qubit_field == 0) return std::nullopt;
    return mode * 16u + static_cast<std::uint32_t>(std::countr_zero(qubit_field));
}

std::optional<std::uint32_t> MemLoad::result() const {
    if (result_sel == 0) return std::nullopt;
    return static_cast<std::uint32_t>(std::rotr(result_sel, 4)) - 1u;
}

QuantumOp QuantumOp::single(Gate gate, std::uint8_t timing) { return QuantumOp{gate, 0, timing}; }

QuantumOp QuantumOp::rotation(Gate gate, std::uint16_t angle_index, std::uint8_t timing) {
    if (angle_index >= kMaxAngles) throw overflow("angle index exceeds the 12-bit pool field");
    return QuantumOp{gate, angle_index, timing};
}

QuantumOp QuantumOp::two_qubit(Gate gate, std::uint8_t timing) { return QuantumOp{gate, kPairFlag, timing}; }

QuantumOp QuantumOp::measure(std::uint32_t qubit, std::uint8_t timing) {
    if (qubit >= 0xFFFF) throw overflow("measured qubit exceeds the operand field");
    return QuantumOp{Gate::MZ, std::rotl(static_cast<std::uint16_t>(qubit + 1), 11), timing};
}

std::optional<std::uint16_t> QuantumOp::angle_index() const {
    if (!gate_info(gate).rotation) return std::nullopt;
    return static_cast<std::uint16_t>(operand & 0x0FFF);
}

std::optional<std::uint32_t> QuantumOp::measured_qubit() const {
    if (gate != Gate::MZ || operand == 0) return std::nullopt;
    return static_cast<std::uint32_t>(std::rotr(operand, 11)) - 1u;
}

FetchResult FetchResult::for_result(std::uint32_t result) {
    if (result >= 16u * 256u) throw overflow("result " + std::to_string(result) + " exceeds the register segments");
    return FetchResult{static_cast<std::uint8_t>(result / 16), static_cast<std::uint16_t>(1u << (result % 16))};
}

std::uint32_t FetchResult::result() const {
    return segment * 16u + static_cast<std::uint32_t>(std::countr_zero(reg_sel));
}

Word32 encode(const Instruction& instr) {
    return std::visit(
        overloaded{
            [](const EnvInit& e) {
                if (e.size > kEnvInitMax) throw overflow("EnvInit size exceeds 28 bits");
                return Word32{cls::EnvInit << 28 | e.size};
            },
            [](const MemLoad& m) {
                if (!valid_load_mode(m.mode)) throw overflow("undefined MemLoad mode " + std::to_string(m.mode));
                if (!m.is_pair() && std::popcount(m.qubit_field) > 1) {
                    throw overflow("single-target qubit mask must be one-hot");
                }
                return Word32{cls::MemLoad << 28 | std::uint32_t{m.mode} << 24 | std::uint32_t{m.result_sel} << 16 |
                              m.qubit_field};
            },
            [](const QuantumOp& q) {
                auto code = static_cast<std::uint8_t>(q.gate);
                if (!gate_info(code)) throw overflow("undefined gate code " + std::to_string(code));
                if (q.timing > 0x3F) throw overflow("timing exceeds 6 bits");
                return Word32{cls::QuantumOp << 28 | std::uint32_t{code} << 22 | std::uint32_t{q.operand} << 6 |
                              q.timing};
            },
            [](const FetchResult& f) {
                if (std::popcount(f.reg_sel) != 1) throw overflow("result register select must be one-hot");
                return Word32{cls::Classical << 28 | std::uint32_t{kFetchLast} << 24 |
                              std::uint32_t{f.segment} << 16 | f.reg_sel};
            },
            [](const AtomPrep& a) {
                auto k = static_cast<std::uint8_t>(a.kind);
                if (k < 1 || k > 4) throw overflow("undefined AtomPrep kind " + std::to_string(k));
                return Word32{cls::AtomPrep << 28 | std::uint32_t{k} << 24};
            },
            [](const Halt&) { return Word32{0}; },
        },
        instr);
}

Instruction decode(Word32 word) {
    const std::uint32_t v = word.value;
    switch (bits(v, 31, 28)) {
        case cls::Halt:
            if (v != 0) throw illegal(word, "non-zero payload in halt class");
            return Halt{};
        case cls::EnvInit:
            return EnvInit{bits(v, 27, 0)};
        case cls::MemLoad: {
            MemLoad m{static_cast<std::uint8_t>(bits(v, 27, 24)), static_cast<std::uint8_t>(bits(v, 23, 16)),
                      static_cast<std::uint16_t>(bits(v, 15, 0))};
            if (!valid_load_mode(m.mode)) throw illegal(word, "undefined MemLoad mode");
            if (!m.is_pair() && std::popcount(m.qubit_field) > 1) throw illegal(word, "multi-hot qubit mask");
            return m;
        }
        case cls::QuantumOp: {
            auto code = static_cast<std::uint8_t>(bits(v, 27, 22));
            if (!gate_info(code)) throw illegal(word, "undefined gate code");
            return QuantumOp{static_cast<Gate>(code), static_cast<std::uint16_t>(bits(v, 21, 6)),
                             static_cast<std::uint8_t>(bits(v, 5, 0))};
        }
        case cls::Classical: {
            if (bits(v, 27, 24) != kFetchLast) throw illegal(word, "undefined classical sub-op");
            FetchResult f{static_cast<std::uint8_t>(bits(v, 23, 16)), static_cast<std::uint16_t>(bits(v, 15, 0))};
            if (std::popcount(f.reg_sel) != 1) throw illegal(word, "register select is not one-hot");
            return f;
        }
        case cls::AtomPrep: {
            auto k = bits(v, 27, 24);
            if (k < 1 || k > 4 || bits(v, 23, 0) != 0) throw illegal(word, "undefined atom-preparation sub-op");
            return AtomPrep{static_cast<AtomPrepKind>(k)};
        }
        default:
            throw illegal(word, "undefined instruction class");
    }
}

std::string to_binary(Word32 word) {
    std::string s(32, '0');
    for (int i = 0; i < 32; ++i) {
        if (word.value >> (31 - i) & 1u) s[static_cast<std::size_t>(i)] = '1';
    }
    return s;
}

std::string mnemonic(const Instruction& instr) {
    return std::visit(
        overloaded{
            [](const EnvInit& e) { return "ENVINIT " + std::to_string(e.size); },
            [](const MemLoad& m) {
                std::string s = "MEMLD ";
                if (m.is_pair()) {
                    s += "q" + std::to_string(m.control()) + ",q" + std::to_string(m.target());
                } else if (auto q = m.qubit()) {
                    s += "q" + std::to_string(*q);
                } else {
                    s += "-";
                }
                if (auto r = m.result()) s += " ->r" + std::to_string(*r);
                return s;
            },
            [](const QuantumOp& q) {
                std::string s(gate_info(q.gate).mnemonic);
                if (auto mq = q.measured_qubit()) s += " q" + std::to_string(*mq);
                if (auto a = q.angle_index()) s += " a" + std::to_string(*a);
                return s + " @" + std::to_string(q.timing);
            },
            [](const FetchResult& f) { return "FETCH r" + std::to_string(f.result()); },
            [](const AtomPrep& a) -> std::string {
                switch (a.kind) {
                    case AtomPrepKind::ImageFetch: return "IMGFETCH";
                    case AtomPrepKind::AtomDetect: return "ATOMDET";
                    case AtomPrepKind::AtomSort: return "ATOMSORT";
                    case AtomPrepKind::AtomMove: return "ATOMMOVE";
                }
                return "ATOMPREP";
            },
            [](const Halt&) { return std::string("HALT"); },
        },
        instr);
}

std::string annotation(const Instruction& instr) {
    return std::visit(
        overloaded{
            [](const EnvInit&) { return std::string("Execution environment initialization"); },
            [](const MemLoad&) { return std::string("Memory instruction"); },
            [](const QuantumOp& q) {
                if (q.gate == Gate::MZ) {
                    auto mq = q.measured_qubit();
                    return (mq ? ordinal(*mq + 1) + " qubit " : std::string("Qubit ")) + "measurement operation";
                }
                return std::string(gate_info(q.gate).annotation);
            },
            [](const FetchResult&) { return std::string("Fetch last measurement"); },
            [](const AtomPrep& a) -> std::string {
                switch (a.kind) {
                    case AtomPrepKind::ImageFetch: return "Image fetch";
                    case AtomPrepKind::AtomDetect: return "Atom detection";
                    case AtomPrepKind::AtomSort: return "Atom sorting";
                    case AtomPrepKind::AtomMove: return "Atom moving";
                }
                return "Atom preparation";
            },
            [](const Halt&) { return std::string("Halt (end of program)"); },
        },
        instr);
}

AngleTable::AngleTable(std::vector<double> values) {
    for (double v : values) intern(v);
}

std::uint16_t AngleTable::intern(double angle) {
    auto key = std::bit_cast<std::uint64_t>(angle);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    if (values_.size() >= kMaxAngles) {
        throw Error(ErrorCode::AnglePoolOverflow, "more than " + std::to_string(kMaxAngles) + " distinct angles");
    }
    auto idx = static_cast<std::uint16_t>(values_.size());
    values_.push_back(angle);
    index_.emplace(key, idx);
    return idx;
}

bool operator==(const AngleTable& a, const AngleTable& b) {
    if (a.values_.size() != b.values_.size()) return false;
    return std::memcmp(a.values_.data(), b.values_.data(), a.values_.size() * sizeof(double)) == 0;
}

std::size_t image_size(const BinaryProgram& program) {
    return kHeaderBytes + 8 * program.angles.size() + 4 + 4 * program.words.size();
}

void check_program(const BinaryProgram& program) {
    if (program.num_qubits > kMaxQubits) {
        throw Error(ErrorCode::QubitCountExceeded, std::to_string(program.num_qubits) + " qubits exceeds the " +
                                                       std::to_string(kMaxQubits) + "-qubit address space");
    }
    if (program.target != Modality::Superconducting && program.target != Modality::NeutralAtom) {
        throw Error(ErrorCode::InvalidProgram, "unknown target modality");
    }
    if (program.words.empty()) throw Error(ErrorCode::InvalidProgram, "program has no instructions");
    if (program.angles.size() > kMaxAngles) throw Error(ErrorCode::AnglePoolOverflow, "angle pool too large");
    for (std::size_t i = 0; i < program.words.size(); ++i) {
        Instruction instr;
        try {
            instr = decode(program.words[i]);
        } catch (Error& e) {
            throw std::move(e).at_word(i);
        }
        if (i == 0 && !std::holds_alternative<EnvInit>(instr)) {
            throw Error(ErrorCode::InvalidProgram, "first instruction is not EnvInit").at_word(0);
        }
        if (auto* q = std::get_if<QuantumOp>(&instr)) {
            if (auto a = q->angle_index(); a && *a >= program.angles.size()) {
                throw Error(ErrorCode::InvalidProgram, "angle index " + std::to_string(*a) + " outside pool")
                    .at_word(i);
            }
        }
    }
}

namespace {

class Writer {
  public:
    explicit Writer(std::size_t capacity) { out_.reserve(capacity); }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        u8(static_cast<std::uint8_t>(v));
        u8(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        u16(static_cast<std::uint16_t>(v));
        u16(static_cast<std::uint16_t>(v >> 16));
    }
    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v));
        u32(static_cast<std::uint32_t>(v >> 32));
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

  private:
    std::vector<std::uint8_t> out_;
};

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
    std::uint8_t u8() {
        need(1);
        return in_[pos_++];
    }
    std::uint16_t u16() {
        std::uint16_t lo = u8();
        return static_cast<std::uint16_t>(lo | u8() << 8);
    }
    std::uint32_t u32() {
        std::uint32_t lo = u16();
        return lo | std::uint32_t{u16()} << 16;
    }
    std::uint64_t u64() {
        std::uint64_t lo = u32();
        return lo | std::uint64_t{u32()} << 32;
    }
    std::size_t remaining() const { return in_.size() - pos_; }

  private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) {
            throw Error(ErrorCode::TruncatedProgram,
                        "image ends at byte " + std::to_string(in_.size()) + " (needed " +
                            std::to_string(pos_ + n) + ")");
        }
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

constexpr std::uint8_t kMagic[4] = {'U', 'Q', 'P', 'B'};

}  // namespace

std::vector<std::uint8_t> assemble(const BinaryProgram& program) {
    check_program(program);
    Writer w(image_size(program));
    for (auto b : kMagic) w.u8(b);
    w.u16(program.version);
    w.u8(static_cast<std::uint8_t>(program.target));
    w.u8(0);
    w.u16(program.num_qubits);
    w.u16(program.num_results);
    w.u32(program.shots);
    w.u16(static_cast<std::uint16_t>(program.angles.size()));
    w.u16(0);
    for (double a : program.angles.values()) w.u64(std::bit_cast<std::uint64_t>(a));
    w.u32(static_cast<std::uint32_t>(program.words.size()));
    for (auto word : program.words) w.u32(word.value);
    return w.take();
}

Disassembly disassemble(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4) throw Error(ErrorCode::TruncatedProgram, "image shorter than its magic");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error(ErrorCode::BadMagic, "image does not start with UQPB");
    Reader r(bytes.subspan(4));
    Disassembly d;
    auto& p = d.program;
    p.version = r.u16();
    auto target = r.u8();
    if (target > 1) throw Error(ErrorCode::InvalidProgram, "unknown target modality " + std::to_string(target));
    p.target = static_cast<Modality>(target);
    r.u8();
    p.num_qubits = r.u16();
    p.num_results = r.u16();
    p.shots = r.u32();
    auto angle_count = r.u16();
    r.u16();
    std::vector<double> angles;
    angles.reserve(angle_count);
    for (std::size_t i = 0; i < angle_count; ++i) angles.push_back(std::bit_cast<double>(r.u64()));
    p.angles = AngleTable(std::move(angles));
    if (p.angles.size() != angle_count) throw Error(ErrorCode::InvalidProgram, "angle pool contains duplicates");
    auto word_count = r.u32();
    if (std::size_t{word_count} * 4 > r.remaining()) {
        throw Error(ErrorCode::TruncatedProgram, "image declares " + std::to_string(word_count) + " words but holds " +
                                                     std::to_string(r.remaining() / 4));
    }
    p.words.reserve(word_count);
    for (std::size_t i = 0; i < word_count; ++i) p.words.push_back(Word32{r.u32()});
    if (r.remaining() != 0) throw Error(ErrorCode::InvalidProgram, "trailing bytes after the instruction stream");
    check_program(p);

    d.lines.reserve(p.words.size());
    for (std::size_t i = 0; i < p.words.size(); ++i) {
        auto instr = decode(p.words[i]);
        d.lines.push_back(ListingLine{i, to_binary(p.words[i]), mnemonic(instr), annotation(instr)});
    }
    return d;
}

std::string Disassembly::listing() const {
    std::ostringstream os;
    for (const auto& l : lines) os << l.binary << "  " << l.mnemonic << "  ; " << l.annotation << "\n";
    return os.str();
}

}  // namespace uqp::isa
