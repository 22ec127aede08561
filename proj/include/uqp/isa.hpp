#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "uqp/gates.hpp"

// The unified 32-bit hybrid instruction set and its offload image.
//
// Word layout (class in bits [31:28]):
//   0100  EnvInit      [27:0] register size
//   0101  MemLoad      [27:24] mode, [23:16] result selector, [15:0] qubit field
//   1000  QuantumOp    [27:22] gate code, [21:6] operand, [5:0] timing (cycles)
//   0010  Classical    [27:24] sub-op (1010 fetch last measurement),
//                      [23:16] register segment, [15:0] one-hot register select
//   0110  AtomPrep     [27:24] 0001 image fetch, 0010 detect, 0011 sort, 0100 move
//   0000  Halt         all other bits zero
// docs/isa.md has the full reference.

namespace uqp::isa {

struct Word32 {
    std::uint32_t value = 0;
    friend bool operator==(Word32, Word32) = default;
};

enum class Modality : std::uint8_t { Superconducting = 0, NeutralAtom = 1 };

inline constexpr std::uint32_t kMaxQubits = 100;
inline constexpr std::size_t kMaxAngles = 4096;  // 12-bit pool index
inline constexpr std::uint8_t kDefaultTiming = 4;

namespace cls {
inline constexpr std::uint32_t Halt = 0b0000;
inline constexpr std::uint32_t Classical = 0b0010;
inline constexpr std::uint32_t EnvInit = 0b0100;
inline constexpr std::uint32_t MemLoad = 0b0101;
inline constexpr std::uint32_t AtomPrep = 0b0110;
inline constexpr std::uint32_t QuantumOp = 0b1000;
}  // namespace cls

struct EnvInit {
    std::uint32_t size = 0;  // 28 bits
    friend bool operator==(const EnvInit&, const EnvInit&) = default;
};

/// Loads the qubit address register (and optionally a pending result
/// selector) ahead of a quantum operation.
///
/// Mode 0000..0111 selects a 16-qubit segment and `qubit_field` is one-hot
/// within it. Mode 1001 loads the control/target pair register with the
/// control index in bits [15:8] and the target index in bits [7:0].
/// The result selector byte is zero when no result is pending, otherwise it
/// holds (result + 1) rotated left by four bits.
struct MemLoad {
    std::uint8_t mode = 0;
    std::uint8_t result_sel = 0;
    std::uint16_t qubit_field = 0;

    static constexpr std::uint8_t kPairMode = 0b1001;
    static constexpr std::uint8_t kSegments = 8;

    static MemLoad single(std::uint32_t qubit, std::optional<std::uint32_t> result = std::nullopt);
    static MemLoad pair(std::uint32_t control, std::uint32_t target);

    bool is_pair() const { return mode == kPairMode; }
    /// Addressed qubit for a single-target load; nullopt when the mask is empty.
    std::optional<std::uint32_t> qubit() const;
    std::uint32_t control() const { return qubit_field >> 8; }
    std::uint32_t target() const { return qubit_field & 0xFFu; }
    std::optional<std::uint32_t> result() const;

    friend bool operator==(const MemLoad&, const MemLoad&) = default;
};

/// Gate dispatch word. Targets come from the most recent MemLoad. The
/// operand field carries an angle-pool index for rotations, the pair-register
/// flag (bit 15) for two-qubit gates, and (qubit + 1) rotated left by eleven
/// bits for measurements.
struct QuantumOp {
    Gate gate = Gate::H;
    std::uint16_t operand = 0;
    std::uint8_t timing = kDefaultTiming;  // 6 bits

    static constexpr std::uint16_t kPairFlag = 0x8000;

    static QuantumOp single(Gate gate, std::uint8_t timing = kDefaultTiming);
    static QuantumOp rotation(Gate gate, std::uint16_t angle_index, std::uint8_t timing = kDefaultTiming);
    static QuantumOp two_qubit(Gate gate, std::uint8_t timing = kDefaultTiming);
    static QuantumOp measure(std::uint32_t qubit, std::uint8_t timing = kDefaultTiming);

    std::optional<std::uint16_t> angle_index() const;
    std::optional<std::uint32_t> measured_qubit() const;

    friend bool operator==(const QuantumOp&, const QuantumOp&) = default;
};

/// Copies the last-measurement latch into one classical result register.
struct FetchResult {
    std::uint8_t segment = 0;
    std::uint16_t reg_sel = 1;  // one-hot within the segment

    static FetchResult for_result(std::uint32_t result);
    std::uint32_t result() const;

    friend bool operator==(const FetchResult&, const FetchResult&) = default;
};

enum class AtomPrepKind : std::uint8_t { ImageFetch = 1, AtomDetect = 2, AtomSort = 3, AtomMove = 4 };

struct AtomPrep {
    AtomPrepKind kind = AtomPrepKind::ImageFetch;
    friend bool operator==(const AtomPrep&, const AtomPrep&) = default;
};

struct Halt {
    friend bool operator==(const Halt&, const Halt&) = default;
};

using Instruction = std::variant<EnvInit, MemLoad, QuantumOp, FetchResult, AtomPrep, Halt>;

/// Throws Error{FieldOverflow} when a field exceeds its width or holds an
/// undefined selector.
Word32 encode(const Instruction& instr);

/// Throws Error{IllegalOpcode} for undefined class or sub-op patterns.
Instruction decode(Word32 word);

std::string to_binary(Word32 word);
std::string mnemonic(const Instruction& instr);
std::string annotation(const Instruction& instr);

/// Per-program rotation-angle constant pool; entries are unique by bit pattern.
class AngleTable {
  public:
    AngleTable() = default;
    explicit AngleTable(std::vector<double> values);

    /// Index of `angle`, appending it if new. Throws Error{AnglePoolOverflow}.
    std::uint16_t intern(double angle);

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    double at(std::size_t i) const { return values_.at(i); }
    const std::vector<double>& values() const { return values_; }

    friend bool operator==(const AngleTable& a, const AngleTable& b);

  private:
    std::vector<double> values_;
    std::unordered_map<std::uint64_t, std::uint16_t> index_;
};

struct BinaryProgram {
    static constexpr std::uint16_t kVersion = 1;

    std::uint16_t version = kVersion;
    Modality target = Modality::Superconducting;
    std::uint16_t num_qubits = 0;
    std::uint16_t num_results = 0;
    std::uint32_t shots = 1;
    AngleTable angles;
    std::vector<Word32> words;

    friend bool operator==(const BinaryProgram&, const BinaryProgram&) = default;
};

inline constexpr std::size_t kHeaderBytes = 20;  // through angle_count + pad

/// Size in bytes of the serialized image.
std::size_t image_size(const BinaryProgram& program);

/// Checks the program invariants (qubit cap, leading EnvInit, decodable
/// words, angle indices in range). Throws uqp::Error.
void check_program(const BinaryProgram& program);

/// Little-endian shared-segment image of `program`.
std::vector<std::uint8_t> assemble(const BinaryProgram& program);

struct ListingLine {
    std::size_t offset = 0;
    std::string binary;
    std::string mnemonic;
    std::string annotation;
};

struct Disassembly {
    BinaryProgram program;
    std::vector<ListingLine> lines;

    /// One `<binary>  <mnemonic>  ; <annotation>` row per word.
    std::string listing() const;
};

Disassembly disassemble(std::span<const std::uint8_t> bytes);

}  // namespace uqp::isa
