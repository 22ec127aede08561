#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace uqp {

enum class ErrorCode {
    // QIR front end
    SyntaxError,
    UnsupportedConstruct,
    MissingAttribute,
    IndexOutOfRange,
    UnknownGate,
    RecordBeforeMeasure,
    // ISA / binary format
    FieldOverflow,
    IllegalOpcode,
    QubitCountExceeded,
    InvalidProgram,
    BadMagic,
    TruncatedProgram,
    // lowering
    UnsupportedGateForTarget,
    AnglePoolOverflow,
    // control processor
    MissingWaveform,
    BadProgram,
    MeasureWithoutPendingResult,
    FetchWithoutMeasurement,
    AtomPrepOnSuperconducting,
    TooManyQubits,
    // atom pipeline
    GeometryMismatch,
    InsufficientAtoms,
    // configuration / IO
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Structured diagnostic carried by every failure in the toolchain.
///
/// `line`/`column` are 1-based source positions (QIR input), `offset` is a
/// word index into a program (binary decode and execution), `shot` is set by
/// the simulator when an error escapes a particular replay.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string message);

    ErrorCode code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }

    std::optional<std::size_t> line;
    std::optional<std::size_t> column;
    std::optional<std::size_t> offset;
    std::optional<std::size_t> shot;

    Error& at_source(std::size_t l, std::size_t c) &;
    Error&& at_source(std::size_t l, std::size_t c) &&;
    Error& at_word(std::size_t pc) &;
    Error&& at_word(std::size_t pc) &&;

    /// "<code>: [line L, col C: ][shot S, ][word W: ]message"
    std::string describe() const;

  private:
    ErrorCode code_;
    std::string message_;
};

}  // namespace uqp
