#include "uqp/error.hpp"

#include <sstream>

namespace uqp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::UnsupportedConstruct: return "UnsupportedConstruct";
        case ErrorCode::MissingAttribute: return "MissingAttribute";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::UnknownGate: return "UnknownGate";
        case ErrorCode::RecordBeforeMeasure: return "RecordBeforeMeasure";
        case ErrorCode::FieldOverflow: return "FieldOverflow";
        case ErrorCode::IllegalOpcode: return "IllegalOpcode";
        case ErrorCode::QubitCountExceeded: return "QubitCountExceeded";
        case ErrorCode::InvalidProgram: return "InvalidProgram";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::TruncatedProgram: return "TruncatedProgram";
        case ErrorCode::UnsupportedGateForTarget: return "UnsupportedGateForTarget";
        case ErrorCode::AnglePoolOverflow: return "AnglePoolOverflow";
        case ErrorCode::MissingWaveform: return "MissingWaveform";
        case ErrorCode::BadProgram: return "BadProgram";
        case ErrorCode::MeasureWithoutPendingResult: return "MeasureWithoutPendingResult";
        case ErrorCode::FetchWithoutMeasurement: return "FetchWithoutMeasurement";
        case ErrorCode::AtomPrepOnSuperconducting: return "AtomPrepOnSuperconducting";
        case ErrorCode::TooManyQubits: return "TooManyQubits";
        case ErrorCode::GeometryMismatch: return "GeometryMismatch";
        case ErrorCode::InsufficientAtoms: return "InsufficientAtoms";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

Error::Error(ErrorCode code, std::string message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      message_(std::move(message)) {}

Error& Error::at_source(std::size_t l, std::size_t c) & {
    line = l;
    column = c;
    return *this;
}

Error&& Error::at_source(std::size_t l, std::size_t c) && {
    line = l;
    column = c;
    return std::move(*this);
}

Error& Error::at_word(std::size_t pc) & {
    offset = pc;
    return *this;
}

Error&& Error::at_word(std::size_t pc) && {
    offset = pc;
    return std::move(*this);
}

std::string Error::describe() const {
    std::ostringstream os;
    os << to_string(code_) << ": ";
    if (line) {
        os << "line " << *line;
        if (column) os << ", col " << *column;
        os << ": ";
    }
    if (shot) os << "shot " << *shot << ", ";
    if (offset) os << "word " << *offset << ": ";
    os << message_;
    return os.str();
}

}  // namespace uqp
