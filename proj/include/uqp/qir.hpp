#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Front end for the QIR base profile: a single entry function whose body is
// a straight-line sequence of intrinsic calls followed by `ret void`, with
// static qubit/result registers sized by the entry point's attributes.

namespace uqp::qir {

struct Gate1Q {
    std::string gate_name;
    std::uint32_t qubit = 0;
    friend bool operator==(const Gate1Q&, const Gate1Q&) = default;
};

struct Gate1QAngle {
    std::string gate_name;
    std::uint32_t qubit = 0;
    double angle = 0.0;  // radians
    friend bool operator==(const Gate1QAngle&, const Gate1QAngle&) = default;
};

struct Gate2Q {
    std::string gate_name;
    std::uint32_t control = 0;
    std::uint32_t target = 0;
    friend bool operator==(const Gate2Q&, const Gate2Q&) = default;
};

struct Measure {
    std::uint32_t qubit = 0;
    std::uint32_t result = 0;
    friend bool operator==(const Measure&, const Measure&) = default;
};

struct ResultRecord {
    std::uint32_t result = 0;
    friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

using KernelOp = std::variant<Gate1Q, Gate1QAngle, Gate2Q, Measure, ResultRecord>;

struct KernelMetadata {
    std::uint32_t num_qubits = 0;
    std::uint32_t num_results = 0;
    std::map<std::string, std::string> source_attributes;
    friend bool operator==(const KernelMetadata&, const KernelMetadata&) = default;
};

struct QirModule {
    std::string entry_name;
    std::vector<KernelOp> ops;
    KernelMetadata metadata;
    std::set<std::string> declared_intrinsics;
};

/// A module whose indices, gate names and record ordering have been checked.
/// Gate names are canonical (`cx` is rewritten to `cnot`).
struct QuantumKernel {
    std::string entry_name;
    KernelMetadata metadata;
    std::vector<KernelOp> ops;

    std::size_t gate_count() const;
};

/// Parses base-profile QIR text. Throws uqp::Error with line/column set.
QirModule parse_qir(std::string_view text);

QuantumKernel validate(const QirModule& module);

inline QuantumKernel compile_frontend(std::string_view text) { return validate(parse_qir(text)); }

/// Canonical base-profile text for a module (opaque-pointer style).
/// parse_qir(print_qir(m)) reproduces m's ops and register sizes.
std::string print_qir(const QirModule& module);

/// Builds a module from an op list, declaring every intrinsic it calls.
QirModule make_module(std::string entry_name, std::uint32_t num_qubits, std::uint32_t num_results,
                      std::vector<KernelOp> ops);

}  // namespace uqp::qir
