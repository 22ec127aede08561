#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "uqp/gates.hpp"

namespace uqp {

/// Replayable uniform draws keyed by (seed, shot, ordinal): SplitMix64 run in
/// counter mode, so any draw can be regenerated without replaying its stream.
struct CounterRng {
    std::uint64_t seed = 0;

    static std::uint64_t mix(std::uint64_t z);
    std::uint64_t bits(std::uint64_t shot, std::uint64_t ordinal) const;
    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform(std::uint64_t shot, std::uint64_t ordinal) const;
};

/// Dense state vector; qubit i is bit i of the basis-state index.
class StateVector {
  public:
    static constexpr std::uint32_t kMaxQubits = 20;

    /// |0...0> on `num_qubits` qubits. Throws Error{TooManyQubits} above 20.
    explicit StateVector(std::uint32_t num_qubits);

    std::uint32_t num_qubits() const { return num_qubits_; }
    std::span<const std::complex<double>> amplitudes() const { return amps_; }
    std::span<std::complex<double>> amplitudes() { return amps_; }

    /// Applies a unitary gate. Targets are (qubit) or (control, target).
    void apply(Gate gate, std::span<const std::uint32_t> targets, double angle = 0.0);

    /// Projective Z measurement; `u` in [0,1) picks the outcome. Collapses.
    int measure(std::uint32_t qubit, double u);
    void reset(std::uint32_t qubit, double u);

    double probability_one(std::uint32_t qubit) const;
    double norm() const;

  private:
    using Mat2 = std::complex<double>[2][2];
    void apply_1q(const Mat2& m, std::uint32_t q);

    std::uint32_t num_qubits_;
    std::vector<std::complex<double>> amps_;
};

/// Free-function form of StateVector::apply.
void apply_gate(StateVector& state, Gate gate, std::span<const std::uint32_t> targets, double angle = 0.0);

}  // namespace uqp
