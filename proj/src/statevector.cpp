#include "uqp/statevector.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "uqp/error.hpp"

namespace uqp {

std::uint64_t CounterRng::mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t shot, std::uint64_t ordinal) const {
    return mix(mix(mix(seed) ^ shot) ^ ordinal);
}

double CounterRng::uniform(std::uint64_t shot, std::uint64_t ordinal) const {
    return static_cast<double>(bits(shot, ordinal) >> 11) * 0x1.0p-53;
}

StateVector::StateVector(std::uint32_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits > kMaxQubits) {
        throw Error(ErrorCode::TooManyQubits, std::to_string(num_qubits) + " qubits exceeds the " +
                                                  std::to_string(kMaxQubits) + "-qubit state-vector limit");
    }
    amps_.assign(std::size_t{1} << num_qubits, {0.0, 0.0});
    amps_[0] = 1.0;
}

void StateVector::apply_1q(const Mat2& m, std::uint32_t q) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t base = 0; base < amps_.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            auto a0 = amps_[i];
            auto a1 = amps_[i + stride];
            amps_[i] = m[0][0] * a0 + m[0][1] * a1;
            amps_[i + stride] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

void StateVector::apply(Gate gate, std::span<const std::uint32_t> targets, double angle) {
    using C = std::complex<double>;
    const auto info = gate_info(gate);
    if (targets.size() != static_cast<std::size_t>(info.arity) || gate == Gate::MZ || gate == Gate::Reset) {
        throw Error(ErrorCode::InvalidProgram, std::string(info.mnemonic) + " is not a unitary of this arity");
    }
    for (auto t : targets) {
        if (t >= num_qubits_) throw Error(ErrorCode::IndexOutOfRange, "qubit " + std::to_string(t) + " out of range");
    }
    if (info.arity == 2) {
        auto c = targets[0];
        auto t = targets[1];
        if (c == t) throw Error(ErrorCode::IndexOutOfRange, "two-qubit gate with identical operands");
        const std::size_t cm = std::size_t{1} << c;
        const std::size_t tm = std::size_t{1} << t;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            switch (gate) {
                case Gate::CNOT:
                    if ((i & cm) && !(i & tm)) std::swap(amps_[i], amps_[i | tm]);
                    break;
                case Gate::CZ:
                    if ((i & cm) && (i & tm)) amps_[i] = -amps_[i];
                    break;
                case Gate::Swap:
                    if ((i & cm) && !(i & tm)) std::swap(amps_[i], amps_[(i & ~cm) | tm]);
                    break;
                default:
                    break;
            }
        }
        return;
    }

    const double r = 1.0 / std::numbers::sqrt2;
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    const C i1{0.0, 1.0};
    Mat2 m;
    auto set = [&](C a, C b, C d, C e) {
        m[0][0] = a;
        m[0][1] = b;
        m[1][0] = d;
        m[1][1] = e;
    };
    switch (gate) {
        case Gate::H: set(r, r, r, -r); break;
        case Gate::X: set(0, 1, 1, 0); break;
        case Gate::Y: set(0, -i1, i1, 0); break;
        case Gate::Z: set(1, 0, 0, -1); break;
        case Gate::S: set(1, 0, 0, i1); break;
        case Gate::T: set(1, 0, 0, std::polar(1.0, std::numbers::pi / 4)); break;
        case Gate::SX: set(C{0.5, 0.5}, C{0.5, -0.5}, C{0.5, -0.5}, C{0.5, 0.5}); break;
        case Gate::RX: set(c, -i1 * s, -i1 * s, c); break;
        case Gate::RY: set(c, -s, s, c); break;
        case Gate::RZ: set(std::polar(1.0, -angle / 2), 0, 0, std::polar(1.0, angle / 2)); break;
        default: throw Error(ErrorCode::InvalidProgram, "no unitary for gate " + std::string(info.mnemonic));
    }
    apply_1q(m, targets[0]);
}

double StateVector::probability_one(std::uint32_t qubit) const {
    const std::size_t mask = std::size_t{1} << qubit;
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & mask) p += std::norm(amps_[i]);
    }
    return p;
}

int StateVector::measure(std::uint32_t qubit, double u) {
    if (qubit >= num_qubits_) throw Error(ErrorCode::IndexOutOfRange, "qubit " + std::to_string(qubit) + " out of range");
    const double p1 = probability_one(qubit);
    const int outcome = u < p1 ? 1 : 0;
    const double keep = outcome ? p1 : 1.0 - p1;
    const double scale = keep > 0.0 ? 1.0 / std::sqrt(keep) : 0.0;
    const std::size_t mask = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const bool one = (i & mask) != 0;
        amps_[i] = one == (outcome == 1) ? amps_[i] * scale : 0.0;
    }
    return outcome;
}

void StateVector::reset(std::uint32_t qubit, double u) {
    if (measure(qubit, u) == 1) {
        const std::uint32_t t[] = {qubit};
        apply(Gate::X, t);
    }
}

double StateVector::norm() const {
    double n = 0.0;
    for (const auto& a : amps_) n += std::norm(a);
    return n;
}

void apply_gate(StateVector& state, Gate gate, std::span<const std::uint32_t> targets, double angle) {
    state.apply(gate, targets, angle);
}

}  // namespace uqp
