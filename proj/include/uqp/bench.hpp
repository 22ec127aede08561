#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uqp/qir.hpp"

namespace uqp::bench {

enum class Family { Ghz, Linear, QftLike };

std::optional<Family> family_from_name(std::string_view name);
std::string_view family_name(Family family);

/// Built-in circuit generators. `qftlike` uses O(n^2) controlled-phase
/// blocks (rz/cnot decomposition) to follow the growth of amplitude
/// estimation circuits; `lin` is an ry/cnot-chain/ry entangler.
qir::QirModule make_circuit(Family family, std::uint32_t num_qubits);

struct BenchRecord {
    std::string circuit_family;
    std::uint32_t num_qubits = 0;
    std::size_t gate_count = 0;
    std::size_t word_count = 0;
    double compile_time = 0.0;  // seconds, mean over repetitions
    std::size_t peak_bytes = 0;
};

struct BenchOptions {
    Family family = Family::Ghz;
    std::uint32_t first = 5;
    std::uint32_t last = 100;
    std::uint32_t step = 5;
    std::uint32_t reps = 1000;
    unsigned workers = 1;  // >1 shards qubit counts across threads
};

/// Throws uqp::Error{ConfigError} for ranges outside [2, 100] or step 0.
std::vector<BenchRecord> run_bench(const BenchOptions& options);
BenchRecord measure_point(Family family, std::uint32_t num_qubits, std::uint32_t reps);

std::string to_csv(std::span<const BenchRecord> records, const BenchOptions& options);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least-squares fit of log(y) against log(x).
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

}  // namespace uqp::bench
