#include "uqp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>

#include "uqp/alloc_counter.hpp"
#include "uqp/error.hpp"
#include "uqp/lowering.hpp"

namespace uqp::bench {

std::optional<Family> family_from_name(std::string_view name) {
    if (name == "ghz") return Family::Ghz;
    if (name == "lin" || name == "linear") return Family::Linear;
    if (name == "qftlike") return Family::QftLike;
    return std::nullopt;
}

std::string_view family_name(Family family) {
    switch (family) {
        case Family::Ghz: return "ghz";
        case Family::Linear: return "lin";
        case Family::QftLike: return "qftlike";
    }
    return "?";
}

qir::QirModule make_circuit(Family family, std::uint32_t n) {
    using namespace qir;
    std::vector<KernelOp> ops;
    switch (family) {
        case Family::Ghz:
            ops.push_back(Gate1Q{"h", 0});
            for (std::uint32_t i = 0; i + 1 < n; ++i) ops.push_back(Gate2Q{"cnot", i, i + 1});
            break;
        case Family::Linear:
            for (std::uint32_t i = 0; i < n; ++i) ops.push_back(Gate1QAngle{"ry", i, 0.1 * (i + 1)});
            for (std::uint32_t i = 0; i + 1 < n; ++i) ops.push_back(Gate2Q{"cnot", i, i + 1});
            for (std::uint32_t i = 0; i < n; ++i) ops.push_back(Gate1QAngle{"ry", i, -0.1 * (i + 1)});
            break;
        case Family::QftLike:
            for (std::uint32_t t = 0; t < n; ++t) {
                ops.push_back(Gate1Q{"h", t});
                for (std::uint32_t c = t + 1; c < n; ++c) {
                    // controlled phase pi / 2^(c - t)
                    const double phi = std::numbers::pi / std::ldexp(1.0, static_cast<int>(c - t));
                    ops.push_back(Gate1QAngle{"rz", c, phi / 2});
                    ops.push_back(Gate2Q{"cnot", c, t});
                    ops.push_back(Gate1QAngle{"rz", t, -phi / 2});
                    ops.push_back(Gate2Q{"cnot", c, t});
                    ops.push_back(Gate1QAngle{"rz", t, phi / 2});
                }
            }
            break;
    }
    for (std::uint32_t i = 0; i < n; ++i) ops.push_back(Measure{i, i});
    for (std::uint32_t i = 0; i < n; ++i) ops.push_back(ResultRecord{i});
    return make_module(std::string(family_name(family)) + "_" + std::to_string(n), n, n, std::move(ops));
}

BenchRecord measure_point(Family family, std::uint32_t n, std::uint32_t reps) {
    const auto kernel = qir::validate(make_circuit(family, n));
    const JobOptions opts{};
    BenchRecord rec;
    rec.circuit_family = family_name(family);
    rec.num_qubits = n;
    rec.gate_count = kernel.gate_count();
    {
        alloc::PeakScope scope;
        auto out = lower(kernel, opts);
        rec.word_count = out.report.word_count;
        rec.peak_bytes = scope.peak();
    }
    const auto start = std::chrono::steady_clock::now();
    for (std::uint32_t r = 0; r < reps; ++r) {
        auto out = lower(kernel, opts);
        if (out.report.word_count != rec.word_count) throw Error(ErrorCode::InvalidProgram, "non-deterministic lowering");
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.compile_time = elapsed / std::max<std::uint32_t>(reps, 1);
    return rec;
}

std::vector<BenchRecord> run_bench(const BenchOptions& o) {
    if (o.step == 0) throw Error(ErrorCode::ConfigError, "step must be positive");
    if (o.first < 2 || o.last > 100 || o.first > o.last) {
        throw Error(ErrorCode::ConfigError, "qubit range " + std::to_string(o.first) + ".." + std::to_string(o.last) +
                                                " outside [2, 100]");
    }
    if (o.reps == 0) throw Error(ErrorCode::ConfigError, "repetitions must be positive");
    std::vector<std::uint32_t> points;
    for (std::uint32_t n = o.first; n <= o.last; n += o.step) points.push_back(n);

    std::vector<BenchRecord> records(points.size());
    if (o.workers <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i) records[i] = measure_point(o.family, points[i], o.reps);
        return records;
    }
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < o.workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < points.size(); i += o.workers) {
                records[i] = measure_point(o.family, points[i], o.reps);
            }
        }));
    }
    for (auto& j : jobs) j.get();
    return records;
}

std::string to_csv(std::span<const BenchRecord> records, const BenchOptions& o) {
    std::ostringstream os;
    os << "# family=" << family_name(o.family) << " qubits=" << o.first << ".." << o.last << " step=" << o.step
       << " reps=" << o.reps << "\n";
    if (o.reps == 1) os << "# noisy: single-run timings\n";
    os << "circuit_family,num_qubits,gate_count,word_count,compile_time,peak_bytes\n";
    os.precision(9);
    for (const auto& r : records) {
        os << r.circuit_family << ',' << r.num_qubits << ',' << r.gate_count << ',' << r.word_count << ','
           << std::scientific << r.compile_time << std::defaultfloat << ',' << r.peak_bytes << "\n";
    }
    return os.str();
}

LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return {};
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double dn = static_cast<double>(n);
    const double cov = sxy - sx * sy / dn;
    const double varx = sxx - sx * sx / dn;
    const double vary = syy - sy * sy / dn;
    LinearFit fit;
    fit.slope = varx > 0 ? cov / varx : 0.0;
    fit.intercept = (sy - fit.slope * sx) / dn;
    fit.r_squared = varx > 0 && vary > 0 ? cov * cov / (varx * vary) : 0.0;
    return fit;
}

}  // namespace uqp::bench
