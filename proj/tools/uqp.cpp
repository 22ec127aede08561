// uqp: QIR -> unified binary compiler, control-processor simulator and
// scaling benchmark driver.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <iomanip>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uqp/atoms.hpp"
#include "uqp/bench.hpp"
#include "uqp/error.hpp"
#include "uqp/isa.hpp"
#include "uqp/lowering.hpp"
#include "uqp/pulse.hpp"
#include "uqp/qcp.hpp"
#include "uqp/qir.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUser = 1;
constexpr int kExitInternal = 2;

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw uqp::Error(uqp::ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    auto s = read_text(path);
    return {s.begin(), s.end()};
}

void write_bytes(const std::string& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw uqp::Error(uqp::ErrorCode::IoError, "cannot write '" + path + "'");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_bytes(path, text);
    }
}

struct CompileArgs {
    std::string input;
    std::string output;
    std::string target = "sc";
    std::uint32_t shots = 1000;
};

int cmd_compile(const CompileArgs& a) {
    auto kernel = uqp::qir::compile_frontend(read_text(a.input));
    uqp::JobOptions opts;
    opts.target = *uqp::modality_from_name(a.target);
    opts.shots = a.shots;
    auto [program, report] = uqp::lower(kernel, opts);
    auto image = uqp::isa::assemble(program);
    std::string out = a.output;
    if (out.empty()) {
        out = a.input;
        if (auto dot = out.rfind('.'); dot != std::string::npos) out.resize(dot);
        out += ".uqpb";
    }
    write_bytes(out, std::string_view(reinterpret_cast<const char*>(image.data()), image.size()));
    std::cout << "compiled " << kernel.entry_name << " -> " << out << "\n"
              << "  target      " << uqp::modality_name(opts.target) << "\n"
              << "  qubits      " << kernel.metadata.num_qubits << "\n"
              << "  results     " << kernel.metadata.num_results << "\n"
              << "  shots       " << opts.shots << "\n"
              << "  words       " << report.word_count << "\n"
              << "  angles      " << report.angle_count << "\n"
              << "  image bytes " << image.size() << "\n"
              << "  lower time  " << report.wall_time << " s\n";
    return kExitOk;
}

struct RunArgs {
    std::string input;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string output;
    std::string pulse_csv;
};

int cmd_run(const RunArgs& a) {
    auto bytes = read_bytes(a.input);
    auto dis = uqp::isa::disassemble(bytes);
    auto qcp = uqp::qcp::QcpInstance::load(std::move(dis.program), uqp::PulseLibrary::from_environment());
    auto report = qcp.run(a.seed);
    emit(a.output, a.format == "csv" ? report.histogram_csv() : report.to_json());
    if (!a.pulse_csv.empty()) write_bytes(a.pulse_csv, report.pulse_trace_csv());
    return kExitOk;
}

int cmd_disasm(const std::string& input) {
    auto dis = uqp::isa::disassemble(read_bytes(input));
    const auto& p = dis.program;
    std::cout << "; target=" << uqp::modality_name(p.target) << " qubits=" << p.num_qubits
              << " results=" << p.num_results << " shots=" << p.shots << " words=" << p.words.size() << "\n";
    for (std::size_t i = 0; i < p.angles.size(); ++i) {
        std::cout << "; a" << i << " = " << std::setprecision(17) << p.angles.at(i) << "\n";
    }
    std::cout << dis.listing();
    return kExitOk;
}

struct BenchArgs {
    std::string family = "ghz";
    std::string qubits = "5..100";
    std::uint32_t step = 5;
    std::uint32_t reps = 1000;
    unsigned workers = 1;
    std::string csv;
};

int cmd_bench(const BenchArgs& a) {
    uqp::bench::BenchOptions o;
    o.family = *uqp::bench::family_from_name(a.family);
    auto sep = a.qubits.find("..");
    auto parse = [&](std::string_view s) {
        std::uint32_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) {
            throw uqp::Error(uqp::ErrorCode::ConfigError, "malformed qubit range '" + a.qubits + "'");
        }
        return v;
    };
    if (sep == std::string::npos) throw uqp::Error(uqp::ErrorCode::ConfigError, "qubit range must look like A..B");
    o.first = parse(std::string_view(a.qubits).substr(0, sep));
    o.last = parse(std::string_view(a.qubits).substr(sep + 2));
    o.step = a.step;
    o.reps = a.reps;
    o.workers = a.workers;
    auto records = uqp::bench::run_bench(o);
    emit(a.csv, uqp::bench::to_csv(records, o));
    return kExitOk;
}

struct AtomsArgs {
    std::uint32_t rows = 8;
    std::uint32_t cols = 8;
    double fill = 0.6;
    std::uint64_t seed = 0;
    std::size_t target_count = 0;
    std::string target_file;
    double brightness = 5000;
    double noise = 100;
    std::string pgm;
    std::string plan;
};

int cmd_atoms(const AtomsArgs& a) {
    using namespace uqp::atoms;
    AtomGrid grid(a.rows, a.cols);
    std::mt19937_64 gen(a.seed);
    std::bernoulli_distribution load(a.fill);
    for (std::uint32_t r = 0; r < a.rows; ++r) {
        for (std::uint32_t c = 0; c < a.cols; ++c) grid.set({r, c}, load(gen));
    }
    TargetPattern target;
    if (!a.target_file.empty()) {
        std::uint32_t rows = 0, cols = 0;
        target = TargetPattern::parse(read_text(a.target_file), rows, cols);
        if (rows != a.rows || cols != a.cols) {
            throw uqp::Error(uqp::ErrorCode::GeometryMismatch, "target pattern size differs from the grid");
        }
    } else {
        auto count = a.target_count ? a.target_count : grid.count() / 2;
        target = TargetPattern::dense_rectangle(a.rows, a.cols, count);
    }
    auto image = synth_image(grid, a.brightness, a.noise, a.seed);
    auto detected = detect(image, a.rows, a.cols, cell_signal(a.brightness) / 2);
    auto plan = plan_sort(detected, target);
    auto records = emit_moves(plan);
    if (!a.pgm.empty()) write_bytes(a.pgm, to_pgm(image));
    if (!a.plan.empty()) write_bytes(a.plan, to_json_lines(records));
    std::cout << "atoms " << grid.count() << " detected " << detected.count() << " target " << target.sites.size()
              << " moves " << plan.moves.size() << " cost " << plan.cost() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unified quantum platform toolchain: QIR compiler, control-processor simulator, benchmarks"};
    app.require_subcommand(1);

    CompileArgs compile_args;
    auto* compile = app.add_subcommand("compile", "Compile base-profile QIR into a binary program");
    compile->add_option("input", compile_args.input, "QIR text file (.ll)")->required();
    compile->add_option("-o,--output", compile_args.output, "Output binary (.uqpb)");
    compile->add_option("--target", compile_args.target, "Target modality")
        ->check(CLI::IsMember({"sc", "na", "superconducting", "neutral_atom"}));
    compile->add_option("--shots", compile_args.shots, "Shots recorded in the header")->check(CLI::PositiveNumber);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Execute a binary program on the simulated control processor");
    run->add_option("input", run_args.input, "Binary program (.uqpb)")->required();
    run->add_option("--seed", run_args.seed, "Measurement seed");
    run->add_option("--format", run_args.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    run->add_option("-o,--output", run_args.output, "Report file (default stdout)");
    run->add_option("--pulse-csv", run_args.pulse_csv, "Write the shot-0 pulse trace as CSV");

    std::string disasm_input;
    auto* disasm = app.add_subcommand("disasm", "Print an annotated listing of a binary program");
    disasm->add_option("input", disasm_input, "Binary program (.uqpb)")->required();

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Time lowering over generated circuits and write CSV");
    bench->add_option("--family", bench_args.family, "Circuit family")
        ->check(CLI::IsMember({"ghz", "lin", "qftlike"}));
    bench->add_option("--qubits", bench_args.qubits, "Qubit range A..B within [2,100]");
    bench->add_option("--step", bench_args.step, "Qubit step");
    bench->add_option("--reps", bench_args.reps, "Repetitions per point");
    bench->add_option("--workers", bench_args.workers, "Shard points across this many threads");
    bench->add_option("--csv", bench_args.csv, "CSV output (default stdout)");

    AtomsArgs atoms_args;
    auto* atoms = app.add_subcommand("atoms", "Run the atom preparation pipeline on a random grid");
    atoms->add_option("--rows", atoms_args.rows, "Grid rows");
    atoms->add_option("--cols", atoms_args.cols, "Grid columns");
    atoms->add_option("--fill", atoms_args.fill, "Loading probability");
    atoms->add_option("--seed", atoms_args.seed, "Seed");
    atoms->add_option("--target-count", atoms_args.target_count, "Dense target size (default: half the atoms)");
    atoms->add_option("--target", atoms_args.target_file, "Target pattern file ('#' required, '.' free)");
    atoms->add_option("--brightness", atoms_args.brightness, "Spot peak brightness");
    atoms->add_option("--noise", atoms_args.noise, "Pixel noise standard deviation");
    atoms->add_option("--pgm", atoms_args.pgm, "Write the synthetic image as 16-bit PGM");
    atoms->add_option("--plan", atoms_args.plan, "Write AWG move records as JSON lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUser;
    }

    try {
        if (*compile) return cmd_compile(compile_args);
        if (*run) return cmd_run(run_args);
        if (*disasm) return cmd_disasm(disasm_input);
        if (*bench) return cmd_bench(bench_args);
        if (*atoms) return cmd_atoms(atoms_args);
    } catch (const uqp::Error& e) {
        std::cerr << "error: " << e.describe() << "\n";
        return kExitUser;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
