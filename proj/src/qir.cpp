#include "uqp/qir.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "uqp/error.hpp"
#include "uqp/gates.hpp"

namespace uqp::qir {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Error op_error(ErrorCode code, std::size_t index, const std::string& what) {
    return Error(code, "op " + std::to_string(index) + ": " + what);
}

std::string canonical_gate(std::size_t index, const std::string& name, int arity, bool rotation) {
    auto info = gate_by_name(name);
    if (!info || info->gate == Gate::MZ) throw op_error(ErrorCode::UnknownGate, index, "unsupported gate '" + name + "'");
    if (info->arity != arity || info->rotation != rotation) {
        throw op_error(ErrorCode::UnknownGate, index,
                       "gate '" + name + "' used with the wrong operand signature");
    }
    return std::string(info->name);
}

std::string intrinsic_name(const KernelOp& op) {
    return std::visit(overloaded{
                          [](const Gate1Q& g) { return "__quantum__qis__" + g.gate_name + "__body"; },
                          [](const Gate1QAngle& g) { return "__quantum__qis__" + g.gate_name + "__body"; },
                          [](const Gate2Q& g) { return "__quantum__qis__" + g.gate_name + "__body"; },
                          [](const Measure&) { return std::string("__quantum__qis__mz__body"); },
                          [](const ResultRecord&) { return std::string("__quantum__rt__result_record_output"); },
                      },
                      op);
}

std::string signature(const KernelOp& op) {
    return std::visit(overloaded{
                          [](const Gate1Q&) { return std::string("(ptr)"); },
                          [](const Gate1QAngle&) { return std::string("(double, ptr)"); },
                          [](const Gate2Q&) { return std::string("(ptr, ptr)"); },
                          [](const Measure&) { return std::string("(ptr, ptr writeonly)"); },
                          [](const ResultRecord&) { return std::string("(ptr, ptr)"); },
                      },
                      op);
}

std::string address(std::uint32_t index) {
    if (index == 0) return "ptr null";
    return "ptr inttoptr (i64 " + std::to_string(index) + " to ptr)";
}

std::string angle_literal(double angle) {
    if (!std::isfinite(angle)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "0x%016llX",
                      static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(angle)));
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", angle);
    std::string s = buf;
    // LLVM requires a decimal point or exponent on floating-point literals
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

}  // namespace

std::size_t QuantumKernel::gate_count() const {
    std::size_t n = 0;
    for (const auto& op : ops) {
        if (!std::holds_alternative<ResultRecord>(op)) ++n;
    }
    return n;
}

QuantumKernel validate(const QirModule& module) {
    const auto& meta = module.metadata;
    QuantumKernel kernel{module.entry_name, meta, {}};
    kernel.ops.reserve(module.ops.size());
    std::vector<bool> measured(meta.num_results, false);

    auto check_qubit = [&](std::size_t i, std::uint32_t q) {
        if (q >= meta.num_qubits) {
            throw op_error(ErrorCode::IndexOutOfRange, i,
                           "qubit " + std::to_string(q) + " outside register of " + std::to_string(meta.num_qubits));
        }
    };
    auto check_result = [&](std::size_t i, std::uint32_t r) {
        if (r >= meta.num_results) {
            throw op_error(ErrorCode::IndexOutOfRange, i,
                           "result " + std::to_string(r) + " outside register of " +
                               std::to_string(meta.num_results));
        }
    };

    for (std::size_t i = 0; i < module.ops.size(); ++i) {
        std::visit(overloaded{
                       [&](const Gate1Q& g) {
                           auto name = canonical_gate(i, g.gate_name, 1, false);
                           check_qubit(i, g.qubit);
                           kernel.ops.push_back(Gate1Q{std::move(name), g.qubit});
                       },
                       [&](const Gate1QAngle& g) {
                           auto name = canonical_gate(i, g.gate_name, 1, true);
                           check_qubit(i, g.qubit);
                           kernel.ops.push_back(Gate1QAngle{std::move(name), g.qubit, g.angle});
                       },
                       [&](const Gate2Q& g) {
                           auto name = canonical_gate(i, g.gate_name, 2, false);
                           check_qubit(i, g.control);
                           check_qubit(i, g.target);
                           if (g.control == g.target) {
                               throw op_error(ErrorCode::IndexOutOfRange, i,
                                              "two-qubit gate '" + g.gate_name + "' with identical operands");
                           }
                           kernel.ops.push_back(Gate2Q{std::move(name), g.control, g.target});
                       },
                       [&](const Measure& m) {
                           check_qubit(i, m.qubit);
                           check_result(i, m.result);
                           measured[m.result] = true;
                           kernel.ops.push_back(m);
                       },
                       [&](const ResultRecord& r) {
                           check_result(i, r.result);
                           if (!measured[r.result]) {
                               throw op_error(ErrorCode::RecordBeforeMeasure, i,
                                              "result " + std::to_string(r.result) + " recorded before measurement");
                           }
                           kernel.ops.push_back(r);
                       },
                   },
                   module.ops[i]);
    }
    return kernel;
}

QirModule make_module(std::string entry_name, std::uint32_t num_qubits, std::uint32_t num_results,
                      std::vector<KernelOp> ops) {
    QirModule m;
    m.entry_name = std::move(entry_name);
    m.metadata.num_qubits = num_qubits;
    m.metadata.num_results = num_results;
    m.metadata.source_attributes = {
        {"entry_point", ""},
        {"qir_profiles", "base_profile"},
        {"output_labeling_schema", ""},
        {"required_num_qubits", std::to_string(num_qubits)},
        {"required_num_results", std::to_string(num_results)},
    };
    for (const auto& op : ops) m.declared_intrinsics.insert(intrinsic_name(op));
    m.ops = std::move(ops);
    return m;
}

std::string print_qir(const QirModule& module) {
    std::ostringstream os;
    os << "; ModuleID = '" << module.entry_name << "'\n";
    os << "source_filename = \"" << module.entry_name << "\"\n\n";
    os << "define void @" << module.entry_name << "() #0 {\n";
    os << "entry:\n";
    std::map<std::string, std::string> declarations;
    for (const auto& name : module.declared_intrinsics) declarations[name] = "(ptr)";
    for (const auto& op : module.ops) {
        auto name = intrinsic_name(op);
        declarations[name] = signature(op);
        os << "  call void @" << name << "(";
        std::visit(overloaded{
                       [&](const Gate1Q& g) { os << address(g.qubit); },
                       [&](const Gate1QAngle& g) { os << "double " << angle_literal(g.angle) << ", " << address(g.qubit); },
                       [&](const Gate2Q& g) { os << address(g.control) << ", " << address(g.target); },
                       [&](const Measure& m) { os << address(m.qubit) << ", " << address(m.result); },
                       [&](const ResultRecord& r) { os << address(r.result) << ", ptr null"; },
                   },
                   op);
        os << ")\n";
    }
    os << "  ret void\n}\n\n";
    for (const auto& [name, sig] : declarations) os << "declare void @" << name << sig << "\n";
    os << "\nattributes #0 = {";
    auto attrs = module.metadata.source_attributes;
    attrs["required_num_qubits"] = std::to_string(module.metadata.num_qubits);
    attrs["required_num_results"] = std::to_string(module.metadata.num_results);
    attrs.erase("num_required_qubits");
    attrs.erase("num_required_results");
    for (const auto& [k, v] : attrs) {
        os << " \"" << k << "\"";
        if (!v.empty()) os << "=\"" << v << "\"";
    }
    os << " }\n";
    return os.str();
}

}  // namespace uqp::qir
