#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "uqp/error.hpp"
#include "uqp/qir.hpp"

namespace uqp::qir {

namespace {

constexpr std::string_view kQisPrefix = "__quantum__qis__";
constexpr std::string_view kRtPrefix = "__quantum__rt__";
constexpr std::string_view kRecordResult = "__quantum__rt__result_record_output";

// Runtime calls that are legal in a base-profile body but produce no kernel op.
constexpr std::string_view kIgnoredRuntime[] = {
    "__quantum__rt__initialize",
    "__quantum__rt__array_record_output",
    "__quantum__rt__tuple_record_output",
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool starts_with_word(std::string_view s, std::string_view word) {
    if (!s.starts_with(word)) return false;
    return s.size() == word.size() || is_space(s[word.size()]) || s[word.size()] == '(';
}

// A source line with its comment removed; `base` maps offsets back to columns.
struct Line {
    std::size_t number = 0;
    std::string_view raw;
    std::string_view text;  // trimmed, comment-free view into raw

    std::size_t column_of(std::string_view piece) const {
        return static_cast<std::size_t>(piece.data() - raw.data()) + 1;
    }
};

std::string_view strip_comment(std::string_view s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_string = !in_string;
        if (s[i] == ';' && !in_string) return s.substr(0, i);
    }
    return s;
}

Error syntax(const Line& line, std::string_view at, std::string message) {
    return Error(ErrorCode::SyntaxError, std::move(message)).at_source(line.number, line.column_of(at));
}

Error unsupported(const Line& line, std::string_view at, std::string message) {
    return Error(ErrorCode::UnsupportedConstruct, std::move(message))
        .at_source(line.number, line.column_of(at));
}

// Splits a comma-separated argument list at nesting depth zero.
std::vector<std::string_view> split_args(std::string_view s) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '[' || c == '{' || c == '<') ++depth;
        if (c == ')' || c == ']' || c == '}' || c == '>') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    auto last = trim(s.substr(start));
    if (!last.empty() || !out.empty()) out.push_back(last);
    return out;
}

// Returns the index of the ')' matching the '(' at `open`, or npos.
std::size_t matching_paren(std::string_view s, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')' && --depth == 0) return i;
    }
    return std::string_view::npos;
}

std::string_view read_global_name(const Line& line, std::string_view s) {
    if (s.empty() || s.front() != '@') throw syntax(line, s, "expected a global name");
    std::size_t n = 1;
    if (n < s.size() && s[n] == '"') {
        auto close = s.find('"', n + 1);
        if (close == std::string_view::npos) throw syntax(line, s, "unterminated quoted name");
        return s.substr(2, close - 2);
    }
    while (n < s.size() && (std::isalnum(static_cast<unsigned char>(s[n])) || s[n] == '_' || s[n] == '.' ||
                            s[n] == '$' || s[n] == '-')) {
        ++n;
    }
    if (n == 1) throw syntax(line, s, "empty global name");
    return s.substr(1, n - 1);
}

enum class ArgType { Qubit, Result, Pointer, Double, Other };

struct Arg {
    ArgType type = ArgType::Other;
    std::string_view value;  // text after the type
    std::string_view whole;
};

Arg classify_arg(std::string_view a) {
    Arg arg;
    arg.whole = a;
    auto take = [&](std::string_view prefix, ArgType t) {
        if (!a.starts_with(prefix)) return false;
        arg.type = t;
        arg.value = trim(a.substr(prefix.size()));
        return true;
    };
    if (!(take("%Qubit*", ArgType::Qubit) || take("%Result*", ArgType::Result) || take("i8*", ArgType::Pointer) ||
          take("ptr", ArgType::Pointer) || take("double", ArgType::Double))) {
        arg.value = a;
        return arg;
    }
    // parameter attributes may sit between the type and the value
    for (std::string_view attr : {"writeonly", "readonly", "nocapture", "noundef", "nonnull"}) {
        if (starts_with_word(arg.value, attr)) arg.value = trim(arg.value.substr(attr.size()));
    }
    return arg;
}

bool is_pointer(ArgType t) { return t == ArgType::Qubit || t == ArgType::Result || t == ArgType::Pointer; }

std::uint32_t parse_static_address(const Line& line, const Arg& arg) {
    auto v = arg.value;
    if (v == "null") return 0;
    if (v.starts_with("inttoptr")) {
        auto open = v.find('(');
        auto close = open == std::string_view::npos ? open : matching_paren(v, open);
        if (close == std::string_view::npos) throw syntax(line, v, "malformed inttoptr expression");
        auto inner = trim(v.substr(open + 1, close - open - 1));
        // i64 N to <type>
        auto sp = inner.find(' ');
        if (sp == std::string_view::npos || !inner.substr(0, sp).starts_with('i')) {
            throw syntax(line, inner, "expected integer operand in inttoptr");
        }
        auto rest = trim(inner.substr(sp + 1));
        auto to = rest.find(" to ");
        if (to == std::string_view::npos) throw syntax(line, rest, "expected 'to' in inttoptr");
        auto digits = trim(rest.substr(0, to));
        std::uint64_t value = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (ec != std::errc{} || p != digits.data() + digits.size()) {
            throw syntax(line, digits, "invalid integer literal '" + std::string(digits) + "'");
        }
        if (value > 0xFFFFFFFFull) throw unsupported(line, digits, "static address out of range");
        return static_cast<std::uint32_t>(value);
    }
    throw unsupported(line, arg.whole,
                      "operand '" + std::string(arg.whole) +
                          "' is not a static register address (dynamic allocation is not base profile)");
}

double parse_double(const Line& line, std::string_view v) {
    if (v.starts_with("0x") || v.starts_with("0X")) {
        auto hex = v.substr(2);
        std::uint64_t bits = 0;
        auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), bits, 16);
        if (ec != std::errc{} || p != hex.data() + hex.size() || hex.size() != 16) {
            throw syntax(line, v, "invalid hexadecimal double literal");
        }
        return std::bit_cast<double>(bits);
    }
    std::string tmp(v);
    char* end = nullptr;
    double d = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
        throw syntax(line, v, "invalid floating-point literal '" + tmp + "'");
    }
    return d;
}

std::uint32_t parse_count(const Line& line, std::string_view key, const std::string& value) {
    std::uint32_t n = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc{} || p != value.data() + value.size()) {
        throw syntax(line, line.text, "attribute " + std::string(key) + " is not a count: '" + value + "'");
    }
    return n;
}

struct PendingCall {
    Line line;
    std::string_view name_at;
    std::string name;
};

class Parser {
  public:
    explicit Parser(std::string_view text) : text_(text) {}

    QirModule run() {
        split_lines();
        for (std::size_t i = 0; i < lines_.size(); ++i) {
            const Line& line = lines_[i];
            if (line.text.empty()) continue;
            if (in_function_) {
                body_line(line);
            } else {
                top_level_line(line);
            }
        }
        if (in_function_) throw syntax(lines_.back(), lines_.back().text, "unterminated function body");
        if (!have_entry_) {
            throw Error(ErrorCode::SyntaxError, "no entry-point function definition").at_source(1, 1);
        }
        for (const auto& call : calls_) {
            if (!module_.declared_intrinsics.contains(call.name)) {
                throw syntax(call.line, call.name_at, "call to undeclared function @" + call.name);
            }
        }
        resolve_attributes();
        return std::move(module_);
    }

  private:
    void split_lines() {
        std::size_t number = 1;
        std::size_t start = 0;
        while (start <= text_.size()) {
            auto end = text_.find('\n', start);
            if (end == std::string_view::npos) end = text_.size();
            auto raw = text_.substr(start, end - start);
            if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
            lines_.push_back(Line{number, raw, trim(strip_comment(raw))});
            ++number;
            if (end == text_.size()) break;
            start = end + 1;
        }
    }

    void top_level_line(const Line& line) {
        auto t = line.text;
        if (t.starts_with("source_filename") || starts_with_word(t, "target") || t.starts_with('!')) return;
        if (t.starts_with('%')) {
            if (t.find("= type") == std::string_view::npos) throw syntax(line, t, "unexpected top-level statement");
            return;
        }
        if (t.starts_with('@')) {
            if (t.find('=') == std::string_view::npos) throw syntax(line, t, "malformed global definition");
            return;
        }
        if (starts_with_word(t, "declare")) {
            auto at = t.find('@');
            if (at == std::string_view::npos) throw syntax(line, t, "declaration without a function name");
            module_.declared_intrinsics.insert(std::string(read_global_name(line, t.substr(at))));
            return;
        }
        if (starts_with_word(t, "define")) {
            define_line(line);
            return;
        }
        if (starts_with_word(t, "attributes")) {
            attribute_line(line);
            return;
        }
        throw syntax(line, t, "unexpected top-level statement");
    }

    void define_line(const Line& line) {
        auto t = line.text;
        if (have_entry_) throw unsupported(line, t, "more than one function definition");
        auto at = t.find('@');
        if (at == std::string_view::npos) throw syntax(line, t, "definition without a function name");
        auto ret_type = trim(t.substr(6, at - 6));
        if (!ret_type.ends_with("void")) throw unsupported(line, ret_type, "entry point must return void");
        auto rest = t.substr(at);
        module_.entry_name = std::string(read_global_name(line, rest));
        auto open = rest.find('(');
        if (open == std::string_view::npos) throw syntax(line, rest, "expected parameter list");
        auto close = matching_paren(rest, open);
        if (close == std::string_view::npos) throw syntax(line, rest.substr(open), "unbalanced parameter list");
        if (!trim(rest.substr(open + 1, close - open - 1)).empty()) {
            throw unsupported(line, rest.substr(open), "entry point must take no parameters");
        }
        auto tail = trim(rest.substr(close + 1));
        if (tail.empty() || tail.back() != '{') throw syntax(line, tail.empty() ? rest : tail, "expected '{'");
        tail = trim(tail.substr(0, tail.size() - 1));
        for (std::size_t i = 0; i < tail.size(); ++i) {
            if (tail[i] != '#') continue;
            std::size_t j = i + 1;
            while (j < tail.size() && std::isdigit(static_cast<unsigned char>(tail[j]))) ++j;
            entry_groups_.push_back(std::string(tail.substr(i + 1, j - i - 1)));
        }
        define_line_ = line;
        have_entry_ = true;
        in_function_ = true;
    }

    void attribute_line(const Line& line) {
        auto t = line.text;
        auto hash = t.find('#');
        auto eq = t.find('=');
        auto lbrace = t.find('{');
        auto rbrace = t.rfind('}');
        if (hash == std::string_view::npos || eq == std::string_view::npos || lbrace == std::string_view::npos ||
            rbrace == std::string_view::npos || rbrace < lbrace) {
            throw syntax(line, t, "malformed attribute group");
        }
        std::string id(trim(t.substr(hash + 1, eq - hash - 1)));
        auto& group = groups_[id];
        auto body = t.substr(lbrace + 1, rbrace - lbrace - 1);
        std::size_t i = 0;
        auto quoted = [&](std::size_t& pos) {
            auto close = body.find('"', pos + 1);
            if (close == std::string_view::npos) throw syntax(line, body.substr(pos), "unterminated string");
            std::string s(body.substr(pos + 1, close - pos - 1));
            pos = close + 1;
            return s;
        };
        while (i < body.size()) {
            if (is_space(body[i])) {
                ++i;
                continue;
            }
            if (body[i] == '"') {
                std::string key = quoted(i);
                std::string value;
                if (i < body.size() && body[i] == '=') {
                    ++i;
                    if (i >= body.size() || body[i] != '"') throw syntax(line, body.substr(i), "expected quoted value");
                    value = quoted(i);
                }
                group[key] = value;
                continue;
            }
            std::size_t j = i;
            while (j < body.size() && !is_space(body[j])) ++j;
            group[std::string(body.substr(i, j - i))] = "";
            i = j;
        }
    }

    void body_line(const Line& line) {
        auto t = line.text;
        if (t == "}") {
            if (!returned_) throw syntax(line, t, "function body does not end with 'ret void'");
            in_function_ = false;
            return;
        }
        if (t.ends_with(':') && t.find(' ') == std::string_view::npos) {
            if (++labels_ > 1) throw unsupported(line, t, "multiple basic blocks (control flow is not base profile)");
            return;
        }
        for (std::string_view op : {"br", "switch", "indirectbr", "phi", "select", "callbr", "invoke"}) {
            if (starts_with_word(t, op)) {
                throw unsupported(line, t, "'" + std::string(op) + "' is control flow outside the base profile");
            }
        }
        if (returned_) throw syntax(line, t, "instruction after terminator");
        if (starts_with_word(t, "ret")) {
            if (trim(t.substr(3)) != "void") throw unsupported(line, t, "entry point must return void");
            returned_ = true;
            return;
        }
        if (t.starts_with('%')) throw unsupported(line, t, "value-producing instruction outside the base profile");
        auto call = t;
        if (starts_with_word(call, "tail")) call = trim(call.substr(4));
        if (!starts_with_word(call, "call")) throw syntax(line, t, "expected a call instruction");
        call_line(line, call);
    }

    void call_line(const Line& line, std::string_view call) {
        auto at = call.find('@');
        if (at == std::string_view::npos) throw syntax(line, call, "indirect calls are not supported");
        if (trim(call.substr(4, at - 4)) != "void") {
            throw unsupported(line, call, "calls must return void in the base profile");
        }
        auto rest = call.substr(at);
        std::string name(read_global_name(line, rest));
        auto open = rest.find('(');
        if (open == std::string_view::npos) throw syntax(line, rest, "expected argument list");
        auto close = matching_paren(rest, open);
        if (close == std::string_view::npos) throw syntax(line, rest.substr(open), "unbalanced argument list");
        auto tail = trim(rest.substr(close + 1));
        if (!tail.empty() && !tail.starts_with('#')) throw syntax(line, tail, "unexpected tokens after call");
        std::vector<Arg> args;
        for (auto a : split_args(rest.substr(open + 1, close - open - 1))) args.push_back(classify_arg(a));

        calls_.push_back(PendingCall{line, rest, name});
        std::string_view n = name;
        if (n == kRecordResult) {
            if (args.empty() || !is_pointer(args[0].type)) {
                throw syntax(line, rest, "result_record_output expects a result operand");
            }
            module_.ops.push_back(ResultRecord{parse_static_address(line, args[0])});
            return;
        }
        if (std::find(std::begin(kIgnoredRuntime), std::end(kIgnoredRuntime), n) != std::end(kIgnoredRuntime)) return;
        if (n.starts_with(kRtPrefix)) throw unsupported(line, rest, "unsupported runtime function @" + name);
        if (!n.starts_with(kQisPrefix)) throw unsupported(line, rest, "unknown intrinsic @" + name);
        auto stem = n.substr(kQisPrefix.size());
        if (!stem.ends_with("__body")) {
            throw unsupported(line, rest, "only __body quantum intrinsics are supported, got @" + name);
        }
        stem.remove_suffix(6);
        qis_call(line, rest, std::string(stem), args);
    }

    void qis_call(const Line& line, std::string_view at, std::string stem, const std::vector<Arg>& args) {
        std::vector<const Arg*> ptrs;
        std::vector<const Arg*> doubles;
        for (const auto& a : args) {
            if (is_pointer(a.type)) {
                ptrs.push_back(&a);
            } else if (a.type == ArgType::Double) {
                doubles.push_back(&a);
            } else {
                throw unsupported(line, a.whole, "unsupported operand '" + std::string(a.whole) + "'");
            }
        }
        if (stem == "mz") {
            if (ptrs.size() != 2 || !doubles.empty()) throw syntax(line, at, "mz expects (qubit, result)");
            module_.ops.push_back(Measure{parse_static_address(line, *ptrs[0]), parse_static_address(line, *ptrs[1])});
            return;
        }
        if (doubles.empty() && ptrs.size() == 1) {
            module_.ops.push_back(Gate1Q{std::move(stem), parse_static_address(line, *ptrs[0])});
        } else if (doubles.size() == 1 && ptrs.size() == 1 && args[0].type == ArgType::Double) {
            module_.ops.push_back(Gate1QAngle{std::move(stem), parse_static_address(line, *ptrs[0]),
                                              parse_double(line, doubles[0]->value)});
        } else if (doubles.empty() && ptrs.size() == 2) {
            module_.ops.push_back(
                Gate2Q{std::move(stem), parse_static_address(line, *ptrs[0]), parse_static_address(line, *ptrs[1])});
        } else {
            throw unsupported(line, at, "unsupported operand signature for @__quantum__qis__" + stem + "__body");
        }
    }

    void resolve_attributes() {
        auto& meta = module_.metadata;
        for (const auto& id : entry_groups_) {
            auto it = groups_.find(id);
            if (it == groups_.end()) {
                throw syntax(define_line_, define_line_.text, "reference to undefined attribute group #" + id);
            }
            for (const auto& [k, v] : it->second) meta.source_attributes[k] = v;
        }
        auto lookup = [&](std::initializer_list<std::string_view> keys) -> std::optional<std::uint32_t> {
            for (auto key : keys) {
                auto it = meta.source_attributes.find(std::string(key));
                if (it != meta.source_attributes.end()) return parse_count(define_line_, key, it->second);
            }
            return std::nullopt;
        };
        auto qubits = lookup({"required_num_qubits", "num_required_qubits"});
        auto results = lookup({"required_num_results", "num_required_results"});
        auto missing = [&](std::string_view what) {
            return Error(ErrorCode::MissingAttribute, "entry point @" + module_.entry_name + " lacks " +
                                                          std::string(what))
                .at_source(define_line_.number, 1);
        };
        if (!qubits) throw missing("required_num_qubits");
        if (!results) throw missing("required_num_results");
        meta.num_qubits = *qubits;
        meta.num_results = *results;
    }

    std::string_view text_;
    std::vector<Line> lines_;
    QirModule module_;
    bool in_function_ = false;
    bool have_entry_ = false;
    bool returned_ = false;
    int labels_ = 0;
    Line define_line_;
    std::vector<std::string> entry_groups_;
    std::unordered_map<std::string, std::map<std::string, std::string>> groups_;
    std::vector<PendingCall> calls_;
};

}  // namespace

QirModule parse_qir(std::string_view text) { return Parser(text).run(); }

}  // namespace uqp::qir
