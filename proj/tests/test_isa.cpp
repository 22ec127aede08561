#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "uqp/isa.hpp"
#include "generators.hpp"

using namespace uqp;
using namespace uqp::isa;
using test::expect_error;
using test::random_instruction;
using test::random_program;

namespace {

struct GoldenRow {
    std::uint32_t word;
    const char* note;
};

// Reference encoding of the two-qubit Bell kernel.
constexpr GoldenRow kBell[] = {
    {0x40000002, "Execution environment initialization"},
    {0x50000001, "Memory instruction"},
    {0x83C00004, "Hadamard operation"},
    {0x59000001, "Memory instruction"},
    {0x84200004, "CNOT operation"},
    {0x50100001, "Memory instruction"},
    {0x81C20004, "First qubit measurement operation"},
    {0x2A000001, "Fetch last measurement"},
    {0x50200002, "Memory instruction"},
    {0x81C40004, "Second qubit measurement operation"},
    {0x2A000002, "Fetch last measurement"},
};

// Independent field packer used as the encoder oracle.
std::uint32_t pack(std::initializer_list<std::pair<std::uint32_t, int>> fields) {
    std::uint32_t w = 0;
    int shift = 32;
    for (auto [v, width] : fields) {
        shift -= width;
        w |= v << shift;
    }
    return w;
}

BinaryProgram bell_program() {
    BinaryProgram p;
    p.num_qubits = 2;
    p.num_results = 2;
    p.shots = 10000;
    for (auto& row : kBell) p.words.push_back(Word32{row.word});
    p.words.push_back(Word32{0});
    return p;
}

}  // namespace

TEST_SUITE("isa_core") {
    TEST_CASE("Bell reference words decode, re-encode and annotate exactly") {
        int i = 0;
        for (const auto& row : kBell) {
            CAPTURE(i);
            auto instr = decode(Word32{row.word});
            CHECK(encode(instr).value == row.word);
            CHECK(annotation(instr) == row.note);
            ++i;
        }
        CHECK(annotation(decode(Word32{0})) == "Halt (end of program)");
    }

    TEST_CASE("constructors reproduce the reference words") {
        CHECK(encode(EnvInit{2}).value == 0x40000002);
        CHECK(encode(MemLoad::single(0)).value == 0x50000001);
        CHECK(encode(QuantumOp::single(Gate::H)).value == 0x83C00004);
        CHECK(encode(MemLoad::pair(0, 1)).value == 0x59000001);
        CHECK(encode(QuantumOp::two_qubit(Gate::CNOT)).value == 0x84200004);
        CHECK(encode(MemLoad::single(0, 0)).value == 0x50100001);
        CHECK(encode(QuantumOp::measure(0)).value == 0x81C20004);
        CHECK(encode(FetchResult::for_result(0)).value == 0x2A000001);
        CHECK(encode(MemLoad::single(1, 1)).value == 0x50200002);
        CHECK(encode(QuantumOp::measure(1)).value == 0x81C40004);
        CHECK(encode(FetchResult::for_result(1)).value == 0x2A000002);
        CHECK(encode(Halt{}).value == 0);
    }

    TEST_CASE("encoder agrees with an independent field packer") {
        std::mt19937_64 g(3);
        for (int i = 0; i < 20000; ++i) {
            auto instr = random_instruction(g);
            std::uint32_t expect = std::visit(
                [](const auto& x) -> std::uint32_t {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, EnvInit>) return pack({{4, 4}, {x.size, 28}});
                    if constexpr (std::is_same_v<T, MemLoad>)
                        return pack({{5, 4}, {x.mode, 4}, {x.result_sel, 8}, {x.qubit_field, 16}});
                    if constexpr (std::is_same_v<T, QuantumOp>)
                        return pack({{8, 4}, {static_cast<std::uint32_t>(x.gate), 6}, {x.operand, 16}, {x.timing, 6}});
                    if constexpr (std::is_same_v<T, FetchResult>)
                        return pack({{2, 4}, {10, 4}, {x.segment, 8}, {x.reg_sel, 16}});
                    if constexpr (std::is_same_v<T, AtomPrep>)
                        return pack({{6, 4}, {static_cast<std::uint32_t>(x.kind), 4}});
                    return 0;
                },
                instr);
            REQUIRE(encode(instr).value == expect);
        }
    }

    TEST_CASE("field helpers invert") {
        for (std::uint32_t q = 0; q < 128; ++q) {
            CHECK(MemLoad::single(q).qubit() == q);
            CHECK_FALSE(MemLoad::single(q).result().has_value());
            CHECK(QuantumOp::measure(q).measured_qubit() == q);
        }
        for (std::uint32_t r = 0; r < 255; ++r) CHECK(MemLoad::single(3, r).result() == r);
        for (std::uint32_t r = 0; r < 4096; r += 7) CHECK(FetchResult::for_result(r).result() == r);
        auto p = MemLoad::pair(99, 42);
        CHECK(p.is_pair());
        CHECK(p.control() == 99);
        CHECK(p.target() == 42);
        CHECK(QuantumOp::rotation(Gate::RZ, 4095).angle_index() == 4095);
        CHECK_FALSE(QuantumOp::single(Gate::H).angle_index().has_value());
    }

    TEST_CASE("out-of-range fields raise FieldOverflow") {
        expect_error(ErrorCode::FieldOverflow, [] { encode(EnvInit{1u << 28}); });
        expect_error(ErrorCode::FieldOverflow, [] { encode(MemLoad{8, 0, 1}); });
        expect_error(ErrorCode::FieldOverflow, [] { encode(MemLoad{0, 0, 3}); });
        expect_error(ErrorCode::FieldOverflow, [] { encode(QuantumOp{Gate::H, 0, 64}); });
        expect_error(ErrorCode::FieldOverflow, [] { encode(QuantumOp{static_cast<Gate>(63), 0, 4}); });
        expect_error(ErrorCode::FieldOverflow, [] { encode(FetchResult{0, 0}); });
        expect_error(ErrorCode::FieldOverflow, [] { encode(AtomPrep{static_cast<AtomPrepKind>(5)}); });
        expect_error(ErrorCode::FieldOverflow, [] { MemLoad::single(128); });
        expect_error(ErrorCode::FieldOverflow, [] { MemLoad::single(0, 255); });
        expect_error(ErrorCode::FieldOverflow, [] { MemLoad::pair(256, 0); });
        expect_error(ErrorCode::FieldOverflow, [] { QuantumOp::rotation(Gate::RX, 4096); });
    }

    TEST_CASE("undefined patterns raise IllegalOpcode") {
        for (std::uint32_t w : {0xFFFFFFFFu, 0x00000001u, 0x10000000u, 0x30000000u, 0x70000000u, 0x90000000u,
                                0xF0000000u, 0x58000000u, 0x50000003u, 0x80000000u, 0x8FC00000u, 0x20000000u,
                                0x2A000000u, 0x2A000003u, 0x60000000u, 0x65000000u, 0x61000001u}) {
            CAPTURE(w);
            expect_error(ErrorCode::IllegalOpcode, [&] { decode(Word32{w}); });
        }
    }

    TEST_CASE("encode/decode round trip over random instructions") {
        std::mt19937_64 g(11);
        for (int i = 0; i < 100000; ++i) {
            auto instr = random_instruction(g);
            auto w = encode(instr);
            REQUIRE(decode(w) == instr);
            REQUIRE(encode(decode(w)) == w);
        }
    }

    TEST_CASE("decode is total and bijective on accepted words") {
        std::mt19937_64 g(12);
        int accepted = 0;
        for (int i = 0; i < 200000; ++i) {
            Word32 w{static_cast<std::uint32_t>(g())};
            try {
                auto instr = decode(w);
                ++accepted;
                REQUIRE(encode(instr) == w);
            } catch (const Error& e) {
                REQUIRE(e.code() == ErrorCode::IllegalOpcode);
            }
        }
        CHECK(accepted > 0);
    }

    TEST_CASE("binary strings and mnemonics") {
        CHECK(to_binary(Word32{0x40000002}) == "01000000000000000000000000000010");
        CHECK(mnemonic(decode(Word32{0x59000001})) == "MEMLD q0,q1");
        CHECK(mnemonic(decode(Word32{0x50200002})) == "MEMLD q1 ->r1");
        CHECK(mnemonic(decode(Word32{0x81C40004})) == "MZ q1 @4");
        CHECK(mnemonic(decode(Word32{0x2A000002})) == "FETCH r1");
        CHECK(annotation(QuantumOp::measure(2)) == "Third qubit measurement operation");
        CHECK(annotation(QuantumOp::measure(20)) == "21st qubit measurement operation");
    }

    TEST_CASE("angle table deduplicates by bit pattern") {
        AngleTable t;
        CHECK(t.intern(0.5) == 0);
        CHECK(t.intern(1.5) == 1);
        CHECK(t.intern(0.5) == 0);
        CHECK(t.intern(-0.0) == 2);
        CHECK(t.intern(0.0) == 3);
        auto nan = std::numeric_limits<double>::quiet_NaN();
        CHECK(t.intern(nan) == 4);
        CHECK(t.intern(nan) == 4);
        CHECK(t.size() == 5);
        AngleTable u;
        for (int i = 0; i < 4096; ++i) u.intern(i);
        expect_error(ErrorCode::AnglePoolOverflow, [&] { u.intern(5000.0); });
        CHECK(u.intern(17.0) == 17);
    }

    TEST_CASE("Bell image layout") {
        auto p = bell_program();
        auto img = assemble(p);
        CHECK(img.size() == 72);
        CHECK(image_size(p) == 72);
        CHECK(std::memcmp(img.data(), "UQPB", 4) == 0);
        CHECK(img[4] == 1);
        CHECK(img[5] == 0);
        CHECK(img[6] == 0);
        CHECK(img[8] == 2);
        CHECK(img[10] == 2);
        CHECK((img[12] | img[13] << 8) == 10000);
        CHECK(img[20] == 12);
        // first word little-endian
        CHECK(img[24] == 0x02);
        CHECK(img[27] == 0x40);
        auto d = disassemble(img);
        CHECK(d.program == p);
        REQUIRE(d.lines.size() == 12);
        for (std::size_t i = 0; i < 11; ++i) CHECK(d.lines[i].annotation == kBell[i].note);
        CHECK(d.lines[11].annotation == "Halt (end of program)");
        CHECK(d.listing().find("10000011110000000000000000000100  H @4  ; Hadamard operation") != std::string::npos);
    }

    TEST_CASE("image round trip over random programs") {
        std::mt19937_64 g(5);
        for (int i = 0; i < 1000; ++i) {
            auto p = random_program(g);
            auto img = assemble(p);
            REQUIRE(img.size() == image_size(p));
            auto d = disassemble(img);
            REQUIRE(d.program == p);
            REQUIRE(assemble(d.program) == img);
        }
    }

    TEST_CASE("empty program") {
        BinaryProgram p;
        p.words = {encode(EnvInit{0}), Word32{0}};
        auto d = disassemble(assemble(p));
        CHECK(d.program == p);
        BinaryProgram none;
        expect_error(ErrorCode::InvalidProgram, [&] { assemble(none); });
    }

    TEST_CASE("qubit cap") {
        BinaryProgram p;
        p.num_qubits = 100;
        p.words = {encode(EnvInit{100}), Word32{0}};
        CHECK_NOTHROW(assemble(p));
        p.num_qubits = 101;
        expect_error(ErrorCode::QubitCountExceeded, [&] { assemble(p); });
    }

    TEST_CASE("malformed images") {
        auto img = assemble(bell_program());
        for (std::size_t n = 0; n < img.size(); ++n) {
            std::vector<std::uint8_t> cut(img.begin(), img.begin() + static_cast<std::ptrdiff_t>(n));
            CAPTURE(n);
            expect_error(ErrorCode::TruncatedProgram, [&] { disassemble(cut); });
        }
        auto bad = img;
        bad[0] = 'X';
        expect_error(ErrorCode::BadMagic, [&] { disassemble(bad); });
        auto trailing = img;
        trailing.push_back(0);
        expect_error(ErrorCode::InvalidProgram, [&] { disassemble(trailing); });
        auto illegal = img;
        // word 3 sits at byte 24 + 12
        illegal[36 + 3] = 0xF0;
        auto e = expect_error(ErrorCode::IllegalOpcode, [&] { disassemble(illegal); });
        CHECK(e.offset == 3u);
        auto first = img;
        first[24 + 3] = 0x00;
        first[24] = 0x00;
        expect_error(ErrorCode::InvalidProgram, [&] { disassemble(first); });
    }

    TEST_CASE("rotation with an index outside the pool is rejected") {
        BinaryProgram p;
        p.num_qubits = 1;
        p.angles.intern(0.25);
        p.words = {encode(EnvInit{1}), encode(MemLoad::single(0)), encode(QuantumOp::rotation(Gate::RZ, 1)), Word32{0}};
        auto e = expect_error(ErrorCode::InvalidProgram, [&] { assemble(p); });
        CHECK(e.offset == 2u);
    }

    TEST_CASE("angles survive bit-exactly") {
        BinaryProgram p;
        p.words = {encode(EnvInit{0}), Word32{0}};
        for (double a : {-0.0, 0.0, std::numeric_limits<double>::denorm_min(), std::numeric_limits<double>::infinity(),
                         std::numeric_limits<double>::quiet_NaN(), std::nextafter(1.0, 2.0)}) {
            p.angles.intern(a);
        }
        auto d = disassemble(assemble(p));
        REQUIRE(d.program.angles.size() == p.angles.size());
        for (std::size_t i = 0; i < p.angles.size(); ++i) {
            CHECK(std::bit_cast<std::uint64_t>(d.program.angles.at(i)) == std::bit_cast<std::uint64_t>(p.angles.at(i)));
        }
    }
}
