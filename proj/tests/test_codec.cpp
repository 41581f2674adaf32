#include <cstdint>
#include <random>
#include <string>

#include "c3dc/codec.hpp"
#include "doctest.h"

using namespace c3dc;
using codec::AxisTriple;
using codec::Bpa;
using codec::MangledSymbol;
using codec::ModKind;
using codec::Symbol;

namespace {

// Independent packing oracle: render each component as a fixed-width bit
// string, concatenate, and fold the characters back into an integer.
std::string bits_of(const BigInt& v, unsigned width) {
    std::string out(width, '0');
    BigInt rest = v;
    for (unsigned i = 0; i < width; ++i) {
        if (rest % 2 == 1) {
            out[width - 1 - i] = '1';
        }
        rest /= 2;
    }
    return out;
}

BigInt packed_by_strings(const AxisTriple& t, const Bpa& bpa) {
    const std::string s =
        bits_of(t.r, bpa.t_r) + bits_of(t.g, bpa.t_g) + bits_of(t.b, bpa.t_b);
    BigInt acc = 0;
    for (char c : s) {
        acc = acc * 2 + (c == '1' ? 1 : 0);
    }
    return acc;
}

AxisTriple triple(long r, long g, long b) {
    return AxisTriple{BigInt{r}, BigInt{g}, BigInt{b}};
}

}  // namespace

TEST_CASE("mod_op worked values") {
    // 170 * 241 = 40970 = 160 * 256 + 10. The sometimes-quoted value for
    // this product, [00000010] = 2, is reproducible under no standard
    // arithmetic (integer mod 2^8 gives 10, carry-less GF(2)[x] mod x^8
    // gives 234); this library implements integer mod-2^L.
    CHECK(codec::mod_op(170, 241, ModKind::mul, 8) == 10);
    CHECK(codec::mod_op(255, 1, ModKind::add, 8) == 0);
    CHECK(codec::mod_op(5, 0, ModKind::mul, 8) == 0);
    CHECK(codec::mod_op(3, 5, ModKind::sub, 8) == 254);
}

TEST_CASE("mod_op agrees with a wide-integer oracle on the full 8-bit domain") {
    for (std::uint64_t a = 0; a < 256; ++a) {
        for (std::uint64_t b = 0; b < 256; ++b) {
            const std::int64_t sa = static_cast<std::int64_t>(a);
            const std::int64_t sb = static_cast<std::int64_t>(b);
            REQUIRE(codec::mod_op(a, b, ModKind::add, 8) == (a + b) % 256);
            REQUIRE(codec::mod_op(a, b, ModKind::sub, 8) ==
                    static_cast<std::uint64_t>(((sa - sb) % 256 + 256) % 256));
            REQUIRE(codec::mod_op(a, b, ModKind::mul, 8) == (a * b) % 256);
        }
    }
}

TEST_CASE("mod_op rejects out-of-domain arguments") {
    CHECK_THROWS_AS(codec::mod_op(256, 0, ModKind::add, 8), CodecError);
    CHECK_THROWS_AS(codec::mod_op(0, 16, ModKind::add, 4), CodecError);
    CHECK_THROWS_AS(codec::mod_op(0, 0, ModKind::add, 0), CodecError);
    CHECK_THROWS_AS(codec::mod_op(0, 0, ModKind::add, 33), CodecError);
}

TEST_CASE("linear_to_3d worked values") {
    CHECK(codec::linear_to_3d(Symbol{'A'}) == triple(1, 0, 1));
    CHECK(codec::linear_to_3d(Symbol{'0'}) == triple(0, 6, 0));
    CHECK(codec::linear_to_3d(Symbol{'/'}) == triple(0, 5, 7));
    CHECK(codec::linear_to_3d(Symbol{0}) == triple(0, 0, 0));
}

TEST_CASE("linear_to_3d accepts only 8-bit symbols") {
    CHECK_THROWS_AS(codec::linear_to_3d(Symbol{1, 7}), CodecError);
    CHECK_THROWS_AS(codec::linear_to_3d(Symbol{1, 9}), CodecError);
    CHECK_THROWS_AS(codec::linear_to_3d(Symbol{256}), CodecError);
}

TEST_CASE("relinearize worked values") {
    CHECK(codec::relinearize(triple(1, 0, 1)).index == 'A');
    CHECK(codec::relinearize(triple(0, 0, 0)).index == 0);
    // The symmetry bit is dropped even when set.
    CHECK(codec::relinearize(triple(7, 7, 7)).index == 255);
    CHECK_THROWS_AS(codec::relinearize(triple(8, 0, 0)), CodecError);
    CHECK_THROWS_AS(codec::relinearize(triple(0, -1, 0)), CodecError);
}

TEST_CASE("relinearize inverts linear_to_3d for every symbol") {
    for (unsigned i = 0; i < codec::kSymbolCount; ++i) {
        REQUIRE(codec::relinearize(codec::linear_to_3d(Symbol{i})).index == i);
    }
}

TEST_CASE("compute_bpa worked values") {
    CHECK(codec::compute_bpa(triple(4, 4, 6)) == Bpa{3, 3, 3});
    CHECK(codec::compute_bpa(triple(3, 10, 5)) == Bpa{3, 4, 3});
    CHECK(codec::compute_bpa(triple(3, 9, 12)) == Bpa{3, 4, 4});
    CHECK(codec::compute_bpa(triple(0, 0, 0)) == Bpa{3, 3, 3});
}

TEST_CASE("compute_bpa never goes below the 3-bit floor") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const AxisTriple t = triple(static_cast<long>(rng() % 100000),
                                    static_cast<long>(rng() % 100000),
                                    static_cast<long>(rng() % 8));
        const Bpa bpa = codec::compute_bpa(t);
        REQUIRE(bpa.t_r >= 3);
        REQUIRE(bpa.t_g >= 3);
        REQUIRE(bpa.t_b >= 3);
        REQUIRE(bpa.t_r >= bit_length(t.r));
        REQUIRE(bpa.t_g >= bit_length(t.g));
        REQUIRE(bpa.t_b >= bit_length(t.b));
    }
    CHECK_THROWS_AS(codec::compute_bpa(triple(-1, 0, 0)), CodecError);
}

TEST_CASE("mangle worked values") {
    const MangledSymbol a = codec::mangle(triple(4, 4, 6));
    CHECK(a.residue == 0x26);
    CHECK(a.waf == 1);
    CHECK(a.bpa == Bpa{3, 3, 3});

    const MangledSymbol b = codec::mangle(triple(3, 10, 5));
    CHECK(b.residue == 0xD5);
    CHECK(b.waf == 1);
    CHECK(b.bpa == Bpa{3, 4, 3});

    const MangledSymbol c = codec::mangle(triple(3, 9, 12));
    CHECK(c.residue == 0x9C);
    CHECK(c.waf == 3);
    CHECK(c.bpa == Bpa{3, 4, 4});

    const MangledSymbol zero = codec::mangle(triple(0, 0, 0));
    CHECK(zero.residue == 0);
    CHECK(zero.waf == 0);
    CHECK(zero.bpa == Bpa{3, 3, 3});

    CHECK_THROWS_AS(codec::mangle(triple(-1, 0, 0)), CodecError);
}

TEST_CASE("mangle output matches the bit-string concatenation oracle") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const AxisTriple t = triple(static_cast<long>(rng() % 65536),
                                    static_cast<long>(rng() % 65536),
                                    static_cast<long>(rng() % 65536));
        const MangledSymbol m = codec::mangle(t);
        const BigInt expected = packed_by_strings(t, m.bpa);
        REQUIRE(m.waf * 256 + m.residue == expected);
    }
}

TEST_CASE("demangle worked values") {
    CHECK(codec::demangle(MangledSymbol{0xD5, 1, Bpa{3, 4, 3}}) == triple(3, 10, 5));
    // 924 has bit-length 10 and pads to 11 bits before the split.
    CHECK(codec::demangle(MangledSymbol{0x9C, 3, Bpa{3, 4, 4}}) == triple(3, 9, 12));
    CHECK(codec::demangle(MangledSymbol{0, 0, Bpa{3, 3, 3}}) == triple(0, 0, 0));
}

TEST_CASE("demangle rejects corrupt records") {
    // 255 * 256 + 255 = 65535 needs 16 bits but the BPA allows 9.
    CHECK_THROWS_AS(codec::demangle(MangledSymbol{255, 255, Bpa{3, 3, 3}}), CodecError);
    CHECK_THROWS_AS(codec::demangle(MangledSymbol{0, 0, Bpa{2, 3, 3}}), CodecError);
    CHECK_THROWS_AS(codec::demangle(MangledSymbol{256, 0, Bpa{3, 3, 3}}), CodecError);
    CHECK_THROWS_AS(codec::demangle(MangledSymbol{0, BigInt{-1}, Bpa{3, 3, 3}}), CodecError);
}

TEST_CASE("mangle/demangle roundtrip over the exhaustive small cube") {
    for (long r = 0; r < 16; ++r) {
        for (long g = 0; g < 16; ++g) {
            for (long b = 0; b < 16; ++b) {
                const AxisTriple t = triple(r, g, b);
                REQUIRE(codec::demangle(codec::mangle(t)) == t);
            }
        }
    }
}

TEST_CASE("mangle/demangle roundtrip on random wide triples") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 2000; ++i) {
        const AxisTriple t = triple(static_cast<long>(rng() % 65536),
                                    static_cast<long>(rng() % 65536),
                                    static_cast<long>(rng() % 65536));
        REQUIRE(codec::demangle(codec::mangle(t)) == t);
    }
}

TEST_CASE("polynomial_view renders descending powers") {
    CHECK(codec::polynomial_view(Symbol{0b10110100}) == "x^7 + x^5 + x^4 + x^2");
    CHECK(codec::polynomial_view(Symbol{0}) == "0");
    CHECK(codec::polynomial_view(Symbol{0b00000011}) == "x + 1");
    CHECK(codec::polynomial_view(Symbol{1}) == "1");
}

TEST_CASE("base_view renders unprefixed hex and octal") {
    CHECK(codec::base_view(Symbol{170}, codec::ViewBase::hex) == "AA");
    CHECK(codec::base_view(Symbol{170}, codec::ViewBase::octal) == "252");
    CHECK(codec::base_view(Symbol{0}, codec::ViewBase::hex) == "0");
    CHECK(codec::base_view(Symbol{0}, codec::ViewBase::octal) == "0");
}
