#pragma once

#include <cstdint>
#include <string>

#include "c3dc/bigint.hpp"
#include "c3dc/errors.hpp"

namespace c3dc::codec {

// L: bits per symbol. Only 8 is accepted by the linear<->3D transforms; the
// prepended symmetry bit yields exactly three 3-bit axis groups only at
// 8 + 1 = 9 bits.
inline constexpr unsigned kDefaultBits = 8;
inline constexpr unsigned kSymbolCount = 256;

// One member of the 256-symbol set, addressed by its index.
struct Symbol {
    unsigned index = 0;
    unsigned bits = kDefaultBits;

    bool operator==(const Symbol&) const = default;
};

// A lattice point on the r/g/b axes. Fresh output of linear_to_3d keeps each
// component in [0, 7]; key transforms may grow the components without bound.
struct AxisTriple {
    BigInt r;
    BigInt g;
    BigInt b;

    bool operator==(const AxisTriple&) const = default;
};

// Bits-per-axis 3-tuple. Each count is the bit-length of the corresponding
// axis value, floored at the initial 3-bit group width.
struct Bpa {
    unsigned t_r = 3;
    unsigned t_g = 3;
    unsigned t_b = 3;

    unsigned total() const { return t_r + t_g + t_b; }
    bool operator==(const Bpa&) const = default;
};

// An axis triple flattened to an L-bit residue plus the bookkeeping needed
// to reconstruct it: residue = T mod 2^L, waf = floor(T / 2^L) where T is
// the r||g||b packed-bits integer.
struct MangledSymbol {
    std::uint32_t residue = 0;
    BigInt waf;
    Bpa bpa;

    bool operator==(const MangledSymbol&) const = default;
};

enum class ModKind { add, sub, mul };

// Fixed-width wrapping arithmetic on [0, 2^bits). Subtraction returns the
// non-negative residue. bits must be in [1, 32] and both operands in range.
std::uint64_t mod_op(std::uint64_t a, std::uint64_t b, ModKind op, unsigned bits);

// Prepends the symmetry 0 bit to the 8-bit code and splits the 9 bits into
// three MSB-first groups: r = B0B1B2, g = B3B4B5, b = B6B7B8.
AxisTriple linear_to_3d(const Symbol& s);

// Inverse of linear_to_3d: concatenates the three 3-bit fields and drops the
// leading symmetry bit. Each component must fit in 3 bits.
Symbol relinearize(const AxisTriple& t);

Bpa compute_bpa(const AxisTriple& t);

// Packs r||g||b (field widths from compute_bpa, MSB-first) into the integer
// T and splits it into an L-bit residue and a wrap-around factor.
MangledSymbol mangle(const AxisTriple& t, unsigned bits = kDefaultBits);

// Reconstructs T = waf * 2^L + residue, left-pads it to t_r + t_g + t_b bits
// and re-splits the fields. Rejects records whose T does not fit the BPA.
AxisTriple demangle(const MangledSymbol& m, unsigned bits = kDefaultBits);

// Renders the symbol's set bits as a descending polynomial, e.g.
// "x^7 + x^5 + x^4 + x^2". The zero symbol renders as "0".
std::string polynomial_view(const Symbol& s);

enum class ViewBase { hex, octal };

// Uppercase hex or octal rendering without a base prefix.
std::string base_view(const Symbol& s, ViewBase base);

}  // namespace c3dc::codec
