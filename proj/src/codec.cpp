#include "c3dc/codec.hpp"

#include <algorithm>
#include <cstdio>

namespace c3dc::codec {

namespace {

void check_bits(unsigned bits) {
    if (bits < 1 || bits > 32) {
        throw CodecError("bit-width must be in [1, 32], got " + std::to_string(bits));
    }
}

void check_symbol(const Symbol& s) {
    if (s.bits != kDefaultBits) {
        throw CodecError("unsupported bit-width L=" + std::to_string(s.bits) +
                         "; only L=8 symbols are supported");
    }
    if (s.index >= kSymbolCount) {
        throw CodecError("symbol index " + std::to_string(s.index) + " out of range [0, 255]");
    }
}

}  // namespace

std::uint64_t mod_op(std::uint64_t a, std::uint64_t b, ModKind op, unsigned bits) {
    check_bits(bits);
    const std::uint64_t modulus = std::uint64_t{1} << bits;
    if (a >= modulus || b >= modulus) {
        throw CodecError("mod_op operand out of range for " + std::to_string(bits) + " bits");
    }
    switch (op) {
        case ModKind::add:
            return (a + b) & (modulus - 1);
        case ModKind::sub:
            // non-negative residue
            return (a + modulus - b) & (modulus - 1);
        case ModKind::mul:
            return (a * b) & (modulus - 1);
    }
    throw CodecError("unknown mod_op kind");
}

AxisTriple linear_to_3d(const Symbol& s) {
    check_symbol(s);
    // The prepended 0 bit is implicit: an 8-bit index read as a 9-bit value
    // already has B0 = 0.
    return AxisTriple{
        BigInt{(s.index >> 6) & 0x7u},
        BigInt{(s.index >> 3) & 0x7u},
        BigInt{s.index & 0x7u},
    };
}

Symbol relinearize(const AxisTriple& t) {
    for (const auto* c : {&t.r, &t.g, &t.b}) {
        if (*c < 0 || *c > 7) {
            throw CodecError("axis component " + c->str() + " out of 3-bit range [0, 7]");
        }
    }
    const unsigned packed = (static_cast<unsigned>(t.r) << 6) |
                            (static_cast<unsigned>(t.g) << 3) |
                            static_cast<unsigned>(t.b);
    return Symbol{packed & 0xFFu, kDefaultBits};
}

Bpa compute_bpa(const AxisTriple& t) {
    for (const auto* c : {&t.r, &t.g, &t.b}) {
        if (*c < 0) {
            throw CodecError("cannot compute bits-per-axis of negative component " + c->str());
        }
    }
    return Bpa{
        std::max(3u, bit_length(t.r)),
        std::max(3u, bit_length(t.g)),
        std::max(3u, bit_length(t.b)),
    };
}

MangledSymbol mangle(const AxisTriple& t, unsigned bits) {
    check_bits(bits);
    const Bpa bpa = compute_bpa(t);  // also rejects negative components
    const BigInt packed = (t.r << (bpa.t_g + bpa.t_b)) | (t.g << bpa.t_b) | t.b;
    MangledSymbol m;
    m.residue = static_cast<std::uint32_t>(packed & ((BigInt{1} << bits) - 1));
    m.waf = packed >> bits;
    m.bpa = bpa;
    return m;
}

AxisTriple demangle(const MangledSymbol& m, unsigned bits) {
    check_bits(bits);
    if (m.residue >= (std::uint64_t{1} << bits)) {
        throw CodecError("residue " + std::to_string(m.residue) + " does not fit in " +
                         std::to_string(bits) + " bits");
    }
    if (m.waf < 0) {
        throw CodecError("negative wrap-around factor " + m.waf.str());
    }
    if (m.bpa.t_r < 3 || m.bpa.t_g < 3 || m.bpa.t_b < 3) {
        throw CodecError("bits-per-axis component below the 3-bit floor");
    }
    const BigInt packed = (m.waf << bits) | m.residue;
    if (bit_length(packed) > m.bpa.total()) {
        throw CodecError("corrupt record: packed value needs " +
                         std::to_string(bit_length(packed)) + " bits but bits-per-axis allows " +
                         std::to_string(m.bpa.total()));
    }
    return AxisTriple{
        packed >> (m.bpa.t_g + m.bpa.t_b),
        (packed >> m.bpa.t_b) & ((BigInt{1} << m.bpa.t_g) - 1),
        packed & ((BigInt{1} << m.bpa.t_b) - 1),
    };
}

std::string polynomial_view(const Symbol& s) {
    check_symbol(s);
    if (s.index == 0) {
        return "0";
    }
    std::string out;
    for (unsigned k = s.bits; k-- > 0;) {
        if (((s.index >> k) & 1u) == 0) {
            continue;
        }
        if (!out.empty()) {
            out += " + ";
        }
        if (k == 0) {
            out += "1";
        } else if (k == 1) {
            out += "x";
        } else {
            out += "x^" + std::to_string(k);
        }
    }
    return out;
}

std::string base_view(const Symbol& s, ViewBase base) {
    check_symbol(s);
    char buf[16];
    std::snprintf(buf, sizeof(buf), base == ViewBase::hex ? "%X" : "%o", s.index);
    return buf;
}

}  // namespace c3dc::codec
