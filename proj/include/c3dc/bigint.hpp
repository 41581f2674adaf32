#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace c3dc {

// Axis coordinates are unbounded: key transforms may grow them past any
// fixed width, and the wrap-around/bits-per-axis bookkeeping is what carries
// that growth across the wire.
using BigInt = boost::multiprecision::cpp_int;

// Number of bits in the minimal binary rendering of v; 0 for v == 0.
inline unsigned bit_length(const BigInt& v) {
    if (v == 0) {
        return 0;
    }
    return boost::multiprecision::msb(v) + 1;
}

}  // namespace c3dc
