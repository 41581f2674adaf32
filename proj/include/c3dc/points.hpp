#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "c3dc/bigint.hpp"
#include "c3dc/errors.hpp"

namespace c3dc::points {

// A point [r g b 1] in homogeneous row-vector form. The trailing 1 is
// implicit; every key operation preserves it by construction.
struct HomogeneousPoint {
    BigInt r;
    BigInt g;
    BigInt b;

    bool operator==(const HomogeneousPoint&) const = default;
};

struct Vec3 {
    BigInt x;
    BigInt y;
    BigInt z;

    bool operator==(const Vec3&) const = default;
};

// Row-major 4x4 integer matrix. Points multiply from the left, so an affine
// transform carries its translation in the bottom row.
struct Mat4 {
    std::array<BigInt, 16> m{};

    BigInt& at(unsigned row, unsigned col) { return m[row * 4 + col]; }
    const BigInt& at(unsigned row, unsigned col) const { return m[row * 4 + col]; }

    static Mat4 identity();
    static Mat4 translation(const Vec3& v);

    bool operator==(const Mat4&) const = default;
};

// Determinant of the upper-left 3x3 block (the linear part of an affine
// transform in row-vector convention).
BigInt linear_det(const Mat4& m);

enum class OpKind { add, sub, mul };

// One invertible transform: a vector add/sub or a multiply by an affine
// matrix whose linear part is unimodular (det +-1), which guarantees an
// exact integer inverse.
class KeyOp {
public:
    static KeyOp add(Vec3 v);
    static KeyOp sub(Vec3 v);
    // Throws KeyError unless the fourth column is (0,0,0,1)^T and the
    // upper-left 3x3 determinant is +-1.
    static KeyOp mul(Mat4 m);

    OpKind kind() const { return kind_; }
    const Vec3& vector() const;
    const Mat4& matrix() const;

    KeyOp inverted() const;

    bool operator==(const KeyOp&) const = default;

private:
    KeyOp(OpKind kind, std::variant<Vec3, Mat4> payload)
        : kind_(kind), payload_(std::move(payload)) {}

    OpKind kind_;
    std::variant<Vec3, Mat4> payload_;
};

struct KeySequence {
    std::vector<KeyOp> ops;

    bool operator==(const KeySequence&) const = default;
};

HomogeneousPoint apply_op(const HomogeneousPoint& p, const KeyOp& op);

// Left fold of apply_op over the sequence, in order.
HomogeneousPoint apply_sequence(const HomogeneousPoint& p, const KeySequence& ks);

// Reversed sequence with each op inverted, so that
// apply_sequence(apply_sequence(p, ks), invert_sequence(ks)) == p exactly.
KeySequence invert_sequence(const KeySequence& ks);

// Number of distinct points (colors) with n bits per dimension: 2^(3n).
BigInt color_count(unsigned bits_per_dimension);

// Key file format: one op per line. "add a b c", "sub a b c", or "mul"
// followed by four lines of four integers. '#' starts a comment line.
KeySequence parse_key_text(const std::string& text);
std::string serialize_key(const KeySequence& ks);

KeySequence load_key_file(const std::filesystem::path& path);
void save_key_file(const std::filesystem::path& path, const KeySequence& ks);

}  // namespace c3dc::points
