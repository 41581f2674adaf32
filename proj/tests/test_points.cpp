#include <random>

#include "c3dc/points.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace c3dc;
using points::HomogeneousPoint;
using points::KeyOp;
using points::KeySequence;
using points::Mat4;
using points::Vec3;

namespace {

HomogeneousPoint pt(long r, long g, long b) {
    return HomogeneousPoint{BigInt{r}, BigInt{g}, BigInt{b}};
}

KeyOp example_translation() {
    return KeyOp::mul(Mat4::translation(Vec3{3, 4, 5}));
}

// Naive oracle: full 1x4 row vector times 4x4 matrix, homogeneous
// coordinate included.
std::array<BigInt, 4> row_times_matrix(const HomogeneousPoint& p, const Mat4& m) {
    const std::array<BigInt, 4> row{p.r, p.g, p.b, BigInt{1}};
    std::array<BigInt, 4> out{};
    for (unsigned col = 0; col < 4; ++col) {
        for (unsigned i = 0; i < 4; ++i) {
            out[col] += row[i] * m.at(i, col);
        }
    }
    return out;
}

Mat4 mat4_product(const Mat4& a, const Mat4& b) {
    Mat4 out;
    for (unsigned r = 0; r < 4; ++r) {
        for (unsigned c = 0; c < 4; ++c) {
            BigInt acc = 0;
            for (unsigned i = 0; i < 4; ++i) {
                acc += a.at(r, i) * b.at(i, c);
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("the translation matrix relocates the worked-example points") {
    const KeyOp op = example_translation();
    CHECK(points::apply_op(pt(1, 0, 1), op) == pt(4, 4, 6));
    CHECK(points::apply_op(pt(0, 6, 0), op) == pt(3, 10, 5));
    CHECK(points::apply_op(pt(0, 5, 7), op) == pt(3, 9, 12));

    const KeyOp identity = KeyOp::mul(Mat4::identity());
    CHECK(points::apply_op(pt(1, 0, 1), identity) == pt(1, 0, 1));
}

TEST_CASE("add and sub act componentwise") {
    CHECK(points::apply_op(pt(1, 2, 3), KeyOp::add(Vec3{10, 20, 30})) == pt(11, 22, 33));
    CHECK(points::apply_op(pt(1, 2, 3), KeyOp::sub(Vec3{10, 20, 30})) == pt(-9, -18, -27));
}

TEST_CASE("mul agrees with the naive row-vector oracle") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 500; ++i) {
        const Mat4 m = testutil::random_unimodular_mat(rng, 1 + testutil::below(rng, 4), 50);
        const HomogeneousPoint p = testutil::random_point(rng, 1000);
        const HomogeneousPoint got = points::apply_op(p, KeyOp::mul(m));
        const auto expected = row_times_matrix(p, m);
        REQUIRE(got.r == expected[0]);
        REQUIRE(got.g == expected[1]);
        REQUIRE(got.b == expected[2]);
        REQUIRE(expected[3] == 1);  // homogeneity preserved
    }
}

TEST_CASE("mul keys are validated at construction") {
    Mat4 leaky = Mat4::identity();
    leaky.at(1, 3) = 2;
    CHECK_THROWS_AS(KeyOp::mul(leaky), KeyError);

    Mat4 scaled = Mat4::identity();
    scaled.at(0, 0) = 2;
    CHECK_THROWS_AS(KeyOp::mul(scaled), KeyError);

    Mat4 singular = Mat4::identity();
    singular.at(1, 1) = 0;
    CHECK_THROWS_AS(KeyOp::mul(singular), KeyError);

    // det -1 is fine
    Mat4 reflect = Mat4::identity();
    reflect.at(0, 0) = -1;
    CHECK_NOTHROW(KeyOp::mul(reflect));
}

TEST_CASE("apply_sequence folds in order") {
    const HomogeneousPoint p = pt(0, 6, 0);
    CHECK(points::apply_sequence(p, KeySequence{{KeyOp::mul(Mat4::identity())}}) == p);

    const KeySequence inverse_pair{{example_translation(), KeyOp::sub(Vec3{3, 4, 5})}};
    CHECK(points::apply_sequence(pt(1, 0, 1), inverse_pair) == pt(1, 0, 1));

    const KeySequence adds{{KeyOp::add(Vec3{1, 1, 1}), KeyOp::add(Vec3{2, 3, 4})}};
    CHECK(points::apply_sequence(p, adds) == pt(3, 10, 5));
}

TEST_CASE("invert_sequence worked values") {
    const KeySequence ks{{example_translation()}};
    const KeySequence inv = points::invert_sequence(ks);
    REQUIRE(inv.ops.size() == 1);
    CHECK(inv.ops[0] == KeyOp::mul(Mat4::translation(Vec3{-3, -4, -5})));

    // Reversal law: [add v, mul M] inverts to [mul M^-1, sub v].
    std::mt19937_64 rng(3);
    const Mat4 m = testutil::random_unimodular_mat(rng, 3, 10);
    const KeySequence pair{{KeyOp::add(Vec3{1, 2, 3}), KeyOp::mul(m)}};
    const KeySequence pair_inv = points::invert_sequence(pair);
    REQUIRE(pair_inv.ops.size() == 2);
    CHECK(pair_inv.ops[0].kind() == points::OpKind::mul);
    CHECK(pair_inv.ops[1] == KeyOp::sub(Vec3{1, 2, 3}));
}

TEST_CASE("matrix inverses are exact: M * M^-1 == I") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 500; ++i) {
        const Mat4 m = testutil::random_unimodular_mat(rng, 1 + testutil::below(rng, 5), 50);
        const Mat4 inv = KeyOp::mul(m).inverted().matrix();
        REQUIRE(mat4_product(m, inv) == Mat4::identity());
        REQUIRE(mat4_product(inv, m) == Mat4::identity());
    }
}

TEST_CASE("invert_sequence undoes apply_sequence exactly") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 1000; ++i) {
        const KeySequence ks = testutil::random_signed_sequence(rng, 5);
        const HomogeneousPoint p = testutil::random_point(rng, 10000);
        const HomogeneousPoint moved = points::apply_sequence(p, ks);
        REQUIRE(points::apply_sequence(moved, points::invert_sequence(ks)) == p);
    }
}

TEST_CASE("unimodular matrices are closed under composition") {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 200; ++i) {
        const Mat4 a = testutil::random_unimodular_mat(rng, 1 + testutil::below(rng, 4), 20);
        const Mat4 b = testutil::random_unimodular_mat(rng, 1 + testutil::below(rng, 4), 20);
        const BigInt det = points::linear_det(mat4_product(a, b));
        REQUIRE((det == 1 || det == -1));
        CHECK_NOTHROW(KeyOp::mul(mat4_product(a, b)));
    }
}

TEST_CASE("color_count evaluates 2^(3N)") {
    CHECK(points::color_count(8) == 16777216);
    CHECK(points::color_count(1) == 8);
    CHECK(points::color_count(3) == 512);
    CHECK_THROWS_AS(points::color_count(0), Error);
}

TEST_CASE("key files roundtrip through parse and serialize") {
    const std::string text =
        "# worked example key\n"
        "\n"
        "add 1 2 3\n"
        "sub 4 5 6\n"
        "mul\n"
        "1 0 0 0\n"
        "# rows may be separated by comments\n"
        "0 1 0 0\n"
        "0 0 1 0\n"
        "3 4 5 1\n";
    const KeySequence ks = points::parse_key_text(text);
    REQUIRE(ks.ops.size() == 3);
    CHECK(ks.ops[0] == KeyOp::add(Vec3{1, 2, 3}));
    CHECK(ks.ops[1] == KeyOp::sub(Vec3{4, 5, 6}));
    CHECK(ks.ops[2] == example_translation());

    CHECK(points::parse_key_text(points::serialize_key(ks)) == ks);
}

TEST_CASE("key files accept arbitrary-precision integers") {
    const KeySequence ks = points::parse_key_text("add 340282366920938463463374607431768211456 0 1\n");
    CHECK(ks.ops[0].vector().x == BigInt{1} << 128);
}

TEST_CASE("key file parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(points::parse_key_text("rotate 1 2 3\n"),
                         doctest::Contains("line 1"), KeyError);
    CHECK_THROWS_WITH_AS(points::parse_key_text("add 1 2\n"), doctest::Contains("3 integers"),
                         KeyError);
    CHECK_THROWS_WITH_AS(points::parse_key_text("add 1 2 x\n"), doctest::Contains("bad integer"),
                         KeyError);
    CHECK_THROWS_WITH_AS(points::parse_key_text("mul\n1 0 0 0\n0 1 0 0\n0 0 1 0\n"),
                         doctest::Contains("missing row"), KeyError);
    CHECK_THROWS_WITH_AS(
        points::parse_key_text("mul\n2 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n"),
        doctest::Contains("unimodular"), KeyError);
    CHECK_THROWS_AS(points::parse_key_text("# only a comment\n"), KeyError);
    CHECK_THROWS_AS(points::parse_key_text(""), KeyError);
}

TEST_CASE("key files survive a disk roundtrip") {
    const auto path = std::filesystem::temp_directory_path() / "c3dc_test_key.txt";
    const KeySequence ks{{example_translation(), KeyOp::add(Vec3{9, 8, 7})}};
    points::save_key_file(path, ks);
    CHECK(points::load_key_file(path) == ks);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(points::load_key_file(path), KeyError);
}
