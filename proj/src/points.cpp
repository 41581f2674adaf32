#include "c3dc/points.hpp"

#include <fstream>
#include <sstream>

namespace c3dc::points {

Mat4 Mat4::identity() {
    Mat4 out;
    for (unsigned i = 0; i < 4; ++i) {
        out.at(i, i) = 1;
    }
    return out;
}

Mat4 Mat4::translation(const Vec3& v) {
    Mat4 out = identity();
    out.at(3, 0) = v.x;
    out.at(3, 1) = v.y;
    out.at(3, 2) = v.z;
    return out;
}

BigInt linear_det(const Mat4& m) {
    const auto& a = m.m;
    return a[0] * (a[5] * a[10] - a[6] * a[9]) -
           a[1] * (a[4] * a[10] - a[6] * a[8]) +
           a[2] * (a[4] * a[9] - a[5] * a[8]);
}

KeyOp KeyOp::add(Vec3 v) {
    return KeyOp{OpKind::add, std::move(v)};
}

KeyOp KeyOp::sub(Vec3 v) {
    return KeyOp{OpKind::sub, std::move(v)};
}

KeyOp KeyOp::mul(Mat4 m) {
    if (m.at(0, 3) != 0 || m.at(1, 3) != 0 || m.at(2, 3) != 0 || m.at(3, 3) != 1) {
        throw KeyError("matrix breaks homogeneity: fourth column must be (0,0,0,1)");
    }
    const BigInt det = linear_det(m);
    if (det != 1 && det != -1) {
        throw KeyError("matrix is not unimodular: 3x3 determinant is " + det.str() +
                       ", expected +-1");
    }
    return KeyOp{OpKind::mul, std::move(m)};
}

const Vec3& KeyOp::vector() const {
    return std::get<Vec3>(payload_);
}

const Mat4& KeyOp::matrix() const {
    return std::get<Mat4>(payload_);
}

namespace {

// Exact inverse of a validated affine unimodular matrix. With det = +-1 the
// adjugate divided by det equals the adjugate times det.
Mat4 invert_matrix(const Mat4& m) {
    const BigInt det = linear_det(m);
    const auto v = [&m](unsigned r, unsigned c) { return m.at(r, c); };

    Mat4 adj;
    adj.at(0, 0) = v(1, 1) * v(2, 2) - v(1, 2) * v(2, 1);
    adj.at(0, 1) = -(v(0, 1) * v(2, 2) - v(0, 2) * v(2, 1));
    adj.at(0, 2) = v(0, 1) * v(1, 2) - v(0, 2) * v(1, 1);
    adj.at(1, 0) = -(v(1, 0) * v(2, 2) - v(1, 2) * v(2, 0));
    adj.at(1, 1) = v(0, 0) * v(2, 2) - v(0, 2) * v(2, 0);
    adj.at(1, 2) = -(v(0, 0) * v(1, 2) - v(0, 2) * v(1, 0));
    adj.at(2, 0) = v(1, 0) * v(2, 1) - v(1, 1) * v(2, 0);
    adj.at(2, 1) = -(v(0, 0) * v(2, 1) - v(0, 1) * v(2, 0));
    adj.at(2, 2) = v(0, 0) * v(1, 1) - v(0, 1) * v(1, 0);

    Mat4 inv;
    for (unsigned r = 0; r < 3; ++r) {
        for (unsigned c = 0; c < 3; ++c) {
            inv.at(r, c) = adj.at(r, c) * det;
        }
    }
    // Bottom row: -t * Ainv.
    for (unsigned c = 0; c < 3; ++c) {
        inv.at(3, c) = -(v(3, 0) * inv.at(0, c) + v(3, 1) * inv.at(1, c) + v(3, 2) * inv.at(2, c));
    }
    inv.at(3, 3) = 1;
    return inv;
}

}  // namespace

KeyOp KeyOp::inverted() const {
    switch (kind_) {
        case OpKind::add:
            return KeyOp{OpKind::sub, payload_};
        case OpKind::sub:
            return KeyOp{OpKind::add, payload_};
        case OpKind::mul:
            return KeyOp{OpKind::mul, invert_matrix(std::get<Mat4>(payload_))};
    }
    throw KeyError("unknown op kind");
}

HomogeneousPoint apply_op(const HomogeneousPoint& p, const KeyOp& op) {
    switch (op.kind()) {
        case OpKind::add: {
            const Vec3& v = op.vector();
            return HomogeneousPoint{p.r + v.x, p.g + v.y, p.b + v.z};
        }
        case OpKind::sub: {
            const Vec3& v = op.vector();
            return HomogeneousPoint{p.r - v.x, p.g - v.y, p.b - v.z};
        }
        case OpKind::mul: {
            // Row vector [r g b 1] times the matrix; the validated fourth
            // column keeps the homogeneous coordinate at 1.
            const Mat4& m = op.matrix();
            HomogeneousPoint out;
            out.r = p.r * m.at(0, 0) + p.g * m.at(1, 0) + p.b * m.at(2, 0) + m.at(3, 0);
            out.g = p.r * m.at(0, 1) + p.g * m.at(1, 1) + p.b * m.at(2, 1) + m.at(3, 1);
            out.b = p.r * m.at(0, 2) + p.g * m.at(1, 2) + p.b * m.at(2, 2) + m.at(3, 2);
            return out;
        }
    }
    throw KeyError("unknown op kind");
}

HomogeneousPoint apply_sequence(const HomogeneousPoint& p, const KeySequence& ks) {
    HomogeneousPoint out = p;
    for (const KeyOp& op : ks.ops) {
        out = apply_op(out, op);
    }
    return out;
}

KeySequence invert_sequence(const KeySequence& ks) {
    KeySequence out;
    out.ops.reserve(ks.ops.size());
    for (auto it = ks.ops.rbegin(); it != ks.ops.rend(); ++it) {
        out.ops.push_back(it->inverted());
    }
    return out;
}

BigInt color_count(unsigned bits_per_dimension) {
    if (bits_per_dimension < 1) {
        throw Error("bits per dimension must be >= 1");
    }
    return BigInt{1} << (3 * bits_per_dimension);
}

namespace {

std::vector<BigInt> parse_ints(const std::string& line, std::size_t line_no) {
    std::istringstream in(line);
    std::vector<BigInt> out;
    std::string token;
    while (in >> token) {
        try {
            out.emplace_back(token);
        } catch (const std::exception&) {
            throw KeyError("key file line " + std::to_string(line_no) + ": bad integer '" +
                           token + "'");
        }
    }
    return out;
}

bool is_blank_or_comment(const std::string& line) {
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

KeySequence parse_key_text(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }

    KeySequence ks;
    std::size_t i = 0;
    while (i < lines.size()) {
        const std::size_t line_no = i + 1;
        if (is_blank_or_comment(lines[i])) {
            ++i;
            continue;
        }
        std::istringstream ls(lines[i]);
        std::string directive;
        ls >> directive;
        std::string rest;
        std::getline(ls, rest);
        ++i;

        if (directive == "add" || directive == "sub") {
            auto values = parse_ints(rest, line_no);
            if (values.size() != 3) {
                throw KeyError("key file line " + std::to_string(line_no) + ": '" + directive +
                               "' expects 3 integers, got " + std::to_string(values.size()));
            }
            Vec3 v{std::move(values[0]), std::move(values[1]), std::move(values[2])};
            ks.ops.push_back(directive == "add" ? KeyOp::add(std::move(v))
                                                : KeyOp::sub(std::move(v)));
        } else if (directive == "mul") {
            if (!parse_ints(rest, line_no).empty()) {
                throw KeyError("key file line " + std::to_string(line_no) +
                               ": 'mul' takes no arguments; matrix rows follow on the next lines");
            }
            Mat4 m;
            for (unsigned row = 0; row < 4; ++row) {
                while (i < lines.size() && is_blank_or_comment(lines[i])) {
                    ++i;
                }
                if (i >= lines.size()) {
                    throw KeyError("key file line " + std::to_string(line_no) +
                                   ": 'mul' matrix is missing row " + std::to_string(row + 1));
                }
                auto values = parse_ints(lines[i], i + 1);
                if (values.size() != 4) {
                    throw KeyError("key file line " + std::to_string(i + 1) +
                                   ": matrix row expects 4 integers, got " +
                                   std::to_string(values.size()));
                }
                for (unsigned col = 0; col < 4; ++col) {
                    m.at(row, col) = std::move(values[col]);
                }
                ++i;
            }
            try {
                ks.ops.push_back(KeyOp::mul(std::move(m)));
            } catch (const KeyError& e) {
                throw KeyError("key file line " + std::to_string(line_no) + ": " + e.what());
            }
        } else {
            throw KeyError("key file line " + std::to_string(line_no) + ": unknown op '" +
                           directive + "' (expected add, sub or mul)");
        }
    }

    if (ks.ops.empty()) {
        throw KeyError("key file contains no operations");
    }
    return ks;
}

std::string serialize_key(const KeySequence& ks) {
    std::ostringstream out;
    for (const KeyOp& op : ks.ops) {
        switch (op.kind()) {
            case OpKind::add:
            case OpKind::sub: {
                const Vec3& v = op.vector();
                out << (op.kind() == OpKind::add ? "add " : "sub ") << v.x << ' ' << v.y << ' '
                    << v.z << '\n';
                break;
            }
            case OpKind::mul: {
                out << "mul\n";
                const Mat4& m = op.matrix();
                for (unsigned row = 0; row < 4; ++row) {
                    for (unsigned col = 0; col < 4; ++col) {
                        out << m.at(row, col) << (col == 3 ? '\n' : ' ');
                    }
                }
                break;
            }
        }
    }
    return out.str();
}

KeySequence load_key_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw KeyError("cannot open key file: " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_key_text(text.str());
}

void save_key_file(const std::filesystem::path& path, const KeySequence& ks) {
    std::ofstream out(path);
    if (!out) {
        throw KeyError("cannot write key file: " + path.string());
    }
    out << serialize_key(ks);
    if (!out) {
        throw KeyError("failed writing key file: " + path.string());
    }
}

}  // namespace c3dc::points
