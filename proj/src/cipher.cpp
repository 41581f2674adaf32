#include "c3dc/cipher.hpp"

#include <array>
#include <string>

namespace c3dc::cipher {

using points::HomogeneousPoint;
using points::KeyOp;
using points::KeySequence;
using points::OpKind;

KeySchedule KeySchedule::fixed_key(KeySequence seq, std::optional<unsigned> per_axis_modulo) {
    KeySchedule s;
    s.mode = ScheduleMode::fixed;
    s.sequences.push_back(std::move(seq));
    s.per_axis_modulo = per_axis_modulo;
    validate_schedule(s);
    return s;
}

KeySchedule KeySchedule::cycling(std::vector<KeySequence> seqs,
                                 std::optional<unsigned> per_axis_modulo) {
    KeySchedule s;
    s.mode = ScheduleMode::per_symbol;
    s.sequences = std::move(seqs);
    s.per_axis_modulo = per_axis_modulo;
    validate_schedule(s);
    return s;
}

const KeySequence& KeySchedule::sequence_for(std::size_t position) const {
    if (mode == ScheduleMode::fixed) {
        return sequences.front();
    }
    return sequences[position % sequences.size()];
}

void validate_schedule(const KeySchedule& schedule) {
    if (schedule.sequences.empty()) {
        throw CipherError("key schedule has no sequences");
    }
    if (schedule.mode == ScheduleMode::fixed && schedule.sequences.size() != 1) {
        throw CipherError("fixed schedule must hold exactly one sequence");
    }
    for (const auto& seq : schedule.sequences) {
        if (seq.ops.empty()) {
            throw CipherError("key sequence is empty");
        }
    }
    if (schedule.per_axis_modulo) {
        if (*schedule.per_axis_modulo < 4) {
            throw CipherError("per-axis modulo width must be >= 4, got " +
                              std::to_string(*schedule.per_axis_modulo));
        }
        for (const auto& seq : schedule.sequences) {
            for (const auto& op : seq.ops) {
                if (op.kind() == OpKind::mul) {
                    throw CipherError(
                        "per-axis modulo supports add/sub keys only; mul ops do not reconstruct "
                        "exactly under per-dimension reduction");
                }
            }
        }
    }
}

std::uint64_t fingerprint(const KeySchedule& schedule) {
    std::string text;
    for (std::size_t i = 0; i < schedule.sequences.size(); ++i) {
        text += "sequence " + std::to_string(i) + "\n";
        text += points::serialize_key(schedule.sequences[i]);
    }
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

void reduce_per_axis(HomogeneousPoint& p, const BigInt& modulus) {
    for (BigInt* c : {&p.r, &p.g, &p.b}) {
        *c %= modulus;
        if (*c < 0) {
            *c += modulus;
        }
    }
}

HomogeneousPoint apply_with_config(HomogeneousPoint p, const KeySequence& seq,
                                   const std::optional<unsigned>& per_axis_modulo) {
    if (!per_axis_modulo) {
        return points::apply_sequence(p, seq);
    }
    const BigInt modulus = BigInt{1} << *per_axis_modulo;
    for (const KeyOp& op : seq.ops) {
        p = points::apply_op(p, op);
        reduce_per_axis(p, modulus);
    }
    return p;
}

const char* axis_name(unsigned i) {
    return i == 0 ? "r" : (i == 1 ? "g" : "b");
}

EncryptedRecord finish_record(const HomogeneousPoint& p, std::size_t position) {
    const std::array<const BigInt*, 3> axes{&p.r, &p.g, &p.b};
    for (unsigned i = 0; i < 3; ++i) {
        if (*axes[i] < 0) {
            throw CipherError("encryption failed at position " + std::to_string(position) +
                              ": axis " + axis_name(i) + " is negative (" + axes[i]->str() +
                              ") after key transforms; key unsuitable for this message");
        }
    }
    codec::MangledSymbol m = codec::mangle(codec::AxisTriple{p.r, p.g, p.b});
    if (m.waf > kMaxWireWaf) {
        throw CipherError("encryption failed at position " + std::to_string(position) +
                          ": wrap-around factor " + m.waf.str() + " exceeds the wire limit " +
                          std::to_string(kMaxWireWaf));
    }
    for (unsigned width : {m.bpa.t_r, m.bpa.t_g, m.bpa.t_b}) {
        if (width > kMaxWireBpaBits) {
            throw CipherError("encryption failed at position " + std::to_string(position) +
                              ": bits-per-axis " + std::to_string(width) +
                              " exceeds the wire limit " + std::to_string(kMaxWireBpaBits));
        }
    }
    return EncryptedRecord{std::move(m)};
}

}  // namespace

EncryptedMessage encrypt(std::span<const std::uint8_t> message, const KeySchedule& schedule) {
    validate_schedule(schedule);
    EncryptedMessage out;
    out.config = MessageConfig{codec::kDefaultBits, fingerprint(schedule)};
    out.records.reserve(message.size());
    for (std::size_t i = 0; i < message.size(); ++i) {
        const codec::AxisTriple t = codec::linear_to_3d(codec::Symbol{message[i]});
        HomogeneousPoint p{t.r, t.g, t.b};
        p = apply_with_config(std::move(p), schedule.sequence_for(i), schedule.per_axis_modulo);
        out.records.push_back(finish_record(p, i));
    }
    return out;
}

std::vector<std::uint8_t> decrypt(const EncryptedMessage& message, const KeySchedule& schedule) {
    validate_schedule(schedule);
    if (message.config.key_fingerprint &&
        *message.config.key_fingerprint != fingerprint(schedule)) {
        throw CipherError("key fingerprint mismatch: message was encrypted with a different key");
    }

    // Invert each distinct sequence once, not per record.
    std::vector<KeySequence> inverses;
    inverses.reserve(schedule.sequences.size());
    for (const auto& seq : schedule.sequences) {
        inverses.push_back(points::invert_sequence(seq));
    }

    std::vector<std::uint8_t> out;
    out.reserve(message.records.size());
    for (std::size_t i = 0; i < message.records.size(); ++i) {
        const codec::AxisTriple t = codec::demangle(message.records[i].mangled, message.config.bits);
        HomogeneousPoint p{t.r, t.g, t.b};
        const KeySequence& inverse = schedule.mode == ScheduleMode::fixed
                                         ? inverses.front()
                                         : inverses[i % inverses.size()];
        p = apply_with_config(std::move(p), inverse, schedule.per_axis_modulo);

        const std::array<const BigInt*, 3> axes{&p.r, &p.g, &p.b};
        for (unsigned a = 0; a < 3; ++a) {
            if (*axes[a] < 0 || *axes[a] > 7) {
                throw CipherError("decryption failed at position " + std::to_string(i) +
                                  ": axis " + axis_name(a) + " out of range [0, 7] (got " +
                                  axes[a]->str() + "); wrong key or corrupt record");
            }
        }
        out.push_back(static_cast<std::uint8_t>(
            codec::relinearize(codec::AxisTriple{p.r, p.g, p.b}).index));
    }
    return out;
}

namespace {

// n x 4 stack of homogeneous rows, manipulated in combined manner.
using Stack = std::vector<std::array<BigInt, 4>>;

void stack_mul(Stack& stack, const points::Mat4& m) {
    for (auto& row : stack) {
        std::array<BigInt, 4> out;
        for (unsigned col = 0; col < 4; ++col) {
            out[col] = row[0] * m.at(0, col) + row[1] * m.at(1, col) + row[2] * m.at(2, col) +
                       row[3] * m.at(3, col);
        }
        row = std::move(out);
    }
}

void stack_shift(Stack& stack, const points::Vec3& v, int sign) {
    for (auto& row : stack) {
        row[0] += sign * v.x;
        row[1] += sign * v.y;
        row[2] += sign * v.z;
    }
}

}  // namespace

EncryptedMessage encrypt_block(std::span<const std::uint8_t> message,
                               const KeySchedule& schedule) {
    validate_schedule(schedule);
    if (schedule.mode != ScheduleMode::fixed) {
        throw CipherError("block mode requires a single-sequence (fixed) schedule");
    }

    Stack stack;
    stack.reserve(message.size());
    for (std::uint8_t byte : message) {
        const codec::AxisTriple t = codec::linear_to_3d(codec::Symbol{byte});
        stack.push_back({t.r, t.g, t.b, BigInt{1}});
    }

    const std::optional<unsigned>& pam = schedule.per_axis_modulo;
    const BigInt modulus = pam ? (BigInt{1} << *pam) : BigInt{0};
    for (const KeyOp& op : schedule.sequences.front().ops) {
        switch (op.kind()) {
            case OpKind::add:
                stack_shift(stack, op.vector(), +1);
                break;
            case OpKind::sub:
                stack_shift(stack, op.vector(), -1);
                break;
            case OpKind::mul:
                stack_mul(stack, op.matrix());
                break;
        }
        if (pam) {
            for (auto& row : stack) {
                for (unsigned c = 0; c < 3; ++c) {
                    row[c] %= modulus;
                    if (row[c] < 0) {
                        row[c] += modulus;
                    }
                }
            }
        }
    }

    EncryptedMessage out;
    out.config = MessageConfig{codec::kDefaultBits, fingerprint(schedule)};
    out.records.reserve(stack.size());
    for (std::size_t i = 0; i < stack.size(); ++i) {
        out.records.push_back(
            finish_record(HomogeneousPoint{stack[i][0], stack[i][1], stack[i][2]}, i));
    }
    return out;
}

}  // namespace c3dc::cipher
