#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "c3dc/codec.hpp"
#include "c3dc/points.hpp"

namespace c3dc::cipher {

// Wire limits, enforced at encryption time so every encrypted record is
// representable in the packet formats.
inline constexpr std::uint32_t kMaxWireWaf = 65535;
inline constexpr unsigned kMaxWireBpaBits = 255;

enum class ScheduleMode { fixed, per_symbol };

// Key material for a whole message: one sequence applied to every symbol, or
// a list of sequences cycled over message positions.
struct KeySchedule {
    ScheduleMode mode = ScheduleMode::fixed;
    std::vector<points::KeySequence> sequences;

    // When set, every coordinate is reduced mod 2^N after each op, on both
    // the encrypt and decrypt paths. Reconstruction is only exact for
    // add/sub keys, so schedules containing mul ops reject this mode.
    std::optional<unsigned> per_axis_modulo;

    static KeySchedule fixed_key(points::KeySequence seq,
                                 std::optional<unsigned> per_axis_modulo = std::nullopt);
    static KeySchedule cycling(std::vector<points::KeySequence> seqs,
                               std::optional<unsigned> per_axis_modulo = std::nullopt);

    const points::KeySequence& sequence_for(std::size_t position) const;
};

// Throws CipherError if the schedule is unusable (no sequences, empty
// sequence, bad per-axis modulo, mul op under per-axis modulo).
void validate_schedule(const KeySchedule& schedule);

// 64-bit FNV-1a over the canonical key text of all sequences. Purely
// diagnostic: catches wrong-key use early, carries no security weight.
std::uint64_t fingerprint(const KeySchedule& schedule);

struct EncryptedRecord {
    codec::MangledSymbol mangled;

    bool operator==(const EncryptedRecord&) const = default;
};

struct MessageConfig {
    unsigned bits = codec::kDefaultBits;
    // Absent when the message was reassembled from the wire, which carries
    // no fingerprint field.
    std::optional<std::uint64_t> key_fingerprint;

    bool operator==(const MessageConfig&) const = default;
};

struct EncryptedMessage {
    std::vector<EncryptedRecord> records;
    MessageConfig config;

    bool operator==(const EncryptedMessage&) const = default;
};

// Per symbol: lift to 3D, apply the position's key sequence, mangle.
// Throws CipherError if a final coordinate is negative (key unsuitable for
// the message) or a record exceeds the wire limits.
EncryptedMessage encrypt(std::span<const std::uint8_t> message, const KeySchedule& schedule);

// Per record: demangle, apply the inverted key sequence, relinearize.
// Throws CipherError on a stored-fingerprint mismatch or when a
// reconstructed coordinate falls outside [0, 7] (wrong key or corrupt
// record).
std::vector<std::uint8_t> decrypt(const EncryptedMessage& message, const KeySchedule& schedule);

// Same contract as encrypt for single-sequence schedules, implemented by
// stacking all points into an n x 4 matrix and applying each key op once to
// the whole stack. Rejects per-symbol schedules.
EncryptedMessage encrypt_block(std::span<const std::uint8_t> message, const KeySchedule& schedule);

}  // namespace c3dc::cipher
