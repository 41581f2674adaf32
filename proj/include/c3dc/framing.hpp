#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "c3dc/codec.hpp"
#include "c3dc/errors.hpp"

namespace c3dc::framing {

// Wire format byte values; also used as the preamble's format byte.
enum class PacketFormat : std::uint8_t {
    sync_fine = 1,
    sync_coarse = 2,
    async_fine = 3,
    async_coarse = 4,
};

std::string_view format_name(PacketFormat format);
PacketFormat format_from_name(std::string_view name);
bool is_sync(PacketFormat format);
bool is_fine(PacketFormat format);

// End-of-packet marker and its byte-stuffing escapes. Within an async
// payload, 0xC0 is rewritten to 0xDB 0xDC and 0xDB to 0xDB 0xDD.
inline constexpr std::uint8_t kEpm = 0xC0;
inline constexpr std::uint8_t kEsc = 0xDB;
inline constexpr std::uint8_t kEscEpm = 0xDC;
inline constexpr std::uint8_t kEscEsc = 0xDD;

inline constexpr std::size_t kMaxRecordsPerPacket = 65535;

// Meta-data information block of the synchronous formats. The counter
// counts symbols, the packet number counts packets, both from 0.
struct Mdi {
    std::uint32_t counter = 0;
    std::uint32_t packet_number = 0;

    bool operator==(const Mdi&) const = default;
};

// Other-information block carried with every color byte: the record's
// wrap-around factor and bits-per-axis triple (t_r, t_g, t_b).
struct Oi {
    std::uint16_t waf = 0;
    std::array<std::uint8_t, 3> bpa{3, 3, 3};

    bool operator==(const Oi&) const = default;
};

// One record on the wire: the mangled color byte C plus its OI.
struct WireRecord {
    std::uint8_t color = 0;
    Oi oi;

    bool operator==(const WireRecord&) const = default;
};

struct Packet {
    PacketFormat format = PacketFormat::async_coarse;
    std::optional<Mdi> mdi;  // sync formats only
    std::vector<WireRecord> records;

    bool operator==(const Packet&) const = default;
};

// Conversions between the cipher-side mangled symbol and its wire form.
// Rejects records exceeding the wire limits (waf > u16, bpa > u8).
WireRecord to_wire(const codec::MangledSymbol& m);
codec::MangledSymbol to_mangled(const WireRecord& r);

std::vector<std::uint8_t> stuff_bytes(std::span<const std::uint8_t> payload);
// Input must not contain the terminator; throws on dangling or invalid
// escapes.
std::vector<std::uint8_t> unstuff_bytes(std::span<const std::uint8_t> stuffed);

// Exact layouts, all multi-byte integers big-endian:
//   sync_fine    MDI(8) || C(1) || OI(5)                      -- 14 bytes
//   sync_coarse  MDI(8) || n:u16 || n*C(1) || n*OI(5)
//   async_fine   stuff(C(1) || OI(5)) || EPM
//   async_coarse stuff(n:u16 || n*C(1) || n*OI(5)) || EPM
// where MDI = counter:u32 || packet_number:u32 and OI = waf:u16 || bpa:3*u8.
std::vector<std::uint8_t> build_packet(const Packet& packet);

struct ParsedPacket {
    Packet packet;
    std::size_t consumed = 0;
};

// Parses one packet from the front of `bytes`; never consumes past its own
// frame. Trailing bytes are left untouched and reported via `consumed`.
ParsedPacket parse_packet(PacketFormat format, std::span<const std::uint8_t> bytes);

// Information-to-packet ratio bookkeeping. packet_bytes counts the
// unstuffed packet (EPM included for async); wire_bytes counts bytes as
// transmitted.
struct Ipr {
    std::uint64_t color_bytes = 0;
    std::uint64_t packet_bytes = 0;
    std::uint64_t wire_bytes = 0;

    double ratio() const;
    double wire_ratio() const;
    void accumulate(const Ipr& other);

    // Reduced fraction plus decimal, e.g. "1/14 (0.0714)".
    std::string to_string() const;
    std::string to_wire_string() const;
};

Ipr ipr(std::span<const std::uint8_t> packet_bytes, PacketFormat format);

// Stream preamble preceding all packets on any transport:
// magic "C3DC" || version 0x01 || format byte || L byte.
inline constexpr std::array<std::uint8_t, 4> kMagic{0x43, 0x33, 0x44, 0x43};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kPreambleSize = 7;

struct Preamble {
    PacketFormat format = PacketFormat::async_coarse;
    unsigned bits = codec::kDefaultBits;

    bool operator==(const Preamble&) const = default;
};

std::vector<std::uint8_t> build_preamble(const Preamble& preamble);
Preamble parse_preamble(std::span<const std::uint8_t> bytes);

// Incremental packet reader: feed arbitrarily chunked bytes, pull packets
// as they complete. Frame boundaries do not depend on chunking.
class StreamParser {
public:
    explicit StreamParser(PacketFormat format) : format_(format) {}

    void feed(std::span<const std::uint8_t> bytes);
    std::optional<Packet> next();

    // Bytes buffered but not yet forming a complete packet.
    std::size_t pending() const { return buf_.size(); }

private:
    PacketFormat format_;
    std::vector<std::uint8_t> buf_;
    std::size_t scan_pos_ = 0;   // async: resume point for the EPM scan
    bool scan_escaped_ = false;  // async: scan state across feeds
};

}  // namespace c3dc::framing
