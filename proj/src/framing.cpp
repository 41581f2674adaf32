#include "c3dc/framing.hpp"

#include <cstdio>

namespace c3dc::framing {

std::string_view format_name(PacketFormat format) {
    switch (format) {
        case PacketFormat::sync_fine:
            return "sync-fine";
        case PacketFormat::sync_coarse:
            return "sync-coarse";
        case PacketFormat::async_fine:
            return "async-fine";
        case PacketFormat::async_coarse:
            return "async-coarse";
    }
    throw FramingError("unknown packet format");
}

PacketFormat format_from_name(std::string_view name) {
    for (PacketFormat f : {PacketFormat::sync_fine, PacketFormat::sync_coarse,
                           PacketFormat::async_fine, PacketFormat::async_coarse}) {
        if (name == format_name(f)) {
            return f;
        }
    }
    throw FramingError("unknown packet format '" + std::string(name) +
                       "' (expected sync-fine, sync-coarse, async-fine or async-coarse)");
}

bool is_sync(PacketFormat format) {
    return format == PacketFormat::sync_fine || format == PacketFormat::sync_coarse;
}

bool is_fine(PacketFormat format) {
    return format == PacketFormat::sync_fine || format == PacketFormat::async_fine;
}

WireRecord to_wire(const codec::MangledSymbol& m) {
    if (m.residue > 0xFF) {
        throw FramingError("residue " + std::to_string(m.residue) + " does not fit the wire byte");
    }
    if (m.waf < 0 || m.waf > 0xFFFF) {
        throw FramingError("wrap-around factor " + m.waf.str() + " does not fit u16");
    }
    WireRecord r;
    r.color = static_cast<std::uint8_t>(m.residue);
    r.oi.waf = static_cast<std::uint16_t>(m.waf);
    unsigned i = 0;
    for (unsigned width : {m.bpa.t_r, m.bpa.t_g, m.bpa.t_b}) {
        if (width < 3 || width > 0xFF) {
            throw FramingError("bits-per-axis " + std::to_string(width) +
                               " outside the wire range [3, 255]");
        }
        r.oi.bpa[i++] = static_cast<std::uint8_t>(width);
    }
    return r;
}

codec::MangledSymbol to_mangled(const WireRecord& r) {
    codec::MangledSymbol m;
    m.residue = r.color;
    m.waf = r.oi.waf;
    m.bpa = codec::Bpa{r.oi.bpa[0], r.oi.bpa[1], r.oi.bpa[2]};
    return m;
}

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t at) {
    return static_cast<std::uint16_t>((in[at] << 8) | in[at + 1]);
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
    return (std::uint32_t{in[at]} << 24) | (std::uint32_t{in[at + 1]} << 16) |
           (std::uint32_t{in[at + 2]} << 8) | std::uint32_t{in[at + 3]};
}

void put_oi(std::vector<std::uint8_t>& out, const Oi& oi) {
    put_u16(out, oi.waf);
    out.push_back(oi.bpa[0]);
    out.push_back(oi.bpa[1]);
    out.push_back(oi.bpa[2]);
}

Oi get_oi(std::span<const std::uint8_t> in, std::size_t at) {
    Oi oi;
    oi.waf = get_u16(in, at);
    for (unsigned i = 0; i < 3; ++i) {
        const std::uint8_t width = in[at + 2 + i];
        if (width < 3) {
            throw FramingError("bits-per-axis component " + std::to_string(width) +
                               " below the 3-bit floor");
        }
        oi.bpa[i] = width;
    }
    return oi;
}

void check_packet(const Packet& p) {
    if (is_sync(p.format) && !p.mdi) {
        throw FramingError(std::string(format_name(p.format)) + " packets require an MDI block");
    }
    if (!is_sync(p.format) && p.mdi) {
        throw FramingError(std::string(format_name(p.format)) + " packets carry no MDI block");
    }
    if (is_fine(p.format) && p.records.size() != 1) {
        throw FramingError(std::string(format_name(p.format)) +
                           " packets carry exactly one record, got " +
                           std::to_string(p.records.size()));
    }
    if (p.records.size() > kMaxRecordsPerPacket) {
        throw FramingError("record count " + std::to_string(p.records.size()) +
                           " exceeds the per-packet limit " +
                           std::to_string(kMaxRecordsPerPacket));
    }
    for (const WireRecord& r : p.records) {
        for (std::uint8_t width : r.oi.bpa) {
            if (width < 3) {
                throw FramingError("bits-per-axis component " + std::to_string(width) +
                                   " below the 3-bit floor");
            }
        }
    }
}

// Unstuffed size of a packet with n records; the wire adds escapes on top
// for the async formats.
std::size_t unstuffed_size(PacketFormat format, std::size_t n) {
    switch (format) {
        case PacketFormat::sync_fine:
            return 14;
        case PacketFormat::sync_coarse:
            return 10 + 6 * n;
        case PacketFormat::async_fine:
            return 7;  // C + OI + EPM
        case PacketFormat::async_coarse:
            return 2 + 6 * n + 1;
    }
    throw FramingError("unknown packet format");
}

}  // namespace

std::vector<std::uint8_t> stuff_bytes(std::span<const std::uint8_t> payload) {
    std::vector<std::uint8_t> out;
    out.reserve(payload.size());
    for (std::uint8_t byte : payload) {
        if (byte == kEpm) {
            out.push_back(kEsc);
            out.push_back(kEscEpm);
        } else if (byte == kEsc) {
            out.push_back(kEsc);
            out.push_back(kEscEsc);
        } else {
            out.push_back(byte);
        }
    }
    return out;
}

std::vector<std::uint8_t> unstuff_bytes(std::span<const std::uint8_t> stuffed) {
    std::vector<std::uint8_t> out;
    out.reserve(stuffed.size());
    for (std::size_t i = 0; i < stuffed.size(); ++i) {
        if (stuffed[i] == kEpm) {
            throw FramingError("unescaped end-of-packet marker inside payload");
        }
        if (stuffed[i] != kEsc) {
            out.push_back(stuffed[i]);
            continue;
        }
        if (i + 1 >= stuffed.size()) {
            throw FramingError("dangling escape byte at end of frame");
        }
        const std::uint8_t next = stuffed[++i];
        if (next == kEscEpm) {
            out.push_back(kEpm);
        } else if (next == kEscEsc) {
            out.push_back(kEsc);
        } else {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "0x%02X", next);
            throw FramingError(std::string("invalid escape sequence 0xDB ") + buf);
        }
    }
    return out;
}

std::vector<std::uint8_t> build_packet(const Packet& packet) {
    check_packet(packet);
    std::vector<std::uint8_t> body;
    body.reserve(unstuffed_size(packet.format, packet.records.size()));

    if (packet.mdi) {
        put_u32(body, packet.mdi->counter);
        put_u32(body, packet.mdi->packet_number);
    }
    if (!is_fine(packet.format)) {
        put_u16(body, static_cast<std::uint16_t>(packet.records.size()));
    }
    for (const WireRecord& r : packet.records) {
        body.push_back(r.color);
    }
    for (const WireRecord& r : packet.records) {
        put_oi(body, r.oi);
    }

    if (is_sync(packet.format)) {
        return body;
    }
    std::vector<std::uint8_t> out = stuff_bytes(body);
    out.push_back(kEpm);
    return out;
}

namespace {

ParsedPacket parse_sync(PacketFormat format, std::span<const std::uint8_t> bytes) {
    const std::size_t header = format == PacketFormat::sync_fine ? 14 : 10;
    if (bytes.size() < header) {
        throw FramingError("truncated " + std::string(format_name(format)) + " packet: need " +
                           std::to_string(header) + " bytes, have " + std::to_string(bytes.size()));
    }
    Packet p;
    p.format = format;
    p.mdi = Mdi{get_u32(bytes, 0), get_u32(bytes, 4)};

    std::size_t n = 1;
    std::size_t at = 8;
    if (format == PacketFormat::sync_coarse) {
        n = get_u16(bytes, 8);
        at = 10;
        const std::size_t total = 10 + 6 * n;
        if (bytes.size() < total) {
            throw FramingError("truncated sync-coarse packet: declared " + std::to_string(n) +
                               " records need " + std::to_string(total) + " bytes, have " +
                               std::to_string(bytes.size()));
        }
    }

    p.records.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.records[i].color = bytes[at + i];
    }
    const std::size_t oi_at = at + n;
    for (std::size_t i = 0; i < n; ++i) {
        p.records[i].oi = get_oi(bytes, oi_at + 5 * i);
    }
    return ParsedPacket{std::move(p), oi_at + 5 * n};
}

Packet parse_async_payload(PacketFormat format, std::span<const std::uint8_t> payload) {
    Packet p;
    p.format = format;

    std::size_t n = 1;
    std::size_t at = 0;
    if (format == PacketFormat::async_coarse) {
        if (payload.size() < 2) {
            throw FramingError("async-coarse payload too short for its record count field");
        }
        n = get_u16(payload, 0);
        at = 2;
    }
    const std::size_t expected = at + 6 * n;
    if (payload.size() != expected) {
        throw FramingError(std::string(format_name(format)) + " payload length mismatch: expected " +
                           std::to_string(expected) + " bytes, got " +
                           std::to_string(payload.size()));
    }

    p.records.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.records[i].color = payload[at + i];
    }
    const std::size_t oi_at = at + n;
    for (std::size_t i = 0; i < n; ++i) {
        p.records[i].oi = get_oi(payload, oi_at + 5 * i);
    }
    return p;
}

ParsedPacket parse_async(PacketFormat format, std::span<const std::uint8_t> bytes) {
    std::size_t end = bytes.size();
    bool escaped = false;
    bool found = false;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (escaped) {
            escaped = false;
        } else if (bytes[i] == kEsc) {
            escaped = true;
        } else if (bytes[i] == kEpm) {
            end = i;
            found = true;
            break;
        }
    }
    if (!found) {
        throw FramingError("async packet missing its end-of-packet marker (truncated)");
    }
    const auto payload = unstuff_bytes(bytes.subspan(0, end));
    return ParsedPacket{parse_async_payload(format, payload), end + 1};
}

}  // namespace

ParsedPacket parse_packet(PacketFormat format, std::span<const std::uint8_t> bytes) {
    if (is_sync(format)) {
        return parse_sync(format, bytes);
    }
    return parse_async(format, bytes);
}

double Ipr::ratio() const {
    return packet_bytes == 0 ? 0.0 : static_cast<double>(color_bytes) / packet_bytes;
}

double Ipr::wire_ratio() const {
    return wire_bytes == 0 ? 0.0 : static_cast<double>(color_bytes) / wire_bytes;
}

void Ipr::accumulate(const Ipr& other) {
    color_bytes += other.color_bytes;
    packet_bytes += other.packet_bytes;
    wire_bytes += other.wire_bytes;
}

namespace {

std::string ratio_string(std::uint64_t num, std::uint64_t den) {
    if (den == 0) {
        return "0/0";
    }
    std::uint64_t a = num;
    std::uint64_t b = den;
    while (b != 0) {
        const std::uint64_t t = a % b;
        a = b;
        b = t;
    }
    const std::uint64_t g = a == 0 ? 1 : a;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%llu/%llu (%.4f)",
                  static_cast<unsigned long long>(num / g),
                  static_cast<unsigned long long>(den / g),
                  static_cast<double>(num) / static_cast<double>(den));
    return buf;
}

}  // namespace

std::string Ipr::to_string() const {
    return ratio_string(color_bytes, packet_bytes);
}

std::string Ipr::to_wire_string() const {
    return ratio_string(color_bytes, wire_bytes);
}

Ipr ipr(std::span<const std::uint8_t> packet_bytes, PacketFormat format) {
    const ParsedPacket parsed = parse_packet(format, packet_bytes);
    if (parsed.consumed != packet_bytes.size()) {
        throw FramingError("trailing bytes after packet: " +
                           std::to_string(packet_bytes.size() - parsed.consumed));
    }
    Ipr out;
    out.color_bytes = parsed.packet.records.size();
    out.packet_bytes = unstuffed_size(format, parsed.packet.records.size());
    out.wire_bytes = packet_bytes.size();
    return out;
}

std::vector<std::uint8_t> build_preamble(const Preamble& preamble) {
    if (preamble.bits != codec::kDefaultBits) {
        throw FramingError("unsupported symbol width " + std::to_string(preamble.bits));
    }
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    out.push_back(kVersion);
    out.push_back(static_cast<std::uint8_t>(preamble.format));
    out.push_back(static_cast<std::uint8_t>(preamble.bits));
    return out;
}

Preamble parse_preamble(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kPreambleSize) {
        throw FramingError("truncated preamble: need " + std::to_string(kPreambleSize) +
                           " bytes, have " + std::to_string(bytes.size()));
    }
    for (std::size_t i = 0; i < kMagic.size(); ++i) {
        if (bytes[i] != kMagic[i]) {
            throw FramingError("bad preamble magic");
        }
    }
    if (bytes[4] != kVersion) {
        throw FramingError("unsupported protocol version " + std::to_string(bytes[4]));
    }
    if (bytes[5] < 1 || bytes[5] > 4) {
        throw FramingError("invalid packet format byte " + std::to_string(bytes[5]));
    }
    if (bytes[6] != codec::kDefaultBits) {
        throw FramingError("unsupported symbol width " + std::to_string(bytes[6]));
    }
    return Preamble{static_cast<PacketFormat>(bytes[5]), bytes[6]};
}

void StreamParser::feed(std::span<const std::uint8_t> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Packet> StreamParser::next() {
    if (is_sync(format_)) {
        const std::size_t header = format_ == PacketFormat::sync_fine ? 14 : 10;
        if (buf_.size() < header) {
            return std::nullopt;
        }
        std::size_t total = header;
        if (format_ == PacketFormat::sync_coarse) {
            total = 10 + 6 * static_cast<std::size_t>((buf_[8] << 8) | buf_[9]);
            if (buf_.size() < total) {
                return std::nullopt;
            }
        }
        ParsedPacket parsed = parse_packet(format_, std::span(buf_.data(), total));
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(parsed.consumed));
        return std::move(parsed.packet);
    }

    // Resume the EPM scan where the previous call stopped.
    while (scan_pos_ < buf_.size()) {
        const std::uint8_t byte = buf_[scan_pos_];
        if (scan_escaped_) {
            scan_escaped_ = false;
        } else if (byte == kEsc) {
            scan_escaped_ = true;
        } else if (byte == kEpm) {
            ParsedPacket parsed = parse_packet(format_, std::span(buf_.data(), scan_pos_ + 1));
            buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(parsed.consumed));
            scan_pos_ = 0;
            scan_escaped_ = false;
            return std::move(parsed.packet);
        }
        ++scan_pos_;
    }
    return std::nullopt;
}

}  // namespace c3dc::framing
