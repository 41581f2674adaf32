#pragma once

#include <array>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "c3dc/cipher.hpp"
#include "c3dc/framing.hpp"

namespace c3dc::transport {

// Ordered, reliable byte stream. One writer and one reader may operate
// concurrently; lossy or reordering channels are out of scope.
class Channel {
public:
    virtual ~Channel() = default;

    virtual void write(std::span<const std::uint8_t> data) = 0;
    // Blocks until data is available; returns 0 at end of stream.
    virtual std::size_t read(std::uint8_t* out, std::size_t max) = 0;
    // Signals end of stream to the reader; the reader side stays usable.
    virtual void close_write() = 0;
};

// In-process queue channel, safe for one concurrent writer and reader.
class MemoryChannel final : public Channel {
public:
    void write(std::span<const std::uint8_t> data) override;
    std::size_t read(std::uint8_t* out, std::size_t max) override;
    void close_write() override;

private:
    std::mutex mutex_;
    std::condition_variable ready_;
    std::vector<std::uint8_t> data_;
    std::size_t head_ = 0;
    bool closed_ = false;
};

class FileWriteChannel final : public Channel {
public:
    explicit FileWriteChannel(const std::filesystem::path& path);

    void write(std::span<const std::uint8_t> data) override;
    std::size_t read(std::uint8_t* out, std::size_t max) override;
    void close_write() override;

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

class FileReadChannel final : public Channel {
public:
    explicit FileReadChannel(const std::filesystem::path& path);

    void write(std::span<const std::uint8_t> data) override;
    std::size_t read(std::uint8_t* out, std::size_t max) override;
    void close_write() override {}

private:
    std::filesystem::path path_;
    std::ifstream in_;
};

// Plain TCP byte stream over a connected socket.
class TcpChannel final : public Channel {
public:
    // Retries briefly while the peer is not yet listening.
    static TcpChannel connect(const std::string& host, std::uint16_t port);

    TcpChannel(TcpChannel&& other) noexcept;
    TcpChannel& operator=(TcpChannel&& other) noexcept;
    TcpChannel(const TcpChannel&) = delete;
    TcpChannel& operator=(const TcpChannel&) = delete;
    ~TcpChannel() override;

    void write(std::span<const std::uint8_t> data) override;
    std::size_t read(std::uint8_t* out, std::size_t max) override;
    void close_write() override;

private:
    friend class TcpListener;
    explicit TcpChannel(int fd) : fd_(fd) {}

    int fd_ = -1;
};

class TcpListener {
public:
    // port 0 binds an ephemeral port, readable via port().
    TcpListener(const std::string& host, std::uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const { return port_; }
    TcpChannel accept_one();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

// The simulated on-channel unit: a 24-bit color paired with the encrypted
// record it was modulated from, so decoding is lossless.
struct ChannelSymbol {
    std::array<std::uint8_t, 3> color{};
    cipher::EncryptedRecord record;

    bool operator==(const ChannelSymbol&) const = default;
};

// Color of a reconstructed point: each axis value reduced mod 256.
std::array<std::uint8_t, 3> point_color(const codec::AxisTriple& t);

ChannelSymbol light_encode(const cipher::EncryptedRecord& record);
cipher::EncryptedRecord light_decode(const ChannelSymbol& symbol);

// Receiver-side counter/packet-number verification for the sync formats.
// Any mismatch is fatal; there is no resynchronization protocol.
struct SyncState {
    std::uint32_t expected_counter = 0;
    std::uint32_t expected_packet = 0;

    void verify_and_advance(const framing::Mdi& mdi, std::size_t record_count);
};

struct SendReport {
    std::size_t symbol_count = 0;
    std::size_t packet_count = 0;
    framing::Ipr ipr;
};

// Encrypts, frames per format, writes the preamble followed by the packets,
// then closes the write side. Coarse packets carry up to
// max_records_per_packet records each.
SendReport send(std::span<const std::uint8_t> message, const cipher::KeySchedule& schedule,
                framing::PacketFormat format, Channel& channel,
                std::size_t max_records_per_packet = framing::kMaxRecordsPerPacket);

struct ReceiveResult {
    std::vector<std::uint8_t> message;
    framing::PacketFormat format = framing::PacketFormat::async_coarse;
    std::size_t packet_count = 0;
    std::size_t symbol_count = 0;
};

// Reads the preamble, parses packets to end of stream (verifying sync state
// for the sync formats) and decrypts the collected records.
ReceiveResult receive(const cipher::KeySchedule& schedule, Channel& channel);

}  // namespace c3dc::transport
