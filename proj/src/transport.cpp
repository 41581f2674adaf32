#include "c3dc/transport.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>
#include <utility>

namespace c3dc::transport {

void MemoryChannel::write(std::span<const std::uint8_t> data) {
    std::lock_guard lock(mutex_);
    if (closed_) {
        throw TransportError("write on a closed memory channel");
    }
    data_.insert(data_.end(), data.begin(), data.end());
    ready_.notify_all();
}

std::size_t MemoryChannel::read(std::uint8_t* out, std::size_t max) {
    std::unique_lock lock(mutex_);
    ready_.wait(lock, [this] { return head_ < data_.size() || closed_; });
    if (head_ == data_.size()) {
        return 0;  // closed and drained
    }
    const std::size_t n = std::min(max, data_.size() - head_);
    std::memcpy(out, data_.data() + head_, n);
    head_ += n;
    if (head_ == data_.size()) {
        data_.clear();
        head_ = 0;
    }
    return n;
}

void MemoryChannel::close_write() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    ready_.notify_all();
}

FileWriteChannel::FileWriteChannel(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
        throw TransportError("cannot open file for writing: " + path.string());
    }
}

void FileWriteChannel::write(std::span<const std::uint8_t> data) {
    out_.write(reinterpret_cast<const char*>(data.data()),
               static_cast<std::streamsize>(data.size()));
    if (!out_) {
        throw TransportError("write failed: " + path_.string());
    }
}

std::size_t FileWriteChannel::read(std::uint8_t*, std::size_t) {
    throw TransportError("file write channel is write-only");
}

void FileWriteChannel::close_write() {
    out_.close();
    if (out_.fail()) {
        throw TransportError("close failed: " + path_.string());
    }
}

FileReadChannel::FileReadChannel(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
    if (!in_) {
        throw TransportError("cannot open file for reading: " + path.string());
    }
}

void FileReadChannel::write(std::span<const std::uint8_t>) {
    throw TransportError("file read channel is read-only");
}

std::size_t FileReadChannel::read(std::uint8_t* out, std::size_t max) {
    in_.read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(max));
    if (in_.bad()) {
        throw TransportError("read failed: " + path_.string());
    }
    return static_cast<std::size_t>(in_.gcount());
}

namespace {

struct AddrInfo {
    addrinfo* list = nullptr;
    ~AddrInfo() {
        if (list) {
            freeaddrinfo(list);
        }
    }
};

AddrInfo resolve(const std::string& host, std::uint16_t port, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) {
        hints.ai_flags = AI_PASSIVE;
    }
    AddrInfo out;
    const int rc = getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &out.list);
    if (rc != 0) {
        throw TransportError("cannot resolve " + host + ": " + gai_strerror(rc));
    }
    return out;
}

[[noreturn]] void throw_errno(const std::string& what) {
    throw TransportError(what + ": " + std::strerror(errno));
}

}  // namespace

TcpChannel TcpChannel::connect(const std::string& host, std::uint16_t port) {
    const AddrInfo addr = resolve(host, port, false);
    // The receiver may still be starting up; retry refused connections for a
    // few seconds before giving up.
    for (int attempt = 0;; ++attempt) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) {
            throw_errno("socket");
        }
        if (::connect(fd, addr.list->ai_addr, addr.list->ai_addrlen) == 0) {
            return TcpChannel(fd);
        }
        const int err = errno;
        ::close(fd);
        if (err != ECONNREFUSED || attempt >= 50) {
            errno = err;
            throw_errno("connect to " + host + ":" + std::to_string(port));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
}

TcpChannel::TcpChannel(TcpChannel&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}

TcpChannel& TcpChannel::operator=(TcpChannel&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) {
            ::close(fd_);
        }
        fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
}

TcpChannel::~TcpChannel() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

void TcpChannel::write(std::span<const std::uint8_t> data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw_errno("send");
        }
        sent += static_cast<std::size_t>(n);
    }
}

std::size_t TcpChannel::read(std::uint8_t* out, std::size_t max) {
    while (true) {
        const ssize_t n = ::recv(fd_, out, max, 0);
        if (n >= 0) {
            return static_cast<std::size_t>(n);
        }
        if (errno != EINTR) {
            throw_errno("recv");
        }
    }
}

void TcpChannel::close_write() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_WR);
    }
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
    const AddrInfo addr = resolve(host, port, true);
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) {
        throw_errno("socket");
    }
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd_, addr.list->ai_addr, addr.list->ai_addrlen) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        errno = err;
        throw_errno("bind " + host + ":" + std::to_string(port));
    }
    if (::listen(fd_, 1) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        errno = err;
        throw_errno("listen");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len) != 0) {
        throw_errno("getsockname");
    }
    port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

TcpChannel TcpListener::accept_one() {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) {
        throw_errno("accept");
    }
    return TcpChannel(fd);
}

std::array<std::uint8_t, 3> point_color(const codec::AxisTriple& t) {
    return {
        static_cast<std::uint8_t>(t.r % 256),
        static_cast<std::uint8_t>(t.g % 256),
        static_cast<std::uint8_t>(t.b % 256),
    };
}

ChannelSymbol light_encode(const cipher::EncryptedRecord& record) {
    const codec::AxisTriple t = codec::demangle(record.mangled);
    return ChannelSymbol{point_color(t), record};
}

cipher::EncryptedRecord light_decode(const ChannelSymbol& symbol) {
    return symbol.record;
}

void SyncState::verify_and_advance(const framing::Mdi& mdi, std::size_t record_count) {
    if (mdi.counter != expected_counter) {
        throw TransportError("desync: expected counter " + std::to_string(expected_counter) +
                             ", got " + std::to_string(mdi.counter));
    }
    if (mdi.packet_number != expected_packet) {
        throw TransportError("desync: expected packet number " + std::to_string(expected_packet) +
                             ", got " + std::to_string(mdi.packet_number));
    }
    expected_counter += static_cast<std::uint32_t>(record_count);
    expected_packet += 1;
}

SendReport send(std::span<const std::uint8_t> message, const cipher::KeySchedule& schedule,
                framing::PacketFormat format, Channel& channel,
                std::size_t max_records_per_packet) {
    if (max_records_per_packet < 1 || max_records_per_packet > framing::kMaxRecordsPerPacket) {
        throw TransportError("records per packet must be in [1, " +
                             std::to_string(framing::kMaxRecordsPerPacket) + "]");
    }

    const cipher::EncryptedMessage encrypted = cipher::encrypt(message, schedule);

    std::vector<framing::WireRecord> records;
    records.reserve(encrypted.records.size());
    for (const auto& record : encrypted.records) {
        records.push_back(framing::to_wire(light_encode(record).record.mangled));
    }

    SendReport report;
    report.symbol_count = records.size();

    channel.write(framing::build_preamble(framing::Preamble{format, encrypted.config.bits}));

    const std::size_t chunk = framing::is_fine(format) ? 1 : max_records_per_packet;
    std::uint32_t counter = 0;
    std::uint32_t packet_number = 0;
    for (std::size_t at = 0; at < records.size(); at += chunk) {
        const std::size_t n = std::min(chunk, records.size() - at);
        framing::Packet packet;
        packet.format = format;
        if (framing::is_sync(format)) {
            packet.mdi = framing::Mdi{counter, packet_number};
        }
        packet.records.assign(records.begin() + static_cast<std::ptrdiff_t>(at),
                              records.begin() + static_cast<std::ptrdiff_t>(at + n));
        const std::vector<std::uint8_t> bytes = framing::build_packet(packet);
        channel.write(bytes);
        report.ipr.accumulate(framing::ipr(bytes, format));
        counter += static_cast<std::uint32_t>(n);
        packet_number += 1;
        report.packet_count += 1;
    }

    channel.close_write();
    return report;
}

ReceiveResult receive(const cipher::KeySchedule& schedule, Channel& channel) {
    std::uint8_t chunk[4096];

    std::vector<std::uint8_t> head;
    while (head.size() < framing::kPreambleSize) {
        const std::size_t n = channel.read(chunk, sizeof(chunk));
        if (n == 0) {
            throw TransportError("stream ended before a complete preamble (" +
                                 std::to_string(head.size()) + " bytes)");
        }
        head.insert(head.end(), chunk, chunk + n);
    }
    const framing::Preamble preamble = framing::parse_preamble(head);

    framing::StreamParser parser(preamble.format);
    parser.feed(std::span(head).subspan(framing::kPreambleSize));

    SyncState sync;
    std::vector<framing::WireRecord> records;
    std::size_t packet_count = 0;
    const auto drain = [&] {
        while (auto packet = parser.next()) {
            if (framing::is_sync(preamble.format)) {
                sync.verify_and_advance(*packet->mdi, packet->records.size());
            }
            records.insert(records.end(), packet->records.begin(), packet->records.end());
            ++packet_count;
        }
    };

    drain();
    while (true) {
        const std::size_t n = channel.read(chunk, sizeof(chunk));
        if (n == 0) {
            break;
        }
        parser.feed(std::span(chunk, n));
        drain();
    }
    if (parser.pending() != 0) {
        throw TransportError("stream ended mid-packet with " + std::to_string(parser.pending()) +
                             " unconsumed bytes");
    }

    cipher::EncryptedMessage encrypted;
    encrypted.config = cipher::MessageConfig{preamble.bits, std::nullopt};
    encrypted.records.reserve(records.size());
    for (const framing::WireRecord& r : records) {
        encrypted.records.push_back(
            light_decode(ChannelSymbol{{}, cipher::EncryptedRecord{framing::to_mangled(r)}}));
    }

    ReceiveResult result;
    result.format = preamble.format;
    result.packet_count = packet_count;
    result.symbol_count = records.size();
    result.message = cipher::decrypt(encrypted, schedule);
    return result;
}

}  // namespace c3dc::transport
