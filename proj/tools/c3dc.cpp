#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "c3dc/cipher.hpp"
#include "c3dc/codec.hpp"
#include "c3dc/framing.hpp"
#include "c3dc/points.hpp"
#include "c3dc/transport.hpp"

namespace {

using namespace c3dc;

// Exit codes, one per failing layer.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;      // key files, containers, preambles
constexpr int kExitCipher = 3;     // encryption/decryption failures
constexpr int kExitTransport = 4;  // channels, desync
constexpr int kExitIo = 5;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open input file: " + path.string());
    }
    std::vector<std::uint8_t> out;
    char chunk[4096];
    while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
        out.insert(out.end(), chunk, chunk + in.gcount());
    }
    if (in.bad()) {
        throw IoError("read failed: " + path.string());
    }
    return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open output file: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

void write_message(const std::string& out_path, std::span<const std::uint8_t> data) {
    if (out_path.empty()) {
        std::cout.write(reinterpret_cast<const char*>(data.data()),
                        static_cast<std::streamsize>(data.size()));
        std::cout.flush();
    } else {
        write_file(out_path, data);
    }
}

// Diagnostics go to stderr so stdout stays clean for message data.
void report(const std::string& line) {
    std::cerr << line << '\n';
}

void report_send(const transport::SendReport& r) {
    report("symbols: " + std::to_string(r.symbol_count));
    report("packets: " + std::to_string(r.packet_count));
    report("ipr: " + r.ipr.to_string());
    report("ipr on wire: " + r.ipr.to_wire_string());
}

std::pair<std::string, std::uint16_t> split_endpoint(const std::string& endpoint) {
    const auto colon = endpoint.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size()) {
        throw IoError("endpoint must be host:port, got '" + endpoint + "'");
    }
    const std::string host = endpoint.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(endpoint.substr(colon + 1));
    } catch (const std::exception&) {
        port = -1;
    }
    if (port < 0 || port > 65535) {
        throw IoError("invalid port in endpoint '" + endpoint + "'");
    }
    return {host, static_cast<std::uint16_t>(port)};
}

cipher::KeySchedule load_schedule(const std::string& key_path, unsigned per_axis_modulo) {
    points::KeySequence seq = points::load_key_file(key_path);
    std::optional<unsigned> pam;
    if (per_axis_modulo != 0) {
        pam = per_axis_modulo;
    }
    return cipher::KeySchedule::fixed_key(std::move(seq), pam);
}

// --- keygen -----------------------------------------------------------

std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t bound) {
    return rng() % bound;
}

using Mat3 = std::array<std::array<BigInt, 3>, 3>;

Mat3 mat3_identity() {
    Mat3 m{};
    for (unsigned i = 0; i < 3; ++i) {
        m[i][i] = 1;
    }
    return m;
}

Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
    Mat3 out{};
    for (unsigned r = 0; r < 3; ++r) {
        for (unsigned c = 0; c < 3; ++c) {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c] + a[r][2] * b[2][c];
        }
    }
    return out;
}

// Permutation of the three axes, optionally with sign flips.
Mat3 random_permutation(std::mt19937_64& rng, bool signed_entries) {
    std::array<unsigned, 3> perm{0, 1, 2};
    const unsigned first = static_cast<unsigned>(next_below(rng, 3));
    std::swap(perm[0], perm[first]);
    if (next_below(rng, 2) == 1) {
        std::swap(perm[1], perm[2]);
    }
    Mat3 m{};
    for (unsigned r = 0; r < 3; ++r) {
        const int sign = signed_entries && next_below(rng, 2) == 1 ? -1 : 1;
        m[r][perm[r]] = sign;
    }
    return m;
}

// Identity plus a single off-diagonal entry; determinant stays 1.
Mat3 random_shear(std::mt19937_64& rng, bool signed_entries, unsigned max_factor) {
    const unsigned row = static_cast<unsigned>(next_below(rng, 3));
    unsigned col = static_cast<unsigned>(next_below(rng, 2));
    if (col >= row) {
        ++col;
    }
    int factor = 1 + static_cast<int>(next_below(rng, max_factor));
    if (signed_entries && next_below(rng, 2) == 1) {
        factor = -factor;
    }
    Mat3 m = mat3_identity();
    m[row][col] = factor;
    return m;
}

points::Mat4 to_mat4(const Mat3& linear, const points::Vec3& translation) {
    points::Mat4 m = points::Mat4::identity();
    for (unsigned r = 0; r < 3; ++r) {
        for (unsigned c = 0; c < 3; ++c) {
            m.at(r, c) = linear[r][c];
        }
    }
    m.at(3, 0) = translation.x;
    m.at(3, 1) = translation.y;
    m.at(3, 2) = translation.z;
    return m;
}

points::KeyOp random_unimodular_op(std::mt19937_64& rng, unsigned generator_count) {
    Mat3 linear = mat3_identity();
    for (unsigned i = 0; i < generator_count; ++i) {
        const Mat3 g = next_below(rng, 2) == 0 ? random_permutation(rng, true)
                                               : random_shear(rng, true, 1);
        linear = mat3_mul(linear, g);
    }
    return points::KeyOp::mul(to_mat4(linear, points::Vec3{}));
}

// Composite keys stick to ops that keep non-negative inputs non-negative,
// so they can encrypt arbitrary bytes. Candidates are resampled until the
// largest fresh point (7,7,7) stays within one wire byte per axis, which
// keeps every record's wrap-around factor inside its u16 wire cap.
points::KeySequence random_composite(std::mt19937_64& rng, unsigned length) {
    for (int attempt = 0; attempt < 20000; ++attempt) {
        points::KeySequence seq;
        for (unsigned i = 0; i < length; ++i) {
            if (next_below(rng, 2) == 0) {
                seq.ops.push_back(points::KeyOp::add(points::Vec3{
                    BigInt{next_below(rng, 40)},
                    BigInt{next_below(rng, 40)},
                    BigInt{next_below(rng, 40)},
                }));
            } else {
                Mat3 linear = mat3_identity();
                const unsigned generators = 1 + static_cast<unsigned>(next_below(rng, 2));
                for (unsigned g = 0; g < generators; ++g) {
                    const Mat3 m = next_below(rng, 2) == 0 ? random_permutation(rng, false)
                                                           : random_shear(rng, false, 2);
                    linear = mat3_mul(linear, m);
                }
                const points::Vec3 translation{
                    BigInt{next_below(rng, 8)},
                    BigInt{next_below(rng, 8)},
                    BigInt{next_below(rng, 8)},
                };
                seq.ops.push_back(points::KeyOp::mul(to_mat4(linear, translation)));
            }
        }
        // Non-negative entries make coordinates monotone in the input, so
        // (7,7,7) bounds every reachable point.
        const points::HomogeneousPoint bound =
            points::apply_sequence(points::HomogeneousPoint{7, 7, 7}, seq);
        if (bound.r <= 255 && bound.g <= 255 && bound.b <= 255) {
            return seq;
        }
    }
    throw KeyError("could not generate an encryptable composite key of length " +
                   std::to_string(length) + "; try a smaller --length");
}

int cmd_keygen(const std::string& kind, const std::vector<std::string>& params,
               const std::string& out_path, std::uint64_t seed, unsigned ops, unsigned length) {
    points::KeySequence seq;
    if (kind == "translate") {
        if (params.size() != 3) {
            report("keygen translate expects 3 integers (got " + std::to_string(params.size()) +
                   ")");
            return kExitUsage;
        }
        points::Vec3 v;
        try {
            v = points::Vec3{BigInt{params[0]}, BigInt{params[1]}, BigInt{params[2]}};
        } catch (const std::exception&) {
            report("keygen translate: parameters must be integers");
            return kExitUsage;
        }
        seq.ops.push_back(points::KeyOp::mul(points::Mat4::translation(v)));
    } else if (kind == "unimodular") {
        if (!params.empty()) {
            report("keygen unimodular takes no positional parameters");
            return kExitUsage;
        }
        std::mt19937_64 rng(seed);
        seq.ops.push_back(random_unimodular_op(rng, ops));
    } else if (kind == "composite") {
        if (!params.empty()) {
            report("keygen composite takes no positional parameters");
            return kExitUsage;
        }
        std::mt19937_64 rng(seed);
        seq = random_composite(rng, length);
    } else {
        report("unknown key kind '" + kind + "' (expected translate, unimodular or composite)");
        return kExitUsage;
    }

    points::save_key_file(out_path, seq);
    report("wrote " + kind + " key: " + out_path);
    return kExitOk;
}

// --- encrypt / decrypt -------------------------------------------------

int cmd_encrypt(const std::string& in_path, const std::string& key_path,
                const std::string& out_path, unsigned per_axis_modulo) {
    const cipher::KeySchedule schedule = load_schedule(key_path, per_axis_modulo);
    const std::vector<std::uint8_t> message = read_file(in_path);
    transport::FileWriteChannel channel(out_path);
    const transport::SendReport r =
        transport::send(message, schedule, framing::PacketFormat::async_coarse, channel);
    report_send(r);
    return kExitOk;
}

int cmd_decrypt(const std::string& in_path, const std::string& key_path,
                const std::string& out_path, unsigned per_axis_modulo) {
    const cipher::KeySchedule schedule = load_schedule(key_path, per_axis_modulo);
    transport::FileReadChannel channel(in_path);
    const transport::ReceiveResult r = transport::receive(schedule, channel);
    write_message(out_path, r.message);
    report("symbols: " + std::to_string(r.symbol_count));
    report("packets: " + std::to_string(r.packet_count));
    return kExitOk;
}

// --- send / recv --------------------------------------------------------

int cmd_send(const std::string& in_path, const std::string& key_path, const std::string& format,
             const std::string& transport_name, const std::string& endpoint,
             unsigned per_axis_modulo) {
    const cipher::KeySchedule schedule = load_schedule(key_path, per_axis_modulo);
    const std::vector<std::uint8_t> message = read_file(in_path);
    const framing::PacketFormat fmt = framing::format_from_name(format);

    if (transport_name == "file") {
        transport::FileWriteChannel channel(endpoint);
        report_send(transport::send(message, schedule, fmt, channel));
        return kExitOk;
    }
    if (transport_name == "net") {
        const auto [host, port] = split_endpoint(endpoint);
        transport::TcpChannel channel = transport::TcpChannel::connect(host, port);
        report_send(transport::send(message, schedule, fmt, channel));
        return kExitOk;
    }
    if (transport_name == "memory") {
        // In-process loopback self-test: sender and receiver share a queue.
        transport::MemoryChannel channel;
        transport::ReceiveResult received;
        std::exception_ptr receiver_error;
        std::thread receiver([&] {
            try {
                received = transport::receive(schedule, channel);
            } catch (...) {
                receiver_error = std::current_exception();
            }
        });
        transport::SendReport sent;
        try {
            sent = transport::send(message, schedule, fmt, channel);
        } catch (...) {
            channel.close_write();
            receiver.join();
            throw;
        }
        receiver.join();
        if (receiver_error) {
            std::rethrow_exception(receiver_error);
        }
        report_send(sent);
        if (received.message != message) {
            throw TransportError("memory loopback mismatch: received message differs");
        }
        report("loopback roundtrip ok: " + std::to_string(received.message.size()) + " bytes");
        return kExitOk;
    }
    report("unknown transport '" + transport_name + "' (expected memory, net or file)");
    return kExitUsage;
}

int cmd_recv(const std::string& key_path, const std::string& transport_name,
             const std::string& endpoint, const std::string& out_path,
             unsigned per_axis_modulo) {
    const cipher::KeySchedule schedule = load_schedule(key_path, per_axis_modulo);

    if (transport_name == "memory") {
        report("memory transport is a send-side loopback self-test; use send --transport memory");
        return kExitUsage;
    }

    transport::ReceiveResult r;
    if (transport_name == "file") {
        transport::FileReadChannel channel(endpoint);
        r = transport::receive(schedule, channel);
    } else if (transport_name == "net") {
        const auto [host, port] = split_endpoint(endpoint);
        transport::TcpListener listener(host, port);
        transport::TcpChannel channel = listener.accept_one();
        r = transport::receive(schedule, channel);
    } else {
        report("unknown transport '" + transport_name + "' (expected net or file)");
        return kExitUsage;
    }

    write_message(out_path, r.message);
    report("format: " + std::string(framing::format_name(r.format)));
    report("symbols: " + std::to_string(r.symbol_count));
    report("packets: " + std::to_string(r.packet_count));
    return kExitOk;
}

// --- inspect ------------------------------------------------------------

std::string hex_byte(unsigned value) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02X", value & 0xFFu);
    return buf;
}

int cmd_inspect(const std::string& in_path, bool verbose) {
    const std::vector<std::uint8_t> bytes = read_file(in_path);
    const std::span<const std::uint8_t> view(bytes);

    framing::Preamble preamble;
    try {
        preamble = framing::parse_preamble(view);
    } catch (const FramingError& e) {
        throw FramingError(std::string(e.what()) + " (at byte offset 0)");
    }
    std::cout << "format: " << framing::format_name(preamble.format)
              << "  symbol bits: " << preamble.bits << '\n';

    framing::Ipr totals;
    std::size_t packet_count = 0;
    std::size_t record_index = 0;
    std::size_t at = framing::kPreambleSize;
    while (at < view.size()) {
        framing::ParsedPacket parsed;
        try {
            parsed = framing::parse_packet(preamble.format, view.subspan(at));
        } catch (const FramingError& e) {
            throw FramingError(std::string(e.what()) + " (at byte offset " + std::to_string(at) +
                               ")");
        }
        totals.accumulate(framing::ipr(view.subspan(at, parsed.consumed), preamble.format));
        ++packet_count;

        for (const framing::WireRecord& wire : parsed.packet.records) {
            ++record_index;
            const codec::MangledSymbol mangled = framing::to_mangled(wire);
            const codec::AxisTriple point = codec::demangle(mangled, preamble.bits);
            const auto color = transport::point_color(point);
            std::cout << "record " << record_index << ": residue " << hex_byte(mangled.residue)
                      << " waf " << mangled.waf << " bpa " << mangled.bpa.t_r << ','
                      << mangled.bpa.t_g << ',' << mangled.bpa.t_b << " point (" << point.r << ','
                      << point.g << ',' << point.b << ") color #" << hex_byte(color[0])
                      << hex_byte(color[1]) << hex_byte(color[2]) << '\n';
            if (verbose) {
                const codec::Symbol residue{mangled.residue, preamble.bits};
                std::cout << "          hex " << codec::base_view(residue, codec::ViewBase::hex)
                          << "  octal " << codec::base_view(residue, codec::ViewBase::octal)
                          << "  poly " << codec::polynomial_view(residue) << '\n';
            }
        }
        at += parsed.consumed;
    }

    std::cout << record_index << " records, " << packet_count << " packets\n";
    if (record_index > 0) {
        std::cout << "ipr: " << totals.to_string() << "\nipr on wire: " << totals.to_wire_string()
                  << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"color-lattice codec and cipher with packet framing and channel simulation"};
    app.require_subcommand(1);
    app.footer(
        "exit codes: 0 ok, 1 usage, 2 parse error, 3 cipher error, 4 transport error, 5 io "
        "error");

    std::string kind;
    std::vector<std::string> params;
    std::string key_path;
    std::string in_path;
    std::string out_path;
    std::string format = "async-coarse";
    std::string transport_name = "file";
    std::string endpoint;
    std::uint64_t seed = 0;
    unsigned ops = 4;
    unsigned length = 3;
    unsigned per_axis_modulo = 0;
    bool verbose = false;

    CLI::App* keygen = app.add_subcommand("keygen", "generate a key file");
    keygen->add_option("kind", kind, "translate | unimodular | composite")->required();
    keygen->add_option("params", params, "translate offsets: x y z");
    keygen->add_option("--out", out_path, "key file path")->required();
    keygen->add_option("--seed", seed, "rng seed for unimodular/composite kinds");
    keygen->add_option("--ops", ops, "generator count for the unimodular kind")
        ->check(CLI::Range(1u, 64u));
    keygen->add_option("--length", length, "op count for the composite kind")
        ->check(CLI::Range(1u, 64u));

    const auto add_key_option = [&](CLI::App* cmd) {
        cmd->add_option("--key", key_path, "key file (env C3DC_KEY)")
            ->envname("C3DC_KEY")
            ->required();
    };
    const auto add_pam_option = [&](CLI::App* cmd) {
        cmd->add_option("--per-axis-modulo", per_axis_modulo,
                        "reduce each axis mod 2^N after every op (add/sub keys only)")
            ->check(CLI::Range(4u, 1048576u));
    };

    CLI::App* encrypt = app.add_subcommand("encrypt", "encrypt a file into a container");
    encrypt->add_option("--in", in_path, "plaintext input")->required();
    add_key_option(encrypt);
    encrypt->add_option("--out", out_path, "container output")->required();
    add_pam_option(encrypt);

    CLI::App* decrypt = app.add_subcommand("decrypt", "decrypt a container back to a file");
    decrypt->add_option("--in", in_path, "container input")->required();
    add_key_option(decrypt);
    decrypt->add_option("--out", out_path, "plaintext output (stdout when omitted)");
    add_pam_option(decrypt);

    CLI::App* send = app.add_subcommand("send", "encrypt and transmit over a channel");
    send->add_option("--in", in_path, "plaintext input")->required();
    add_key_option(send);
    send->add_option("--format", format,
                     "sync-fine | sync-coarse | async-fine | async-coarse");
    send->add_option("--transport", transport_name, "memory | net | file");
    send->add_option("--endpoint", endpoint, "host:port for net, path for file");
    add_pam_option(send);

    CLI::App* recv = app.add_subcommand("recv", "receive and decrypt from a channel");
    add_key_option(recv);
    recv->add_option("--transport", transport_name, "net | file");
    recv->add_option("--endpoint", endpoint, "host:port for net, path for file");
    recv->add_option("--out", out_path, "plaintext output (stdout when omitted)");
    add_pam_option(recv);

    CLI::App* inspect = app.add_subcommand("inspect", "list the records of a container or capture");
    inspect->add_option("--in", in_path, "container input")->required();
    inspect->add_flag("-v,--verbose", verbose, "also print hex/octal/polynomial views");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (keygen->parsed()) {
            return cmd_keygen(kind, params, out_path, seed, ops, length);
        }
        if (encrypt->parsed()) {
            return cmd_encrypt(in_path, key_path, out_path, per_axis_modulo);
        }
        if (decrypt->parsed()) {
            return cmd_decrypt(in_path, key_path, out_path, per_axis_modulo);
        }
        if (send->parsed()) {
            if ((transport_name == "net" || transport_name == "file") && endpoint.empty()) {
                report("--endpoint is required for the " + transport_name + " transport");
                return kExitUsage;
            }
            return cmd_send(in_path, key_path, format, transport_name, endpoint,
                            per_axis_modulo);
        }
        if (recv->parsed()) {
            if (endpoint.empty()) {
                report("--endpoint is required");
                return kExitUsage;
            }
            return cmd_recv(key_path, transport_name, endpoint, out_path, per_axis_modulo);
        }
        if (inspect->parsed()) {
            return cmd_inspect(in_path, verbose);
        }
    } catch (const KeyError& e) {
        report(std::string("key error: ") + e.what());
        return kExitParse;
    } catch (const FramingError& e) {
        report(std::string("parse error: ") + e.what());
        return kExitParse;
    } catch (const CipherError& e) {
        report(std::string("cipher error: ") + e.what());
        return kExitCipher;
    } catch (const CodecError& e) {
        report(std::string("cipher error: ") + e.what());
        return kExitCipher;
    } catch (const TransportError& e) {
        report(std::string("transport error: ") + e.what());
        return kExitTransport;
    } catch (const IoError& e) {
        report(std::string("io error: ") + e.what());
        return kExitIo;
    }
    return kExitUsage;
}
