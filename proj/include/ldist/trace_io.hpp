#pragma once

// .ldtr trace files, little-endian, no padding:
//
//   offset  size  field
//   0       4     magic "LDTR" (4C 44 54 52)
//   4       2     u16 version = 1
//   6       1     u8 flags, bit 0 = true labels present, other bits zero
//   7       1     u8 reserved = 0
//   8       4     u32 n_instances
//   12      2     u16 k_epochs
//   14      2     u16 n_classes
//   16      ...   [flag bit 0] n_instances x u16 true labels
//           ...   n_instances x k_epochs x u16 predictions, instance-major

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldist/error.hpp"
#include "ldist/trace.hpp"

namespace ldist {

inline constexpr std::array<std::uint8_t, 4> kTraceMagic{0x4C, 0x44, 0x54, 0x52};
inline constexpr std::uint16_t kTraceVersion = 1;
inline constexpr std::size_t kTraceHeaderSize = 16;

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xFF));
}

inline std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t at) {
    return static_cast<std::uint16_t>(in[at] | (in[at + 1] << 8));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
    return static_cast<std::uint32_t>(in[at]) | (static_cast<std::uint32_t>(in[at + 1]) << 8) |
           (static_cast<std::uint32_t>(in[at + 2]) << 16) |
           (static_cast<std::uint32_t>(in[at + 3]) << 24);
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_trace(const TraceMatrix& trace) {
    std::vector<std::uint8_t> out(kTraceMagic.begin(), kTraceMagic.end());
    const std::size_t n = trace.n_instances();
    out.reserve(kTraceHeaderSize + 2 * n * (trace.k_epochs() + 1));
    detail::put_u16(out, kTraceVersion);
    out.push_back(trace.has_true_labels() ? 1 : 0);
    out.push_back(0);
    detail::put_u32(out, static_cast<std::uint32_t>(n));
    detail::put_u16(out, static_cast<std::uint16_t>(trace.k_epochs()));
    detail::put_u16(out, static_cast<std::uint16_t>(trace.n_classes()));
    if (trace.has_true_labels())
        for (Label y : trace.true_labels()) detail::put_u16(out, y);
    for (Label y : trace.predictions()) detail::put_u16(out, y);
    return out;
}

/// Throws FormatError on any structural problem; never reads out of bounds.
inline TraceMatrix decode_trace(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kTraceHeaderSize)
        throw FormatError("trace truncated: " + std::to_string(bytes.size()) +
                          " bytes, header needs 16");
    if (!std::equal(kTraceMagic.begin(), kTraceMagic.end(), bytes.begin()))
        throw FormatError("bad magic: not an LDTR trace file");
    const std::uint16_t version = detail::get_u16(bytes, 4);
    if (version != kTraceVersion)
        throw FormatError("unsupported trace version " + std::to_string(version));
    const std::uint8_t flags = bytes[6];
    if ((flags & ~1u) != 0) throw FormatError("unknown flag bits set");
    if (bytes[7] != 0) throw FormatError("reserved byte must be zero");

    const std::uint64_t n = detail::get_u32(bytes, 8);
    const std::uint64_t k = detail::get_u16(bytes, 12);
    const std::uint64_t classes = detail::get_u16(bytes, 14);
    const bool has_truth = (flags & 1u) != 0;
    if (k == 0) throw FormatError("k_epochs is zero");
    if (classes < 2) throw FormatError("n_classes below 2");

    const std::uint64_t labels = (has_truth ? n : 0) + n * k;
    const std::uint64_t expected = kTraceHeaderSize + 2 * labels;
    if (bytes.size() < expected)
        throw FormatError("trace truncated: header declares " + std::to_string(n) + "x" +
                          std::to_string(k) + " (" + std::to_string(expected) +
                          " bytes), payload has " + std::to_string(bytes.size()));
    if (bytes.size() > expected)
        throw FormatError("trace has " + std::to_string(bytes.size() - expected) +
                          " trailing bytes beyond declared dimensions");

    std::size_t at = kTraceHeaderSize;
    std::optional<std::vector<Label>> truth;
    if (has_truth) {
        truth.emplace(n);
        for (auto& y : *truth) {
            y = detail::get_u16(bytes, at);
            at += 2;
        }
    }
    std::vector<Label> preds(n * k);
    for (auto& y : preds) {
        y = detail::get_u16(bytes, at);
        at += 2;
    }
    try {
        return TraceMatrix(n, k, classes, std::move(preds), std::move(truth));
    } catch (const ValidationError& e) {
        throw FormatError(std::string("invalid trace content: ") + e.what());
    }
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

/// Returns the number of bytes written.
inline std::size_t write_trace(const TraceMatrix& trace, const std::filesystem::path& path) {
    const auto bytes = encode_trace(trace);
    write_file_bytes(path, bytes);
    return bytes.size();
}

inline TraceMatrix read_trace(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return decode_trace(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace ldist
