#pragma once

// Byte-level helpers: base64 for wire payloads, SHA-256 for content ids, and
// the FNV-1a / splitmix64 pair that seeds every mock backend.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vecdraw {

std::string base64_encode(const std::vector<std::uint8_t>& bytes);

/// Throws Error(ProviderMalformedResponse) on invalid input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Lowercase hex digest.
std::string sha256_hex(std::string_view data);
std::string sha256_hex(const std::vector<std::uint8_t>& data);

constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic stream used by the mock backends. The sequence is fully
/// specified by the seed, so other implementations can reproduce it.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() { return splitmix64(state_); }
    /// Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [lo, hi] (modulo reduction).
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

/// Whole-file reads and writes; failures raise Error(Io).
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Seed for a mock call: FNV-1a of the tag and payload, mixed with the user seed.
std::uint64_t mock_seed(std::string_view tag, std::string_view payload, std::uint64_t seed);

}  // namespace vecdraw
