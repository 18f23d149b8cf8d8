#include "vecdraw/encoding.hpp"

#include <fstream>
#include <iterator>

#include <openssl/evp.h>
#include <openssl/sha.h>

#include "vecdraw/error.hpp"

namespace vecdraw {

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    std::string clean;
    clean.reserve(text.size());
    for (char c : text) {
        if (c != '\n' && c != '\r' && c != ' ') clean.push_back(c);
    }
    if (clean.size() % 4 != 0) throw Error(ErrorCode::ProviderMalformedResponse, "base64 length not a multiple of 4");
    std::vector<std::uint8_t> out(clean.size() / 4 * 3);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                                  static_cast<int>(clean.size()));
    if (n < 0) throw Error(ErrorCode::ProviderMalformedResponse, "invalid base64");
    std::size_t size = static_cast<std::size_t>(n);
    // EVP_DecodeBlock keeps the bytes produced by '=' padding.
    if (!clean.empty() && clean.back() == '=') --size;
    if (clean.size() >= 2 && clean[clean.size() - 2] == '=') --size;
    out.resize(size);
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * SHA256_DIGEST_LENGTH);
    for (unsigned char b : digest) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 15]);
    }
    return out;
}

std::string sha256_hex(const std::vector<std::uint8_t>& data) {
    return sha256_hex(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

std::uint64_t mock_seed(std::string_view tag, std::string_view payload, std::uint64_t seed) {
    const std::uint64_t tagged = fnv1a64(std::string_view("\0", 1), fnv1a64(tag));
    std::uint64_t state = fnv1a64(payload, tagged) ^ seed;
    return splitmix64(state);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

}  // namespace vecdraw
