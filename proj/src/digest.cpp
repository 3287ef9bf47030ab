#include "guireplay/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstring>

namespace guireplay::digest {

std::string sha256_hex(const std::uint8_t* data, size_t size) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int md_len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data, size) != 1 ||
        EVP_DigestFinal_ex(ctx, md.data(), &md_len) != 1) {
        if (ctx) EVP_MD_CTX_free(ctx);
        throw Error("sha256: digest failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out(md_len * 2, '0');
    for (unsigned int i = 0; i < md_len; ++i) {
        out[2 * i] = hex[md[i] >> 4];
        out[2 * i + 1] = hex[md[i] & 0xf];
    }
    return out;
}

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
    return sha256_hex(bytes.data(), bytes.size());
}

std::string sha256_hex(const std::string& s) {
    return sha256_hex(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

std::string image_digest(const PixelImage& img) {
    std::vector<std::uint8_t> buf;
    buf.reserve(8 + img.data.size());
    auto push_u32 = [&buf](std::uint32_t v) {
        buf.push_back(v & 0xff);
        buf.push_back((v >> 8) & 0xff);
        buf.push_back((v >> 16) & 0xff);
        buf.push_back((v >> 24) & 0xff);
    };
    push_u32(static_cast<std::uint32_t>(img.width));
    push_u32(static_cast<std::uint32_t>(img.height));
    buf.insert(buf.end(), img.data.begin(), img.data.end());
    return sha256_hex(buf);
}

std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t mix_seed(std::uint64_t base, const std::string& tag, std::uint64_t n) {
    std::uint64_t h = fnv1a64(tag, base ^ 0x9e3779b97f4a7c15ull);
    h ^= n + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

}  // namespace guireplay::digest
