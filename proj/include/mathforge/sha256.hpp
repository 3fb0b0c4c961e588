#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace mathforge {

// Compact SHA-256, used for program source hashes and corpus record ids.
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::array<std::uint8_t, 32> finish();

    static std::string hex_digest(std::string_view s);

private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_{};
    std::uint64_t bit_len_ = 0;
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffer_len_ = 0;
};

} // namespace mathforge
