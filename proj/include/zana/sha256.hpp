#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace zana {

// Minimal SHA-256 (FIPS 180-4), used for store digests and synthetic ids.
class Sha256 {
  public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::array<std::uint8_t, 32> finish();

  private:
    void process_block(const std::uint8_t* p);

    std::array<std::uint32_t, 8> state_{};
    std::uint64_t total_ = 0;
    std::array<std::uint8_t, 64> buf_{};
    std::size_t buf_len_ = 0;
};

std::string sha256_hex(std::string_view data);

} // namespace zana
