#pragma once

#include <cstdint>
#include <string>

#include "zana/errors.hpp"

namespace zana {

// Monetary quantity in zatoshi (zat). 10^8 zat = 1 ZEC. All ledger arithmetic
// is exact integer arithmetic; decimal ZEC strings exist only at the
// parse/format boundary.
inline constexpr std::uint64_t kZatPerZec = 100'000'000ull;

struct Amount {
    std::uint64_t zat = 0;

    constexpr Amount() = default;
    constexpr explicit Amount(std::uint64_t z) : zat(z) {}

    static constexpr Amount from_zec_int(std::uint64_t whole_zec) {
        return Amount{whole_zec * kZatPerZec};
    }

    // Exact parse of a non-negative decimal ZEC string with up to 8 decimal
    // places ("250.0001", "1", "0.00000001"). Throws ParseError otherwise.
    static Amount from_zec_string(const std::string& s);

    // Fixed 8-decimal representation, e.g. "250.00010000".
    std::string to_zec_string() const;

    // Shortest representation without trailing zeros, e.g. "250.0001", "10".
    std::string to_zec_string_trimmed() const;

    // Number of significant decimal places of the ZEC representation after
    // stripping trailing zeros: 250.0001 -> 4, 1.00000000 -> 0.
    int decimal_places() const;

    constexpr bool is_zero() const { return zat == 0; }

    friend constexpr bool operator==(Amount a, Amount b) { return a.zat == b.zat; }
    friend constexpr auto operator<=>(Amount a, Amount b) { return a.zat <=> b.zat; }
};

// Throws IntegrityError on overflow (overflow of the accumulator signals
// corrupt input; total supply fits in 64 bits with wide margin).
Amount checked_add(Amount a, Amount b);
Amount checked_sub(Amount a, Amount b);

} // namespace zana
