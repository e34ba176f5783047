#include "zana/amount.hpp"

#include <limits>

namespace zana {

Amount Amount::from_zec_string(const std::string& s) {
    if (s.empty()) throw ParseError("empty amount");
    std::size_t i = 0;
    std::uint64_t whole = 0;
    bool any_digit = false;
    for (; i < s.size() && s[i] != '.'; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') throw ParseError("bad amount '" + s + "'");
        if (whole > (std::numeric_limits<std::uint64_t>::max() - 9) / 10)
            throw ParseError("amount out of range '" + s + "'");
        whole = whole * 10 + static_cast<std::uint64_t>(c - '0');
        any_digit = true;
    }
    std::uint64_t frac = 0;
    int frac_digits = 0;
    if (i < s.size()) {
        ++i; // skip '.'
        if (i == s.size()) throw ParseError("bad amount '" + s + "'");
        for (; i < s.size(); ++i) {
            char c = s[i];
            if (c < '0' || c > '9') throw ParseError("bad amount '" + s + "'");
            if (++frac_digits > 8) throw ParseError("more than 8 decimal places in '" + s + "'");
            frac = frac * 10 + static_cast<std::uint64_t>(c - '0');
            any_digit = true;
        }
    }
    if (!any_digit) throw ParseError("bad amount '" + s + "'");
    for (int d = frac_digits; d < 8; ++d) frac *= 10;
    if (whole > std::numeric_limits<std::uint64_t>::max() / kZatPerZec)
        throw ParseError("amount out of range '" + s + "'");
    return checked_add(Amount{whole * kZatPerZec}, Amount{frac});
}

std::string Amount::to_zec_string() const {
    std::uint64_t whole = zat / kZatPerZec;
    std::uint64_t frac = zat % kZatPerZec;
    std::string f = std::to_string(frac);
    f.insert(0, 8 - f.size(), '0');
    return std::to_string(whole) + "." + f;
}

std::string Amount::to_zec_string_trimmed() const {
    std::string s = to_zec_string();
    std::size_t last = s.find_last_not_of('0');
    if (s[last] == '.') --last;
    s.erase(last + 1);
    return s;
}

int Amount::decimal_places() const {
    std::uint64_t frac = zat % kZatPerZec;
    if (frac == 0) return 0;
    int places = 8;
    while (frac % 10 == 0) {
        frac /= 10;
        --places;
    }
    return places;
}

Amount checked_add(Amount a, Amount b) {
    std::uint64_t r = a.zat + b.zat;
    if (r < a.zat) throw IntegrityError("amount overflow");
    return Amount{r};
}

Amount checked_sub(Amount a, Amount b) {
    if (b.zat > a.zat) throw IntegrityError("amount underflow");
    return Amount{a.zat - b.zat};
}

} // namespace zana
