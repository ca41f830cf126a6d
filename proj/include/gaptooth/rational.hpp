#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "errors.hpp"

namespace gaptooth {

/// Arbitrary-precision rational, always canonical (lowest terms, positive denominator).
using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p", "p/q" or "-p/q". Whitespace is not allowed.
inline Rational parse_rational(std::string_view text) {
    if (text.empty()) throw ConfigurationError("empty rational");
    const auto slash = text.find('/');
    auto valid_int = [](std::string_view s) {
        if (s.empty()) return false;
        std::size_t k = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (k == s.size()) return false;
        for (; k < s.size(); ++k)
            if (s[k] < '0' || s[k] > '9') return false;
        return true;
    };
    std::string num(text.substr(0, slash));
    std::string den = slash == std::string_view::npos ? "1" : std::string(text.substr(slash + 1));
    if (!num.empty() && num[0] == '+') num.erase(0, 1);
    if (!valid_int(num) || !valid_int(den) || den[0] == '-')
        throw ConfigurationError("malformed rational '" + std::string(text) + "'");
    Rational q{Integer(num), Integer(den)};
    if (q.get_den() == 0) throw ConfigurationError("zero denominator in '" + std::string(text) + "'");
    q.canonicalize();
    return q;
}

/// p/q in lowest terms (mpq_class(p, q) does not reduce).
inline Rational ratio(long p, long q) {
    if (q == 0) throw ConfigurationError("zero denominator");
    Rational out(p, q);
    out.canonicalize();
    return out;
}

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational rational_pow(const Rational& q, int e) {
    Rational base = e < 0 ? Rational(1) / q : q;
    Rational out = 1;
    for (int k = 0; k < (e < 0 ? -e : e); ++k) out *= base;
    return out;
}

}  // namespace gaptooth
