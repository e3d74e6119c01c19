#ifndef DRINFELD_RATIONAL_HPP
#define DRINFELD_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace drinfeld {

// Exact rational with int64 numerator/denominator, den > 0, reduced.
// Used for series exponents and precision bookkeeping; intermediates go
// through __int128 so deep inverse twists cannot silently overflow.
struct Rat {
    long long n = 0;
    long long d = 1;

    Rat() = default;
    Rat(long long num) : n(num), d(1) {}
    Rat(long long num, long long den) : n(num), d(den) { normalize(); }

    void normalize() {
        if (d == 0) throw std::domain_error("Rat: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        long long g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
    }

    static Rat from128(__int128 num, __int128 den) {
        if (den < 0) { num = -num; den = -den; }
        __int128 a = num < 0 ? -num : num, b = den, g = 1;
        while (b) { __int128 t = a % b; a = b; b = t; }
        g = a ? a : 1;
        num /= g; den /= g;
        if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX)
            throw std::overflow_error("Rat: exponent out of range");
        Rat r; r.n = (long long)num; r.d = (long long)den;
        return r;
    }

    friend Rat operator+(const Rat& a, const Rat& b) {
        return from128((__int128)a.n * b.d + (__int128)b.n * a.d, (__int128)a.d * b.d);
    }
    friend Rat operator-(const Rat& a, const Rat& b) {
        return from128((__int128)a.n * b.d - (__int128)b.n * a.d, (__int128)a.d * b.d);
    }
    friend Rat operator*(const Rat& a, const Rat& b) {
        return from128((__int128)a.n * b.n, (__int128)a.d * b.d);
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.n == 0) throw std::domain_error("Rat: divide by zero");
        return from128((__int128)a.n * b.d, (__int128)a.d * b.n);
    }
    Rat operator-() const { Rat r; r.n = -n; r.d = d; return r; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.n == b.n && a.d == b.d; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return (__int128)a.n * b.d < (__int128)b.n * a.d;
    }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
    friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

    bool is_integer() const { return d == 1; }

    std::string str() const {
        if (d == 1) return std::to_string(n);
        return std::to_string(n) + "/" + std::to_string(d);
    }
};

// Rational extended by the two infinities.  Degrees of series live here
// (deg 0 = NEG_INF) as do absolute precisions (exact values carry POS_INF).
struct XRat {
    enum Kind : int8_t { NEG_INF = -1, FIN = 0, POS_INF = 1 };
    Kind k = FIN;
    Rat v;

    XRat() = default;
    XRat(Rat r) : k(FIN), v(r) {}
    XRat(long long n) : k(FIN), v(Rat(n)) {}
    static XRat neg_inf() { XRat x; x.k = NEG_INF; return x; }
    static XRat pos_inf() { XRat x; x.k = POS_INF; return x; }

    bool finite() const { return k == FIN; }
    bool is_neg_inf() const { return k == NEG_INF; }
    bool is_pos_inf() const { return k == POS_INF; }

    friend bool operator<(const XRat& a, const XRat& b) {
        if (a.k != b.k) return a.k < b.k;
        if (a.k != FIN) return false;
        return a.v < b.v;
    }
    friend bool operator>(const XRat& a, const XRat& b) { return b < a; }
    friend bool operator<=(const XRat& a, const XRat& b) { return !(b < a); }
    friend bool operator>=(const XRat& a, const XRat& b) { return !(a < b); }
    friend bool operator==(const XRat& a, const XRat& b) {
        return a.k == b.k && (a.k != FIN || a.v == b.v);
    }
    friend bool operator!=(const XRat& a, const XRat& b) { return !(a == b); }

    // NEG_INF + POS_INF is a caller bug; everything else follows the usual
    // absorbing rules.
    friend XRat operator+(const XRat& a, const XRat& b) {
        if (a.k == FIN && b.k == FIN) return XRat(a.v + b.v);
        if (a.k == NEG_INF || b.k == NEG_INF) {
            if (a.k == POS_INF || b.k == POS_INF)
                throw std::domain_error("XRat: -inf + +inf");
            return neg_inf();
        }
        return pos_inf();
    }
    friend XRat operator-(const XRat& a, const XRat& b) {
        XRat nb = b;
        if (nb.k == FIN) nb.v = -nb.v; else nb.k = (Kind)(-nb.k);
        return a + nb;
    }
    XRat operator-() const {
        XRat r = *this;
        if (r.k == FIN) r.v = -r.v; else r.k = (Kind)(-r.k);
        return r;
    }
    // scale by a positive rational (precision under twisting)
    XRat scaled(const Rat& s) const {
        if (k != FIN) return *this;
        return XRat(v * s);
    }

    static XRat min(const XRat& a, const XRat& b) { return a < b ? a : b; }
    static XRat max(const XRat& a, const XRat& b) { return a < b ? b : a; }

    std::string str() const {
        if (k == NEG_INF) return "-inf";
        if (k == POS_INF) return "+inf";
        return v.str();
    }
};

} // namespace drinfeld

#endif
