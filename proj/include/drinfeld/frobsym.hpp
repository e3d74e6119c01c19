#ifndef DRINFELD_FROBSYM_HPP
#define DRINFELD_FROBSYM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "drinfeld/cinf.hpp"

namespace drinfeld {

// Symbolic algebra of Frobenius twists: Laurent polynomials with integer
// coefficients in commuting generators theta^(j), kappa_i^(j) plus the
// normalizer symbols u_eta.  Twisting shifts the index j and is a ring map;
// it never re-expresses q-th powers (kappa^q and kappa^(1) are distinct
// expressions here, exactly as in the printed matrices being checked).
//
// Integer coefficients keep the printed 2's and 3's checkable verbatim; an
// identity that holds over Z holds over every F_q.
//
// Normalizers: u_eta is a (q-1)-st root of eta^{-q}, so u^(-1) = eta*u and
// u^(1) = (eta^(1))^{-1}*u.  eta must be +-(unit monomial); twisting applies
// the rewrite eagerly.
class FrobSym {
public:
    struct Gen {
        int8_t kind;    // 0 theta, 1 kappa, 2 normalizer, 3 beta
        int16_t which;  // kappa subscript / normalizer registry id
        int32_t idx;    // twist index (unused for normalizers)
        friend bool operator<(const Gen& a, const Gen& b) {
            if (a.kind != b.kind) return a.kind < b.kind;
            if (a.which != b.which) return a.which < b.which;
            return a.idx < b.idx;
        }
        friend bool operator==(const Gen& a, const Gen& b) {
            return a.kind == b.kind && a.which == b.which && a.idx == b.idx;
        }
    };
    struct Factor {
        Gen g;
        int e;  // nonzero, may be negative
        friend bool operator==(const Factor& a, const Factor& b) {
            return a.g == b.g && a.e == b.e;
        }
    };
    using Monomial = std::vector<Factor>;  // sorted by Gen
    struct Term {
        Monomial m;
        long long c;
    };

    FrobSym() = default;

    static FrobSym zero() { return FrobSym(); }
    static FrobSym one() { return constant(1); }
    static FrobSym constant(long long c);
    static FrobSym theta(int32_t j = 0);
    static FrobSym kappa(int which, int32_t j = 0);
    static FrobSym beta(int which, int32_t j = 0);
    // register (or fetch) the normalizer u_eta; eta must be a single term
    // with coefficient +-1
    static FrobSym normalizer(const std::string& name, const FrobSym& eta);

    bool is_zero() const { return t_.empty(); }
    bool is_one() const;
    const std::vector<Term>& terms() const { return t_; }

    friend FrobSym operator+(const FrobSym& a, const FrobSym& b);
    friend FrobSym operator-(const FrobSym& a, const FrobSym& b);
    friend FrobSym operator*(const FrobSym& a, const FrobSym& b);
    FrobSym operator-() const;
    friend bool operator==(const FrobSym& a, const FrobSym& b);
    friend bool operator!=(const FrobSym& a, const FrobSym& b) { return !(a == b); }

    // inverse of a +-monomial; throws DomainError otherwise
    FrobSym inv() const;
    FrobSym pow(long long k) const;

    FrobSym twist(long long n) const;

    std::string str() const;
    static FrobSym parse(const std::string& text);

    // ring-protocol helpers shared with CInf via templates
    FrobSym ring_zero() const { return FrobSym(); }
    FrobSym ring_one() const { return one(); }
    bool is_zero_to_prec() const { return is_zero(); }

private:
    std::vector<Term> t_;  // sorted by monomial, coefficients nonzero
    void normalize();
    FrobSym twist_step(int dir) const;
};

} // namespace drinfeld

#endif
