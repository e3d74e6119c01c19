#ifndef DRINFELD_CINF_HPP
#define DRINFELD_CINF_HPP

#include <string>
#include <vector>

#include "drinfeld/fq.hpp"
#include "drinfeld/rational.hpp"

namespace drinfeld {

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};
struct DivisionByZeroToPrecision : DomainError {
    explicit DivisionByZeroToPrecision(const std::string& w) : DomainError(w) {}
};
struct NoRootInCoefficientField : DomainError {
    explicit NoRootInCoefficientField(const std::string& w) : DomainError(w) {}
};

// Truncated generalized Laurent series sum c_e theta^e, exponents e in Q with
// bounded denominator, coefficients in F_{q^s}.  abs_prec = P means every
// term with e > -P is present and exact; nothing is known at or below -P.
// The non-archimedean degree is the top exponent; |x| = q^{deg x}.
//
// Values are immutable in spirit: every operation returns a fresh series and
// propagates a precision that is <= the true guaranteed precision.
class CInf {
public:
    struct Term {
        Rat e;
        FqElem c;
    };

    CInf() = default;
    explicit CInf(FieldPtr F, XRat prec = XRat::pos_inf())
        : F_(std::move(F)), prec_(prec) {}

    static CInf zero(const FieldPtr& F) { return CInf(F); }
    static CInf one(const FieldPtr& F) { return scalar(F, 1); }
    static CInf scalar(const FieldPtr& F, long long c);
    static CInf scalar(const FieldPtr& F, const FqElem& c);
    static CInf theta_pow(const FieldPtr& F, const Rat& e, long long c = 1);
    static CInf monomial(const FieldPtr& F, const Rat& e, const FqElem& c);

    const FieldPtr& field() const { return F_; }
    const std::vector<Term>& terms() const { return t_; }
    const XRat& prec() const { return prec_; }

    // terms sorted by descending exponent; drops coefficients that are zero
    // or lie at/below the precision floor
    void normalize();

    XRat deg() const;                       // NEG_INF if no visible term
    // degree bound including the hidden tail: max(deg, -prec)
    XRat deg_bound() const;
    bool is_zero_to_prec() const { return t_.empty(); }
    bool exact_zero() const { return t_.empty() && prec_.is_pos_inf(); }
    FqElem leading_coeff() const;

    // coefficient at a given exponent (zero if absent)
    FqElem coeff_at(const Rat& e) const;

    friend CInf operator+(const CInf& a, const CInf& b);
    friend CInf operator-(const CInf& a, const CInf& b);
    friend CInf operator*(const CInf& a, const CInf& b);
    CInf operator-() const;

    // Newton inversion; throws DivisionByZeroToPrecision if no visible term
    CInf inv() const;
    CInf pow(long long k) const;            // k may be negative

    // x -> x^{q^n} termwise: c theta^e -> c^{q^n} theta^{e q^n}
    CInf twist(long long n) const;

    // canonical m-th root: least leading-coefficient root, Newton tail lift
    CInf root(long long m) const;

    // cap precision at P (drops nothing unless P < prec)
    CInf with_prec(const XRat& P) const;
    // cap precision at P and forget the now-invisible terms (for trimming
    // exact inputs down to a working precision)
    CInf truncated(const XRat& P) const;

    bool equal_to_prec(const CInf& other) const {
        return (*this - other).is_zero_to_prec();
    }

    std::string str() const;  // grammar of parse(); round-trips
    // "c*T^(a/b) + ..." with c a decimal integer or [v0,v1,...] coordinates
    static CInf parse(const FieldPtr& F, const std::string& text);

    // internal: raw access for builders
    std::vector<Term>& mut_terms() { return t_; }
    void set_prec(const XRat& P) { prec_ = P; }

    // ring-protocol helpers shared with FrobSym via templates
    CInf ring_zero() const { return CInf::zero(F_); }
    CInf ring_one() const { return CInf::one(F_); }
    bool is_zero() const { return t_.empty(); }

private:
    FieldPtr F_;
    std::vector<Term> t_;   // descending exponent
    XRat prec_ = XRat::pos_inf();
};

} // namespace drinfeld

#endif
