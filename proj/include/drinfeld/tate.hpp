#ifndef DRINFELD_TATE_HPP
#define DRINFELD_TATE_HPP

#include <climits>
#include <optional>
#include <string>

#include "drinfeld/tpoly.hpp"

namespace drinfeld {

struct NegativePoleLevel : DomainError {
    explicit NegativePoleLevel(const std::string& w) : DomainError(w) {}
};
struct PoleAtTheta : DomainError {
    explicit PoleAtTheta(const std::string& w) : DomainError(w) {}
};

// Element of the Tate algebra T in a dual representation:
//   poly  - polynomial part in t (possibly the truncation of a power series,
//           trusted through t-degree tvalid),
//   pfrac - finite sum of principal parts num/(t - theta^{q^level})^mult,
//           kept symbolic so twisting and evaluation at t = theta stay exact.
// AGFs enter as pure pfrac sums; frame matrices enter as exact polynomials.
class TateElem {
public:
    struct Pfrac {
        int level;   // pole at theta^{q^level}, level >= 0
        int mult;    // multiplicity >= 1
        CInf num;
    };

    explicit TateElem(const CInf& proto)
        : F_(proto.field()), poly_(proto.ring_zero()), tvalid_(INT_MAX) {}
    TateElem(const CInf& proto, TPoly<CInf> p, int tvalid = INT_MAX)
        : F_(proto.field()), poly_(std::move(p)), tvalid_(tvalid) {}

    static TateElem zero(const CInf& proto) { return TateElem(proto); }
    static TateElem from_poly(const TPoly<CInf>& p) { return TateElem(p.proto, p); }
    static TateElem t_minus_theta_pow(const FieldPtr& F, int n);  // (t - theta)^n
    static TateElem principal(const CInf& num, int level, int mult = 1);

    const FieldPtr& field() const { return F_; }
    const TPoly<CInf>& poly() const { return poly_; }
    const std::vector<Pfrac>& pfrac() const { return pf_; }
    int tvalid() const { return tvalid_; }
    bool has_pfrac() const { return !pf_.empty(); }
    bool exact() const { return tvalid_ == INT_MAX; }

    bool is_zero() const { return poly_.is_zero() && pf_.empty(); }
    bool is_zero_to_prec() const { return is_zero(); }
    TateElem ring_zero() const { return TateElem(poly_.proto); }
    TateElem ring_one() const {
        return TateElem(poly_.proto, TPoly<CInf>::constant(poly_.proto.ring_one()));
    }

    friend TateElem operator+(const TateElem& a, const TateElem& b);
    friend TateElem operator-(const TateElem& a, const TateElem& b);
    TateElem operator-() const;
    // General products require at least one exact polynomial operand; the
    // difference-equation plumbing only ever multiplies frame polynomials
    // into AGF forms, which stays exact.  Expand explicitly otherwise.
    friend TateElem operator*(const TateElem& a, const TateElem& b);

    TateElem mul_tpoly(const TPoly<CInf>& p) const;  // exact, pole-aware
    TateElem scaled(const CInf& c) const;

    // coefficientwise twist; pfrac poles move one q-power per step
    TateElem twist(long long n) const;

    // expansion of the pfrac part into the polynomial part through t^T
    TateElem expanded(int T) const;
    CInf coeff(int i) const;  // t^i coefficient of the full expansion

    // sup log_q |coefficients|, using closed forms for principal parts
    XRat gauss_log_norm() const;

    // value at t = theta (absent when a pole sits there) and the residue
    // there; multiplicity >= 2 at theta is rejected
    std::pair<std::optional<CInf>, CInf> eval_residue_theta() const;

    // power-series inverse in t through degree T; constant term must be a
    // unit (pfrac part must be empty or pre-expanded)
    TateElem inv_series(int T) const;

    std::string json_dump() const;

private:
    FieldPtr F_;
    TPoly<CInf> poly_;
    std::vector<Pfrac> pf_;
    int tvalid_;
    void merge_pfrac();
    CInf pole_point(int level) const;  // theta^{q^level}
};

using TateMat = Mat<TateElem>;

TateMat tatemat_from_tpoly(const Mat<TPoly<CInf>>& m);
TateMat tatemat_expanded(const TateMat& m, int T);

// <B|F> = sum B_i F^(i)  (Ore matrices acting on Tate columns)
TateMat inner_product(const Mat<SkewPoly<CInf>>& B, const TateMat& F);

enum class DiffSide {
    Dual,    // X^(-1) = Phi X
    Motive,  // X = Phi X^(-1)
};

// log_q Gauss norm of the defect matrix (NEG_INF when it vanishes exactly);
// mixed exact/truncated entries are handled through the common valid window
XRat check_frobenius_equation(const Mat<TPoly<CInf>>& Phi, const TateMat& X, DiffSide side,
                              int T);

// binomial coefficient mod p by Lucas
int binom_mod_p(long long n, long long k, int p);

} // namespace drinfeld

#endif
