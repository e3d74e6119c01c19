#ifndef DRINFELD_TMODULE_HPP
#define DRINFELD_TMODULE_HPP

#include <mutex>
#include <optional>
#include <vector>

#include "drinfeld/tate.hpp"

namespace drinfeld {

struct OutsideLogRadius : DomainError {
    explicit OutsideLogRadius(const std::string& w) : DomainError(w) {}
};
struct EnumerationBoundTooSmall : DomainError {
    explicit EnumerationBoundTooSmall(const std::string& w) : DomainError(w) {}
};
struct LinearitySanityFailed : DomainError {
    explicit LinearitySanityFailed(const std::string& w) : DomainError(w) {}
};

using SkewMatC = Mat<SkewPoly<CInf>>;

// Anderson t-module G = (G_a^d, phi): phi_t = A_0 + A_1 tau + ... with
// A_0 = theta Id + N, N nilpotent.  Exponential and logarithm coefficient
// streams are memoized behind a shared synchronized cache, so copies of a
// module share their streams.  Pwork is the working theta-precision: the
// Sylvester solves divide by theta^{q^i} - theta, whose inverse only exists
// truncated.
class TModule {
public:
    TModule(SkewMatC phi_t, const Rat& Pwork);

    int dim() const { return d_; }
    const SkewMatC& phi_t() const { return phi_; }
    const Mat<CInf>& dphi() const { return A0_; }
    Mat<CInf> tau_coeff(int i) const;  // A_i
    int tau_degree() const { return ell_; }
    const FieldPtr& field() const { return F_; }
    const Rat& pwork() const { return pwork_; }

    // B_n of Exp_phi (B_0 = Id) and P_n of Log_phi (P_0 = Id)
    Mat<CInf> exp_coeff(int n) const;
    Mat<CInf> log_coeff(int n) const;

    // phi_a and dphi_a for a = sum a_k t^k, a_k in F_q
    SkewMatC phi_poly(const std::vector<FqElem>& a) const;
    Mat<CInf> dphi_poly(const std::vector<FqElem>& a) const;

    // truncated series evaluation; stops once term degrees drop below
    // -stop_deg (tail certificate), throws if the cap is hit first
    std::vector<CInf> exp_eval(const std::vector<CInf>& z, const Rat& stop_deg,
                               int cap = 80) const;
    // dynamic convergence region check (decreasing term degrees with margin)
    std::vector<CInf> log_eval(const std::vector<CInf>& z, const Rat& stop_deg,
                               int cap = 80) const;

private:
    struct Cache {
        std::mutex mu;
        std::vector<Mat<CInf>> B, P;
    };
    FieldPtr F_;
    SkewMatC phi_;
    Mat<CInf> A0_;
    Rat pwork_;
    int d_, ell_;
    std::shared_ptr<Cache> cache_;
};

// X M - N X = R with M = lamM Id + N1, N = lamN Id + N2, N1/N2 nilpotent;
// exact iteration, terminates by nilpotency
Mat<CInf> solve_sylvester(const Mat<CInf>& M, const Mat<CInf>& N, const Mat<CInf>& R,
                          const CInf& lamM, const CInf& lamN);

TModule carlitz_module(const FieldPtr& F, const Rat& Pwork);
TModule carlitz_tensor(const FieldPtr& F, int n, const Rat& Pwork);  // C^{(x)n}

// pi~ = -(-theta)^{q/(q-1)} prod (1 - theta^{1-q^i})^{-1}, truncated so the
// dropped factors sit beyond the requested precision
CInf carlitz_pi(const FieldPtr& F, const Rat& P);

// Carlitz logarithm of x (principal branch), |x| < q^{q/(q-1)} required
CInf carlitz_log(const FieldPtr& F, const CInf& x, const Rat& stop_deg);

// Drinfeld module rho_t = theta + kappa_1 tau + ... + kappa_r tau^r
struct DrinfeldDef {
    std::vector<CInf> kappa;  // kappa[i] multiplies tau^{i+1}
    int rank() const { return (int)kappa.size(); }
    TModule to_module(const FieldPtr& F, const Rat& Pwork) const;
};

struct LatticeDef {
    std::vector<CInf> basis;  // pairwise distinct degrees (builder restriction)
};

struct LatticeBuildReport {
    int steps = 0;                      // tower updates actually applied
    int max_degree_used = 0;            // largest polynomial degree D reached
    XRat rank_sanity = XRat::neg_inf(); // max |kappa_i| for i > r (should be tiny)
    XRat kernel_residual = XRat::neg_inf();  // max |Exp(w_j)|
    XRat linearity_sanity = XRat::neg_inf(); // non-q-power coefficients (0 by construction)
};

struct LatticeBuildResult {
    DrinfeldDef module;
    std::vector<CInf> exp_coeffs;  // alpha_0..alpha_H, alpha_0 = 1
    LatticeBuildReport report;
};

// Expand Exp_Lambda over the truncated lattice; extract kappa_i; sanity
// checks per the construction (see report fields).
LatticeBuildResult lattice_to_drinfeld(const FieldPtr& F, const LatticeDef& lat, const Rat& P,
                                       int need_coeffs, int degree_cap = 40);

// E_e = C^{(x)e} (x) wedge^{r-1} E, dimension re + r - 1 (numeric entries)
TModule build_Ee(const FieldPtr& F, const DrinfeldDef& E, int e, const Rat& Pwork);
// symbolic variant over FrobSym, kappa_i generators
Mat<SkewPoly<FrobSym>> build_Ee_symbolic(int r, int e);

// (phi,[.]_n)-biderivation given by delta(t); n = 0 target is scalar
struct Biderivation {
    int n = 0;                  // target tensor power
    SkewMatC delta_t;           // n x d (1 x d when n = 0)
    bool is_partial() const;    // delta(t) in Mat(K[tau]) tau
};

// block extension module G_delta = [[phi_t, 0], [delta(t), [t]_n]]
TModule extension_module(const TModule& G, const Biderivation& delta, const FieldPtr& F);

// Quasi-periodic function F_delta: coefficient stream and evaluation.
// Solves C_i (dphi_t)^{(i)} - d[t]_n C_i = ([t]_n)_tau C_{i-1}^{(1)} + D_i
// where D_i collects delta(t) o Exp_phi and ([t]_n)_tau is the tau-block of
// [t]_n (absent for n = 0).
class QuasiPeriodic {
public:
    QuasiPeriodic(TModule G, Biderivation delta);
    Mat<CInf> coeff(int i) const;  // C_i, i >= 1 (n x d); C_0 = 0
    std::vector<CInf> eval(const std::vector<CInf>& z, const Rat& stop_deg, int cap = 80) const;

private:
    struct Cache {
        std::mutex mu;
        std::vector<Mat<CInf>> C;
    };
    TModule G_;
    Biderivation delta_;
    int rows_;
    std::shared_ptr<Cache> cache_;
};

} // namespace drinfeld

#endif
