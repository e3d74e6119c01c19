#ifndef DRINFELD_AGF_HPP
#define DRINFELD_AGF_HPP

#include "drinfeld/tmodule.hpp"

namespace drinfeld {

struct FrobeniusCheckFailed : DomainError {
    explicit FrobeniusCheckFailed(const std::string& w) : DomainError(w) {}
};

// G_y(t; phi) = sum_n B_n ((dphi_t - t Id)^{-1})^{(n)} y^{(n)} as a finite
// pfrac sum; levels are added until the dropped numerators sit below
// tail_stop with a safety margin, and the certificate is the degree of the
// first dropped term.
TateMat agf_compute(const TModule& G, const std::vector<CInf>& y, const Rat& tail_stop,
                    int cap = 60, XRat* tail_cert = nullptr);

// Upsilon = < tau m_i | (G_{w_1}, ..., G_{w_r}) >, rows given as Ore vectors.
// Verifies the motive-side equation Upsilon = Phi~ Upsilon^{(-1)} below the
// guard and throws FrobeniusCheckFailed otherwise.
TateMat upsilon_matrix(const TModule& G, const Mat<SkewPoly<CInf>>& tau_rows,
                       const std::vector<std::vector<CInf>>& periods,
                       const Mat<TPoly<CInf>>& phi_tilde, const Rat& tail_stop,
                       const XRat& guard, int T, XRat* defect_out = nullptr);

// <delta(t) | G_y(t; phi)>|_{t=theta}: quasi-period / quasi-logarithm values
// through the Anderson generating function route (n = 0 biderivations)
CInf quasi_value(const TModule& G, const Biderivation& delta, const std::vector<CInf>& y,
                 const Rat& tail_stop);

struct OmegaPair {
    TateElem omega;   // pfrac form, residue -pi~ at t = theta
    TateElem Omega;   // truncated series, 1/omega^{(1)}
    XRat omega_defect;   // omega = (t-theta) omega^{(-1)}  (motive side)
    XRat Omega_defect;   // Omega^{(-1)} = (t-theta) Omega  (dual side)
};

// omega := G_{pi~}(t; C) and Omega := 1/omega^{(1)}; both difference
// equations are measured and reported
OmegaPair omega_Omega(const FieldPtr& F, const Rat& P, int T);

// Psi := (Upsilon^tr V)^{-1} via adjugate + series inversion at t-degree T;
// the dual-side equation is the caller's to check (entries are truncations)
TateMat psi_dual(const TateMat& Upsilon, const Mat<TPoly<CInf>>& V, int T);

// adjugate-based inverse of a Tate matrix with poly-only entries
TateMat tatemat_inv_series(const TateMat& M, int T);

// determinant of a Tate matrix (entries expanded to degree T first)
TateElem tatemat_det(const TateMat& M, int T);

} // namespace drinfeld

#endif
