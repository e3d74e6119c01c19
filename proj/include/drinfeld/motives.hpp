#ifndef DRINFELD_MOTIVES_HPP
#define DRINFELD_MOTIVES_HPP

#include <string>

#include "drinfeld/tmodule.hpp"

namespace drinfeld {

// The explicit frame matrices of a rank-r Drinfeld module over either
// coefficient ring: the tau-side Phi~_E, the sigma-side Phi_E, the change of
// basis V_E, their cofactors, and the determinant prefactors
// c~ = (-1)^{r-1}/kappa_r and c = (-1)^{r-1}/kappa_r^{(-r)}.
template <TwistRing R>
struct FrameSet {
    int r = 0;
    R theta;
    std::vector<R> kappa;  // kappa[i-1] = kappa_i
    Mat<TPoly<R>> phi_tilde, phi, V;
    Mat<TPoly<R>> cof_phi_tilde, cof_phi, cof_V;
    R ctilde, c;

    FrameSet(const R& th, std::vector<R> kap)
        : theta(th),
          kappa(std::move(kap)),
          phi_tilde(0, 0, TPoly<R>(th.ring_zero())),
          phi(phi_tilde),
          V(phi_tilde),
          cof_phi_tilde(phi_tilde),
          cof_phi(phi_tilde),
          cof_V(phi_tilde),
          ctilde(th.ring_zero()),
          c(th.ring_zero()) {
        r = (int)kappa.size();
        build();
    }

private:
    void build();
};

template <TwistRing R>
void FrameSet<R>::build() {
    if (r < 2) throw std::invalid_argument("FrameSet: rank >= 2 required");
    const R z = theta.ring_zero();
    const R one = theta.ring_one();
    TPoly<R> zt(z);
    R kr_inv = kappa[r - 1].inv();
    R sgn = (r - 1) % 2 == 0 ? one : -one;
    ctilde = sgn * kr_inv;
    R kr_mr = kappa[r - 1].twist(-r);
    c = sgn * kr_mr.inv();

    auto lin = [&](const R& th) {  // t - th
        TPoly<R> p(z);
        p.c = {-th, one};
        return p;
    };

    phi_tilde = Mat<TPoly<R>>(r, r, zt);
    for (int i = 0; i + 1 < r; ++i) phi_tilde.at(i, i + 1) = TPoly<R>::constant(one);
    phi_tilde.at(r - 1, 0) = lin(theta).scaled(kr_inv);
    for (int j = 1; j < r; ++j)
        phi_tilde.at(r - 1, j) = TPoly<R>::constant(-(kr_inv * kappa[j - 1]));

    phi = Mat<TPoly<R>>(r, r, zt);
    R krm_inv = kr_mr.inv();
    for (int i = 0; i + 1 < r; ++i) phi.at(i, i + 1) = TPoly<R>::constant(one);
    phi.at(r - 1, 0) = lin(theta).scaled(krm_inv);
    for (int j = 1; j < r; ++j)
        phi.at(r - 1, j) = TPoly<R>::constant(-(krm_inv * kappa[j - 1].twist(-j)));

    V = Mat<TPoly<R>>(r, r, zt);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            int sub = i + j + 1;
            if (sub <= r) V.at(i, j) = TPoly<R>::constant(kappa[sub - 1].twist(-j));
        }

    cof_phi_tilde = tmat_cof(phi_tilde);
    cof_phi = tmat_cof(phi);
    cof_V = tmat_cof(V);
}

// max log_q coefficient degree of a polynomial-matrix defect (numeric) or
// exact-zero test (symbolic flows through is_zero)
template <TwistRing R>
bool tmat_is_zero(const Mat<TPoly<R>>& m) {
    return m.is_zero();
}
XRat tmat_defect(const Mat<TPoly<CInf>>& m);

// V^{(-1)} Phi - Phi~^tr V
template <TwistRing R>
Mat<TPoly<R>> v_relation_defect(const FrameSet<R>& fs) {
    return fs.V.twist(-1) * fs.phi - fs.phi_tilde.transpose() * fs.V;
}

// Reduce a skew polynomial inside M_E over the K[t]-basis (1, tau, ...,
// tau^{r-1}): tau^D = (kappa_r^{-1})^{(D-r)} ((t - theta^{(D-r)}) tau^{D-r}
//              - sum_i kappa_i^{(D-r)} tau^{D-r+i})
template <TwistRing R>
std::vector<TPoly<R>> reduce_in_ME(const OrePoly<R, 1>& p, const R& theta,
                                   const std::vector<R>& kappa) {
    int r = (int)kappa.size();
    const R z = theta.ring_zero();
    std::vector<TPoly<R>> c(std::max<int>(r, p.degree() + 1), TPoly<R>(z));
    for (int i = 0; i <= p.degree(); ++i) c[i] = TPoly<R>::constant(p.a[i]);
    for (int D = (int)c.size() - 1; D >= r; --D) {
        TPoly<R> top = c[D];
        if (top.is_zero()) continue;
        c[D] = TPoly<R>(z);
        R krD = kappa[r - 1].inv().twist(D - r);
        TPoly<R> lin(z);
        lin.c = {-theta.twist(D - r), theta.ring_one()};
        c[D - r] = c[D - r] + top * lin.scaled(krD);
        for (int i = 1; i < r; ++i)
            c[D - r + i] = c[D - r + i] - top.scaled(krD * kappa[i - 1].twist(D - r));
    }
    c.resize(r, TPoly<R>(z));
    return c;
}

// Phi~_delta by basis reduction: delta(t) is the n x 1 column of
// skew polynomials, the result the 1 x r row over R[t]
template <TwistRing R>
Mat<TPoly<R>> phi_tilde_delta(const std::vector<OrePoly<R, 1>>& delta_rows, const R& theta,
                              const std::vector<R>& kappa) {
    int n = (int)delta_rows.size();
    int r = (int)kappa.size();
    const R z = theta.ring_zero();
    TPoly<R> lin(z);
    lin.c = {-theta, theta.ring_one()};
    Mat<TPoly<R>> out(1, r, TPoly<R>(z));
    for (int j = 1; j <= n; ++j) {
        auto red = reduce_in_ME(delta_rows[j - 1], theta, kappa);
        TPoly<R> shift = lin.pow(n - j);
        for (int k = 0; k < r; ++k) out.at(0, k) = out.at(0, k) - shift * red[k];
    }
    return out;
}

// specialness: Phi~_delta Phi~_E^{-1} has polynomial entries; the witness is
// that row.  The only denominator is det = c~ (t - theta), so divisibility
// by (t - theta) decides.
template <TwistRing R>
struct SpecialnessResult {
    bool special = false;
    Mat<TPoly<R>> witness;  // Phi~_delta Phi~_E^{-1}
    std::vector<R> remainders;
};

template <TwistRing R>
SpecialnessResult<R> is_special(const Mat<TPoly<R>>& phi_delta, const FrameSet<R>& fs) {
    const R z = fs.theta.ring_zero();
    Mat<TPoly<R>> num = phi_delta * fs.cof_phi_tilde.transpose();  // row * adjugate
    SpecialnessResult<R> res{true, Mat<TPoly<R>>(1, fs.r, TPoly<R>(z)), {}};
    R scale = fs.ctilde.inv();
    for (int k = 0; k < fs.r; ++k) {
        auto [q, rem] = num.at(0, k).divmod_linear(fs.theta);
        res.remainders.push_back(rem);
        if (!rem.is_zero()) res.special = false;
        res.witness.at(0, k) = q.scaled(scale);
    }
    return res;
}

// --- symbolic appendix machinery ---------------------------------------

// normalizers u_{c~}, u_c for rank r (registered once per r)
FrobSym normalizer_uctilde(int r);
FrobSym normalizer_uc(int r);

struct TFrameReport {
    bool pass = false;
    std::string first_mismatch;  // empty when pass
};

// tau m_{E_e} = (t-theta)^e Cof(Phi~_E) m_{E_e} inside Mat_{1xdim}(K[tau])
TFrameReport verify_tframe_Ee(int r, int e);
// sigma n_{E_e} = (t-theta)^e Cof(Phi_E) n_{E_e} on the dual side, plus the
// chi-conjugation identity (u_c chi)^{(-1)} Pi = Cof(Phi_E) (u_c chi)
TFrameReport verify_dual_tframe_Ee(int r, int e);

// the appendix Pi and chi matrices (symbolic)
Mat<TPoly<FrobSym>> appendix_Pi(int r);
Mat<FrobSym> appendix_chi(int r);

struct AspResult {
    Mat<FrobSym> top;   // top tau-coefficient of (psi_e)_{t^{re+r-1}}
    bool lower_triangular = false;
    bool diagonal_units = false;
    Mat<SkewPoly<FrobSym>> full_power;  // the whole (psi_e)_{t^{re+r-1}}
};

// almost-strict-purity data for E_e at desk scale
AspResult asp_check(int r, int e);

} // namespace drinfeld

#endif
