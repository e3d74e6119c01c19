#include "drinfeld/motives.hpp"

#include <sstream>

namespace drinfeld {

XRat tmat_defect(const Mat<TPoly<CInf>>& m) {
    XRat worst = XRat::neg_inf();
    for (const auto& e : m.d)
        for (int i = 0; i <= e.degree(); ++i) worst = XRat::max(worst, e.coeff(i).deg());
    return worst;
}

FrobSym normalizer_uctilde(int r) {
    FrobSym eta = FrobSym::constant((r - 1) % 2 == 0 ? 1 : -1) * FrobSym::kappa(r).inv();
    return FrobSym::normalizer("u_ct_r" + std::to_string(r), eta);
}

FrobSym normalizer_uc(int r) {
    FrobSym eta =
        FrobSym::constant((r - 1) % 2 == 0 ? 1 : -1) * FrobSym::kappa(r, -r).inv();
    return FrobSym::normalizer("u_c_r" + std::to_string(r), eta);
}

namespace {

using SRow = Mat<SkewPoly<FrobSym>>;   // 1 x dim over K[tau]
using DRow = Mat<SigmaPoly<FrobSym>>;  // 1 x dim over K[sigma]

template <int Dir>
Mat<OrePoly<FrobSym, Dir>> op_left(const Mat<OrePoly<FrobSym, Dir>>& row) {
    Mat<OrePoly<FrobSym, Dir>> out = row;
    for (auto& p : out.d) {
        OrePoly<FrobSym, Dir> q(p.proto);
        q.a.assign(p.a.size() + 1, p.proto);
        for (size_t k = 0; k < p.a.size(); ++k) q.a[k + 1] = p.a[k].twist(Dir);
        q.trim();
        p = q;
    }
    return out;
}

template <int Dir>
Mat<OrePoly<FrobSym, Dir>> scale_left(const Mat<OrePoly<FrobSym, Dir>>& row, const FrobSym& c) {
    Mat<OrePoly<FrobSym, Dir>> out = row;
    for (auto& p : out.d)
        for (auto& a : p.a) a = c * a;
    for (auto& p : out.d) p.trim();
    return out;
}

// action of a t-polynomial on a module row: t acts as row * action_mat
template <int Dir>
Mat<OrePoly<FrobSym, Dir>> poly_action(const TPoly<FrobSym>& P,
                                       const Mat<OrePoly<FrobSym, Dir>>& row,
                                       const Mat<OrePoly<FrobSym, Dir>>& action) {
    Mat<OrePoly<FrobSym, Dir>> acc(1, row.cols, row.d[0].ring_zero());
    Mat<OrePoly<FrobSym, Dir>> power = row;
    for (int k = 0; k <= P.degree(); ++k) {
        if (k > 0) power = power * action;
        if (!P.coeff(k).is_zero()) acc = acc + scale_left(power, P.coeff(k));
    }
    return acc;
}

template <int Dir>
Mat<OrePoly<FrobSym, Dir>> unit_row(int dim, int pos) {
    FrobSym z = FrobSym::zero();
    Mat<OrePoly<FrobSym, Dir>> row(1, dim, OrePoly<FrobSym, Dir>(z));
    row.at(0, pos) = OrePoly<FrobSym, Dir>::one(z);
    return row;
}

std::vector<FrobSym> sym_kappas(int r) {
    std::vector<FrobSym> ks;
    for (int i = 1; i <= r; ++i) ks.push_back(FrobSym::kappa(i));
    return ks;
}

TPoly<FrobSym> sym_lin_pow(int e) {  // (t - theta)^e
    TPoly<FrobSym> lin(FrobSym::zero());
    lin.c = {-FrobSym::theta(), FrobSym::one()};
    return lin.pow(e);
}

std::string describe_mismatch(int i, int j, const std::string& side) {
    std::ostringstream os;
    os << side << " entry (" << i + 1 << "," << j + 1 << ") differs";
    return os.str();
}

} // namespace

TFrameReport verify_tframe_Ee(int r, int e) {
    int dim = (e == 0) ? r - 1 : r * e + r - 1;
    auto psi = build_Ee_symbolic(r, e);
    FrameSet<FrobSym> fs(FrobSym::theta(), sym_kappas(r));
    Mat<TPoly<FrobSym>> P = fs.cof_phi_tilde;
    if (e > 0) {
        TPoly<FrobSym> sh = sym_lin_pow(e);
        for (auto& entry : P.d) entry = entry * sh;
    }

    // ordered K[t]-basis m_{E_e}
    std::vector<SRow> basis;
    if (e == 0) {
        SRow first = op_left<1>(unit_row<1>(dim, 0));
        first = scale_left<1>(first, FrobSym::constant((r - 1) % 2 == 0 ? 1 : -1));
        basis.push_back(first);
        for (int i = 2; i <= r; ++i) basis.push_back(unit_row<1>(dim, r + 1 - i - 1));
    } else {
        for (int i = 1; i <= r; ++i) basis.push_back(unit_row<1>(dim, r - i));
    }

    for (int i = 0; i < r; ++i) {
        SRow lhs = op_left<1>(basis[i]);
        SRow rhs(1, dim, lhs.d[0].ring_zero());
        for (int j = 0; j < r; ++j) rhs = rhs + poly_action<1>(P.at(i, j), basis[j], psi);
        for (int k = 0; k < dim; ++k)
            if (!(lhs.at(0, k) == rhs.at(0, k)))
                return {false, describe_mismatch(i, k, "tau-frame")};
    }
    return {true, ""};
}

Mat<TPoly<FrobSym>> appendix_Pi(int r) {
    FrobSym z = FrobSym::zero();
    TPoly<FrobSym> zt(z), lin = sym_lin_pow(1);
    Mat<TPoly<FrobSym>> Pi(r, r, zt);
    Pi.at(0, 0) = TPoly<FrobSym>::constant(FrobSym::kappa(1, -1));
    for (int j = 2; j <= r; ++j)
        Pi.at(0, j - 1) = lin.scaled(FrobSym::kappa(r - j + 2, -1));
    for (int i = 2; i <= r - 1; ++i) Pi.at(i - 1, r + 2 - i - 1) = lin;
    Pi.at(r - 1, 0) = TPoly<FrobSym>::constant(FrobSym::one());
    return Pi;
}

Mat<FrobSym> appendix_chi(int r) {
    Mat<FrobSym> chi(r, r, FrobSym::zero());
    chi.at(0, 0) = FrobSym::one();
    for (int i = 2; i <= r; ++i)
        for (int j = i; j <= r; ++j) chi.at(i - 1, j - 1) = FrobSym::kappa(r - j + i, 1 - i);
    return chi;
}

TFrameReport verify_dual_tframe_Ee(int r, int e) {
    int dim = (e == 0) ? r - 1 : r * e + r - 1;
    auto psi = build_Ee_symbolic(r, e);
    auto psis = star_dualize(psi);  // t . n = n psi_t^*
    FrobSym z = FrobSym::zero();
    FrobSym uct = normalizer_uctilde(r);
    FrobSym uc = normalizer_uc(r);
    FrobSym uct_inv = uct.inv();

    // s_{E_e} rows
    std::vector<DRow> srow;
    if (e == 0) {
        srow.push_back(op_left<-1>(unit_row<-1>(dim, r - 2)));  // sigma s_{r-1}
        for (int i = 1; i <= r - 1; ++i) srow.push_back(unit_row<-1>(dim, i - 1));
    } else {
        for (int i = 0; i < r; ++i) srow.push_back(unit_row<-1>(dim, r * e - 1 + i));
    }

    // A_e diagonal entries
    std::vector<FrobSym> adiag(r, uct_inv.twist(-1));
    if (e == 0) adiag[0] = uct_inv.twist(-2);

    // (a) sigma s = Phi_{E_e} s with Phi_{E_e} = (A_e^{-1})^{(-1)} Pi (t-theta)^e A_e
    Mat<TPoly<FrobSym>> Pi = appendix_Pi(r);
    TPoly<FrobSym> she = sym_lin_pow(e);
    Mat<TPoly<FrobSym>> PhiEe(r, r, TPoly<FrobSym>(z));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            PhiEe.at(i, j) = (Pi.at(i, j) * she).scaled(adiag[i].inv().twist(-1) * adiag[j]);
    for (int i = 0; i < r; ++i) {
        DRow lhs = op_left<-1>(srow[i]);
        DRow rhs(1, dim, lhs.d[0].ring_zero());
        for (int j = 0; j < r; ++j) rhs = rhs + poly_action<-1>(PhiEe.at(i, j), srow[j], psis);
        for (int k = 0; k < dim; ++k)
            if (!(lhs.at(0, k) == rhs.at(0, k)))
                return {false, describe_mismatch(i, k, "A_e-frame")};
    }

    // (b) n = u_c chi A_e s satisfies sigma n = (t-theta)^e Cof(Phi_E) n
    Mat<FrobSym> chi = appendix_chi(r);
    std::vector<DRow> nrow;
    for (int i = 0; i < r; ++i) {
        DRow acc(1, dim, srow[0].d[0].ring_zero());
        for (int j = 0; j < r; ++j) {
            if (chi.at(i, j).is_zero()) continue;
            acc = acc + scale_left<-1>(srow[j], uc * chi.at(i, j) * adiag[j]);
        }
        nrow.push_back(acc);
    }
    FrameSet<FrobSym> fs(FrobSym::theta(), sym_kappas(r));
    Mat<TPoly<FrobSym>> Q = fs.cof_phi;
    if (e > 0)
        for (auto& entry : Q.d) entry = entry * she;
    for (int i = 0; i < r; ++i) {
        DRow lhs = op_left<-1>(nrow[i]);
        DRow rhs(1, dim, lhs.d[0].ring_zero());
        for (int j = 0; j < r; ++j) rhs = rhs + poly_action<-1>(Q.at(i, j), nrow[j], psis);
        for (int k = 0; k < dim; ++k)
            if (!(lhs.at(0, k) == rhs.at(0, k)))
                return {false, describe_mismatch(i, k, "dual-frame")};
    }

    // (c) cleared conjugation identity (u_c chi)^{(-1)} Pi = Cof(Phi_E) (u_c chi)
    Mat<TPoly<FrobSym>> uchi(r, r, TPoly<FrobSym>(z));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            if (!chi.at(i, j).is_zero())
                uchi.at(i, j) = TPoly<FrobSym>::constant(uc * chi.at(i, j));
    Mat<TPoly<FrobSym>> lhs = uchi.twist(-1) * Pi;
    Mat<TPoly<FrobSym>> rhs = fs.cof_phi * uchi;
    if (!(lhs - rhs).is_zero()) return {false, "chi-conjugation identity"};

    return {true, ""};
}

AspResult asp_check(int r, int e) {
    auto psi = build_Ee_symbolic(r, e);
    int s = (e == 0) ? r - 1 : r * e + r - 1;
    auto power = mat_power(psi, s);
    int dim = psi.rows;
    AspResult res{Mat<FrobSym>(dim, dim, FrobSym::zero()), true, true, power};
    int top = 0;
    for (const auto& p : power.d) top = std::max(top, p.degree());
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) res.top.at(i, j) = power.at(i, j).coeff(top);
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            if (!res.top.at(i, j).is_zero()) res.lower_triangular = false;
    for (int i = 0; i < dim; ++i) {
        const FrobSym& d = res.top.at(i, i);
        if (d.is_zero() || d.terms().size() != 1) res.diagonal_units = false;
    }
    return res;
}

} // namespace drinfeld
