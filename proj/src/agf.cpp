#include "drinfeld/agf.hpp"

#include <sstream>

namespace drinfeld {

TateMat agf_compute(const TModule& G, const std::vector<CInf>& y, const Rat& tail_stop,
                    int cap, XRat* tail_cert) {
    const FieldPtr& F = G.field();
    int d = G.dim();
    if ((int)y.size() != d) throw std::invalid_argument("agf_compute: dimension mismatch");
    CInf z = CInf::zero(F);
    // nilpotent part and its powers: (dphi - t Id)^{-1} = -sum N^m (t-theta)^{-m-1}
    Mat<CInf> N = G.dphi();
    CInf theta = CInf::theta_pow(F, Rat(1));
    for (int i = 0; i < d; ++i) N.at(i, i) = N.at(i, i) - theta;
    std::vector<Mat<CInf>> Npow{Mat<CInf>::identity(d, z)};
    for (int m = 1; m < d; ++m) {
        Mat<CInf> nx = Npow.back() * N;
        if (nx.is_zero()) break;
        Npow.push_back(nx);
    }

    TateMat out(d, 1, TateElem(z));
    int quiet = 0;
    XRat cert = XRat::neg_inf();
    for (int n = 0;; ++n) {
        if (n > cap)
            throw DomainError("agf_compute: pole-level cap reached before the tail certificate");
        Mat<CInf> Bn = G.exp_coeff(n);
        std::vector<CInf> yn(d, z);
        for (int i = 0; i < d; ++i) yn[i] = y[i].twist(n);
        long long qn = 1;
        for (int k = 0; k < n; ++k) qn *= F->q();
        XRat level_max = XRat::neg_inf();
        for (size_t m = 0; m < Npow.size(); ++m) {
            Mat<CInf> NmT = Npow[m].twist(n);
            for (int i = 0; i < d; ++i) {
                CInf num = z;
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        num = num + Bn.at(i, a) * NmT.at(a, b) * yn[b];
                num = -num;
                if (num.is_zero()) continue;
                out.at(i, 0) = out.at(i, 0) + TateElem::principal(num, n, (int)m + 1);
                level_max = XRat::max(level_max, num.deg() + XRat(Rat(-qn * (long long)(m + 1))));
            }
        }
        if (level_max < XRat(-tail_stop - Rat(5))) {
            if (++quiet >= 3) {
                cert = level_max;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if (tail_cert) *tail_cert = cert;
    return out;
}

TateMat upsilon_matrix(const TModule& G, const Mat<SkewPoly<CInf>>& tau_rows,
                       const std::vector<std::vector<CInf>>& periods,
                       const Mat<TPoly<CInf>>& phi_tilde, const Rat& tail_stop,
                       const XRat& guard, int T, XRat* defect_out) {
    const FieldPtr& F = G.field();
    int r = (int)periods.size();
    if (tau_rows.rows != r) throw std::invalid_argument("upsilon_matrix: row count mismatch");
    CInf z = CInf::zero(F);
    for (const auto& w : periods) {
        auto img = G.exp_eval(w, tail_stop);
        for (const auto& x : img)
            if (!(x.deg_bound() < guard))
                throw FrobeniusCheckFailed("upsilon_matrix: period fails the kernel check");
    }
    TateMat ups(r, r, TateElem(z));
    for (int j = 0; j < r; ++j) {
        TateMat agf = agf_compute(G, periods[j], tail_stop);
        TateMat col = inner_product(tau_rows, agf);
        for (int i = 0; i < r; ++i) ups.at(i, j) = col.at(i, 0);
    }
    XRat defect = check_frobenius_equation(phi_tilde, ups, DiffSide::Motive, T);
    if (defect_out) *defect_out = defect;
    if (!(defect < guard)) {
        std::ostringstream os;
        os << "upsilon_matrix: motive-side defect " << defect.str() << " above guard "
           << guard.str();
        throw FrobeniusCheckFailed(os.str());
    }
    return ups;
}

CInf quasi_value(const TModule& G, const Biderivation& delta, const std::vector<CInf>& y,
                 const Rat& tail_stop) {
    if (delta.n != 0) throw std::invalid_argument("quasi_value: n = 0 biderivations only");
    if (!delta.is_partial()) throw std::invalid_argument("quasi_value: delta must be partial");
    TateMat agf = agf_compute(G, y, tail_stop);
    TateMat ip = inner_product(delta.delta_t, agf);
    auto [val, res] = ip.at(0, 0).eval_residue_theta();
    if (!val.has_value()) throw PoleAtTheta("quasi_value: unexpected pole at t = theta");
    (void)res;
    return *val;
}

OmegaPair omega_Omega(const FieldPtr& F, const Rat& P, int T) {
    OmegaPair out{TateElem(CInf::zero(F)), TateElem(CInf::zero(F)), XRat::neg_inf(),
                  XRat::neg_inf()};
    CInf pi = carlitz_pi(F, P + Rat(10));
    TModule C = carlitz_module(F, P + Rat(10));
    TateMat agf = agf_compute(C, {pi}, P + Rat(5));
    out.omega = agf.at(0, 0);

    // the AGF trivialization entry is omega^{(1)} = <tau | G_pi~>, which is
    // what satisfies the motive-side equation X = (t - theta) X^{(-1)}
    Mat<TPoly<CInf>> lin(1, 1, TPoly<CInf>(CInf::zero(F)));
    lin.at(0, 0) = TateElem::t_minus_theta_pow(F, 1).poly();
    TateMat W(1, 1, out.omega.twist(1));
    out.omega_defect = check_frobenius_equation(lin, W, DiffSide::Motive, T);

    TateElem om1 = out.omega.twist(1).expanded(T);
    out.Omega = om1.inv_series(T);
    TateMat O(1, 1, out.Omega);
    out.Omega_defect = check_frobenius_equation(lin, O, DiffSide::Dual, T);
    return out;
}

TateElem tatemat_det(const TateMat& M, int T) {
    if (M.rows != M.cols) throw std::invalid_argument("tatemat_det: square required");
    TateMat E = tatemat_expanded(M, T);
    int n = M.rows;
    if (n == 1) return E.at(0, 0);
    TateElem acc = E.d[0].ring_zero();
    for (int j = 0; j < n; ++j) {
        if (E.at(0, j).is_zero()) continue;
        TateMat minor(n - 1, n - 1, E.d[0].ring_zero());
        for (int i = 1; i < n; ++i) {
            int cc = 0;
            for (int k = 0; k < n; ++k) {
                if (k == j) continue;
                minor.at(i - 1, cc++) = E.at(i, k);
            }
        }
        TateElem term = E.at(0, j) * tatemat_det(minor, T);
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

TateMat tatemat_inv_series(const TateMat& M, int T) {
    if (M.rows != M.cols) throw std::invalid_argument("tatemat_inv_series: square required");
    TateMat E = tatemat_expanded(M, T);
    int n = M.rows;
    TateElem det = tatemat_det(E, T);
    TateElem dinv = det.inv_series(T);
    TateMat out(n, n, E.d[0].ring_zero());
    if (n == 1) {
        out.at(0, 0) = dinv;
        return out;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            TateMat minor(n - 1, n - 1, E.d[0].ring_zero());
            int rr = 0;
            for (int a = 0; a < n; ++a) {
                if (a == i) continue;
                int cc = 0;
                for (int b = 0; b < n; ++b) {
                    if (b == j) continue;
                    minor.at(rr, cc++) = E.at(a, b);
                }
                ++rr;
            }
            TateElem cof = tatemat_det(minor, T);
            if ((i + j) % 2) cof = -cof;
            out.at(j, i) = cof * dinv;  // adjugate transposes the cofactor
        }
    return out;
}

TateMat psi_dual(const TateMat& Upsilon, const Mat<TPoly<CInf>>& V, int T) {
    TateMat ut = Upsilon.transpose();
    TateMat prod(ut.rows, V.cols, ut.d[0].ring_zero());
    for (int i = 0; i < ut.rows; ++i)
        for (int j = 0; j < V.cols; ++j) {
            TateElem acc = ut.d[0].ring_zero();
            for (int k = 0; k < ut.cols; ++k) {
                if (V.at(k, j).is_zero()) continue;
                acc = acc + ut.at(i, k).mul_tpoly(V.at(k, j));
            }
            prod.at(i, j) = acc;
        }
    return tatemat_inv_series(prod, T);
}

} // namespace drinfeld
