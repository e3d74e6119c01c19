#include "drinfeld/tmodule.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace drinfeld {

namespace {

Mat<CInf> scalar_mat(const FieldPtr& F, int d, const CInf& c) {
    Mat<CInf> m(d, d, CInf::zero(F));
    for (int i = 0; i < d; ++i) m.at(i, i) = c;
    return m;
}

XRat vec_maxdeg(const std::vector<CInf>& v) {
    XRat m = XRat::neg_inf();
    for (const auto& x : v) m = XRat::max(m, x.deg());
    return m;
}

} // namespace

TModule::TModule(SkewMatC phi_t, const Rat& Pwork) : phi_(std::move(phi_t)), pwork_(Pwork) {
    if (phi_.rows != phi_.cols) throw std::invalid_argument("TModule: phi_t must be square");
    d_ = phi_.rows;
    F_ = phi_.d[0].proto.field();
    for (auto& p : phi_.d)
        for (auto& c : p.a) c = c.with_prec(XRat(pwork_));
    ell_ = 0;
    for (const auto& p : phi_.d) ell_ = std::max(ell_, p.degree());
    A0_ = tau_coeff(0);
    // dphi_t = theta Id + N with N^d = 0
    Mat<CInf> N = A0_ - scalar_mat(F_, d_, CInf::theta_pow(F_, Rat(1)));
    Mat<CInf> Npow = N;
    for (int i = 1; i < d_; ++i) Npow = Npow * N;
    if (!Npow.is_zero())
        throw std::invalid_argument("TModule: dphi_t is not theta Id + nilpotent");
    cache_ = std::make_shared<Cache>();
    cache_->B.push_back(Mat<CInf>::identity(d_, CInf::zero(F_)));
    cache_->P.push_back(Mat<CInf>::identity(d_, CInf::zero(F_)));
}

Mat<CInf> TModule::tau_coeff(int i) const {
    Mat<CInf> m(d_, d_, CInf::zero(F_));
    for (int r = 0; r < d_; ++r)
        for (int c = 0; c < d_; ++c) m.at(r, c) = phi_.at(r, c).coeff(i);
    return m;
}

Mat<CInf> solve_sylvester(const Mat<CInf>& M, const Mat<CInf>& N, const Mat<CInf>& R,
                          const CInf& lamM, const CInf& lamN) {
    int rows = R.rows, cols = R.cols;
    Mat<CInf> N1 = M, N2 = N;
    for (int i = 0; i < cols; ++i) N1.at(i, i) = N1.at(i, i) - lamM;
    for (int i = 0; i < rows; ++i) N2.at(i, i) = N2.at(i, i) - lamN;
    CInf inv_gap = (lamM - lamN).inv();
    Mat<CInf> X = R.scaled(inv_gap);
    int steps = 2 * std::max(rows, cols) + 2;
    for (int k = 0; k < steps; ++k) {
        Mat<CInf> nxt = (R - X * N1 + N2 * X).scaled(inv_gap);
        bool same = (nxt - X).is_zero();
        X = nxt;
        if (same) break;
    }
    return X;
}

Mat<CInf> TModule::exp_coeff(int n) const {
    std::lock_guard<std::mutex> lk(cache_->mu);
    CInf theta = CInf::theta_pow(F_, Rat(1)).truncated(XRat(pwork_));
    auto& B = cache_->B;
    while ((int)B.size() <= n) {
        int i = (int)B.size();
        Mat<CInf> R(d_, d_, CInf::zero(F_));
        for (int j = 1; j <= std::min(i, ell_); ++j)
            R = R + tau_coeff(j) * B[i - j].twist(j);
        B.push_back(solve_sylvester(A0_.twist(i), A0_, R, theta.twist(i), theta));
    }
    return B[n];
}

Mat<CInf> TModule::log_coeff(int n) const {
    std::lock_guard<std::mutex> lk(cache_->mu);
    CInf theta = CInf::theta_pow(F_, Rat(1)).truncated(XRat(pwork_));
    auto& P = cache_->P;
    while ((int)P.size() <= n) {
        int i = (int)P.size();
        Mat<CInf> R(d_, d_, CInf::zero(F_));
        for (int k = 1; k <= std::min(i, ell_); ++k)
            R = R + P[i - k] * tau_coeff(k).twist(i - k);
        P.push_back(solve_sylvester(A0_.twist(i), A0_, -R, theta.twist(i), theta));
    }
    return P[n];
}

SkewMatC TModule::phi_poly(const std::vector<FqElem>& a) const {
    SkewPoly<CInf> zp(CInf::zero(F_));
    SkewMatC acc(d_, d_, zp);
    SkewMatC power = Mat<SkewPoly<CInf>>::identity(d_, zp);
    for (size_t k = 0; k < a.size(); ++k) {
        if (k > 0) power = power * phi_;
        if (a[k].is_zero()) continue;
        acc = acc + power.scaled(SkewPoly<CInf>::constant(CInf::scalar(F_, a[k])));
    }
    return acc;
}

Mat<CInf> TModule::dphi_poly(const std::vector<FqElem>& a) const {
    Mat<CInf> acc(d_, d_, CInf::zero(F_));
    Mat<CInf> power = Mat<CInf>::identity(d_, CInf::zero(F_));
    for (size_t k = 0; k < a.size(); ++k) {
        if (k > 0) power = power * A0_;
        if (a[k].is_zero()) continue;
        acc = acc + power.scaled(CInf::scalar(F_, a[k]));
    }
    return acc;
}

std::vector<CInf> TModule::exp_eval(const std::vector<CInf>& z, const Rat& stop_deg,
                                    int cap) const {
    if ((int)z.size() != d_) throw std::invalid_argument("exp_eval: dimension mismatch");
    std::vector<CInf> acc = z;
    int quiet = 0;
    for (int n = 1; n <= cap; ++n) {
        Mat<CInf> Bn = exp_coeff(n);
        std::vector<CInf> term(d_, CInf::zero(F_));
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) term[i] = term[i] + Bn.at(i, j) * z[j].twist(n);
        for (int i = 0; i < d_; ++i) acc[i] = acc[i] + term[i];
        if (vec_maxdeg(term) < XRat(-stop_deg)) {
            if (++quiet >= 3) {
                for (auto& x : acc) x = x.with_prec(XRat(stop_deg));
                return acc;
            }
        } else {
            quiet = 0;
        }
    }
    throw DomainError("exp_eval: series did not settle below the stop degree");
}

std::vector<CInf> TModule::log_eval(const std::vector<CInf>& z, const Rat& stop_deg,
                                    int cap) const {
    if ((int)z.size() != d_) throw std::invalid_argument("log_eval: dimension mismatch");
    std::vector<CInf> acc = z;
    XRat prev = vec_maxdeg(z);
    int quiet = 0;
    const int burnin = 4;
    for (int n = 1; n <= cap; ++n) {
        Mat<CInf> Pn = log_coeff(n);
        std::vector<CInf> term(d_, CInf::zero(F_));
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) term[i] = term[i] + Pn.at(i, j) * z[j].twist(n);
        XRat td = vec_maxdeg(term);
        for (int i = 0; i < d_; ++i) acc[i] = acc[i] + term[i];
        if (td < XRat(-stop_deg)) {
            if (++quiet >= 3) {
                for (auto& x : acc) x = x.with_prec(XRat(stop_deg));
                return acc;
            }
            prev = td;
            continue;
        }
        quiet = 0;
        if (n > burnin && !(td < prev)) {
            std::ostringstream os;
            os << "log_eval: term degrees stopped decreasing at n=" << n << " (deg "
               << prev.str() << " -> " << td.str() << ")";
            throw OutsideLogRadius(os.str());
        }
        prev = td;
    }
    throw OutsideLogRadius("log_eval: no convergence within the term cap");
}

TModule carlitz_module(const FieldPtr& F, const Rat& Pwork) {
    SkewPoly<CInf> rho(CInf::zero(F));
    rho.a = {CInf::theta_pow(F, Rat(1)), CInf::one(F)};
    SkewMatC m(1, 1, SkewPoly<CInf>(CInf::zero(F)));
    m.at(0, 0) = rho;
    return TModule(m, Pwork);
}

TModule carlitz_tensor(const FieldPtr& F, int n, const Rat& Pwork) {
    if (n < 1) throw std::invalid_argument("carlitz_tensor: n >= 1");
    if (n == 1) return carlitz_module(F, Pwork);
    CInf z = CInf::zero(F);
    SkewPoly<CInf> zp(z);
    SkewMatC m(n, n, zp);
    for (int i = 0; i < n; ++i) {
        m.at(i, i) = SkewPoly<CInf>::constant(CInf::theta_pow(F, Rat(1)));
        if (i + 1 < n) m.at(i, i + 1) = SkewPoly<CInf>::constant(CInf::one(F));
    }
    m.at(n - 1, 0) = SkewPoly<CInf>::op(z);
    return TModule(m, Pwork);
}

CInf carlitz_pi(const FieldPtr& F, const Rat& P) {
    long long q = F->q();
    // (-theta)^{q/(q-1)} = twist by 1 of the canonical (q-1)-st root of -theta
    CInf mth = -CInf::theta_pow(F, Rat(1));
    CInf lead = mth.root(q - 1).twist(1);
    Rat degpi = Rat(q, q - 1);
    XRat wp = XRat(P + degpi + Rat(10));
    CInf acc = (-lead).with_prec(wp);
    for (int i = 1;; ++i) {
        long long qi = 1;
        bool overflow = false;
        for (int k = 0; k < i; ++k) {
            qi *= q;
            if (qi > (1LL << 40)) { overflow = true; break; }
        }
        if (overflow || XRat(Rat(1 - qi)) < -wp) break;
        CInf fac = (CInf::one(F) - CInf::theta_pow(F, Rat(1 - qi))).truncated(wp);
        acc = acc * fac.inv();
    }
    return acc.with_prec(XRat(P));
}

TModule DrinfeldDef::to_module(const FieldPtr& F, const Rat& Pwork) const {
    SkewPoly<CInf> rho(CInf::zero(F));
    rho.a.assign(rank() + 1, CInf::zero(F));
    rho.a[0] = CInf::theta_pow(F, Rat(1));
    for (int i = 0; i < rank(); ++i) rho.a[i + 1] = kappa[i];
    rho.trim();
    SkewMatC m(1, 1, SkewPoly<CInf>(CInf::zero(F)));
    m.at(0, 0) = rho;
    return TModule(m, Pwork);
}

namespace {

// One tower pass at internal precision wp, tracking alpha_0..alpha_H only
// (the updates flow strictly upward, so the prefix is exact).  Adjoining w
// maps E <- E - E(w)^{1-q} E^{[q]}.  With collision-free candidate degrees,
// deg E(w) = deg w + sum_{|lambda| < |w|} (deg w - deg lambda) exactly, so
// negligibility is decided before any series arithmetic.  Returns false when
// the running precision cannot resolve a needed update; the caller retries
// with a larger wp.
bool lattice_tower_pass(const FieldPtr& F, const std::vector<CInf>& basis, const Rat& P,
                        const XRat& wp, int degree_cap, int H, std::vector<CInf>& alpha,
                        std::vector<XRat>& degub_out, LatticeBuildReport& rep,
                        XRat& deficit) {
    long long q = F->q();
    int r = (int)basis.size();
    struct Cand {
        Rat deg;
        int i;
        int j;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < r; ++i) {
        Rat d0 = basis[i].deg().v;
        for (int j = 0; j <= degree_cap; ++j) cands.push_back({d0 + Rat(j), i, j});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.deg != b.deg) return a.deg < b.deg;
        if (a.j != b.j) return a.j < b.j;
        return a.i < b.i;
    });

    alpha.assign(1, CInf::one(F));
    // proven degree bounds for the tracked alphas
    std::vector<XRat> degub{XRat(Rat(0))};
    std::vector<Rat> processed;  // degrees of adjoined generators
    rep = LatticeBuildReport{};
    int quiet = 0;
    const int quiet_needed = 3 * r;
    for (const Cand& cd : cands) {
        Rat dw = cd.deg;
        // exact value degree of the partial exponential at w: the m-th
        // adjoined generator (ascending degrees d_m, collision-free) carries
        // (q-1) q^m lattice points of its degree, each contributing
        // dw - d_m to deg Exp_V(w)
        Rat degEw = dw;
        {
            Rat count(q - 1);
            for (const Rat& d : processed) {
                if (d < dw) degEw = degEw + count * (dw - d);
                count = count * Rat(q);
            }
        }
        XRat maxal = XRat::max(vec_maxdeg(alpha), XRat(Rat(0)));
        XRat updb = XRat(degEw * Rat(1 - q)) + maxal.scaled(Rat(q));
        if (updb < XRat(-P - Rat(5))) {
            if (++quiet >= quiet_needed) {
                degub_out = degub;
                return true;
            }
            continue;
        }
        quiet = 0;
        CInf w = (basis[cd.i] * CInf::theta_pow(F, Rat(cd.j))).truncated(wp);
        // E(w): include only terms whose proven bound reaches the window
        XRat A = XRat(P + Rat(5)) + maxal.scaled(Rat(q));
        XRat threshold = XRat(degEw * Rat(q)) - A;
        CInf Ew = w;
        XRat skipped = XRat::neg_inf();
        {
            Rat qh(1);
            for (size_t h = 1; h < alpha.size(); ++h) {
                qh = qh * Rat(q);
                XRat contrib = degub[h] + XRat(dw * qh);
                if (contrib < threshold) {
                    skipped = XRat::max(skipped, contrib);
                    continue;
                }
                Ew = Ew + alpha[h] * w.twist((long long)h);
            }
        }
        if (skipped.finite()) Ew = Ew.with_prec(-skipped);
        if (Ew.is_zero_to_prec() || !(XRat(degEw) == Ew.deg())) {
            deficit = XRat::max(deficit, XRat(degEw) - Ew.prec() + XRat(P));
            return false;
        }
        CInf factor = Ew.pow(1 - q);
        size_t nlen = std::min(alpha.size() + 1, (size_t)H + 1);
        std::vector<CInf> nxt(nlen, CInf::zero(F));
        std::vector<XRat> nxtub(nlen, XRat::neg_inf());
        for (size_t h = 0; h < alpha.size() && h < nlen; ++h) {
            nxt[h] = alpha[h];
            nxtub[h] = degub[h];
        }
        for (size_t h = 1; h < nlen; ++h) {
            nxt[h] = nxt[h] - factor * alpha[h - 1].twist(1);
            nxtub[h] = XRat::max(nxtub[h], factor.deg() + degub[h - 1].scaled(Rat(q)));
        }
        alpha.swap(nxt);
        degub.swap(nxtub);
        for (auto& a : alpha) {
            a = a.with_prec(wp);
            if (a.prec() < XRat(P + Rat(5))) {
                deficit = XRat::max(deficit, XRat(P + Rat(5)) - a.prec());
                return false;
            }
        }
        processed.push_back(dw);
        rep.steps++;
        rep.max_degree_used = std::max(rep.max_degree_used, cd.j);
    }
    throw EnumerationBoundTooSmall("lattice_to_drinfeld: degree cap exhausted before "
                                   "the tower updates became negligible");
}

} // namespace

LatticeBuildResult lattice_to_drinfeld(const FieldPtr& F, const LatticeDef& lat, const Rat& P,
                                       int need_coeffs, int degree_cap) {
    int r = (int)lat.basis.size();
    if (r < 1) throw std::invalid_argument("lattice_to_drinfeld: empty basis");
    for (int i = 0; i < r; ++i) {
        if (lat.basis[i].is_zero_to_prec())
            throw std::invalid_argument("lattice_to_drinfeld: zero basis element");
        for (int j = i + 1; j < r; ++j) {
            // the degree-count formula for |Exp_V(w)| needs candidate degrees
            // to be collision-free, i.e. basis degrees distinct mod Z
            Rat diff = lat.basis[i].deg().v - lat.basis[j].deg().v;
            if (diff.is_integer())
                throw std::invalid_argument(
                    "lattice_to_drinfeld: basis degrees must be distinct modulo integers");
        }
    }

    // internal precision retries: evaluating the partial exponential at deep
    // lattice points consumes absolute precision superlinearly in the target
    std::vector<CInf> alpha;
    LatticeBuildReport rep;
    bool ok = false;
    XRat wp = XRat(P + Rat(30));
    std::vector<XRat> degub;
    // the tower must track every level that can enter an E(w) evaluation
    // window, not just the requested output prefix
    int H = 64;
    int sanity_rows = 3;
    DrinfeldDef mod;
    for (int attempt = 0; attempt < 6 && !ok; ++attempt) {
        XRat deficit = XRat::neg_inf();
        ok = lattice_tower_pass(F, lat.basis, P, wp, degree_cap, H, alpha, degub, rep, deficit);
        if (ok) {
            // kappa extraction and the sanity checks are precision-hungry in
            // their own right (theta^{q^h} factors); run them at wp and ask
            // for more when they cannot be resolved
            CInf theta = CInf::theta_pow(F, Rat(1)).truncated(wp);
            int have = (int)alpha.size() - 1;
            std::vector<CInf> kap;
            for (int h = 1; h <= std::min(have, r + sanity_rows); ++h) {
                CInf acc = alpha[h] * (theta.twist(h) - theta);
                for (int i = 1; i < h && i <= (int)kap.size(); ++i)
                    acc = acc - kap[i - 1] * alpha[h - i].twist(i);
                kap.push_back(acc);
            }
            if ((int)kap.size() < r)
                throw EnumerationBoundTooSmall(
                    "lattice_to_drinfeld: too few exponential coefficients");
            rep.rank_sanity = XRat::neg_inf();
            for (int i = 0; i < (int)kap.size(); ++i) {
                if (i < r && kap[i].prec() < XRat(P)) {
                    ok = false;
                    deficit = XRat::max(deficit, XRat(P) - kap[i].prec());
                }
                if (i >= r) {
                    if (!kap[i].is_zero_to_prec() &&
                        kap[i].deg() > -XRat(P) + XRat(Rat(15)))
                        throw LinearitySanityFailed(
                            "lattice_to_drinfeld: kappa beyond rank r fails to vanish");
                    if (kap[i].prec() < XRat(P - Rat(15))) {
                        ok = false;
                        deficit = XRat::max(deficit, XRat(P) - kap[i].prec());
                    }
                    rep.rank_sanity = XRat::max(rep.rank_sanity, kap[i].deg_bound());
                }
            }
            if (ok && kap[r - 1].is_zero_to_prec())
                throw LinearitySanityFailed("lattice_to_drinfeld: kappa_r vanishes to precision");

            // kernel residuals Exp(w_j) ~ 0, windowed by the proven degree
            // bounds so untracked levels contribute their bound
            if (ok) {
                rep.kernel_residual = XRat::neg_inf();
                for (int i = 0; i < r && ok; ++i) {
                    CInf w = lat.basis[i].truncated(wp);
                    Rat dw = w.deg().v;
                    CInf acc = w;
                    XRat floor_ = XRat(-P - Rat(10));
                    XRat skipped = XRat::neg_inf();
                    Rat qh(1);
                    for (size_t h = 1; h < alpha.size(); ++h) {
                        qh = qh * Rat(F->q());
                        XRat bound = degub[h] + XRat(dw * qh);
                        if (bound < floor_) {
                            skipped = XRat::max(skipped, bound);
                            continue;
                        }
                        acc = acc + alpha[h] * w.twist((long long)h);
                    }
                    if (!acc.is_zero_to_prec() && acc.deg() > -XRat(P) + XRat(Rat(15)))
                        throw LinearitySanityFailed(
                            "lattice_to_drinfeld: kernel residual visibly nonzero");
                    if (acc.prec() < XRat(P - Rat(15))) {
                        ok = false;
                        deficit = XRat::max(deficit, XRat(P) - acc.prec());
                    }
                    rep.kernel_residual = XRat::max(
                        rep.kernel_residual, XRat::max(acc.deg_bound(), skipped));
                }
            }
            if (ok) {
                mod.kappa.assign(kap.begin(), kap.begin() + r);
                break;
            }
        }
        if (!ok) {
            if (getenv("DRINFELD_DEBUG_LATTICE"))
                fprintf(stderr, "[lattice] attempt %d wp=%s deficit=%s\n", attempt,
                        wp.str().c_str(), deficit.str().c_str());
            XRat grow = deficit.finite() ? deficit.scaled(Rat(F->q())) + XRat(Rat(60)) : wp;
            wp = XRat::max(wp + grow, XRat(wp.v * Rat(2)));
            for (const auto& b : lat.basis)
                if (b.prec() < wp)
                    throw EnumerationBoundTooSmall(
                        "lattice_to_drinfeld: basis precision too small for the internal "
                        "retry (supply generators accurate past " + wp.str() + ")");
        }
    }
    if (!ok)
        throw EnumerationBoundTooSmall(
            "lattice_to_drinfeld: internal precision retries exhausted");

    for (auto& k : mod.kappa) k = k.with_prec(XRat(P));
    LatticeBuildResult out{std::move(mod), {}, rep};
    int keep = std::min<int>((int)alpha.size(), need_coeffs + 1);
    out.exp_coeffs.assign(alpha.begin(), alpha.begin() + keep);
    for (auto& a : out.exp_coeffs) a = a.with_prec(XRat(P));
    return out;
}

TModule build_Ee(const FieldPtr& F, const DrinfeldDef& E, int e, const Rat& Pwork) {
    int r = E.rank();
    if (r < 2) throw std::invalid_argument("build_Ee: rank >= 2 required");
    CInf z = CInf::zero(F);
    SkewPoly<CInf> zp(z);
    int sgn = (r - 1) % 2 == 0 ? 1 : -1;
    CInf sg = CInf::scalar(F, sgn);
    if (e == 0) {
        int d = r - 1;
        SkewMatC m(d, d, zp);
        for (int i = 0; i < d; ++i) {
            m.at(i, i) = m.at(i, i) + SkewPoly<CInf>::constant(CInf::theta_pow(F, Rat(1)));
            SkewPoly<CInf> taui(z);
            taui.a = {z, sg * (-E.kappa[r - 2 - i])};
            taui.trim();
            m.at(i, 0) = m.at(i, 0) + taui;
            if (i + 1 < d) {
                SkewPoly<CInf> sup(z);
                sup.a = {z, sg * E.kappa[r - 1]};
                m.at(i, i + 1) = m.at(i, i + 1) + sup;
            }
        }
        SkewPoly<CInf> tau2(z);
        tau2.a = {z, z, E.kappa[r - 1]};
        m.at(d - 1, 0) = m.at(d - 1, 0) + tau2;
        return TModule(m, Pwork);
    }
    int d = r * e + r - 1;
    SkewMatC m(d, d, zp);
    for (int i = 0; i < d; ++i)
        m.at(i, i) = SkewPoly<CInf>::constant(CInf::theta_pow(F, Rat(1)));
    for (int i = 0; i < r * e - 1; ++i)
        m.at(i, i + r) = m.at(i, i + r) + SkewPoly<CInf>::constant(CInf::one(F));
    {
        SkewPoly<CInf> tau1(z);
        tau1.a = {z, sg * CInf::one(F)};
        m.at(r * e - 1, 0) = m.at(r * e - 1, 0) + tau1;
    }
    for (int i = 1; i <= r - 1; ++i) {
        SkewPoly<CInf> c0(z), ci(z);
        c0.a = {z, sg * (-E.kappa[r - i - 1])};
        c0.trim();
        ci.a = {z, sg * E.kappa[r - 1]};
        m.at(r * e - 1 + i, 0) = m.at(r * e - 1 + i, 0) + c0;
        m.at(r * e - 1 + i, i) = m.at(r * e - 1 + i, i) + ci;
    }
    return TModule(m, Pwork);
}

Mat<SkewPoly<FrobSym>> build_Ee_symbolic(int r, int e) {
    if (r < 2) throw std::invalid_argument("build_Ee_symbolic: rank >= 2 required");
    FrobSym z = FrobSym::zero();
    SkewPoly<FrobSym> zp(z);
    FrobSym sg = FrobSym::constant((r - 1) % 2 == 0 ? 1 : -1);
    auto theta = SkewPoly<FrobSym>::constant(FrobSym::theta());
    if (e == 0) {
        int d = r - 1;
        Mat<SkewPoly<FrobSym>> m(d, d, zp);
        for (int i = 0; i < d; ++i) {
            m.at(i, i) = m.at(i, i) + theta;
            SkewPoly<FrobSym> taui(z);
            taui.a = {z, sg * (-FrobSym::kappa(r - 1 - i))};
            m.at(i, 0) = m.at(i, 0) + taui;
            if (i + 1 < d) {
                SkewPoly<FrobSym> sup(z);
                sup.a = {z, sg * FrobSym::kappa(r)};
                m.at(i, i + 1) = m.at(i, i + 1) + sup;
            }
        }
        SkewPoly<FrobSym> tau2(z);
        tau2.a = {z, z, FrobSym::kappa(r)};
        m.at(d - 1, 0) = m.at(d - 1, 0) + tau2;
        return m;
    }
    int d = r * e + r - 1;
    Mat<SkewPoly<FrobSym>> m(d, d, zp);
    for (int i = 0; i < d; ++i) m.at(i, i) = theta;
    for (int i = 0; i < r * e - 1; ++i)
        m.at(i, i + r) = m.at(i, i + r) + SkewPoly<FrobSym>::one(z);
    {
        SkewPoly<FrobSym> tau1(z);
        tau1.a = {z, sg};
        m.at(r * e - 1, 0) = m.at(r * e - 1, 0) + tau1;
    }
    for (int i = 1; i <= r - 1; ++i) {
        SkewPoly<FrobSym> c0(z), ci(z);
        c0.a = {z, sg * (-FrobSym::kappa(r - i))};
        ci.a = {z, sg * FrobSym::kappa(r)};
        m.at(r * e - 1 + i, 0) = m.at(r * e - 1 + i, 0) + c0;
        m.at(r * e - 1 + i, i) = m.at(r * e - 1 + i, i) + ci;
    }
    return m;
}

bool Biderivation::is_partial() const {
    for (const auto& p : delta_t.d)
        if (!p.coeff(0).is_zero()) return false;
    return true;
}

TModule extension_module(const TModule& G, const Biderivation& delta, const FieldPtr& F) {
    int d = G.dim(), n = delta.n;
    if (n < 1)
        throw std::invalid_argument("extension_module: n >= 1 (use quasi-periodic maps for n=0)");
    if (delta.delta_t.rows != n || delta.delta_t.cols != d)
        throw std::invalid_argument("extension_module: delta(t) must be n x d");
    CInf z = CInf::zero(F);
    SkewPoly<CInf> zp(z);
    SkewMatC m(d + n, d + n, zp);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m.at(i, j) = G.phi_t().at(i, j);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) m.at(d + i, j) = delta.delta_t.at(i, j);
    TModule tn = carlitz_tensor(F, n, G.pwork());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(d + i, d + j) = tn.phi_t().at(i, j);
    return TModule(m, G.pwork());
}

QuasiPeriodic::QuasiPeriodic(TModule G, Biderivation delta)
    : G_(std::move(G)), delta_(std::move(delta)), rows_(std::max(delta_.n, 1)) {
    if (!delta_.is_partial())
        throw std::invalid_argument("QuasiPeriodic: delta must have no constant tau term");
    if (delta_.delta_t.rows != rows_ || delta_.delta_t.cols != G_.dim())
        throw std::invalid_argument("QuasiPeriodic: delta(t) dimension mismatch");
    cache_ = std::make_shared<Cache>();
    cache_->C.push_back(Mat<CInf>(rows_, G_.dim(), CInf::zero(G_.field())));
}

Mat<CInf> QuasiPeriodic::coeff(int i) const {
    std::lock_guard<std::mutex> lk(cache_->mu);
    const FieldPtr& F = G_.field();
    CInf theta = CInf::theta_pow(F, Rat(1)).truncated(XRat(G_.pwork()));
    int n = delta_.n, d = G_.dim();
    int ddeg = 0;
    for (const auto& p : delta_.delta_t.d) ddeg = std::max(ddeg, p.degree());
    Mat<CInf> dtn(rows_, rows_, CInf::zero(F));
    Mat<CInf> Tn(rows_, rows_, CInf::zero(F));
    for (int a = 0; a < rows_; ++a) {
        dtn.at(a, a) = theta;
        if (n >= 2 && a + 1 < rows_) dtn.at(a, a + 1) = CInf::one(F);
    }
    if (n >= 1) Tn.at(rows_ - 1, 0) = CInf::one(F);
    auto& C = cache_->C;
    while ((int)C.size() <= i) {
        int m = (int)C.size();
        Mat<CInf> R(rows_, d, CInf::zero(F));
        if (n >= 1) R = R + Tn * C[m - 1].twist(1);
        for (int k = 1; k <= std::min(m, ddeg); ++k) {
            Mat<CInf> Bmk = G_.exp_coeff(m - k).twist(k);
            Mat<CInf> Dk(rows_, d, CInf::zero(F));
            for (int a = 0; a < rows_; ++a)
                for (int b = 0; b < d; ++b) {
                    CInf acc = CInf::zero(F);
                    for (int c = 0; c < d; ++c)
                        acc = acc + delta_.delta_t.at(a, c).coeff(k) * Bmk.at(c, b);
                    Dk.at(a, b) = acc;
                }
            R = R + Dk;
        }
        C.push_back(solve_sylvester(G_.dphi().twist(m), dtn, R, theta.twist(m), theta));
    }
    return C[i];
}

std::vector<CInf> QuasiPeriodic::eval(const std::vector<CInf>& z, const Rat& stop_deg,
                                      int cap) const {
    const FieldPtr& F = G_.field();
    if ((int)z.size() != G_.dim()) throw std::invalid_argument("QuasiPeriodic::eval: dim");
    std::vector<CInf> acc(rows_, CInf::zero(F));
    int quiet = 0;
    for (int i = 1; i <= cap; ++i) {
        Mat<CInf> Ci = coeff(i);
        std::vector<CInf> term(rows_, CInf::zero(F));
        for (int a = 0; a < rows_; ++a)
            for (int b = 0; b < G_.dim(); ++b) term[a] = term[a] + Ci.at(a, b) * z[b].twist(i);
        for (int a = 0; a < rows_; ++a) acc[a] = acc[a] + term[a];
        if (vec_maxdeg(term) < XRat(-stop_deg)) {
            if (++quiet >= 3) {
                for (auto& x : acc) x = x.with_prec(XRat(stop_deg));
                return acc;
            }
        } else {
            quiet = 0;
        }
    }
    throw DomainError("QuasiPeriodic::eval: series did not settle below the stop degree");
}

} // namespace drinfeld
