#include "drinfeld/thirdkind.hpp"

#include <sstream>

namespace drinfeld {

ModApiResult compare_mod_Api(const CInf& x, const CInf& y, const CInf& pi, const XRat& guard) {
    ModApiResult res;
    CInf z = (x - y) * pi.inv();
    const FieldPtr& F = x.field();
    std::vector<FqElem> a;
    CInf rest = z;
    for (const auto& t : z.terms()) {
        if (!(XRat(t.e) >= XRat(Rat(0)))) continue;
        if (!t.e.is_integer()) {
            std::ostringstream os;
            os << "fractional exponent " << t.e.str() << " above the guard";
            res.diag = os.str();
            res.tail = z.deg_bound();
            return res;
        }
        if (!t.c.in_base_fq()) {
            res.diag = "coefficient at theta^" + t.e.str() + " lies outside F_q";
            res.tail = z.deg_bound();
            return res;
        }
        size_t k = (size_t)t.e.n;
        if (a.size() <= k) a.resize(k + 1, FqElem::zero(F));
        a[k] = t.c;
        rest = rest - CInf::monomial(F, t.e, t.c);
    }
    res.a = a;
    res.tail = rest.deg_bound();
    if (res.tail < guard) {
        res.pass = true;
    } else {
        std::ostringstream os;
        os << "tail degree " << res.tail.str() << " not below guard " << guard.str();
        res.diag = os.str();
    }
    return res;
}

CInf eval_poly_theta(const FieldPtr& F, const std::vector<FqElem>& a) {
    CInf acc = CInf::zero(F);
    for (size_t k = 0; k < a.size(); ++k)
        acc = acc + CInf::monomial(F, Rat((long long)k), a[k]);
    return acc;
}

namespace {

// cofactor matrix of a Tate matrix, entries expanded through t-degree T
TateMat tatemat_cof(const TateMat& M, int T) {
    TateMat E = tatemat_expanded(M, T);
    int n = M.rows;
    TateMat out(n, n, E.d[0].ring_zero());
    if (n == 1) {
        out.at(0, 0) = E.d[0].ring_one();
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
            TateElem d = tatemat_det(minor, T);
            out.at(i, j) = ((i + j) % 2 == 0) ? d : -d;
        }
    return out;
}

XRat tate_norm_window(const TateElem& e, int T) {
    TateElem x = e;
    if (x.has_pfrac()) x = x.expanded(std::min(T, x.tvalid()));
    XRat worst = XRat::neg_inf();
    int lim = std::min(T, x.tvalid());
    for (int i = 0; i <= x.poly().degree() && i <= lim; ++i)
        worst = XRat::max(worst, x.poly().coeff(i).deg_bound());
    return worst;
}

} // namespace

ThirdKindScenario::ThirdKindScenario(FieldPtr F, const Rat& P, int T,
                                     std::vector<CInf> lattice_basis, std::vector<CInf> beta,
                                     int max_rescale, const Rat& Pk_override)
    : F_(std::move(F)), P_(P), T_(T), beta_(std::move(beta)) {
    r_ = (int)lattice_basis.size();
    if ((int)beta_.size() != r_ - 1)
        throw std::invalid_argument("ThirdKindScenario: need r-1 beta coefficients");
    guard_ = XRat(-(P_ * Rat(1, 2)));
    tail_ = P_ + Rat(10);
    if (Pk_override.n > 0) {
        Pk_ = Pk_override;
    } else {
        // inverse twists of kappa_r reach q^{-r}; budget the kappa precision
        // so the dual-side objects still clear the guard
        long long qr = 1;
        for (int i = 0; i < r_; ++i) qr *= F_->q();
        Pk_ = (P_ * Rat(1, 2) + Rat(20)) * Rat(qr) + P_;
    }
    build(std::move(lattice_basis), max_rescale);
}

void ThirdKindScenario::ensure_trivializations() const {
    if (have_triv_) return;
    CInf z = CInf::zero(F_);
    Mat<SkewPoly<CInf>> tau_rows(r_, 1, SkewPoly<CInf>(z));
    for (int i = 1; i <= r_; ++i) tau_rows.at(i - 1, 0) = SkewPoly<CInf>::op(z, i);
    ups_ = upsilon_matrix(*Em_, tau_rows, periods_, frames_->phi_tilde, tail_, guard_, T_,
                          &ups_defect_);
    psi_ = psi_dual(ups_, frames_->V, T_);
    psi_defect_ = check_frobenius_equation(frames_->phi, psi_, DiffSide::Dual, T_);
    auto om = omega_Omega(F_, P_ + Rat(30), T_);
    Omega_ = om.Omega;
    {
        TateElem want = Omega_.scaled(uc_);
        TateElem got = tatemat_det(psi_, T_);
        XRat worst = XRat::neg_inf();
        for (int k = 0; k <= T_; ++k)
            worst = XRat::max(worst, (got.coeff(k) - want.coeff(k)).deg_bound());
        det_psi_defect_ = worst;
    }
    cofpsi_ = tatemat_cof(psi_, T_);
    have_triv_ = true;
}

void ThirdKindScenario::build(std::vector<CInf> basis, int max_rescale) {
    long long q = F_->q();
    pi_ = carlitz_pi(F_, Pk_);
    auto built = lattice_to_drinfeld(F_, LatticeDef{basis}, Pk_, r_ + 4);
    E_ = built.module;
    Em_ = std::make_shared<TModule>(E_.to_module(F_, Pk_));
    E0_ = std::make_shared<TModule>(build_Ee(F_, E_, 0, Pk_));
    C_ = std::make_shared<TModule>(carlitz_module(F_, Pk_));
    CInf th = CInf::theta_pow(F_, Rat(1)).truncated(XRat(Pk_));
    frames_ = std::make_shared<FrameSet<CInf>>(th, E_.kappa);
    for (const auto& b : basis) periods_.push_back({b.truncated(XRat(Pk_))});

    // u_c and the compatible (q-1)-st root inside c_E: the choice
    // kappa_r^{(1-r)} u_c makes the constant equation hold on the nose
    uc_ = frames_->c.pow(-q).root(q - 1);
    CInf kr = E_.kappa[r_ - 1];
    CInf root = kr.twist(1 - r_) * uc_;
    {
        CInf want = CInf::scalar(F_, (r_ - 1) % 2 == 0 ? 1 : -1) * kr.twist(2 - r_);
        XRat rd = (root.pow(q - 1) - want).deg_bound();
        if (!(rd < guard_))
            throw DomainError("ThirdKindScenario: root compatibility check failed");
    }
    CInf ce_inv = CInf::scalar(F_, ((r_ - 1) * (r_ - 2) / 2) % 2 == 0 ? 1 : -1);
    for (int j = 1; j <= r_ - 2; ++j) ce_inv = ce_inv * kr.twist(-j);
    ce_inv = ce_inv * root;
    cE_ = ce_inv.inv();
    {
        CInf rhs = uc_.inv() * CInf::scalar(F_, (r_ - 1) % 2 == 0 ? 1 : -1) * kr *
                   tmat_det(frames_->V).coeff(0).inv();
        cE_defect_ = (cE_ - rhs).deg_bound();
    }

    CInf z = CInf::zero(F_);
    // tau m_{E_0} rows for the exterior-power computations
    tau_m_E0_ = Mat<SkewPoly<CInf>>(r_, r_ - 1, SkewPoly<CInf>(z));
    {
        SkewPoly<CInf> tau2(z);
        tau2.a = {z, z, CInf::scalar(F_, (r_ - 1) % 2 == 0 ? 1 : -1)};
        tau_m_E0_.at(0, 0) = tau2;
        for (int i = 2; i <= r_; ++i) tau_m_E0_.at(i - 1, r_ - i) = SkewPoly<CInf>::op(z, 1);
    }

    // admission: scale the betas down until both logarithms converge and the
    // series route has norm < 1
    CInf theta_inv = CInf::theta_pow(F_, Rat(-1));
    for (int attempt = 0;; ++attempt) {
        try {
            delta_ = Biderivation{1, SkewMatC(1, 1, SkewPoly<CInf>(z))};
            delta_.delta_t.at(0, 0).a.assign(r_, z);
            for (int i = 1; i <= r_ - 1; ++i)
                delta_.delta_t.at(0, 0).a[i] = beta_[i - 1].truncated(XRat(Pk_));
            delta_.delta_t.at(0, 0).trim();

            alpha_.assign(r_ - 1, z);
            for (int i = 0; i < r_ - 1; ++i) alpha_[i] = cE_ * beta_[r_ - 2 - i];
            y_ = E0_->log_eval(alpha_, tail_);

            fdw_.clear();
            lam_.clear();
            QuasiPeriodic fd(*Em_, delta_);
            for (int j = 0; j < r_; ++j) {
                CInf val = fd.eval(periods_[j], tail_)[0];
                fdw_.push_back(val);
                lam_.push_back(val.is_zero_to_prec() ? z : -C_->log_eval({val}, tail_)[0]);
            }

            // specialness of the reduced delta (always true per the theory;
            // asserted as a pipeline precondition)
            auto pdrow = phi_tilde_delta<CInf>({delta_.delta_t.at(0, 0)}, frames_->theta,
                                               frames_->kappa);
            if (!is_special(pdrow, *frames_).special)
                throw DomainError("ThirdKindScenario: reduced delta failed specialness");
            break;  // admitted
        } catch (const OutsideLogRadius&) {
            if (attempt >= max_rescale)
                throw OutsideLogRadius("ThirdKindScenario: admission failed after rescaling");
            for (auto& b : beta_) b = b * theta_inv * theta_inv;
            ++rescale_;
        } catch (const NormNotLessThanOne&) {
            if (attempt >= max_rescale)
                throw NormNotLessThanOne("ThirdKindScenario: admission failed after rescaling");
            for (auto& b : beta_) b = b * theta_inv * theta_inv;
            ++rescale_;
        }
    }
    {
        auto img = E0_->exp_eval(y_, tail_);
        XRat worst = XRat::neg_inf();
        for (int i = 0; i < r_ - 1; ++i)
            worst = XRat::max(worst, (img[i] - alpha_[i]).deg_bound());
        y_resid_ = worst;
    }
}

CInf ThirdKindScenario::F_eps(const std::vector<CInf>& y) const {
    CInf z = CInf::zero(F_);
    Biderivation eps{0, SkewMatC(1, r_ - 1, SkewPoly<CInf>(z))};
    eps.delta_t.at(0, 0) = SkewPoly<CInf>::op(z, 1);
    return quasi_value(*E0_, eps, y, tail_);
}

CInf ThirdKindScenario::F_eps_series(const std::vector<CInf>& y) const {
    CInf z = CInf::zero(F_);
    Biderivation eps{0, SkewMatC(1, r_ - 1, SkewPoly<CInf>(z))};
    eps.delta_t.at(0, 0) = SkewPoly<CInf>::op(z, 1);
    return QuasiPeriodic(*E0_, eps).eval(y, tail_)[0];
}

CInf ThirdKindScenario::quasi_period(int i, int j) const {
    CInf z = CInf::zero(F_);
    Biderivation di{0, SkewMatC(1, 1, SkewPoly<CInf>(z))};
    di.delta_t.at(0, 0) = SkewPoly<CInf>::op(z, i);
    return quasi_value(*Em_, di, periods_[j], tail_);
}

CInf ThirdKindScenario::quasi_period_series(int i, int j) const {
    CInf z = CInf::zero(F_);
    Biderivation di{0, SkewMatC(1, 1, SkewPoly<CInf>(z))};
    di.delta_t.at(0, 0) = SkewPoly<CInf>::op(z, i);
    return QuasiPeriodic(*Em_, di).eval(periods_[j], tail_)[0];
}

CInf ThirdKindScenario::F_delta_w(int j) const { return fdw_[j]; }

CInf ThirdKindScenario::lambda_oracle(int j) const { return lam_[j]; }

XRat ThirdKindScenario::lambda_certificate(int j) const {
    CInf img = C_->exp_eval({lam_[j]}, tail_)[0];
    return (img + fdw_[j]).deg_bound();
}

CInf ThirdKindScenario::rhs_formula(int j) const {
    CInf acc = CInf::zero(F_);
    for (int l = 2; l <= r_; ++l) acc = acc + y_[r_ - l] * quasi_period(l - 1, j);
    CInf sgn = CInf::scalar(F_, (r_ - 1) % 2 == 0 ? 1 : -1);
    acc = acc + sgn * F_eps(y_) * periods_[j][0];
    return -(cE_.inv() * acc);
}

XRat ThirdKindScenario::verify_lemma_Vext() const {
    CInf z = CInf::zero(F_);
    const auto& W = frames_->cof_V;  // constant entries
    TateMat agf = agf_compute(*E0_, y_, tail_);
    TateMat ip = inner_product(tau_m_E0_, agf);  // r x 1
    TateMat g(1, r_, TateElem(z));
    for (int jj = 0; jj < r_; ++jj) {
        TateElem acc(z);
        for (int k = 0; k < r_; ++k) acc = acc + ip.at(k, 0).mul_tpoly(W.at(k, jj));
        g.at(0, jj) = -acc;
    }
    // h_alpha = <U~_1 m_{E_0} | alpha>^tr W, U~_1 the t-coefficient of Cof(Phi~)
    Mat<CInf> U1(r_, r_, z);
    for (int i = 0; i < r_; ++i)
        for (int jj = 0; jj < r_; ++jj) U1.at(i, jj) = frames_->cof_phi_tilde.at(i, jj).coeff(1);
    std::vector<Mat<SkewPoly<CInf>>> mrows;
    {
        Mat<SkewPoly<CInf>> m1(1, r_ - 1, SkewPoly<CInf>(z));
        SkewPoly<CInf> tb(z);
        tb.a = {z, CInf::scalar(F_, (r_ - 1) % 2 == 0 ? 1 : -1)};
        m1.at(0, 0) = tb;
        mrows.push_back(m1);
        for (int i = 2; i <= r_; ++i) {
            Mat<SkewPoly<CInf>> mi(1, r_ - 1, SkewPoly<CInf>(z));
            mi.at(0, r_ - i) = SkewPoly<CInf>::one(z);
            mrows.push_back(mi);
        }
    }
    Mat<SkewPoly<CInf>> U1m(r_, r_ - 1, SkewPoly<CInf>(z));
    for (int i = 0; i < r_; ++i)
        for (int jj = 0; jj < r_; ++jj) {
            if (U1.at(i, jj).is_zero()) continue;
            for (int c = 0; c < r_ - 1; ++c) {
                SkewPoly<CInf> scaled = mrows[jj].at(0, c);
                for (auto& a : scaled.a) a = U1.at(i, jj) * a;
                scaled.trim();
                U1m.at(i, c) = U1m.at(i, c) + scaled;
            }
        }
    std::vector<CInf> halpha_raw = skew_apply(U1m, alpha_);
    std::vector<CInf> h(r_, z);
    for (int jj = 0; jj < r_; ++jj) {
        CInf acc = z;
        for (int k = 0; k < r_; ++k) acc = acc + halpha_raw[k] * W.at(k, jj).coeff(0);
        h[jj] = acc;
    }
    // defect of g^{(-1)} Cof(Phi_E) - g - h
    XRat worst = XRat::neg_inf();
    TateMat gtw = g;
    for (auto& e : gtw.d) e = e.twist(-1);
    for (int jj = 0; jj < r_; ++jj) {
        TateElem acc(z);
        for (int k = 0; k < r_; ++k)
            acc = acc + gtw.at(0, k).mul_tpoly(frames_->cof_phi.at(k, jj));
        TateElem defect = acc - g.at(0, jj) - TateElem(z, TPoly<CInf>::constant(h[jj]));
        worst = XRat::max(worst, tate_norm_window(defect, T_));
    }
    return worst;
}

Thm39Result ThirdKindScenario::pipeline_thm39() const {
    ensure_trivializations();
    Thm39Result res;
    CInf z = CInf::zero(F_);

    // h = -u_c^{-1} Phi~_delta Phi~_E^{-1} (V^{-1})^tr, constants for the
    // reduced delta; (V^{-1})^tr = Cof(V)/det(V)
    auto pdrow =
        phi_tilde_delta<CInf>({delta_.delta_t.at(0, 0)}, frames_->theta, frames_->kappa);
    auto sp = is_special(pdrow, *frames_);
    if (!sp.special) throw DomainError("pipeline_thm39: delta not special");
    CInf detV = tmat_det(frames_->V).coeff(0);
    CInf hscale = -(uc_.inv() * detV.inv());
    std::vector<TPoly<CInf>> h(r_, TPoly<CInf>(z));
    for (int jj = 0; jj < r_; ++jj) {
        TPoly<CInf> acc(z);
        for (int k = 0; k < r_; ++k)
            acc = acc + sp.witness.at(0, k) * frames_->cof_V.at(k, jj);
        h[jj] = acc.scaled(hscale);
    }

    // f = h Cof(Psi); the norm condition routes through admission
    TateMat f(1, r_, TateElem(z));
    XRat nf = XRat::neg_inf();
    for (int jj = 0; jj < r_; ++jj) {
        TateElem acc(z);
        for (int k = 0; k < r_; ++k) acc = acc + cofpsi_.at(k, jj).mul_tpoly(h[k]);
        f.at(0, jj) = acc;
        nf = XRat::max(nf, acc.gauss_log_norm());
    }
    res.norm_f = nf;
    if (!(nf < XRat(Rat(0))))
        throw NormNotLessThanOne("pipeline_thm39: ||h Cof(Psi)|| >= 1");

    // u = sum_{m >= 1} f^{(m)}; terms decay geometrically in the Gauss norm
    TateMat u(1, r_, TateElem(z));
    {
        TateMat term = f;
        bool settled = false;
        for (int m = 1; m <= 200 && !settled; ++m) {
            for (auto& e : term.d) e = e.twist(1);
            XRat worst = XRat::neg_inf();
            for (int jj = 0; jj < r_; ++jj) {
                u.at(0, jj) = u.at(0, jj) + term.at(0, jj);
                worst = XRat::max(worst, term.at(0, jj).gauss_log_norm());
            }
            settled = worst < XRat(-P_ - Rat(10));
        }
        if (!settled)
            throw DomainError("pipeline_thm39: wp-preimage series did not settle");
    }
    {
        XRat worst = XRat::neg_inf();
        for (int jj = 0; jj < r_; ++jj) {
            TateElem d = u.at(0, jj).twist(-1) - u.at(0, jj) - f.at(0, jj);
            worst = XRat::max(worst, tate_norm_window(d, T_));
        }
        res.roundtrip_defect = worst;
    }

    // g = u Cof(Psi)^{-1}: solves g^{(-1)} Cof(Phi_E) - g = h
    TateMat cofpsi_inv = tatemat_inv_series(cofpsi_, T_);
    TateMat g(1, r_, TateElem(z));
    for (int jj = 0; jj < r_; ++jj) {
        TateElem acc(z);
        for (int k = 0; k < r_; ++k) acc = acc + u.at(0, k) * cofpsi_inv.at(k, jj);
        g.at(0, jj) = acc;
    }
    {
        XRat worst = XRat::neg_inf();
        for (int jj = 0; jj < r_; ++jj) {
            TateElem acc(z);
            for (int k = 0; k < r_; ++k)
                acc = acc + g.at(0, k).twist(-1).mul_tpoly(frames_->cof_phi.at(k, jj));
            TateElem d = acc - g.at(0, jj) - TateElem(z, h[jj]);
            worst = XRat::max(worst, tate_norm_window(d, T_));
        }
        res.g_equation_defect = worst;
    }

    // extension-side data and the C-matrix fit
    TModule Ed = extension_module(*Em_, delta_, F_);
    TateMat upsE = tatemat_expanded(ups_, T_);
    XRat rel_worst = XRat::neg_inf(), mem_worst = XRat::neg_inf();
    bool ok = true;
    for (int j = 0; j < r_; ++j) {
        TateMat agf_ext = agf_compute(Ed, {periods_[j][0], lam_[j]}, tail_);
        TateElem gj1 = agf_ext.at(1, 0);
        {
            // g_{j,1}^{(1)} = (t - theta) g_{j,1} - <delta(t) | G_{w_j}>
            TateMat agf_base = agf_compute(*Em_, periods_[j], tail_);
            TateMat ipd = inner_product(delta_.delta_t, agf_base);
            TateElem rel = gj1.twist(1) -
                           gj1.mul_tpoly(TateElem::t_minus_theta_pow(F_, 1).poly()) +
                           ipd.at(0, 0);
            rel_worst = XRat::max(rel_worst, tate_norm_window(rel, T_));
        }
        // (Omega g_{j,1}^{(1)}) - u_c (g Omega V^tr Upsilon)_j must lie in F_q[t]
        TateElem lhs = Omega_ * gj1.twist(1).expanded(T_);
        TateElem rhs(z);
        for (int k = 0; k < r_; ++k) {
            TateElem gv(z);
            for (int i = 0; i < r_; ++i) gv = gv + g.at(0, i).mul_tpoly(frames_->V.at(k, i));
            rhs = rhs + gv * upsE.at(k, j);
        }
        rhs = (rhs * Omega_).scaled(uc_);
        TateElem diff = lhs - rhs;
        std::vector<FqElem> aj;
        for (int k = 0; k <= std::min(T_, diff.tvalid()); ++k) {
            CInf c = diff.coeff(k);
            FqElem s = c.coeff_at(Rat(0));
            if (!s.is_zero() && !s.in_base_fq()) {
                ok = false;
                mem_worst = XRat::max(mem_worst, XRat(Rat(0)));
                continue;
            }
            CInf restc = c - CInf::scalar(F_, s);
            mem_worst = XRat::max(mem_worst, restc.deg_bound());
            if (!s.is_zero()) {
                if ((int)aj.size() <= k) aj.resize(k + 1, FqElem::zero(F_));
                aj[k] = s;
            }
        }
        res.a.push_back(aj);
    }
    res.relation_defect = rel_worst;
    res.membership_tail = mem_worst;
    res.ok = ok && res.g_equation_defect < guard_ && res.roundtrip_defect < guard_ &&
             res.relation_defect < guard_ && res.membership_tail < guard_;
    return res;
}

} // namespace drinfeld
