#include "drinfeld/tate.hpp"

#include <algorithm>
#include <sstream>

namespace drinfeld {

int binom_mod_p(long long n, long long k, int p) {
    if (k < 0 || k > n) return 0;
    int result = 1;
    while (n > 0 || k > 0) {
        int nd = (int)(n % p), kd = (int)(k % p);
        if (kd > nd) return 0;
        // C(nd, kd) mod p for digits < p <= 251
        long long c = 1;
        for (int i = 0; i < kd; ++i) c = c * (nd - i) / (i + 1);
        result = (int)((result * (c % p)) % p);
        n /= p;
        k /= p;
    }
    return result;
}

TateElem TateElem::t_minus_theta_pow(const FieldPtr& F, int n) {
    CInf z = CInf::zero(F);
    TPoly<CInf> lin(z);
    lin.c = {-CInf::theta_pow(F, Rat(1)), CInf::one(F)};
    return TateElem(z, lin.pow(n));
}

TateElem TateElem::principal(const CInf& num, int level, int mult) {
    if (level < 0) throw NegativePoleLevel("principal part below level 0");
    TateElem r(num.ring_zero());
    if (!num.is_zero()) r.pf_.push_back({level, mult, num});
    return r;
}

CInf TateElem::pole_point(int level) const {
    long long e = 1;
    for (int i = 0; i < level; ++i) e *= F_->q();
    return CInf::theta_pow(F_, Rat(e));
}

void TateElem::merge_pfrac() {
    std::sort(pf_.begin(), pf_.end(), [](const Pfrac& a, const Pfrac& b) {
        if (a.level != b.level) return a.level < b.level;
        return a.mult < b.mult;
    });
    std::vector<Pfrac> out;
    for (size_t i = 0; i < pf_.size();) {
        int lv = pf_[i].level, mu = pf_[i].mult;
        CInf acc = pf_[i].num;
        size_t j = i + 1;
        while (j < pf_.size() && pf_[j].level == lv && pf_[j].mult == mu) {
            acc = acc + pf_[j].num;
            ++j;
        }
        if (!acc.is_zero()) out.push_back({lv, mu, acc});
        i = j;
    }
    pf_.swap(out);
}

TateElem operator+(const TateElem& a, const TateElem& b) {
    TateElem r(a.poly_.proto);
    r.poly_ = a.poly_ + b.poly_;
    r.tvalid_ = std::min(a.tvalid_, b.tvalid_);
    r.pf_ = a.pf_;
    r.pf_.insert(r.pf_.end(), b.pf_.begin(), b.pf_.end());
    r.merge_pfrac();
    return r;
}

TateElem operator-(const TateElem& a, const TateElem& b) { return a + (-b); }

TateElem TateElem::operator-() const {
    TateElem r = *this;
    r.poly_ = -r.poly_;
    for (auto& p : r.pf_) p.num = -p.num;
    return r;
}

TateElem TateElem::scaled(const CInf& c) const {
    TateElem r = *this;
    r.poly_ = r.poly_.scaled(c);
    for (auto& p : r.pf_) p.num = c * p.num;
    r.merge_pfrac();
    return r;
}

TateElem TateElem::mul_tpoly(const TPoly<CInf>& p) const {
    TateElem r(poly_.proto);
    r.poly_ = poly_ * p;
    r.tvalid_ = tvalid_;
    for (const auto& t : pf_) {
        // repeated synthetic division by (t - a): p = q_m (t-a)^m + sum r_j (t-a)^{j-1}
        CInf a = pole_point(t.level);
        TPoly<CInf> q = p;
        for (int j = 1; j <= t.mult; ++j) {
            auto [qq, rem] = q.divmod_linear(a);
            CInf num = t.num * rem;
            if (!num.is_zero()) r.pf_.push_back({t.level, t.mult - j + 1, num});
            q = qq;
        }
        r.poly_ = r.poly_ + q.scaled(t.num);
    }
    r.merge_pfrac();
    return r;
}

TateElem operator*(const TateElem& a, const TateElem& b) {
    if (!a.has_pfrac() && a.exact()) return b.mul_tpoly(a.poly_);
    if (!b.has_pfrac() && b.exact()) return a.mul_tpoly(b.poly_);
    if (!a.has_pfrac() && !b.has_pfrac()) {
        TateElem r(a.poly_.proto);
        r.poly_ = a.poly_ * b.poly_;
        r.tvalid_ = std::min(a.tvalid_, b.tvalid_);
        return r;
    }
    throw DomainError("TateElem: multiply pfrac forms after expanding one side");
}

TateElem TateElem::twist(long long n) const {
    TateElem r(poly_.proto);
    r.poly_ = poly_.twist(n);
    r.tvalid_ = tvalid_;
    r.pf_.reserve(pf_.size());
    for (const auto& t : pf_) {
        long long lv = t.level + n;
        if (lv < 0)
            throw NegativePoleLevel("twist drives a pole out of the standard family");
        r.pf_.push_back({(int)lv, t.mult, t.num.twist(n)});
    }
    r.merge_pfrac();
    return r;
}

TateElem TateElem::expanded(int T) const {
    TateElem r(poly_.proto);
    r.poly_ = poly_;
    r.tvalid_ = std::min(tvalid_, T);
    int p = F_->p();
    for (const auto& t : pf_) {
        // 1/(t-a)^m = (-1)^m a^{-m} sum_k C(m-1+k,k) (t/a)^k, |a| > 1
        long long qlev = 1;
        for (int i = 0; i < t.level; ++i) qlev *= F_->q();
        TPoly<CInf> add(poly_.proto);
        add.c.assign(T + 1, poly_.proto);
        int sign = (t.mult % 2 == 0) ? 1 : -1;
        for (int k = 0; k <= T; ++k) {
            int b = binom_mod_p(t.mult - 1 + k, k, p);
            if (b == 0) continue;
            // coefficient: sign * b * num * theta^{-q^level (m+k)}
            CInf mono = CInf::theta_pow(F_, Rat(-qlev) * Rat(t.mult + k), sign * b);
            add.c[k] = t.num * mono;
        }
        add.trim();
        r.poly_ = r.poly_ + add;
    }
    return r;
}

CInf TateElem::coeff(int i) const {
    if (i > tvalid_) throw DomainError("TateElem::coeff beyond valid window");
    CInf acc = poly_.coeff(i);
    int p = F_->p();
    for (const auto& t : pf_) {
        long long qlev = 1;
        for (int k = 0; k < t.level; ++k) qlev *= F_->q();
        int b = binom_mod_p(t.mult - 1 + i, i, p);
        if (b == 0) continue;
        int sign = (t.mult % 2 == 0) ? 1 : -1;
        CInf mono = CInf::theta_pow(F_, Rat(-qlev) * Rat(t.mult + i), sign * b);
        acc = acc + t.num * mono;
    }
    return acc;
}

XRat TateElem::gauss_log_norm() const {
    XRat best = XRat::neg_inf();
    for (int i = 0; i <= poly_.degree() && i <= tvalid_; ++i)
        best = XRat::max(best, poly_.coeff(i).deg());
    for (const auto& t : pf_) {
        long long qlev = 1;
        for (int k = 0; k < t.level; ++k) qlev *= F_->q();
        // sup over k attained at k = 0 (binomial there is 1)
        XRat nrm = t.num.deg() + XRat(Rat(-qlev * t.mult));
        best = XRat::max(best, nrm);
    }
    return best;
}

std::pair<std::optional<CInf>, CInf> TateElem::eval_residue_theta() const {
    if (!exact())
        throw DomainError("evaluation at t = theta requires the exact representation");
    CInf theta = CInf::theta_pow(F_, Rat(1));
    CInf val = poly_.eval(theta);
    CInf res = poly_.proto;
    bool pole = false;
    for (const auto& t : pf_) {
        if (t.level == 0) {
            if (t.mult == 1) {
                res = res + t.num;
                pole = true;
            } else if (!t.num.is_zero()) {
                throw PoleAtTheta("higher-order pole at t = theta");
            }
            continue;
        }
        // exact value num/(theta - theta^{q^level})^mult; the denominator is
        // exact, so invert it at a precision the numerator cannot feel
        long long qlev = 1;
        for (int k = 0; k < t.level; ++k) qlev *= F_->q();
        XRat nprec = t.num.prec().finite() ? t.num.prec() : XRat(Rat(120));
        XRat dprec = nprec + XRat(Rat(2 * (long long)t.mult * qlev + 10));
        CInf den = (theta - pole_point(t.level)).truncated(dprec);
        val = val + t.num * den.pow(-(long long)t.mult);
    }
    if (pole && !res.is_zero()) return {std::nullopt, res};
    return {std::optional<CInf>(val), res};
}

TateElem TateElem::inv_series(int T) const {
    if (has_pfrac())
        throw DomainError("inv_series: expand the pfrac part first");
    CInf c0 = poly_.coeff(0);
    if (c0.is_zero())
        throw DivisionByZeroToPrecision("inv_series: constant term vanishes to precision");
    TateElem r(poly_.proto);
    r.tvalid_ = std::min(tvalid_, T);
    CInf inv0 = c0.inv();
    r.poly_.c.assign(T + 1, poly_.proto);
    r.poly_.c[0] = inv0;
    for (int k = 1; k <= T; ++k) {
        CInf acc = poly_.proto;
        for (int i = 1; i <= k; ++i) acc = acc + poly_.coeff(i) * r.poly_.c[k - i];
        r.poly_.c[k] = -(inv0 * acc);
    }
    r.poly_.trim();
    return r;
}

std::string TateElem::json_dump() const {
    std::ostringstream os;
    os << "{\"poly\":[";
    for (int i = 0; i <= poly_.degree(); ++i) {
        if (i) os << ",";
        os << "\"" << poly_.coeff(i).str() << "\"";
    }
    os << "],\"pfrac\":[";
    for (size_t i = 0; i < pf_.size(); ++i) {
        if (i) os << ",";
        os << "{\"level\":" << pf_[i].level << ",\"mult\":" << pf_[i].mult << ",\"num\":\""
           << pf_[i].num.str() << "\"}";
    }
    os << "]";
    if (tvalid_ != INT_MAX) os << ",\"tvalid\":" << tvalid_;
    os << "}";
    return os.str();
}

TateMat tatemat_from_tpoly(const Mat<TPoly<CInf>>& m) {
    TateMat r(m.rows, m.cols, TateElem(m.d[0].proto));
    for (size_t k = 0; k < m.d.size(); ++k) r.d[k] = TateElem(m.d[k].proto, m.d[k]);
    return r;
}

TateMat tatemat_expanded(const TateMat& m, int T) {
    TateMat r = m;
    for (auto& e : r.d) e = e.expanded(T);
    return r;
}

TateMat inner_product(const Mat<SkewPoly<CInf>>& B, const TateMat& F) {
    if (B.cols != F.rows) throw std::invalid_argument("inner_product: dimension mismatch");
    TateElem zero = F.d[0].ring_zero();
    int N = 0;
    for (const auto& p : B.d) N = std::max(N, p.degree());
    TateMat out(B.rows, F.cols, zero);
    for (int i = 0; i <= N; ++i) {
        // F^{(i)} once per twist order
        TateMat Ftw = F;
        for (auto& e : Ftw.d) e = e.twist(i);
        for (int r = 0; r < B.rows; ++r)
            for (int c = 0; c < F.cols; ++c) {
                for (int k = 0; k < B.cols; ++k) {
                    CInf bi = B.at(r, k).coeff(i);
                    if (bi.is_zero()) continue;
                    out.at(r, c) = out.at(r, c) + Ftw.at(k, c).scaled(bi);
                }
            }
    }
    return out;
}

XRat check_frobenius_equation(const Mat<TPoly<CInf>>& Phi, const TateMat& X, DiffSide side,
                              int T) {
    if (Phi.rows != Phi.cols || Phi.cols != X.rows)
        throw std::invalid_argument("check_frobenius_equation: dimension mismatch");
    TateElem zero = X.d[0].ring_zero();
    TateMat Xtw = X;
    for (auto& e : Xtw.d) e = e.twist(-1);
    const TateMat& lhs = (side == DiffSide::Dual) ? Xtw : X;
    const TateMat& arg = (side == DiffSide::Dual) ? X : Xtw;
    // Phi * arg entrywise through exact poly-into-pfrac products
    TateMat rhs(Phi.rows, arg.cols, zero);
    for (int i = 0; i < Phi.rows; ++i)
        for (int j = 0; j < arg.cols; ++j) {
            TateElem acc = zero;
            for (int k = 0; k < Phi.cols; ++k) {
                if (Phi.at(i, k).is_zero() || arg.at(k, j).is_zero()) continue;
                acc = acc + arg.at(k, j).mul_tpoly(Phi.at(i, k));
            }
            rhs.at(i, j) = acc;
        }
    XRat worst = XRat::neg_inf();
    for (size_t k = 0; k < rhs.d.size(); ++k) {
        TateElem defect = lhs.d[k] - rhs.d[k];
        if (defect.tvalid() < INT_MAX || defect.has_pfrac() || defect.poly().degree() > T)
            defect = defect.expanded(std::min(T, defect.tvalid()));
        // measure over the common window
        XRat nrm = XRat::neg_inf();
        int lim = std::min(T, defect.tvalid());
        for (int i = 0; i <= defect.poly().degree() && i <= lim; ++i)
            nrm = XRat::max(nrm, defect.poly().coeff(i).deg());
        for (const auto& t : defect.pfrac()) {
            long long qlev = 1;
            for (int s = 0; s < t.level; ++s) qlev *= defect.field()->q();
            nrm = XRat::max(nrm, t.num.deg() + XRat(Rat(-qlev * t.mult)));
        }
        worst = XRat::max(worst, nrm);
    }
    return worst;
}

} // namespace drinfeld
