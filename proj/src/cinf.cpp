#include "drinfeld/cinf.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace drinfeld {

CInf CInf::scalar(const FieldPtr& F, long long c) {
    return scalar(F, FqElem(F, c));
}

CInf CInf::scalar(const FieldPtr& F, const FqElem& c) {
    return monomial(F, Rat(0), c);
}

CInf CInf::theta_pow(const FieldPtr& F, const Rat& e, long long c) {
    return monomial(F, e, FqElem(F, c));
}

CInf CInf::monomial(const FieldPtr& F, const Rat& e, const FqElem& c) {
    CInf x(F);
    if (!c.is_zero()) x.t_.push_back({e, c});
    return x;
}

void CInf::normalize() {
    std::sort(t_.begin(), t_.end(),
              [](const Term& a, const Term& b) { return b.e < a.e; });
    std::vector<Term> out;
    out.reserve(t_.size());
    for (size_t i = 0; i < t_.size();) {
        Rat e = t_[i].e;
        FqElem acc = t_[i].c;
        size_t j = i + 1;
        while (j < t_.size() && t_[j].e == e) { acc = acc + t_[j].c; ++j; }
        if (!acc.is_zero()) {
            bool visible = true;
            if (prec_.finite()) visible = XRat(e) > -prec_;
            if (visible) out.push_back({e, acc});
        }
        i = j;
    }
    t_.swap(out);
}

XRat CInf::deg() const {
    if (t_.empty()) return XRat::neg_inf();
    return XRat(t_.front().e);
}

XRat CInf::deg_bound() const {
    return XRat::max(deg(), -prec_);
}

FqElem CInf::leading_coeff() const {
    if (t_.empty()) throw DomainError("leading_coeff of zero-to-precision element");
    return t_.front().c;
}

FqElem CInf::coeff_at(const Rat& e) const {
    for (const auto& t : t_)
        if (t.e == e) return t.c;
    return FqElem::zero(F_);
}

CInf operator+(const CInf& a, const CInf& b) {
    CInf r(a.F_ ? a.F_ : b.F_);
    r.prec_ = XRat::min(a.prec_, b.prec_);
    r.t_.reserve(a.t_.size() + b.t_.size());
    r.t_.insert(r.t_.end(), a.t_.begin(), a.t_.end());
    r.t_.insert(r.t_.end(), b.t_.begin(), b.t_.end());
    r.normalize();
    return r;
}

CInf operator-(const CInf& a, const CInf& b) { return a + (-b); }

CInf CInf::operator-() const {
    CInf r = *this;
    for (auto& t : r.t_) t.c = -t.c;
    return r;
}

namespace {

// terms of x that can still contribute visibly to a product with partner
// degree dpartner under the result precision floor
std::vector<CInf::Term> useful_terms(const CInf& x, const XRat& floor_, const XRat& dpartner) {
    if (!floor_.finite() || !dpartner.finite()) return x.terms();
    std::vector<CInf::Term> out;
    Rat cutoff = floor_.v - dpartner.v;
    for (const auto& t : x.terms())
        if (cutoff < t.e) out.push_back(t);
    return out;
}

} // namespace

CInf operator*(const CInf& a, const CInf& b) {
    CInf r(a.F_ ? a.F_ : b.F_);
    // error terms: deg(a)-P_b, deg(b)-P_a, -P_a-P_b
    XRat p1 = b.prec_.is_pos_inf() ? XRat::pos_inf() : b.prec_ - a.deg_bound();
    XRat p2 = a.prec_.is_pos_inf() ? XRat::pos_inf() : a.prec_ - b.deg_bound();
    XRat p3 = (a.prec_.is_pos_inf() || b.prec_.is_pos_inf()) ? XRat::pos_inf()
                                                             : a.prec_ + b.prec_;
    r.prec_ = XRat::min(p1, XRat::min(p2, p3));
    XRat floor_ = r.prec_.finite() ? -r.prec_ : XRat::neg_inf();
    std::vector<CInf::Term> ta = useful_terms(a, floor_, b.deg());
    std::vector<CInf::Term> tb = useful_terms(b, floor_, a.deg());
    if (ta.empty() || tb.empty()) return r;

    // dense path: common exponent denominator and a modest integer span
    long long D = 1;
    bool dense = true;
    for (const auto* v : {&ta, &tb}) {
        for (const auto& t : *v) {
            D = D / std::gcd(D, t.e.d) * t.e.d;
            if (D > 48) { dense = false; break; }
        }
        if (!dense) break;
    }
    if (dense) {
        auto idx = [&](const Rat& e) { return e.n * (D / e.d); };
        long long alo = idx(ta.back().e), ahi = idx(ta.front().e);
        long long blo = idx(tb.back().e), bhi = idx(tb.front().e);
        long long span = (ahi + bhi) - (alo + blo);
        if (span >= 0 && span < 2'000'000) {
            const FieldPtr& F = r.F_;
            int p = F->p();
            if (F->deg() == 1) {
                // prime-coordinate field: byte convolution
                std::vector<uint8_t> va(ahi - alo + 1, 0), vb(bhi - blo + 1, 0);
                for (const auto& t : ta) va[idx(t.e) - alo] = (uint8_t)t.c.coords()[0];
                for (const auto& t : tb) vb[idx(t.e) - blo] = (uint8_t)t.c.coords()[0];
                std::vector<uint64_t> acc(span + 1, 0);
                for (size_t i = 0; i < va.size(); ++i) {
                    if (!va[i]) continue;
                    uint64_t ai = va[i];
                    for (size_t j = 0; j < vb.size(); ++j)
                        acc[i + j] += ai * vb[j];
                }
                for (long long k = span; k >= 0; --k) {
                    uint8_t c = (uint8_t)(acc[k] % p);
                    if (c) r.t_.push_back({Rat(alo + blo + k, D), FqElem::from_coords(F, {c})});
                }
            } else {
                std::vector<FqElem> va(ahi - alo + 1, FqElem::zero(F)),
                    vb(bhi - blo + 1, FqElem::zero(F));
                for (const auto& t : ta) va[idx(t.e) - alo] = t.c;
                for (const auto& t : tb) vb[idx(t.e) - blo] = t.c;
                std::vector<FqElem> acc(span + 1, FqElem::zero(F));
                for (size_t i = 0; i < va.size(); ++i) {
                    if (va[i].is_zero()) continue;
                    for (size_t j = 0; j < vb.size(); ++j) {
                        if (vb[j].is_zero()) continue;
                        acc[i + j] = acc[i + j] + va[i] * vb[j];
                    }
                }
                for (long long k = span; k >= 0; --k)
                    if (!acc[k].is_zero())
                        r.t_.push_back({Rat(alo + blo + k, D), acc[k]});
            }
            r.normalize();
            return r;
        }
    }
    r.t_.reserve(ta.size() * tb.size());
    for (const auto& x : ta)
        for (const auto& y : tb) r.t_.push_back({x.e + y.e, x.c * y.c});
    r.normalize();
    return r;
}

CInf CInf::inv() const {
    if (t_.empty())
        throw DivisionByZeroToPrecision("inverting an element indistinguishable from 0");
    Rat e = t_.front().e;
    CInf y0 = monomial(F_, -e, t_.front().c.inv());
    if (t_.size() == 1 && prec_.is_pos_inf()) return y0;  // exact monomial
    XRat target = prec_;
    if (prec_.finite())
        target = prec_ + XRat(e) + XRat(e);  // P + 2 deg x
    else
        throw DomainError("inv of exact multi-term series: truncate first");
    // Newton: u = 1 - x*y squares each step, so u hits the precision floor
    // of the product (P_x + deg x) in ~log2 steps; the final y is then good
    // to P_x + 2 deg x.
    CInf one_ = one(F_);
    CInf y = y0.with_prec(target);
    CInf x = this->truncated(prec_);
    for (int it = 0; it < 64; ++it) {
        CInf u = one_ - x * y;
        if (u.is_zero_to_prec()) break;
        y = y + y * u;
        y = y.with_prec(target);
    }
    return y.with_prec(target);
}

CInf CInf::pow(long long k) const {
    if (k < 0) return inv().pow(-k);
    CInf r = one(F_);
    CInf base = *this;
    while (k) {
        if (k & 1) r = r * base;
        base = base * base;
        k >>= 1;
    }
    return r;
}

CInf CInf::twist(long long n) const {
    CInf r(F_);
    Rat scale;
    long long qn = 1;
    for (long long i = 0, m = n < 0 ? -n : n; i < m; ++i) qn *= F_->q();
    scale = n >= 0 ? Rat(qn) : Rat(1, qn);
    r.prec_ = prec_.scaled(scale);
    r.t_.reserve(t_.size());
    for (const auto& t : t_)
        r.t_.push_back({t.e * scale, t.c.frob(n)});
    r.normalize();
    return r;
}

CInf CInf::root(long long m) const {
    if (m <= 0) throw DomainError("root index must be positive");
    if (m == 1) return *this;
    if (t_.empty()) {
        CInf r = *this;
        if (prec_.finite()) r.prec_ = prec_.scaled(Rat(1, m));  // crude, safe
        return r;
    }
    int p = F_->p(), f = F_->f();
    long long mp = 1, mcop = m;
    int v = 0;
    while (mcop % p == 0) { mcop /= p; mp *= p; ++v; }
    if (v % f != 0)
        throw DomainError("p-part of root index is not a power of q");
    long long qsteps = v / f;

    // coprime part first
    CInf x = *this;
    if (mcop > 1) {
        Rat e = x.t_.front().e;
        Rat er = e * Rat(1, mcop);
        FqElem lead = x.t_.front().c;
        FqElem lr(F_);
        if (!lead.mth_root(mcop, lr))
            throw NoRootInCoefficientField("leading coefficient has no m-th root; enlarge s");
        CInf mono = monomial(F_, er, lr);
        // x = lead*theta^e * (1+u); solve y^mcop = 1+u by Newton, y0 = 1
        CInf unit = x * monomial(F_, -e, lead.inv());
        CInf u = unit - one(F_);
        CInf y = one(F_);
        XRat wp = unit.prec();
        if (!wp.finite() && !u.is_zero_to_prec())
            throw DomainError("root of exact multi-term series: truncate first");
        FqElem minv = FqElem(F_, mcop).inv();
        for (int it = 0; it < 64; ++it) {
            CInf g = y.pow(mcop) - unit;
            if (g.is_zero_to_prec()) break;
            // y -= g / (mcop * y^{mcop-1});  y is a 1-unit so this is exact Newton
            CInf corr = g * y.pow(mcop - 1).inv() * scalar(F_, minv);
            y = y - corr;
            if (wp.finite()) y = y.with_prec(wp);
        }
        x = mono * y;
    }
    if (qsteps > 0) x = x.twist(-qsteps);
    return x;
}

CInf CInf::with_prec(const XRat& P) const {
    CInf r = *this;
    r.prec_ = XRat::min(prec_, P);
    r.normalize();
    return r;
}

CInf CInf::truncated(const XRat& P) const {
    CInf r = *this;
    // claims can only shrink: trimming an exact value introduces precision,
    // trimming an approximate one must not launder it
    r.prec_ = XRat::min(prec_, P);
    r.normalize();
    return r;
}

std::string CInf::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : t_) {
        if (!first) os << " + ";
        first = false;
        os << t.c.str() << "*T^(" << t.e.str() << ")";
    }
    return os.str();
}

namespace {
void skip_ws(const std::string& s, size_t& i) {
    while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
}
long long parse_int(const std::string& s, size_t& i) {
    skip_ws(s, i);
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) { neg = s[i] == '-'; ++i; }
    if (i >= s.size() || !std::isdigit((unsigned char)s[i]))
        throw DomainError("series literal: expected integer at position " + std::to_string(i));
    long long v = 0;
    while (i < s.size() && std::isdigit((unsigned char)s[i])) v = v * 10 + (s[i++] - '0');
    return neg ? -v : v;
}
} // namespace

CInf CInf::parse(const FieldPtr& F, const std::string& text) {
    CInf r(F);
    size_t i = 0;
    skip_ws(text, i);
    while (i < text.size()) {
        skip_ws(text, i);
        FqElem c(F);
        if (text[i] == '[') {
            ++i;
            std::vector<int> coords;
            while (true) {
                coords.push_back((int)parse_int(text, i));
                skip_ws(text, i);
                if (i < text.size() && text[i] == ',') { ++i; continue; }
                break;
            }
            if (i >= text.size() || text[i] != ']')
                throw DomainError("series literal: expected ']'");
            ++i;
            c = FqElem::from_coords(F, coords);
        } else {
            c = FqElem(F, parse_int(text, i));
        }
        skip_ws(text, i);
        Rat e(0);
        if (i < text.size() && text[i] == '*') {
            ++i;
            skip_ws(text, i);
            if (i + 2 >= text.size() || text[i] != 'T' || text[i + 1] != '^' || text[i + 2] != '(')
                throw DomainError("series literal: expected T^(...)");
            i += 3;
            long long num = parse_int(text, i);
            long long den = 1;
            skip_ws(text, i);
            if (i < text.size() && text[i] == '/') { ++i; den = parse_int(text, i); }
            skip_ws(text, i);
            if (i >= text.size() || text[i] != ')')
                throw DomainError("series literal: expected ')'");
            ++i;
            e = Rat(num, den);
        }
        r.t_.push_back({e, c});
        skip_ws(text, i);
        if (i < text.size()) {
            if (text[i] != '+')
                throw DomainError("series literal: terms must be joined by '+'");
            ++i;
        }
    }
    r.normalize();
    return r;
}

} // namespace drinfeld
