#include "drinfeld/fq.hpp"

#include <algorithm>
#include <stdexcept>

namespace drinfeld {

namespace {

// trial factorization over F_p: no monic factor of degree <= deg/2
bool is_irreducible(const std::vector<uint8_t>& poly, int p) {
    int d = (int)poly.size() - 1;
    if (d <= 0) return false;
    // enumerate monic candidate divisors g of degree 1..d/2
    for (int dg = 1; 2 * dg <= d; ++dg) {
        std::vector<uint8_t> g(dg + 1, 0);
        g[dg] = 1;
        long long count = 1;
        for (int i = 0; i < dg; ++i) count *= p;
        for (long long idx = 0; idx < count; ++idx) {
            long long t = idx;
            for (int i = 0; i < dg; ++i) { g[i] = (uint8_t)(t % p); t /= p; }
            // poly mod g
            std::vector<int> r(poly.begin(), poly.end());
            for (int k = d; k >= dg; --k) {
                int c = r[k] % p;
                if (c == 0) continue;
                // leading coeff of g is 1
                for (int j = 0; j <= dg; ++j) {
                    r[k - dg + j] = ((r[k - dg + j] - c * g[j]) % p + p) % p;
                }
            }
            bool zero = true;
            for (int k = 0; k < dg; ++k) if (r[k] % p != 0) { zero = false; break; }
            if (zero) return false;
        }
    }
    return true;
}

std::vector<uint8_t> first_irreducible(int p, int d) {
    if (d == 1) {
        return {0, 1}; // x itself; F_p case, modulus x keeps coords length 1
    }
    std::vector<uint8_t> poly(d + 1, 0);
    poly[d] = 1;
    long long count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (long long idx = 0; idx < count; ++idx) {
        long long t = idx;
        for (int i = 0; i < d; ++i) { poly[i] = (uint8_t)(t % p); t /= p; }
        if (is_irreducible(poly, p)) return poly;
    }
    throw std::logic_error("no irreducible polynomial found");
}

} // namespace

FieldConfig::FieldConfig(int p, int f, int s) : p_(p), f_(f), s_(s) {
    deg_ = f * s;
    mod_ = first_irreducible(p, deg_);
    init();
}

FieldConfig::FieldConfig(int p, int f, int s, const std::vector<uint8_t>& modulus)
    : p_(p), f_(f), s_(s), mod_(modulus) {
    deg_ = f * s;
    if ((int)mod_.size() != deg_ + 1 || mod_[deg_] != 1)
        throw std::invalid_argument("modulus must be monic of degree f*s");
    if (deg_ > 1 && !is_irreducible(mod_, p_))
        throw std::invalid_argument("modulus is not irreducible over F_p");
    init();
}

void FieldConfig::init() {
    // p prime check by trial division
    if (p_ < 2) throw std::invalid_argument("p must be a prime");
    for (int d = 2; d * d <= p_; ++d)
        if (p_ % d == 0) throw std::invalid_argument("p must be a prime");
    if (deg_ > MAX_DEG) throw std::invalid_argument("f*s too large");
    q_ = 1;
    for (int i = 0; i < f_; ++i) q_ *= p_;
    order_ = 1;
    for (int i = 0; i < s_; ++i) order_ *= q_;

    // reduction rows: x^k mod modulus for k = deg .. 2deg-2
    red_.assign(std::max(0, deg_ - 1), {});
    std::array<uint8_t, MAX_DEG> cur{};
    // start with x^deg = -mod_[0..deg-1]
    for (int i = 0; i < deg_; ++i)
        cur[i] = (uint8_t)((p_ - mod_[i] % p_) % p_);
    for (int k = 0; k + 1 <= (int)red_.size(); ++k) {
        red_[k] = cur;
        // multiply by x and reduce once
        std::array<uint8_t, MAX_DEG> nxt{};
        int top = cur[deg_ - 1];
        for (int i = deg_ - 1; i >= 1; --i) nxt[i] = cur[i - 1];
        nxt[0] = 0;
        if (top) {
            for (int i = 0; i < deg_; ++i) {
                int v = nxt[i] + top * ((p_ - mod_[i] % p_) % p_);
                nxt[i] = (uint8_t)(v % p_);
            }
        }
        cur = nxt;
    }
}

std::shared_ptr<const FieldConfig> FieldConfig::make(int p, int f, int s) {
    return std::make_shared<const FieldConfig>(p, f, s);
}

FqElem::FqElem(FieldPtr F, long long c) : F_(std::move(F)) {
    coords_.fill(0);
    long long v = c % F_->p();
    if (v < 0) v += F_->p();
    coords_[0] = (uint8_t)v;
}

FqElem FqElem::gen(const FieldPtr& F) {
    FqElem x(F);
    if (F->deg() < 2) throw std::domain_error("prime field has no power-basis generator");
    x.coords_[1] = 1;
    return x;
}

FqElem FqElem::from_coords(const FieldPtr& F, const std::vector<int>& coords) {
    if ((int)coords.size() > F->deg())
        throw std::invalid_argument("too many coordinates for this field");
    FqElem x(F);
    for (size_t i = 0; i < coords.size(); ++i) {
        int v = coords[i] % F->p();
        if (v < 0) v += F->p();
        x.coords_[i] = (uint8_t)v;
    }
    return x;
}

bool FqElem::is_zero() const {
    for (int i = 0; i < F_->deg(); ++i) if (coords_[i]) return false;
    return true;
}

bool FqElem::is_one() const {
    if (coords_[0] != 1) return false;
    for (int i = 1; i < F_->deg(); ++i) if (coords_[i]) return false;
    return true;
}

std::vector<int> FqElem::coords() const {
    std::vector<int> v(F_->deg());
    for (int i = 0; i < F_->deg(); ++i) v[i] = coords_[i];
    return v;
}

FqElem operator+(const FqElem& a, const FqElem& b) {
    FqElem r(a.F_);
    int p = a.F_->p(), d = a.F_->deg();
    for (int i = 0; i < d; ++i) r.coords_[i] = (uint8_t)((a.coords_[i] + b.coords_[i]) % p);
    return r;
}

FqElem operator-(const FqElem& a, const FqElem& b) {
    FqElem r(a.F_);
    int p = a.F_->p(), d = a.F_->deg();
    for (int i = 0; i < d; ++i) r.coords_[i] = (uint8_t)((a.coords_[i] + p - b.coords_[i]) % p);
    return r;
}

FqElem FqElem::operator-() const {
    FqElem r(F_);
    int p = F_->p(), d = F_->deg();
    for (int i = 0; i < d; ++i) r.coords_[i] = (uint8_t)((p - coords_[i]) % p);
    return r;
}

FqElem operator*(const FqElem& a, const FqElem& b) {
    const auto& F = a.F_;
    int p = F->p(), d = F->deg();
    int prod[2 * FieldConfig::MAX_DEG] = {0};
    for (int i = 0; i < d; ++i) {
        if (!a.coords_[i]) continue;
        int ai = a.coords_[i];
        for (int j = 0; j < d; ++j)
            prod[i + j] += ai * b.coords_[j];
    }
    FqElem r(F);
    const auto& red = F->red_rows();
    int acc[FieldConfig::MAX_DEG] = {0};
    for (int i = 0; i < d; ++i) acc[i] = prod[i];
    for (int k = d; k <= 2 * d - 2; ++k) {
        int c = prod[k] % p;
        if (!c) continue;
        const auto& row = red[k - d];
        for (int i = 0; i < d; ++i) acc[i] += c * row[i];
    }
    for (int i = 0; i < d; ++i) r.coords_[i] = (uint8_t)(acc[i] % p);
    return r;
}

FqElem FqElem::pow(long long e) const {
    long long m = F_->field_order() - 1;
    if (is_zero()) {
        if (e < 0) throw std::domain_error("0 has no negative power");
        return e == 0 ? FqElem(F_, 1) : *this;
    }
    e %= m;
    if (e < 0) e += m;
    FqElem base = *this, r(F_, 1);
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

FqElem FqElem::inv() const {
    if (is_zero()) throw std::domain_error("division by zero in F_q");
    return pow(F_->field_order() - 2);
}

bool operator==(const FqElem& a, const FqElem& b) {
    int d = a.F_->deg();
    for (int i = 0; i < d; ++i) if (a.coords_[i] != b.coords_[i]) return false;
    return true;
}

FqElem FqElem::frob(long long k) const {
    long long s = F_->s();
    long long kk = k % s;
    if (kk < 0) kk += s;
    FqElem r = *this;
    for (long long i = 0; i < kk; ++i) r = r.pow(F_->q());
    return r;
}

bool lex_less(const FqElem& a, const FqElem& b) {
    return a.index() < b.index();
}

// first match in the canonical enumeration is the least root
bool FqElem::mth_root(long long m, FqElem& out) const {
    if (is_zero()) { out = *this; return true; }
    for (long long idx = 1; idx < F_->field_order(); ++idx) {
        FqElem cand = from_index(F_, idx);
        if (cand.pow(m) == *this) { out = cand; return true; }
    }
    return false;
}

FqElem FqElem::from_index(const FieldPtr& F, long long idx) {
    FqElem x(F);
    int p = F->p(), d = F->deg();
    long long t = idx;
    for (int i = 0; i < d; ++i) { x.coords_[i] = (uint8_t)(t % p); t /= p; }
    return x;
}

long long FqElem::index() const {
    long long idx = 0, unit = 1;
    for (int i = 0; i < F_->deg(); ++i) { idx += coords_[i] * unit; unit *= F_->p(); }
    return idx;
}

std::string FqElem::str() const {
    std::string s = "[";
    for (int i = 0; i < F_->deg(); ++i) {
        if (i) s += ",";
        s += std::to_string(coords_[i]);
    }
    return s + "]";
}

} // namespace drinfeld
