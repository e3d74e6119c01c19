#ifndef DRINFELD_TPOLY_HPP
#define DRINFELD_TPOLY_HPP

#include <string>
#include <vector>

#include "drinfeld/skew.hpp"

namespace drinfeld {

// Commutative polynomial in the operator variable t over a twist ring R.
// Twisting acts coefficientwise and fixes t (sum c_i t^i maps to
// sum c_i^{q^n} t^i).
template <TwistRing R>
struct TPoly {
    R proto;
    std::vector<R> c;  // c[i] t^i

    explicit TPoly(const R& zero) : proto(zero.ring_zero()) {}
    TPoly(const R& zero, std::vector<R> coeffs) : proto(zero.ring_zero()), c(std::move(coeffs)) {
        trim();
    }

    static TPoly zero(const R& proto) { return TPoly(proto); }
    static TPoly constant(const R& x) {
        TPoly p(x);
        p.c.push_back(x);
        p.trim();
        return p;
    }
    static TPoly t(const R& proto, int k = 1) {
        TPoly p(proto);
        p.c.assign(k + 1, proto.ring_zero());
        p.c[k] = proto.ring_one();
        return p;
    }

    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    int degree() const { return (int)c.size() - 1; }
    bool is_zero() const { return c.empty(); }
    R coeff(int i) const { return i >= 0 && i < (int)c.size() ? c[i] : proto; }

    TPoly ring_zero() const { return TPoly(proto); }
    TPoly ring_one() const { return constant(proto.ring_one()); }

    friend TPoly operator+(const TPoly& x, const TPoly& y) {
        TPoly r(x.proto);
        r.c.resize(std::max(x.c.size(), y.c.size()), x.proto);
        for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = x.coeff((int)i) + y.coeff((int)i);
        r.trim();
        return r;
    }
    friend TPoly operator-(const TPoly& x, const TPoly& y) { return x + (-y); }
    TPoly operator-() const {
        TPoly r = *this;
        for (auto& v : r.c) v = -v;
        return r;
    }
    friend TPoly operator*(const TPoly& x, const TPoly& y) {
        TPoly r(x.proto);
        if (x.is_zero() || y.is_zero()) return r;
        r.c.assign(x.c.size() + y.c.size() - 1, x.proto);
        for (size_t i = 0; i < x.c.size(); ++i) {
            if (x.c[i].is_zero()) continue;
            for (size_t j = 0; j < y.c.size(); ++j) {
                if (y.c[j].is_zero()) continue;
                r.c[i + j] = r.c[i + j] + x.c[i] * y.c[j];
            }
        }
        r.trim();
        return r;
    }
    friend bool operator==(const TPoly& x, const TPoly& y) { return (x - y).is_zero(); }

    TPoly twist(long long n) const {
        TPoly r(proto);
        r.c.reserve(c.size());
        for (const auto& v : c) r.c.push_back(v.twist(n));
        r.trim();
        return r;
    }

    TPoly scaled(const R& s) const {
        TPoly r = *this;
        for (auto& v : r.c) v = s * v;
        r.trim();
        return r;
    }

    R eval(const R& x) const {  // Horner
        R acc = proto;
        for (int i = degree(); i >= 0; --i) acc = acc * x + c[i];
        return acc;
    }

    TPoly pow(long long k) const {
        TPoly r = ring_one(), base = *this;
        while (k) {
            if (k & 1) r = r * base;
            base = base * base;
            k >>= 1;
        }
        return r;
    }

    // exact division by (t - a)^1 with remainder
    std::pair<TPoly, R> divmod_linear(const R& a) const {
        TPoly q(proto);
        if (is_zero()) return {q, proto};
        q.c.assign(c.size() > 1 ? c.size() - 1 : 0, proto);
        R rem = c.back();
        for (int i = (int)c.size() - 2; i >= 0; --i) {
            q.c[i] = rem;
            rem = c[i] + rem * a;
        }
        q.trim();
        return {q, rem};
    }
};

using TPolyMatC = Mat<TPoly<CInf>>;
using TPolyMatS = Mat<TPoly<FrobSym>>;

// determinant by Laplace expansion; matrices here never exceed 6x6
template <TwistRing R>
TPoly<R> tmat_det(const Mat<TPoly<R>>& m) {
    if (m.rows != m.cols) throw std::invalid_argument("det: square required");
    int n = m.rows;
    if (n == 1) return m.at(0, 0);
    TPoly<R> acc = TPoly<R>::zero(m.d[0].proto);
    for (int j = 0; j < n; ++j) {
        if (m.at(0, j).is_zero()) continue;
        Mat<TPoly<R>> minor(n - 1, n - 1, m.d[0].ring_zero());
        for (int i = 1; i < n; ++i) {
            int cc = 0;
            for (int k = 0; k < n; ++k) {
                if (k == j) continue;
                minor.at(i - 1, cc++) = m.at(i, k);
            }
        }
        TPoly<R> term = m.at(0, j) * tmat_det(minor);
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

// cofactor matrix: Cof(C)_{ij} = (-1)^{i+j} det(minor_ij); C^{ad} = Cof^tr
template <TwistRing R>
Mat<TPoly<R>> tmat_cof(const Mat<TPoly<R>>& m) {
    if (m.rows != m.cols) throw std::invalid_argument("cof: square required");
    int n = m.rows;
    Mat<TPoly<R>> out(n, n, m.d[0].ring_zero());
    if (n == 1) {
        out.at(0, 0) = m.d[0].ring_one();
        return out;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Mat<TPoly<R>> minor(n - 1, n - 1, m.d[0].ring_zero());
            int rr = 0;
            for (int a = 0; a < n; ++a) {
                if (a == i) continue;
                int cc = 0;
                for (int b = 0; b < n; ++b) {
                    if (b == j) continue;
                    minor.at(rr, cc++) = m.at(a, b);
                }
                ++rr;
            }
            TPoly<R> d = tmat_det(minor);
            out.at(i, j) = ((i + j) % 2 == 0) ? d : -d;
        }
    return out;
}

template <TwistRing R>
Mat<TPoly<R>> tmat_adj(const Mat<TPoly<R>>& m) {
    return tmat_cof(m).transpose();
}

struct CofAdjDet {
    TPolyMatC cof, adj;
    TPoly<CInf> det;
};

} // namespace drinfeld

#endif
