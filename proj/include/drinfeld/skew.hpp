#ifndef DRINFELD_SKEW_HPP
#define DRINFELD_SKEW_HPP

#include <concepts>
#include <stdexcept>
#include <vector>

#include "drinfeld/cinf.hpp"
#include "drinfeld/frobsym.hpp"

namespace drinfeld {

// Coefficient rings usable under tau/sigma: CInf and FrobSym both satisfy
// this protocol.
template <class R>
concept TwistRing = requires(const R& x, long long n) {
    { x + x } -> std::convertible_to<R>;
    { x * x } -> std::convertible_to<R>;
    { -x } -> std::convertible_to<R>;
    { x.twist(n) } -> std::convertible_to<R>;
    { x.is_zero() } -> std::convertible_to<bool>;
    { x.ring_zero() } -> std::convertible_to<R>;
    { x.ring_one() } -> std::convertible_to<R>;
};

// Twisted polynomial sum a_i op^i with op*alpha = alpha^(Dir)*op.
// Dir = +1 gives K[tau] (alpha^q tau = tau alpha), Dir = -1 gives K[sigma].
template <TwistRing R, int Dir>
struct OrePoly {
    R proto;            // zero of the coefficient ring (carries context)
    std::vector<R> a;   // a[i] op^i, trailing zeros trimmed

    explicit OrePoly(const R& zero) : proto(zero.ring_zero()) {}
    OrePoly(const R& zero, std::vector<R> coeffs) : proto(zero.ring_zero()), a(std::move(coeffs)) {
        trim();
    }

    static OrePoly zero(const R& proto) { return OrePoly(proto); }
    static OrePoly one(const R& proto) {
        OrePoly p(proto);
        p.a.push_back(proto.ring_one());
        return p;
    }
    static OrePoly op(const R& proto, int k = 1) {  // tau^k (resp. sigma^k)
        OrePoly p(proto);
        p.a.assign(k + 1, proto.ring_zero());
        p.a[k] = proto.ring_one();
        return p;
    }
    static OrePoly constant(const R& c) {
        OrePoly p(c);
        p.a.push_back(c);
        p.trim();
        return p;
    }

    void trim() {
        while (!a.empty() && a.back().is_zero()) a.pop_back();
    }
    int degree() const { return (int)a.size() - 1; }  // -1 for zero
    bool is_zero() const { return a.empty(); }
    R coeff(int i) const { return i < (int)a.size() ? a[i] : proto; }

    OrePoly ring_zero() const { return OrePoly(proto); }
    OrePoly ring_one() const { return one(proto); }

    friend OrePoly operator+(const OrePoly& x, const OrePoly& y) {
        OrePoly r(x.proto);
        r.a.resize(std::max(x.a.size(), y.a.size()), x.proto);
        for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.coeff((int)i) + y.coeff((int)i);
        r.trim();
        return r;
    }
    friend OrePoly operator-(const OrePoly& x, const OrePoly& y) { return x + (-y); }
    OrePoly operator-() const {
        OrePoly r = *this;
        for (auto& c : r.a) c = -c;
        return r;
    }
    friend OrePoly operator*(const OrePoly& x, const OrePoly& y) {
        OrePoly r(x.proto);
        if (x.is_zero() || y.is_zero()) return r;
        r.a.assign(x.a.size() + y.a.size() - 1, x.proto);
        for (size_t i = 0; i < x.a.size(); ++i) {
            if (x.a[i].is_zero()) continue;
            for (size_t j = 0; j < y.a.size(); ++j) {
                if (y.a[j].is_zero()) continue;
                r.a[i + j] = r.a[i + j] + x.a[i] * y.a[j].twist(Dir * (long long)i);
            }
        }
        r.trim();
        return r;
    }
    friend bool operator==(const OrePoly& x, const OrePoly& y) { return (x - y).is_zero(); }

    // coefficientwise twist (conjugation of the whole operator)
    OrePoly twist(long long n) const {
        OrePoly r(proto);
        r.a.reserve(a.size());
        for (const auto& c : a) r.a.push_back(c.twist(n));
        r.trim();
        return r;
    }
};

template <TwistRing R> using SkewPoly = OrePoly<R, +1>;
template <TwistRing R> using SigmaPoly = OrePoly<R, -1>;

// Dense matrix over any additive/multiplicative type following the same
// prototype discipline.
template <class T>
struct Mat {
    int rows = 0, cols = 0;
    std::vector<T> d;

    Mat() = default;
    Mat(int r, int c, const T& zero) : rows(r), cols(c), d((size_t)r * c, zero) {}

    T& at(int i, int j) { return d[(size_t)i * cols + j]; }
    const T& at(int i, int j) const { return d[(size_t)i * cols + j]; }

    static Mat identity(int n, const T& zero) {
        Mat m(n, n, zero);
        for (int i = 0; i < n; ++i) m.at(i, i) = zero.ring_one();
        return m;
    }

    Mat transpose() const {
        Mat m(cols, rows, d[0].ring_zero());
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m.at(j, i) = at(i, j);
        return m;
    }

    friend Mat operator+(const Mat& a, const Mat& b) {
        if (a.rows != b.rows || a.cols != b.cols)
            throw std::invalid_argument("Mat: dimension mismatch in +");
        Mat r = a;
        for (size_t k = 0; k < r.d.size(); ++k) r.d[k] = a.d[k] + b.d[k];
        return r;
    }
    friend Mat operator-(const Mat& a, const Mat& b) {
        if (a.rows != b.rows || a.cols != b.cols)
            throw std::invalid_argument("Mat: dimension mismatch in -");
        Mat r = a;
        for (size_t k = 0; k < r.d.size(); ++k) r.d[k] = a.d[k] - b.d[k];
        return r;
    }
    Mat operator-() const {
        Mat r = *this;
        for (auto& x : r.d) x = -x;
        return r;
    }
    friend Mat operator*(const Mat& a, const Mat& b) {
        if (a.cols != b.rows) throw std::invalid_argument("Mat: dimension mismatch in *");
        Mat r(a.rows, b.cols, a.d[0].ring_zero());
        for (int i = 0; i < a.rows; ++i)
            for (int k = 0; k < a.cols; ++k) {
                const T& aik = a.at(i, k);
                if (aik.is_zero()) continue;
                for (int j = 0; j < b.cols; ++j) {
                    if (b.at(k, j).is_zero()) continue;
                    r.at(i, j) = r.at(i, j) + aik * b.at(k, j);
                }
            }
        return r;
    }
    friend bool operator==(const Mat& a, const Mat& b) {
        if (a.rows != b.rows || a.cols != b.cols) return false;
        for (size_t k = 0; k < a.d.size(); ++k)
            if (!(a.d[k] - b.d[k]).is_zero()) return false;
        return true;
    }

    Mat twist(long long n) const {
        Mat r = *this;
        for (auto& x : r.d) x = x.twist(n);
        return r;
    }

    bool is_zero() const {
        for (const auto& x : d)
            if (!x.is_zero()) return false;
        return true;
    }

    Mat scaled(const T& c) const {
        Mat r = *this;
        for (auto& x : r.d) x = c * x;
        return r;
    }
};

// M^k by repeated Ore multiplication
template <class T>
Mat<T> mat_power(const Mat<T>& m, long long k) {
    if (m.rows != m.cols) throw std::invalid_argument("mat_power: square required");
    if (k < 1) throw std::invalid_argument("mat_power: k >= 1 required");
    Mat<T> r = m;
    for (long long i = 1; i < k; ++i) r = r * m;
    return r;
}

// entrywise star with transpose: (B*)_{ij} = sum (B_{ji})_k^{(-k)} sigma^k
template <TwistRing R>
Mat<SigmaPoly<R>> star_dualize(const Mat<SkewPoly<R>>& B) {
    const R proto = B.d[0].proto;
    Mat<SigmaPoly<R>> out(B.cols, B.rows, SigmaPoly<R>(proto));
    for (int i = 0; i < B.rows; ++i)
        for (int j = 0; j < B.cols; ++j) {
            const SkewPoly<R>& b = B.at(i, j);
            SigmaPoly<R> s(proto);
            s.a.reserve(b.a.size());
            for (size_t k = 0; k < b.a.size(); ++k) s.a.push_back(b.a[k].twist(-(long long)k));
            s.trim();
            out.at(j, i) = s;
        }
    return out;
}

// inverse star: back from sigma-matrices to tau-matrices
template <TwistRing R>
Mat<SkewPoly<R>> star_dualize_back(const Mat<SigmaPoly<R>>& B) {
    const R proto = B.d[0].proto;
    Mat<SkewPoly<R>> out(B.cols, B.rows, SkewPoly<R>(proto));
    for (int i = 0; i < B.rows; ++i)
        for (int j = 0; j < B.cols; ++j) {
            const SigmaPoly<R>& b = B.at(i, j);
            SkewPoly<R> s(proto);
            s.a.reserve(b.a.size());
            for (size_t k = 0; k < b.a.size(); ++k) s.a.push_back(b.a[k].twist((long long)k));
            s.trim();
            out.at(j, i) = s;
        }
    return out;
}

// (sum A_i tau^i)(z) = sum A_i z^(i), entrywise q^i power on the point
inline std::vector<CInf> skew_apply(const Mat<SkewPoly<CInf>>& A, const std::vector<CInf>& z) {
    if ((int)z.size() != A.cols) throw std::invalid_argument("skew_apply: dimension mismatch");
    CInf proto = A.d[0].proto;
    int maxdeg = 0;
    for (const auto& p : A.d) maxdeg = std::max(maxdeg, p.degree());
    std::vector<std::vector<CInf>> ztw;  // ztw[k][j] = z_j^{(k)}
    ztw.reserve(maxdeg + 1);
    for (int k = 0; k <= maxdeg; ++k) {
        std::vector<CInf> row;
        row.reserve(z.size());
        for (const auto& zj : z) row.push_back(zj.twist(k));
        ztw.push_back(std::move(row));
    }
    std::vector<CInf> out(A.rows, proto);
    for (int i = 0; i < A.rows; ++i) {
        CInf acc = proto;
        for (int j = 0; j < A.cols; ++j) {
            const auto& p = A.at(i, j);
            for (int k = 0; k <= p.degree(); ++k) {
                if (p.a[k].is_zero()) continue;
                acc = acc + p.a[k] * ztw[k][j];
            }
        }
        out[i] = acc;
    }
    return out;
}

} // namespace drinfeld

#endif
