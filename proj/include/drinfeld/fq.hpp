#ifndef DRINFELD_FQ_HPP
#define DRINFELD_FQ_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace drinfeld {

// F_{q^s} with q = p^f, realized as F_p[x]/(modulus), deg modulus = f*s.
// The modulus is the lexicographically first monic irreducible, so the
// coordinate-lex enumeration of field elements is canonical and all
// "least root" choices downstream are reproducible.
class FieldConfig {
public:
    static constexpr int MAX_DEG = 16;

    FieldConfig(int p, int f, int s);
    // explicit modulus, low-degree-first coefficient vector of length f*s+1 (monic)
    FieldConfig(int p, int f, int s, const std::vector<uint8_t>& modulus);

    int p() const { return p_; }
    int f() const { return f_; }
    int s() const { return s_; }
    long long q() const { return q_; }          // p^f
    long long field_order() const { return order_; } // q^s
    int deg() const { return deg_; }            // f*s
    const std::vector<uint8_t>& modulus() const { return mod_; }

    // x^k mod modulus for deg_ <= k < 2*deg_-1, precomputed for reduction
    const std::vector<std::array<uint8_t, MAX_DEG>>& red_rows() const { return red_; }

    // Extend to F_{q^{s'}}, s' = s*extra (same p, f).  Elements of the old
    // field do NOT embed coordinatewise; see FqElem::lift_scalar for the
    // prime-field case which is all the pipeline needs.
    static std::shared_ptr<const FieldConfig> make(int p, int f, int s);

private:
    void init();
    int p_, f_, s_, deg_;
    long long q_, order_;
    std::vector<uint8_t> mod_;
    std::vector<std::array<uint8_t, MAX_DEG>> red_;
};

using FieldPtr = std::shared_ptr<const FieldConfig>;

// Element of F_{q^s} in the power basis of the modulus.  Fixed inline
// storage: these sit in the innermost loops of every series product.
class FqElem {
public:
    FqElem() : F_(nullptr) { coords_.fill(0); }
    explicit FqElem(FieldPtr F) : F_(std::move(F)) { coords_.fill(0); }
    FqElem(FieldPtr F, long long c);  // image of the integer c (prime subfield)

    static FqElem zero(const FieldPtr& F) { return FqElem(F); }
    static FqElem one(const FieldPtr& F) { return FqElem(F, 1); }
    // generator x of the power basis
    static FqElem gen(const FieldPtr& F);
    // element from F_p coordinates (low degree first, length <= deg)
    static FqElem from_coords(const FieldPtr& F, const std::vector<int>& coords);

    const FieldPtr& field() const { return F_; }
    bool is_zero() const;
    bool is_one() const;
    std::vector<int> coords() const;

    friend FqElem operator+(const FqElem& a, const FqElem& b);
    friend FqElem operator-(const FqElem& a, const FqElem& b);
    friend FqElem operator*(const FqElem& a, const FqElem& b);
    FqElem operator-() const;
    FqElem inv() const;
    FqElem pow(long long e) const;

    friend bool operator==(const FqElem& a, const FqElem& b);
    friend bool operator!=(const FqElem& a, const FqElem& b) { return !(a == b); }

    // x -> x^{q^k}, k possibly negative (Frobenius is bijective)
    FqElem frob(long long k) const;

    // q-power Frobenius fixes exactly the subfield F_q
    bool in_base_fq() const { return frob(1) == *this; }

    // Least m-th root in coordinate-lex enumeration order; false if none.
    bool mth_root(long long m, FqElem& out) const;

    // coordinate-lex order used for canonical root choices
    friend bool lex_less(const FqElem& a, const FqElem& b);

    // enumeration: element with index i in [0, q^s) in coordinate-lex order
    static FqElem from_index(const FieldPtr& F, long long idx);
    long long index() const;

    std::string str() const;

private:
    FieldPtr F_;
    std::array<uint8_t, FieldConfig::MAX_DEG> coords_;
    friend class FieldConfig;
};

} // namespace drinfeld

#endif
