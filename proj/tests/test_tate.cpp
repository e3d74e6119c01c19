#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drinfeld/tate.hpp"

using namespace drinfeld;

namespace {

FieldPtr F4() {
    static FieldPtr F = FieldConfig::make(2, 2, 1);
    return F;
}

CInf rnd_cinf(const FieldPtr& F, std::mt19937& rng, int prec = 30) {
    std::uniform_int_distribution<int> nterms(1, 3), num(-6, 6), coef(0, (int)F->field_order() - 1);
    CInf x(F, XRat(Rat(prec)));
    for (int i = 0, n = nterms(rng); i < n; ++i)
        x.mut_terms().push_back({Rat(num(rng)), FqElem::from_index(F, coef(rng))});
    x.normalize();
    return x;
}

TateElem rnd_tate(const FieldPtr& F, std::mt19937& rng) {
    CInf z = CInf::zero(F);
    TPoly<CInf> p(z);
    std::uniform_int_distribution<int> dd(0, 3), lv(1, 3);
    int d = dd(rng);
    for (int i = 0; i <= d; ++i) p.c.push_back(rnd_cinf(F, rng));
    p.trim();
    TateElem e(z, p);
    e = e + TateElem::principal(rnd_cinf(F, rng), lv(rng), 1);
    return e;
}

} // namespace

TEST_CASE("lucas binomials match pascal mod p") {
    for (int p : {2, 3}) {
        std::vector<std::vector<int>> pas(12, std::vector<int>(12, 0));
        for (int n = 0; n < 12; ++n) {
            pas[n][0] = 1;
            for (int k = 1; k <= n; ++k)
                pas[n][k] = (pas[n - 1][k - 1] + (k <= n - 1 ? pas[n - 1][k] : 0)) % p;
        }
        for (int n = 0; n < 12; ++n)
            for (int k = 0; k <= n; ++k) CHECK(binom_mod_p(n, k, p) == pas[n][k]);
    }
}

TEST_CASE("twist moves coefficients and pole levels") {
    auto F = F4();
    TateElem f = TateElem::t_minus_theta_pow(F, 1);
    TateElem ft = f.twist(1);
    CHECK(ft.poly().coeff(0).equal_to_prec(-CInf::theta_pow(F, Rat(4))));
    CHECK(ft.poly().coeff(1).equal_to_prec(CInf::one(F)));

    TateElem g = TateElem::principal(CInf::one(F), 1, 1);
    TateElem gt = g.twist(-1);
    REQUIRE(gt.pfrac().size() == 1);
    CHECK(gt.pfrac()[0].level == 0);
    CHECK_THROWS_AS(gt.twist(-1), NegativePoleLevel);

    std::mt19937 rng(11);
    for (int t = 0; t < 40; ++t) {
        TateElem x = rnd_tate(F, rng);
        TateElem back = x.twist(1).twist(-1);
        CHECK((x - back).is_zero());
    }
}

TEST_CASE("inner product: identity, Ore compatibility") {
    auto F = F4();
    CInf z = CInf::zero(F);
    std::mt19937 rng(13);
    TateMat Fm(1, 1, TateElem(z));
    Fm.at(0, 0) = rnd_tate(F, rng);
    Mat<SkewPoly<CInf>> one(1, 1, SkewPoly<CInf>(z));
    one.at(0, 0) = SkewPoly<CInf>::one(z);
    auto idres = inner_product(one, Fm);
    CHECK((idres.at(0, 0) - Fm.at(0, 0)).is_zero());

    for (int t = 0; t < 12; ++t) {
        Mat<SkewPoly<CInf>> B1(1, 1, SkewPoly<CInf>(z)), B2(1, 1, SkewPoly<CInf>(z));
        B1.at(0, 0).a = {rnd_cinf(F, rng), rnd_cinf(F, rng)};
        B1.at(0, 0).trim();
        B2.at(0, 0).a = {rnd_cinf(F, rng), rnd_cinf(F, rng), rnd_cinf(F, rng)};
        B2.at(0, 0).trim();
        TateMat G(1, 1, TateElem(z));
        G.at(0, 0) = rnd_tate(F, rng);
        auto lhs = inner_product(B1 * B2, G);
        auto rhs = inner_product(B1, inner_product(B2, G));
        CHECK((lhs.at(0, 0) - rhs.at(0, 0)).is_zero());
    }
}

TEST_CASE("evaluation and residue at t = theta") {
    auto F = F4();
    CInf z = CInf::zero(F);
    TPoly<CInf> tp(z);
    tp.c = {z, CInf::one(F)};  // f = t
    TateElem f(z, tp);
    auto [val, res] = f.eval_residue_theta();
    REQUIRE(val.has_value());
    CHECK(val->equal_to_prec(CInf::theta_pow(F, Rat(1))));
    CHECK(res.is_zero());

    CInf c = CInf::theta_pow(F, Rat(2)).truncated(XRat(Rat(20)));
    TateElem g = TateElem::principal(c, 0, 1);
    auto [gval, gres] = g.eval_residue_theta();
    CHECK(!gval.has_value());
    CHECK(gres.equal_to_prec(c));

    // (t-theta) * (c/(t-theta)) = c exactly: pole removed
    TateElem cleared = g.mul_tpoly(TateElem::t_minus_theta_pow(F, 1).poly());
    CHECK(cleared.pfrac().empty());
    auto [cv, cr] = cleared.eval_residue_theta();
    REQUIRE(cv.has_value());
    CHECK(cv->equal_to_prec(c));
    CHECK(cr.is_zero());

    TateElem h = TateElem::principal(c, 0, 2);
    CHECK_THROWS_AS(h.eval_residue_theta(), PoleAtTheta);
}

TEST_CASE("pfrac expansion is consistent with closed-form evaluation") {
    auto F = F4();
    std::mt19937 rng(17);
    for (int t = 0; t < 10; ++t) {
        CInf c = rnd_cinf(F, rng);
        for (int mult : {1, 2}) {
            TateElem g = TateElem::principal(c, 1, mult);
            TateElem ex = g.expanded(12);
            for (int i = 0; i <= 12; ++i) CHECK((ex.poly().coeff(i) - g.coeff(i)).is_zero());
            auto v = g.eval_residue_theta().first;
            REQUIRE(v.has_value());
            CInf theta = CInf::theta_pow(F, Rat(1));
            CInf den = (theta - CInf::theta_pow(F, Rat(F->q()))).truncated(XRat(Rat(30)));
            CInf expect = c * den.pow(-mult);
            CHECK((*v - expect).is_zero_to_prec());
        }
    }
}

TEST_CASE("gauss norms: constants, linear, principal parts, multiplicativity") {
    auto F = F4();
    CInf z = CInf::zero(F);
    TateElem one = TateElem(z).ring_one();
    CHECK(one.gauss_log_norm() == XRat(Rat(0)));
    CHECK(TateElem::t_minus_theta_pow(F, 1).gauss_log_norm() == XRat(Rat(1)));
    // |1/(t - theta^q)| = q^{-q}, here q = 4
    TateElem pr = TateElem::principal(CInf::one(F), 1, 1);
    CHECK(pr.gauss_log_norm() == XRat(Rat(-4)));

    std::mt19937 rng(19);
    for (int t = 0; t < 20; ++t) {
        TPoly<CInf> a(z), b(z);
        a.c = {rnd_cinf(F, rng), rnd_cinf(F, rng)};
        b.c = {rnd_cinf(F, rng), rnd_cinf(F, rng), rnd_cinf(F, rng)};
        a.trim();
        b.trim();
        if (a.is_zero() || b.is_zero()) continue;
        TateElem ta(z, a), tb(z, b), tab(z, a * b);
        CHECK(tab.gauss_log_norm() == ta.gauss_log_norm() + tb.gauss_log_norm());
    }
}

TEST_CASE("difference-equation checker: trivial and constructed cases") {
    auto F = F4();
    CInf z = CInf::zero(F);
    TPoly<CInf> zt(z);

    Mat<TPoly<CInf>> Phi(1, 1, zt);
    Phi.at(0, 0) = TateElem::t_minus_theta_pow(F, 1).poly();
    TateMat X(1, 1, TateElem(z));
    CHECK(check_frobenius_equation(Phi, X, DiffSide::Dual, 16).is_neg_inf());

    Mat<TPoly<CInf>> one(1, 1, zt);
    one.at(0, 0) = zt.ring_one();
    TateMat Xi(1, 1, TateElem(z).ring_one());
    CHECK(check_frobenius_equation(one, Xi, DiffSide::Dual, 16).is_neg_inf());
    CHECK(check_frobenius_equation(one, Xi, DiffSide::Motive, 16).is_neg_inf());

    TateMat Xbad(1, 1, TateElem(z).ring_one());
    XRat d = check_frobenius_equation(Phi, Xbad, DiffSide::Dual, 16);
    CHECK(d >= XRat(Rat(0)));
}

TEST_CASE("debug JSON dump includes both representations") {
    auto F = F4();
    CInf z = CInf::zero(F);
    TPoly<CInf> p(z);
    p.c = {CInf::one(F), CInf::theta_pow(F, Rat(1))};
    TateElem e(z, p);
    e = e + TateElem::principal(CInf::one(F), 1, 2);
    std::string dump = e.json_dump();
    CHECK(dump.find("\"poly\"") != std::string::npos);
    CHECK(dump.find("\"pfrac\"") != std::string::npos);
    CHECK(dump.find("\"level\":1") != std::string::npos);
    CHECK(dump.find("\"mult\":2") != std::string::npos);
}

TEST_CASE("series inversion in T") {
    auto F = F4();
    CInf z = CInf::zero(F);
    std::mt19937 rng(23);
    TPoly<CInf> p(z);
    p.c = {CInf::one(F), rnd_cinf(F, rng), rnd_cinf(F, rng)};
    p.trim();
    TateElem e(z, p);
    TateElem inv = e.inv_series(14);
    TateElem prod = e * inv;
    CHECK((prod.coeff(0) - CInf::one(F)).is_zero_to_prec());
    for (int i = 1; i <= 14; ++i) CHECK(prod.coeff(i).is_zero());
}
