#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drinfeld/motives.hpp"
#include "golden_util.hpp"

using namespace drinfeld;

#ifndef DRINFELD_SOURCE_DIR
#define DRINFELD_SOURCE_DIR "."
#endif

namespace {

std::vector<FrobSym> skappas(int r) {
    std::vector<FrobSym> ks;
    for (int i = 1; i <= r; ++i) ks.push_back(FrobSym::kappa(i));
    return ks;
}

FrameSet<FrobSym> sym_frames(int r) { return FrameSet<FrobSym>(FrobSym::theta(), skappas(r)); }

TPoly<FrobSym> lin() {
    TPoly<FrobSym> p(FrobSym::zero());
    p.c = {-FrobSym::theta(), FrobSym::one()};
    return p;
}

FrameSet<CInf> num_frames(const FieldPtr& F, const Rat& P) {
    CInf th = CInf::theta_pow(F, Rat(1)).truncated(XRat(P));
    std::vector<CInf> ks{
        (CInf::theta_pow(F, Rat(-1)) + CInf::one(F)).truncated(XRat(P)),
        (CInf::one(F) + CInf::theta_pow(F, Rat(-2), 1)).truncated(XRat(P))};
    return FrameSet<CInf>(th, ks);
}

} // namespace

TEST_CASE("rank-2 frame matrices match the displayed forms") {
    auto fs = sym_frames(2);
    FrobSym k2i = FrobSym::kappa(2).inv();
    CHECK(fs.phi_tilde.at(0, 0).is_zero());
    CHECK(fs.phi_tilde.at(0, 1) == TPoly<FrobSym>::constant(FrobSym::one()));
    CHECK(fs.phi_tilde.at(1, 0) == lin().scaled(k2i));
    CHECK(fs.phi_tilde.at(1, 1) == TPoly<FrobSym>::constant(-(k2i * FrobSym::kappa(1))));
    FrobSym k2mi = FrobSym::kappa(2, -2).inv();
    CHECK(fs.phi.at(1, 0) == lin().scaled(k2mi));
    CHECK(fs.phi.at(1, 1) == TPoly<FrobSym>::constant(-(k2mi * FrobSym::kappa(1, -1))));
    CHECK(fs.V.at(0, 0) == TPoly<FrobSym>::constant(FrobSym::kappa(1)));
    CHECK(fs.V.at(0, 1) == TPoly<FrobSym>::constant(FrobSym::kappa(2, -1)));
    CHECK(fs.V.at(1, 0) == TPoly<FrobSym>::constant(FrobSym::kappa(2)));
    CHECK(fs.V.at(1, 1).is_zero());
}

TEST_CASE("det identities and the printed cofactor for r = 2, 3, 4") {
    for (int r : {2, 3, 4}) {
        auto fs = sym_frames(r);
        FrobSym sgn = FrobSym::constant((r - 1) % 2 == 0 ? 1 : -1);
        CHECK(tmat_det(fs.phi_tilde) == lin().scaled(fs.ctilde));
        CHECK(tmat_det(fs.phi) == lin().scaled(fs.c));
        FrobSym dv = FrobSym::constant((r * (r - 1) / 2) % 2 == 0 ? 1 : -1);
        for (int j = 0; j < r; ++j) dv = dv * FrobSym::kappa(r, -j);
        CHECK(tmat_det(fs.V) == TPoly<FrobSym>::constant(dv));

        for (int i = 1; i <= r; ++i) {
            CHECK(fs.cof_phi_tilde.at(i - 1, 0) ==
                  TPoly<FrobSym>::constant(sgn * FrobSym::kappa(i) * FrobSym::kappa(r).inv()));
            for (int j = 2; j <= r; ++j) {
                TPoly<FrobSym> want(FrobSym::zero());
                if (j == i + 1) want = lin().scaled(sgn * FrobSym::kappa(r).inv());
                CHECK(fs.cof_phi_tilde.at(i - 1, j - 1) == want);
            }
        }
    }
}

TEST_CASE("displayed inverse: Phi~_E X = (t-theta) Id with first row the kappas") {
    for (int r : {2, 3}) {
        auto fs = sym_frames(r);
        Mat<TPoly<FrobSym>> X(r, r, TPoly<FrobSym>(FrobSym::zero()));
        for (int j = 1; j <= r; ++j) X.at(0, j - 1) = TPoly<FrobSym>::constant(FrobSym::kappa(j));
        for (int i = 2; i <= r; ++i) X.at(i - 1, i - 2) = lin();
        auto prod = fs.phi_tilde * X;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                TPoly<FrobSym> want(FrobSym::zero());
                if (i == j) want = lin();
                CHECK(prod.at(i, j) == want);
            }
    }
}

TEST_CASE("V-relation exactly zero symbolically, below guard numerically") {
    for (int r : {2, 3, 4}) CHECK(v_relation_defect(sym_frames(r)).is_zero());
    auto F = FieldConfig::make(2, 2, 1);
    auto fs = num_frames(F, Rat(40));
    XRat d = tmat_defect(v_relation_defect(fs));
    CHECK(d < XRat(Rat(-20)));
}

TEST_CASE("Cof multiplicativity for the extension frames at r = 2 (symbolic)") {
    int r = 2;
    auto fs = sym_frames(r);
    FrobSym z = FrobSym::zero();
    TPoly<FrobSym> zt(z);
    Mat<TPoly<FrobSym>> pd(1, r, zt);
    pd.at(0, 1) = TPoly<FrobSym>::constant(-FrobSym::beta(1));  // reduced delta, beta_1 tau

    Mat<TPoly<FrobSym>> Vphi(r + 1, r + 1, zt), PhiT(r + 1, r + 1, zt), Phi(r + 1, r + 1, zt);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            Vphi.at(i, j) = fs.V.at(i, j);
            PhiT.at(i, j) = fs.phi_tilde.at(i, j);
            Phi.at(i, j) = fs.phi.at(i, j);
        }
    Vphi.at(r, r) = zt.ring_one();
    PhiT.at(r, r) = lin();
    Phi.at(r, r) = lin();
    for (int j = 0; j < r; ++j) PhiT.at(r, j) = pd.at(0, j);
    FrobSym detV = tmat_det(fs.V).coeff(0);
    auto Vadj = tmat_adj(fs.V);
    Mat<TPoly<FrobSym>> Vinv(r, r, zt);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) Vinv.at(i, j) = Vadj.at(i, j).scaled(detV.inv());
    auto Vinv_m1 = Vinv.twist(-1);
    for (int i = 0; i < r; ++i) {
        TPoly<FrobSym> acc(z);
        for (int k = 0; k < r; ++k) acc = acc + Vinv_m1.at(i, k) * pd.at(0, k);
        Phi.at(i, r) = acc;
    }
    auto lhs = tmat_cof(Vphi).twist(-1) * tmat_cof(Phi);
    auto rhs = tmat_adj(PhiT) * tmat_cof(Vphi);
    CHECK((lhs - rhs).is_zero());
}

TEST_CASE("Phi~_delta: reduced shape, zero, and the witness row") {
    for (int r : {2, 3, 4}) {
        FrobSym z = FrobSym::zero();
        std::vector<OrePoly<FrobSym, 1>> rows;
        OrePoly<FrobSym, 1> d0(z);
        d0.a.assign(r, z);
        for (int i = 1; i <= r - 1; ++i) d0.a[i] = FrobSym::beta(i);
        d0.trim();
        rows.push_back(d0);
        auto pd = phi_tilde_delta<FrobSym>(rows, FrobSym::theta(), skappas(r));
        CHECK(pd.at(0, 0).is_zero());
        for (int i = 1; i <= r - 1; ++i)
            CHECK(pd.at(0, i) == TPoly<FrobSym>::constant(-FrobSym::beta(i)));

        auto fs = sym_frames(r);
        auto sp = is_special(pd, fs);
        CHECK(sp.special);
        for (int i = 0; i < r - 1; ++i)
            CHECK(sp.witness.at(0, i) == TPoly<FrobSym>::constant(-FrobSym::beta(i + 1)));
        CHECK(sp.witness.at(0, r - 1).is_zero());

        std::vector<OrePoly<FrobSym, 1>> zr{OrePoly<FrobSym, 1>(z)};
        auto pz = phi_tilde_delta<FrobSym>(zr, FrobSym::theta(), skappas(r));
        CHECK(pz.is_zero());
        CHECK(is_special(pz, fs).special);

        std::vector<OrePoly<FrobSym, 1>> cr{OrePoly<FrobSym, 1>::constant(FrobSym::beta(1))};
        auto pc = phi_tilde_delta<FrobSym>(cr, FrobSym::theta(), skappas(r));
        CHECK(!is_special(pc, fs).special);
    }
}

TEST_CASE("specialness is invariant under inner partial biderivations") {
    auto F = FieldConfig::make(3, 1, 2);
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> num(-3, 3), coef(1, 8), dd(1, 2);
    Rat P(40);
    CInf th = CInf::theta_pow(F, Rat(1)).truncated(XRat(P));
    std::vector<CInf> ks{CInf::one(F).truncated(XRat(P)),
                         CInf::theta_pow(F, Rat(-1), 1).truncated(XRat(P))};
    FrameSet<CInf> fs(th, ks);
    SkewPoly<CInf> rho(CInf::zero(F));
    rho.a = {CInf::theta_pow(F, Rat(1)), ks[0], ks[1]};
    SkewPoly<CInf> t1(CInf::zero(F));
    t1.a = {CInf::theta_pow(F, Rat(1)), CInf::one(F)};

    for (int t = 0; t < 8; ++t) {
        for (bool special : {true, false}) {
            SkewPoly<CInf> d(CInf::zero(F));
            if (special)
                d.a = {CInf::zero(F),
                       CInf::monomial(F, Rat(num(rng)), FqElem::from_index(F, coef(rng)))};
            else
                d.a = {CInf::monomial(F, Rat(num(rng)), FqElem::from_index(F, coef(rng)))};
            d.trim();
            SkewPoly<CInf> U(CInf::zero(F));
            U.a.assign(dd(rng) + 1, CInf::zero(F));
            for (size_t i = 1; i < U.a.size(); ++i)
                U.a[i] = CInf::monomial(F, Rat(num(rng)), FqElem::from_index(F, coef(rng)))
                             .truncated(XRat(P));
            U.trim();
            SkewPoly<CInf> dU = U * rho - t1 * U;
            SkewPoly<CInf> sum = d + dU;
            auto pd = phi_tilde_delta<CInf>({sum}, th, ks);
            auto sp = is_special(pd, fs);
            bool is_sp = true;
            for (const auto& rem : sp.remainders)
                if (!(rem.deg_bound() < XRat(Rat(-20)))) is_sp = false;
            CHECK(is_sp == special);
        }
    }
}

TEST_CASE("constant equation for c_E is an exact normalizer identity (r = 2, 3)") {
    // c_E^{-1} = u_c (-1)^{r-1} kappa_r^{-1} det(V_E) with the root in c_E
    // realized as kappa_r^{(1-r)} u_c
    for (int r : {2, 3}) {
        FrobSym uc = normalizer_uc(r);
        FrobSym root = FrobSym::kappa(r, 1 - r) * uc;
        FrobSym ce_inv = FrobSym::constant(((r - 1) * (r - 2) / 2) % 2 == 0 ? 1 : -1);
        for (int j = 1; j <= r - 2; ++j) ce_inv = ce_inv * FrobSym::kappa(r, -j);
        ce_inv = ce_inv * root;
        auto fs = sym_frames(r);
        FrobSym rhs = uc * FrobSym::constant((r - 1) % 2 == 0 ? 1 : -1) *
                      FrobSym::kappa(r).inv() * tmat_det(fs.V).coeff(0);
        CHECK(ce_inv == rhs);
        // and the root choice squares back: root^{q-1} = (-1)^{r-1} kappa_r^{(2-r)}
        // is a relation between values, not free symbols, so it is certified
        // numerically in the scenario pipeline instead
    }
}

TEST_CASE("t-frames of E_e verify symbolically at desk scale") {
    for (auto [r, e] : {std::pair{2, 0}, {2, 1}, {3, 0}, {3, 1}}) {
        auto rep = verify_tframe_Ee(r, e);
        INFO("r=", r, " e=", e, " ", rep.first_mismatch);
        CHECK(rep.pass);
    }
}

TEST_CASE("dual t-frames of E_e verify symbolically at desk scale") {
    for (auto [r, e] : {std::pair{2, 0}, {2, 1}, {3, 0}, {3, 1}}) {
        auto rep = verify_dual_tframe_Ee(r, e);
        INFO("r=", r, " e=", e, " ", rep.first_mismatch);
        CHECK(rep.pass);
    }
}

TEST_CASE("almost strict purity: top coefficients are lower triangular units") {
    for (auto [r, e] : {std::pair{2, 0}, {2, 1}, {3, 0}, {3, 1}}) {
        auto res = asp_check(r, e);
        INFO("r=", r, " e=", e);
        CHECK(res.lower_triangular);
        CHECK(res.diagonal_units);
    }
}

TEST_CASE("appendix golden files: printed matrices against recomputation") {
    std::string base = std::string(DRINFELD_SOURCE_DIR) + "/data/appendix/";
    auto errata = golden::load_errata(base + "errata.txt");
    struct Case {
        const char* name;
        int r, e, power;
    };
    for (Case c : {Case{"psi1_t3_r2", 2, 1, 3}, Case{"psi0_t2_r3", 3, 0, 2},
                   Case{"D3_r3e1", 3, 1, 5}}) {
        auto table = golden::load(base + c.name + ".txt");
        auto psi = build_Ee_symbolic(c.r, c.e);
        auto power = mat_power(psi, c.power);
        const auto err = errata.count(c.name) ? errata[c.name] : golden::Table{};
        for (const auto& [key, printed] : table) {
            FrobSym computed = power.at(key.i - 1, key.j - 1).coeff(key.tau);
            auto it = err.find(key);
            INFO(c.name, " tau^", key.tau, " (", key.i, ",", key.j, ")");
            if (it == err.end()) {
                CHECK(computed == printed);
            } else {
                CHECK(computed == it->second);
                CHECK(!(computed == printed));
            }
        }
    }
}
