#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "drinfeld/agf.hpp"
#include "drinfeld/parallel.hpp"

using namespace drinfeld;

namespace {

FieldPtr F2() {
    static FieldPtr F = FieldConfig::make(2, 1, 1);
    return F;
}

TateMat sample_matrix(int n, int shift) {
    auto F = F2();
    CInf z = CInf::zero(F);
    CInf pi = carlitz_pi(F, Rat(90));
    TModule C = carlitz_module(F, Rat(90));
    TateMat A(n, n, TateElem(z));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            CInf y = (pi * CInf::theta_pow(F, Rat(-(i + j + shift)))).truncated(XRat(Rat(90)));
            auto agf = agf_compute(C, {y}, Rat(70));
            A.at(i, j) = agf.at(0, 0).twist(1 + (i + j) % 2);
        }
    return A;
}

} // namespace

TEST_CASE("parallel Tate matrix product equals the serial reference") {
    TateMat A = sample_matrix(3, 1), B = sample_matrix(3, 2);
    auto S = tatemat_mul_serial(A, B, 20);
    auto P = tatemat_mul_parallel(A, B, 20);
    REQUIRE(S.rows == P.rows);
    for (size_t k = 0; k < S.d.size(); ++k) CHECK((S.d[k] - P.d[k]).is_zero());
    // determinism across calls
    auto P2 = tatemat_mul_parallel(A, B, 20);
    for (size_t k = 0; k < P.d.size(); ++k) CHECK((P.d[k] - P2.d[k]).is_zero());
}

TEST_CASE("parallel quasi-period table equals the serial reference") {
    auto F = F2();
    DrinfeldDef E;
    E.kappa = {CInf::one(F).truncated(XRat(Rat(80))),
               CInf::theta_pow(F, Rat(-1), 1).truncated(XRat(Rat(80)))};
    TModule M = E.to_module(F, Rat(80));
    std::vector<std::vector<CInf>> ws;
    for (int j = 1; j <= 4; ++j) ws.push_back({CInf::theta_pow(F, Rat(-j)).truncated(XRat(Rat(80)))});
    auto S = quasi_table_serial(M, ws, 3, Rat(50));
    auto P = quasi_table_parallel(M, ws, 3, Rat(50));
    CHECK((S - P).is_zero());
}

TEST_CASE("DRINFELD_THREADS is honored") {
    setenv("DRINFELD_THREADS", "1", 1);
    CHECK(parallelism_degree() == 1);
    setenv("DRINFELD_THREADS", "2", 1);
    CHECK(parallelism_degree() == 2);
    unsetenv("DRINFELD_THREADS");
    CHECK(parallelism_degree() >= 1);
}
