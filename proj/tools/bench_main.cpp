#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "drinfeld/agf.hpp"
#include "drinfeld/parallel.hpp"

using namespace drinfeld;

// compares the serial reference kernels against the OpenMP variants on a
// representative workload and checks they agree exactly

namespace {

double secs(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"benchmark: serial reference vs OpenMP kernels"};
    int n = 4, T = 48, reps = 3;
    long long P = 200;
    app.add_option("--size", n, "matrix dimension");
    app.add_option("--t-degree", T, "t-truncation degree");
    app.add_option("--prec", P, "theta working precision");
    app.add_option("--reps", reps, "repetitions");
    CLI11_PARSE(app, argc, argv);

    auto F = FieldConfig::make(2, 1, 1);
    CInf z = CInf::zero(F);
    // deterministic dense-ish test matrices built from AGF data
    CInf pi = carlitz_pi(F, Rat(P));
    TModule C = carlitz_module(F, Rat(P));
    TateMat A(n, n, TateElem(z)), B(n, n, TateElem(z));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            CInf y = (pi * CInf::theta_pow(F, Rat(-(i + j + 1)))).truncated(XRat(Rat(P)));
            auto agf = agf_compute(C, {y}, Rat(P - 10));
            A.at(i, j) = agf.at(0, 0).twist(i + 1);
            B.at(i, j) = agf.at(0, 0).twist(j + 1);
        }

    std::cout << "threads available: " << parallelism_degree() << "\n";
    double ts = 0, tp = 0;
    TateMat Rs(0, 0, TateElem(z)), Rp(0, 0, TateElem(z));
    for (int r = 0; r < reps; ++r) {
        auto a0 = std::chrono::steady_clock::now();
        Rs = tatemat_mul_serial(A, B, T);
        auto a1 = std::chrono::steady_clock::now();
        Rp = tatemat_mul_parallel(A, B, T);
        auto a2 = std::chrono::steady_clock::now();
        ts += secs(a0, a1);
        tp += secs(a1, a2);
    }
    bool same = true;
    for (size_t k = 0; k < Rs.d.size(); ++k)
        if (!(Rs.d[k] - Rp.d[k]).is_zero()) same = false;
    std::cout << "tatemat_mul " << n << "x" << n << " @T=" << T << ": serial " << ts / reps
              << " s, parallel " << tp / reps << " s, speedup " << ts / tp
              << (same ? " (results identical)" : " (MISMATCH!)") << "\n";

    // quasi-period table
    DrinfeldDef E;
    E.kappa = {CInf::one(F).truncated(XRat(Rat(P))),
               CInf::theta_pow(F, Rat(-1), 1).truncated(XRat(Rat(P)))};
    TModule M = E.to_module(F, Rat(P));
    std::vector<std::vector<CInf>> ws;
    for (int j = 1; j <= 6; ++j)
        ws.push_back({CInf::theta_pow(F, Rat(-j)).truncated(XRat(Rat(P)))});
    double qs = 0, qp = 0;
    Mat<CInf> Qs(0, 0, z), Qp(0, 0, z);
    for (int r = 0; r < reps; ++r) {
        auto b0 = std::chrono::steady_clock::now();
        Qs = quasi_table_serial(M, ws, 6, Rat(P - 20));
        auto b1 = std::chrono::steady_clock::now();
        Qp = quasi_table_parallel(M, ws, 6, Rat(P - 20));
        auto b2 = std::chrono::steady_clock::now();
        qs += secs(b0, b1);
        qp += secs(b1, b2);
    }
    bool qsame = (Qs - Qp).is_zero();
    std::cout << "quasi_table 6x6 @P=" << P << ": serial " << qs / reps << " s, parallel "
              << qp / reps << " s, speedup " << qs / qp
              << (qsame ? " (results identical)" : " (MISMATCH!)") << "\n";
    return same && qsame ? 0 : 1;
}
