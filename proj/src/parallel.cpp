#include "drinfeld/parallel.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace drinfeld {

int parallelism_degree() {
    if (const char* env = std::getenv("DRINFELD_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

TateElem mul_entry(const TateMat& A, const TateMat& B, int i, int j) {
    TateElem acc = A.d[0].ring_zero();
    for (int k = 0; k < A.cols; ++k) {
        if (A.at(i, k).is_zero() || B.at(k, j).is_zero()) continue;
        acc = acc + A.at(i, k) * B.at(k, j);
    }
    return acc;
}

Biderivation tau_power_delta(const FieldPtr& F, int i) {
    CInf z = CInf::zero(F);
    Biderivation d{0, SkewMatC(1, 1, SkewPoly<CInf>(z))};
    d.delta_t.at(0, 0) = SkewPoly<CInf>::op(z, i);
    return d;
}

} // namespace

TateMat tatemat_mul_serial(const TateMat& A, const TateMat& B, int T) {
    if (A.cols != B.rows) throw std::invalid_argument("tatemat_mul: dimension mismatch");
    TateMat Ae = tatemat_expanded(A, T), Be = tatemat_expanded(B, T);
    TateMat out(A.rows, B.cols, A.d[0].ring_zero());
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < B.cols; ++j) out.at(i, j) = mul_entry(Ae, Be, i, j);
    return out;
}

TateMat tatemat_mul_parallel(const TateMat& A, const TateMat& B, int T) {
    if (A.cols != B.rows) throw std::invalid_argument("tatemat_mul: dimension mismatch");
    TateMat Ae = tatemat_expanded(A, T), Be = tatemat_expanded(B, T);
    TateMat out(A.rows, B.cols, A.d[0].ring_zero());
    int rows = A.rows, cols = B.cols;
#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(dynamic) num_threads(parallelism_degree())
#endif
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out.at(i, j) = mul_entry(Ae, Be, i, j);
    return out;
}

Mat<CInf> quasi_table_serial(const TModule& E, const std::vector<std::vector<CInf>>& ws,
                             int imax, const Rat& stop) {
    int cols = (int)ws.size();
    Mat<CInf> out(imax, cols, CInf::zero(E.field()));
    for (int i = 1; i <= imax; ++i) {
        QuasiPeriodic qp(E, tau_power_delta(E.field(), i));
        for (int j = 0; j < cols; ++j) out.at(i - 1, j) = qp.eval(ws[j], stop)[0];
    }
    return out;
}

Mat<CInf> quasi_table_parallel(const TModule& E, const std::vector<std::vector<CInf>>& ws,
                               int imax, const Rat& stop) {
    int cols = (int)ws.size();
    Mat<CInf> out(imax, cols, CInf::zero(E.field()));
    // one memoized stream per i, shared across its row behind the cache lock
    std::vector<QuasiPeriodic> qps;
    qps.reserve(imax);
    for (int i = 1; i <= imax; ++i) qps.emplace_back(E, tau_power_delta(E.field(), i));
    int total = imax * cols;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(parallelism_degree())
#endif
    for (int k = 0; k < total; ++k) {
        int i = k / cols, j = k % cols;
        out.at(i, j) = qps[i].eval(ws[j], stop)[0];
    }
    return out;
}

} // namespace drinfeld
