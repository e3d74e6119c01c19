#ifndef DRINFELD_PARALLEL_HPP
#define DRINFELD_PARALLEL_HPP

#include "drinfeld/tmodule.hpp"

namespace drinfeld {

// Data-parallel kernels with a serial reference kept for testing.  The
// OpenMP variants split over independent output entries; results agree with
// the serial ones exactly (the arithmetic is exact and the work partition is
// by output, so there is no reduction-order effect).

// product of Tate matrices with entries expanded through t-degree T
TateMat tatemat_mul_serial(const TateMat& A, const TateMat& B, int T);
TateMat tatemat_mul_parallel(const TateMat& A, const TateMat& B, int T);

// quasi-period table F_{tau^i}(w_j), i = 1..imax, via the coefficient route
Mat<CInf> quasi_table_serial(const TModule& E, const std::vector<std::vector<CInf>>& ws,
                             int imax, const Rat& stop);
Mat<CInf> quasi_table_parallel(const TModule& E, const std::vector<std::vector<CInf>>& ws,
                               int imax, const Rat& stop);

// worker count: DRINFELD_THREADS when set, else the OpenMP default
int parallelism_degree();

} // namespace drinfeld

#endif
