#pragma once

#include "flowctl/kernels.hpp"

namespace flowctl::kernels::detail {

double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void adam_scalar(double* p, const double* g, double* m, double* v, std::size_t n, const AdamCoeffs& c);

#if defined(FLOWCTL_HAVE_AVX2)
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void adam_avx2(double* p, const double* g, double* m, double* v, std::size_t n, const AdamCoeffs& c);
#endif

#if defined(FLOWCTL_HAVE_NEON)
double dot_neon(const double* x, const double* y, std::size_t n);
void axpy_neon(double a, const double* x, double* y, std::size_t n);
void adam_neon(double* p, const double* g, double* m, double* v, std::size_t n, const AdamCoeffs& c);
#endif

}  // namespace flowctl::kernels::detail
