#pragma once

#include <cstddef>
#include <string_view>

namespace flowctl::kernels {

enum class Backend { Scalar, Avx2, Neon };

struct AdamCoeffs {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double bias1 = 1.0;  // 1 - beta1^t
  double bias2 = 1.0;  // 1 - beta2^t
};

using DotFn = double (*)(const double* x, const double* y, std::size_t n);
using AxpyFn = void (*)(double a, const double* x, double* y, std::size_t n);
using AdamFn = void (*)(double* param, const double* grad, double* m, double* v, std::size_t n,
                        const AdamCoeffs& c);

struct Table {
  Backend backend;
  DotFn dot;
  AxpyFn axpy;
  AdamFn adam;
};

std::string_view name(Backend b);
bool parse_backend(std::string_view text, Backend& out);

const Table& scalar();
// nullptr when the variant is not compiled in or the CPU lacks it.
const Table* avx2();
const Table* neon();
const Table* table_for(Backend b);

// Best available backend, honoring FLOWCTL_KERNELS when set.
Backend detect();
const Table& active();
// Throws Error("kernel_unavailable") if `b` cannot run here.
void select(Backend b);

}  // namespace flowctl::kernels
