#pragma once

#include <cstddef>

namespace wpnav::kernels {

enum class Isa { scalar, avx2, neon };

const char* to_string(Isa isa);

// Dense row-major double kernels. The gemm variants accumulate into C:
//   gemm_nn: C[m x n] += A[m x k] * B[k x n]
//   gemm_nt: C[m x n] += A[m x k] * B[n x k]^T
//   gemm_tn: C[m x n] += A[k x m]^T * B[k x n]
struct KernelTable {
  Isa isa;
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c);
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c);
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c);
};

const KernelTable& scalar_table();
// nullptr when the variant is not compiled in or the CPU lacks it.
const KernelTable* avx2_table();
const KernelTable* neon_table();

// Best available table, chosen once at first use. WPNAV_KERNELS=scalar
// forces the reference kernels.
const KernelTable& active();
// Overrides the runtime choice; returns false if the ISA is unavailable.
bool select(Isa isa);

}  // namespace wpnav::kernels
