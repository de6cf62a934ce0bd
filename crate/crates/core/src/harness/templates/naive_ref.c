#include <stddef.h>

/* C += A * B, column-major. Each C element accumulates in k order with a
 * separate multiply and add, the same sequence the kernels perform. */
void naive_gemm(size_t m, size_t n, size_t k, const float* A, size_t ldA, const float* B,
                size_t ldB, float* C, size_t ldC) {
  for (size_t j = 0; j < n; ++j) {
    for (size_t p = 0; p < k; ++p) {
      float b = B[p + j * ldB];
      for (size_t i = 0; i < m; ++i) {
        float prod = A[i + p * ldA] * b;
        C[i + j * ldC] = C[i + j * ldC] + prod;
      }
    }
  }
}
