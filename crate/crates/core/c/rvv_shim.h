/* Scalar emulation of the RVV intrinsics used by generated kernels.
 *
 * vfloat32m1_t holds VLEN_BITS/32 lanes and is passed by value. Lanes at or
 * beyond vl are never read from or written to memory. vfmacc multiplies and
 * adds as two separately rounded operations so results are bit-identical
 * across hosts.
 */
#ifndef RVV_SHIM_H
#define RVV_SHIM_H

#include <stddef.h>

#ifndef VLEN_BITS
#define VLEN_BITS 128
#endif

#if VLEN_BITS != 128 && VLEN_BITS != 256 && VLEN_BITS != 512
#error "VLEN_BITS must be 128, 256 or 512"
#endif

#define RVV_SHIM_LANES (VLEN_BITS / 32)

#if defined(__clang__)
#pragma clang fp contract(off)
#elif defined(__GNUC__)
#pragma GCC push_options
#pragma GCC optimize("fp-contract=off")
#endif

typedef struct {
  float lanes[RVV_SHIM_LANES];
} vfloat32m1_t;

static inline vfloat32m1_t __riscv_vle32_v_f32m1(const float* base, size_t vl) {
  vfloat32m1_t v;
  size_t i;
  for (i = 0; i < RVV_SHIM_LANES; ++i) {
    v.lanes[i] = i < vl ? base[i] : 0.0f;
  }
  return v;
}

static inline void __riscv_vse32_v_f32m1(float* base, vfloat32m1_t v, size_t vl) {
  size_t i;
  for (i = 0; i < vl && i < RVV_SHIM_LANES; ++i) {
    base[i] = v.lanes[i];
  }
}

static inline vfloat32m1_t __riscv_vfmacc_vf_f32m1(vfloat32m1_t vd, float rs, vfloat32m1_t vs,
                                                   size_t vl) {
  size_t i;
  for (i = 0; i < vl && i < RVV_SHIM_LANES; ++i) {
    float prod = rs * vs.lanes[i];
    vd.lanes[i] = vd.lanes[i] + prod;
  }
  return vd;
}

#if !defined(__clang__) && defined(__GNUC__)
#pragma GCC pop_options
#endif

#endif
