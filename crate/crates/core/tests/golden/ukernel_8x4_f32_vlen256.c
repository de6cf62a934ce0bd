#include "rvv_compat.h"

void ukernel_8x4_f32(size_t v1, const float* v2, const float* v3, float* v4, size_t v5) {
  size_t v6 = 0;
  size_t v7 = 8;
  float* v8 = v4 + v6;
  vfloat32m1_t v9 = __riscv_vle32_v_f32m1(v8, v7);
  size_t v10 = 1;
  size_t v11 = v10 * v5;
  float* v12 = v4 + v11;
  vfloat32m1_t v13 = __riscv_vle32_v_f32m1(v12, v7);
  size_t v14 = 2;
  size_t v15 = v14 * v5;
  float* v16 = v4 + v15;
  vfloat32m1_t v17 = __riscv_vle32_v_f32m1(v16, v7);
  size_t v18 = 3;
  size_t v19 = v18 * v5;
  float* v20 = v4 + v19;
  vfloat32m1_t v21 = __riscv_vle32_v_f32m1(v20, v7);
  size_t v22 = 4;
  vfloat32m1_t v23 = v9;
  vfloat32m1_t v24 = v13;
  vfloat32m1_t v25 = v17;
  vfloat32m1_t v26 = v21;
  for (size_t i27 = v6; i27 < v1; i27 += v10) {
    vfloat32m1_t v28 = v23;
    vfloat32m1_t v29 = v24;
    vfloat32m1_t v30 = v25;
    vfloat32m1_t v31 = v26;
    size_t v32 = i27 * v7;
    const float* v33 = v2 + v32;
    vfloat32m1_t v34 = __riscv_vle32_v_f32m1(v33, v7);
    size_t v35 = i27 * v22;
    float v36 = v3[v35];
    vfloat32m1_t v37 = __riscv_vfmacc_vf_f32m1(v28, v36, v34, v7);
    size_t v38 = v35 + v10;
    float v39 = v3[v38];
    vfloat32m1_t v40 = __riscv_vfmacc_vf_f32m1(v29, v39, v34, v7);
    size_t v41 = v35 + v14;
    float v42 = v3[v41];
    vfloat32m1_t v43 = __riscv_vfmacc_vf_f32m1(v30, v42, v34, v7);
    size_t v44 = v35 + v18;
    float v45 = v3[v44];
    vfloat32m1_t v46 = __riscv_vfmacc_vf_f32m1(v31, v45, v34, v7);
    v23 = v37;
    v24 = v40;
    v25 = v43;
    v26 = v46;
  }
  vfloat32m1_t v47 = v23;
  vfloat32m1_t v48 = v24;
  vfloat32m1_t v49 = v25;
  vfloat32m1_t v50 = v26;
  float* v51 = v4 + v6;
  __riscv_vse32_v_f32m1(v51, v47, v7);
  float* v52 = v4 + v11;
  __riscv_vse32_v_f32m1(v52, v48, v7);
  float* v53 = v4 + v15;
  __riscv_vse32_v_f32m1(v53, v49, v7);
  float* v54 = v4 + v19;
  __riscv_vse32_v_f32m1(v54, v50, v7);
}
