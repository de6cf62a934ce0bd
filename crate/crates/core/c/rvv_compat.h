#ifndef RVV_COMPAT_H
#define RVV_COMPAT_H

#include <stddef.h>

#ifdef RVV_EMULATE
#include "rvv_shim.h"
#else
#include <riscv_vector.h>
#endif

#endif
