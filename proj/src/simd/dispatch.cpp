// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <cstring>

#include "demix2d/simd/ops.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <cpuid.h>
#define DEMIX2D_X86 1
#else
#define DEMIX2D_X86 0
#endif

namespace demix2d::simd {

#if DEMIX2D_HAVE_AVX2_SOURCE
const Ops* avx2_ops_impl();
#endif

namespace {

bool cpu_has_avx2_fma() {
#if DEMIX2D_X86
  unsigned eax, ebx, ecx, edx;
  if (!__get_cpuid(1, &eax, &ebx, &ecx, &edx)) return false;
  const bool fma = (ecx & (1u << 12)) != 0;
  const bool osxsave = (ecx & (1u << 27)) != 0;
  if (!fma || !osxsave) return false;
  if (!__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) return false;
  return (ebx & (1u << 5)) != 0;  // AVX2
#else
  return false;
#endif
}

const Ops* select_backend() {
  const char* env = std::getenv("DEMIX2D_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return &scalar_ops();
  const Ops* avx2 = avx2_ops();
  if (env && std::strcmp(env, "avx2") == 0 && avx2) return avx2;
  if (avx2) return avx2;
  return &scalar_ops();
}

}  // namespace

const Ops* avx2_ops() {
#if DEMIX2D_HAVE_AVX2_SOURCE
  if (cpu_has_avx2_fma()) return avx2_ops_impl();
#endif
  return nullptr;
}

const Ops& ops() {
  static const Ops* backend = select_backend();
  return *backend;
}

}  // namespace demix2d::simd
