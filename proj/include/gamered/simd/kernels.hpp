// Copyright 2026 The gamered Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense double-precision kernels behind the projection, pairwise-distance
// and SVM Gram loops.
//
// Every kernel has a scalar reference in gamered::simd::scalar. Wider
// variants (gamered::simd::avx2) are compiled into their own translation
// unit and selected at runtime; the free functions in gamered::simd route
// through the active table. Variants agree with the scalar reference up to
// summation-order rounding, which the kernel tests pin down.

#include <cstddef>
#include <span>
#include <string_view>

namespace gamered::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// True when the variant was compiled in and the CPU reports support.
bool isa_supported(Isa isa) noexcept;

/// The variant currently used by the dispatching entry points. Defaults to
/// the widest supported one; GAMERED_SIMD=scalar in the environment forces
/// the reference path.
Isa active_isa() noexcept;

/// Switches the dispatch table. Throws InvalidArgument for an unsupported ISA.
void set_active_isa(Isa isa);

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // out[t] = squared_distance(a, b[t], n) for t < 4, bit-identical to four
  // single calls of the same variant.
  void (*squared_distance4)(const double* a, const double* const* b, std::size_t n, double* out);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[r] = sum_c a[r * cols + c] * x[c] for a row-major rows x cols matrix.
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void squared_distance4(const double* a, const double* const* b, std::size_t n, double* out);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
const KernelTable& table() noexcept;
}  // namespace scalar

#ifdef GAMERED_HAVE_AVX2
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void squared_distance4(const double* a, const double* const* b, std::size_t n, double* out);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
const KernelTable& table() noexcept;
}  // namespace avx2
#endif

const KernelTable& active_table() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_table().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active_table().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active_table().axpy(alpha, x.data(), y.data(), x.size());
}

inline void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  active_table().gemv(a, rows, cols, x, y);
}

}  // namespace gamered::simd
