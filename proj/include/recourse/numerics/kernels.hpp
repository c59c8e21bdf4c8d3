#pragma once

// Dense-layer kernels. `serial` is the reference implementation; `omp`
// splits the same loops across OpenMP threads. Each output element is
// accumulated by exactly one thread in the same order as the serial
// version, so both produce bit-identical results.
//
// The unqualified entry points dispatch to `omp` once a call carries enough
// work to amortize thread start-up, and to `serial` otherwise.

#include <cstddef>
#include <span>

#include "recourse/numerics/matrix.hpp"

namespace recourse {

enum class Activation { relu, sigmoid, tanh, linear };

namespace kernels {

// Multiply-adds below which dispatch stays serial.
inline constexpr std::size_t kParallelWork = std::size_t{1} << 16;

bool openmp_enabled() noexcept;

double sigmoid(double z) noexcept;

namespace serial {
// z = x * w^T + b, x: n x in, w: out x in, z: n x out
void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& z);
// dw = dz^T * x, db = column sums of dz
void weight_grad(const Matrix& dz, const Matrix& x, Matrix& dw, std::span<double> db);
// dx = dz * w
void input_grad(const Matrix& dz, const Matrix& w, Matrix& dx);
void activate(Activation act, const Matrix& z, Matrix& a);
// dz = da * act'(z), using a = act(z) where cheaper
void activate_backward(Activation act, const Matrix& z, const Matrix& a, const Matrix& da,
                       Matrix& dz);
}  // namespace serial

namespace omp {
void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& z);
void weight_grad(const Matrix& dz, const Matrix& x, Matrix& dw, std::span<double> db);
void input_grad(const Matrix& dz, const Matrix& w, Matrix& dx);
void activate(Activation act, const Matrix& z, Matrix& a);
void activate_backward(Activation act, const Matrix& z, const Matrix& a, const Matrix& da,
                       Matrix& dz);
}  // namespace omp

void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& z);
void weight_grad(const Matrix& dz, const Matrix& x, Matrix& dw, std::span<double> db);
void input_grad(const Matrix& dz, const Matrix& w, Matrix& dx);
void activate(Activation act, const Matrix& z, Matrix& a);
void activate_backward(Activation act, const Matrix& z, const Matrix& a, const Matrix& da,
                       Matrix& dz);

}  // namespace kernels
}  // namespace recourse
