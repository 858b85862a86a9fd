#include "charflow/paths.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "charflow/errors.hpp"
#include "charflow/symplectic.hpp"

namespace charflow {

SymplecticPath exp_path(const Matrix& x, int samples, double duration) {
  if (samples < 1) throw PreconditionError("a path needs at least one interval");
  SymplecticPath out;
  const Matrix step = (x * (duration / samples)).exp();
  Matrix g = Matrix::Identity(x.rows(), x.cols());
  for (int k = 0; k <= samples; ++k) {
    out.times.push_back(duration * k / samples);
    // Re-exponentiate every few steps to keep the product from drifting.
    if (k % 16 == 0) g = (x * out.times.back()).exp();
    out.matrices.push_back(g);
    g = g * step;
  }
  return out;
}

Matrix rotation_generator(double theta) {
  Matrix x(2, 2);
  x << 0, -theta, theta, 0;
  return x;
}

Matrix shear_generator(double b) {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = b;
  return x;
}

Matrix hyperbolic_generator(double log_l) {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = log_l;
  x(1, 1) = -log_l;
  return x;
}

SymplecticPath rotation_path(double rho, int samples) {
  return exp_path(rotation_generator(2.0 * std::numbers::pi * rho), samples);
}

SymplecticPath concatenate(const SymplecticPath& a, const SymplecticPath& b) {
  if (a.matrices.empty() || b.matrices.empty()) throw PreconditionError("empty path");
  if (a.dim() != b.dim()) throw PreconditionError("dimension mismatch in concatenation");
  SymplecticPath out = a;
  const Matrix base = a.end();
  const double t0 = a.t_end();
  for (std::size_t k = 1; k < b.matrices.size(); ++k) {
    out.times.push_back(t0 + b.times[k]);
    out.matrices.push_back(b.matrices[k] * base);
  }
  out.base_point.resize(0);
  out.flow_direction.resize(0);
  out.radial_kernel = false;
  return out;
}

SymplecticPath direct_sum(const SymplecticPath& a, const SymplecticPath& b) {
  if (a.times.size() != b.times.size()) throw PreconditionError("direct sum needs a shared time grid");
  SymplecticPath out;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    if (std::abs(a.times[k] - b.times[k]) > 1e-12 * std::max(1.0, std::abs(a.times[k]))) {
      throw PreconditionError("direct sum needs a shared time grid");
    }
    out.times.push_back(a.times[k]);
    out.matrices.push_back(charflow::direct_sum(a.matrices[k], b.matrices[k]));
  }
  return out;
}

SymplecticPath conjugate(const SymplecticPath& path, const Matrix& p) {
  SymplecticPath out = path;
  const Matrix pinv = p.inverse();
  for (auto& g : out.matrices) g = p * g * pinv;
  if (out.base_point.size() == p.rows()) out.base_point = p * out.base_point;
  if (out.flow_direction.size() == p.rows()) out.flow_direction = p * out.flow_direction;
  return out;
}

Matrix random_symplectic(Eigen::Index n, double scale, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Matrix s(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) s(i, j) = s(j, i) = nd(rng);
  }
  return (standard_j(n) * s).exp();
}

}  // namespace charflow
