#pragma once

#include "charflow/dynamics.hpp"

namespace charflow {

/// Builders for sampled symplectic paths with a known structure, used to
/// exercise the index machinery on prescribed normal forms.

/// γ(t) = exp(t X) on [0, duration] with X = J S Hamiltonian.
SymplecticPath exp_path(const Matrix& x, int samples, double duration = 1.0);

/// t ↦ R(2πρt) on [0, 1] in Sp(2).
SymplecticPath rotation_path(double rho, int samples);

/// a followed by b: γ(t) = b(t - T_a) a(T_a) for t ≥ T_a.
SymplecticPath concatenate(const SymplecticPath& a, const SymplecticPath& b);

/// Pointwise symplectic direct sum; both paths must share their time grid.
SymplecticPath direct_sum(const SymplecticPath& a, const SymplecticPath& b);

/// P γ(t) P⁻¹ for a symplectic P.
SymplecticPath conjugate(const SymplecticPath& path, const Matrix& p);

/// Hamiltonian generators of the basic Sp(2) blocks.
Matrix shear_generator(double b);           // exp = N₁(1, b)
Matrix hyperbolic_generator(double log_l);  // exp = diag(l, 1/l)
Matrix rotation_generator(double theta);    // exp = R(θ)

/// Random symplectic matrix exp(J S) with S symmetric, entries ~ scale.
Matrix random_symplectic(Eigen::Index n, double scale, unsigned long long seed);

}  // namespace charflow
