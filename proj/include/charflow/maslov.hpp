#pragma once

#include <optional>
#include <vector>

#include "charflow/dynamics.hpp"
#include "charflow/spectral.hpp"

namespace charflow {

struct IndexTolerances {
  /// Endpoint eigenphases of the winding unitary below this are eigenvalue 1.
  double kernel_phase = 1e-6;
  /// Phases in [kernel_phase, ambiguity) raise BoundaryError.
  double ambiguity = 1e-4;
  /// Largest Frobenius jump of the winding unitary between two samples.
  double max_jump = 0.6;
  /// Above this monodromy norm, iterates use the Bott splitting.
  double direct_norm_limit = 1e6;
};

struct IndexNullity {
  long index = 0;
  /// Nullity in the orbit convention: dim ker(γ(T) - ω), minus one for the
  /// radial direction on paths with `radial_kernel`.
  int nullity = 0;
  /// Raw complex dimension of ker(γ(T) - ω).
  int kernel_dim = 0;
};

/// Long's ω-index i_ω of a sampled path, ω = e^{iφ}. For ω = 1 this is the
/// Maslov-type index i₁.
IndexNullity omega_index(const SymplecticPath& path, double phi, const IndexTolerances& tol = {});

/// Maslov-type index i₁ of the path and its nullity.
IndexNullity maslov_index(const SymplecticPath& path, const IndexTolerances& tol = {});

/// The m-fold iterate on [0, mT] built by γ(t + T) = γ(t) γ(T).
SymplecticPath iterate_path(const SymplecticPath& path, int m);

struct IterateIndex {
  int m = 1;
  long i_maslov = 0;  // i(y, m)
  int nu = 0;         // ν(y, m)
  long i_viterbo = 0; // i(y^m) = i(y, m) - n
};

enum class IterationRoute { Auto, Direct, Bott };

struct IndexRecord {
  int n = 0;
  long i_maslov_1 = 0;
  int nu_1 = 0;
  long i_viterbo_1 = 0;
  std::vector<IterateIndex> iterates;
  /// Mean index from the exact average of i_ω over the unit circle.
  double mean_index = 0.0;
  /// Least-squares slope of i(y^m) over m ∈ [m_max/2, m_max] and its
  /// standard error.
  double mean_index_regression = 0.0;
  double regression_error = 0.0;
};

IndexRecord index_sequence(const SymplecticPath& prime, int m_max,
                           IterationRoute route = IterationRoute::Auto,
                           const IndexTolerances& tol = {});

/// Direct iterate indices for m = 1..m_max; stops early (shorter result) where
/// the iterate norm exceeds the direct limit or the path becomes under-sampled.
std::vector<IndexNullity> direct_iterate_indices(const SymplecticPath& prime, int m_max,
                                                 const IndexTolerances& tol = {});

/// i(y, m) through the Bott splitting Σ_{ω^m = 1} i_ω.
IndexNullity bott_iterate_index(const SymplecticPath& prime, int m, const IndexTolerances& tol = {});

/// lim i(γ^m)/m, as (1/2π)∫ i_{e^{iφ}} dφ with i_ω constant between the
/// unit-circle eigenangles of γ(T).
double mean_index(const SymplecticPath& prime, const IndexTolerances& tol = {});

/// Least-squares slope of values[k] against m = first_m + k, with its
/// standard error.
std::pair<double, double> regression_slope(const std::vector<long>& values, int first_m);

/// Smallest integer ≥ a; values within 1e-9 (relative) of an integer snap
/// to it.
long ceil_int(double a);

/// i(y^m) predicted by the Sp(4) iteration formulas from the Viterbo index i1.
long iterate_index_formula(const CaseTag& tag, long i1, std::optional<double> theta, int m);

/// Mean index predicted by the Sp(4) iteration formulas.
double mean_index_formula(const CaseTag& tag, long i1, std::optional<double> theta);

}  // namespace charflow
