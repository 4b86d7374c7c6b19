#pragma once

#include "qg/grid.hpp"

namespace qg {

enum class JacobianScheme { central, arakawa };
enum class Gauge { zero_mean, dirichlet_zero };

/// Second-order central difference; periodic wrap or one-sided closures at basin walls.
ScalarField deriv(const ScalarField& f, Axis axis, int order);

ScalarField laplacian(const ScalarField& f);

/// laplacian(laplacian(f)).
ScalarField biharmonic(const ScalarField& f);

/// [a,b] = a_x b_y - a_y b_x.
ScalarField jacobian(const ScalarField& a, const ScalarField& b, JacobianScheme scheme);

/// Solves (lap - c) u = rhs. Periodic grids take the zero-mean gauge, basin grids dirichlet-zero.
/// c < 0 is accepted as long as no discrete mode is resonant.
ScalarField helmholtz_solve(const ScalarField& rhs, double c, Gauge gauge);

/// Eigenvalue of the discrete 5-point Laplacian for Fourier mode k (periodic) or sine mode k (basin).
double laplacian_eigenvalue_1d(int n, double h, int k, Topology topology);

}  // namespace qg

namespace qg {

/// Band-limited (Fourier zero-padding) refinement of a periodic field by an integer factor.
/// Node values are preserved to roundoff; the Nyquist row and column are dropped.
ScalarField spectral_refine(const ScalarField& f, int factor);

}  // namespace qg
