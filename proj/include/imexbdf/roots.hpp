#pragma once

#include <complex>
#include <span>
#include <vector>

namespace imexbdf
{
	/// Roots of sum_i c[i] z^i via the eigenvalues of the companion matrix.
	/// Trailing zero leading coefficients are dropped; throws ComputationError when
	/// the polynomial is identically zero or the eigen-solver does not converge.
	std::vector<std::complex<double>> polynomial_roots(std::span<const std::complex<double>> ascending);
} // namespace imexbdf
