#include <imexbdf/roots.hpp>

#include <imexbdf/errors.hpp>

#include <Eigen/Eigenvalues>

namespace imexbdf
{
	std::vector<std::complex<double>> polynomial_roots(std::span<const std::complex<double>> ascending)
	{
		int degree = static_cast<int>(ascending.size()) - 1;
		while (degree >= 0 && ascending[degree] == 0.0)
			--degree;
		if (degree < 0)
			throw ComputationError("polynomial is identically zero");
		if (degree == 0)
			return {};

		const std::complex<double> lead = ascending[degree];
		Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
		for (int i = 1; i < degree; ++i)
			companion(i, i - 1) = 1.0;
		for (int i = 0; i < degree; ++i)
			companion(i, degree - 1) = -ascending[i] / lead;

		Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, /*computeEigenvectors=*/false);
		if (solver.info() != Eigen::Success)
			throw ComputationError("companion eigenvalue iteration did not converge");

		const auto &ev = solver.eigenvalues();
		return {ev.data(), ev.data() + ev.size()};
	}
} // namespace imexbdf
