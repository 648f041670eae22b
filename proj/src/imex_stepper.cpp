#include <imexbdf/imex_stepper.hpp>

#include <algorithm>
#include <cmath>

namespace imexbdf
{
	int bootstrap_substeps(int k, double tau, int max_substeps)
	{
		if (k < 1 || k > 6)
			throw DomainError("k must lie in [1, 6]");
		if (!(tau > 0.0))
			throw DomainError("step size must be positive");
		if (k == 1)
			return 1;
		const double m = std::ceil(std::pow(tau, -0.5 * (k - 1)) - 1e-9);
		return static_cast<int>(std::clamp(m, 1.0, static_cast<double>(std::max(1, max_substeps))));
	}

	template Trajectory<Complex> run<Complex>(const BdfScheme &, const LinearOperator<Complex> &,
											  const NonlinearTerm<Complex> &, const std::vector<VectorXc> &,
											  const double &, int, const StepOptions<Complex> &);
} // namespace imexbdf
