#pragma once

#include <imexbdf/operators.hpp>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace imexbdf
{
	/// Named nonlinear terms selectable from configuration files.
	///
	///     zero                 0
	///     identity             f(u) = u
	///     cubic                f(u) = -u^3                 (Example I source)
	///     exp_flux             g(u) = (e^u, 0)             (Example I flux)
	///     quartic_gradient     f(u, grad u) = -|grad u|^4 u (Example II)
	///     exp_minus_one        f(u) = e^u - 1              (Example III)
	///     cubic_minus_linear   f(u) = u^3 - u              (Example IV, under the Laplacian)
	///
	/// A combination is a '+'/'-' separated list of optionally scaled names, e.g.
	/// "cubic + 0.5*exp_flux" or "exp_minus_one - 2*identity".
	class NonlinearityCombination
	{
	public:
		static NonlinearityCombination parse(std::string_view text);
		static const std::vector<std::string> &registered();

		const std::vector<std::pair<double, std::string>> &terms() const { return terms_; }
		std::string to_string() const;

		/// Source and flux for finite-difference problems (Examples I and II).
		Nonlinearity finite_difference() const;
		/// Pointwise scalar function for spectral problems (Examples III and IV); throws
		/// ConfigurationError if a flux or gradient term is present.
		ScalarFn pointwise() const;

		bool operator==(const NonlinearityCombination &) const = default;

	private:
		std::vector<std::pair<double, std::string>> terms_;
	};
} // namespace imexbdf
