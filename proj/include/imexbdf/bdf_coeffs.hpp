#pragma once

#include <boost/rational.hpp>

#include <complex>
#include <string>
#include <vector>

namespace imexbdf
{
	using Rational = boost::rational<long long>;

	/// Exact coefficients of delta(z) = sum_{l=1}^k (1-z)^l / l, ascending powers.
	/// Throws DomainError unless 1 <= k <= 6.
	std::vector<Rational> delta_coeffs(int k);

	/// Exact coefficients of gamma(z) = [1 - (1-z)^k] / z, ascending powers (length k).
	std::vector<Rational> gamma_coeffs(int k);

	/// Implicit-explicit k-step BDF scheme: implicit part (delta, beta = 1), explicit part (delta, gamma).
	class BdfScheme
	{
	public:
		/// The scheme of order k built from the generating polynomials.
		explicit BdfScheme(int k);

		/// Arbitrary coefficients; used to probe the order-condition check with perturbed schemes.
		BdfScheme(int k, std::vector<Rational> delta, std::vector<Rational> gamma);

		int k() const { return k_; }
		const std::vector<Rational> &delta() const { return delta_; }
		const std::vector<Rational> &gamma() const { return gamma_; }
		const std::vector<double> &delta_f() const { return delta_f_; }
		const std::vector<double> &gamma_f() const { return gamma_f_; }

		/// Coefficients converted to an arbitrary real type (num/den evaluated in that type).
		template <typename Real>
		std::vector<Real> delta_as() const { return convert<Real>(delta_); }
		template <typename Real>
		std::vector<Real> gamma_as() const { return convert<Real>(gamma_); }

		/// delta evaluated at a complex point.
		std::complex<double> delta_at(std::complex<double> z) const;

	private:
		template <typename Real>
		static std::vector<Real> convert(const std::vector<Rational> &c)
		{
			std::vector<Real> out;
			out.reserve(c.size());
			for (const auto &r : c)
				out.push_back(Real(r.numerator()) / Real(r.denominator()));
			return out;
		}

		int k_;
		std::vector<Rational> delta_;
		std::vector<Rational> gamma_;
		std::vector<double> delta_f_;
		std::vector<double> gamma_f_;
	};

	struct OrderConditionRow
	{
		int ell;
		/// |sum_i (k-i)^l delta_i - l k^(l-1)|
		Rational implicit_residual;
		/// |l k^(l-1) - l sum_i (k-i-1)^(l-1) gamma_i|
		Rational explicit_residual;
	};

	struct OrderConditionReport
	{
		int k = 0;
		std::vector<OrderConditionRow> rows; // l = 0..k
		bool all_zero() const;
	};

	/// Exact residuals of the order-k conditions for l = 0..k (convention 0^0 = 1).
	OrderConditionReport verify_order_conditions(const BdfScheme &scheme);

	/// mu(z) = delta(z) / (1 - z), exact; throws ComputationError if (1 - z) does not divide delta.
	std::vector<Rational> mu_coeffs(const BdfScheme &scheme);

	/// Roots of mu; empty for k = 1 (mu is constant).
	std::vector<std::complex<double>> mu_roots(const BdfScheme &scheme);

	/// Checks the structural invariants of a scheme: sum delta = 0, delta'(1) = 1 (in the
	/// sum (k-i) delta_i form), sum gamma = 1, delta_0 > 0 and the mu-root margin.
	/// Returns an empty string when valid, otherwise a description of the first violation.
	std::string validate(const BdfScheme &scheme, double root_margin = 1e-6);

	std::string to_string(const Rational &r);
} // namespace imexbdf
