#include <imexbdf/bdf_coeffs.hpp>

#include <imexbdf/errors.hpp>
#include <imexbdf/roots.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace imexbdf
{
	namespace
	{
		void check_k(int k)
		{
			if (k < 1 || k > 6)
				throw DomainError("step number k must lie in [1,6], got " + std::to_string(k));
		}

		long long binomial(int n, int j)
		{
			long long c = 1;
			for (int i = 1; i <= j; ++i)
				c = c * (n - j + i) / i;
			return c;
		}

		Rational ipow(long long base, int e)
		{
			// 0^0 = 1
			long long r = 1;
			for (int i = 0; i < e; ++i)
				r *= base;
			return Rational(r);
		}

		Rational abs(const Rational &r) { return r < Rational(0) ? -r : r; }
	} // namespace

	std::vector<Rational> delta_coeffs(int k)
	{
		check_k(k);
		std::vector<Rational> d(k + 1, Rational(0));
		for (int l = 1; l <= k; ++l)
			for (int j = 0; j <= l; ++j)
			{
				const long long sign = (j % 2 == 0) ? 1 : -1;
				d[j] += Rational(sign * binomial(l, j), l);
			}
		return d;
	}

	std::vector<Rational> gamma_coeffs(int k)
	{
		check_k(k);
		// 1 - (1-z)^k = -sum_{j>=1} C(k,j) (-z)^j, then shift down by one power.
		std::vector<Rational> g(k, Rational(0));
		for (int j = 1; j <= k; ++j)
		{
			const long long sign = (j % 2 == 0) ? -1 : 1;
			g[j - 1] = Rational(sign * binomial(k, j));
		}
		return g;
	}

	BdfScheme::BdfScheme(int k) : BdfScheme(k, delta_coeffs(k), gamma_coeffs(k)) {}

	BdfScheme::BdfScheme(int k, std::vector<Rational> delta, std::vector<Rational> gamma)
		: k_(k), delta_(std::move(delta)), gamma_(std::move(gamma))
	{
		check_k(k);
		if (delta_.size() != static_cast<std::size_t>(k + 1) || gamma_.size() != static_cast<std::size_t>(k))
			throw DomainError("coefficient lists must have lengths k+1 and k");
		delta_f_ = convert<double>(delta_);
		gamma_f_ = convert<double>(gamma_);
	}

	std::complex<double> BdfScheme::delta_at(std::complex<double> z) const
	{
		std::complex<double> acc = 0.0;
		for (auto it = delta_f_.rbegin(); it != delta_f_.rend(); ++it)
			acc = acc * z + *it;
		return acc;
	}

	bool OrderConditionReport::all_zero() const
	{
		return std::all_of(rows.begin(), rows.end(), [](const OrderConditionRow &r) {
			return r.implicit_residual == Rational(0) && r.explicit_residual == Rational(0);
		});
	}

	OrderConditionReport verify_order_conditions(const BdfScheme &scheme)
	{
		const int k = scheme.k();
		OrderConditionReport report;
		report.k = k;
		for (int ell = 0; ell <= k; ++ell)
		{
			// l k^(l-1), which is 0 for l = 0
			const Rational target = ell == 0 ? Rational(0) : Rational(ell) * ipow(k, ell - 1);

			Rational lhs(0);
			for (int i = 0; i <= k; ++i)
				lhs += ipow(k - i, ell) * scheme.delta()[i];

			Rational rhs(0);
			if (ell > 0)
			{
				for (int i = 0; i < k; ++i)
					rhs += ipow(k - i - 1, ell - 1) * scheme.gamma()[i];
				rhs *= ell;
			}
			report.rows.push_back({ell, abs(lhs - target), abs(target - rhs)});
		}
		return report;
	}

	std::vector<Rational> mu_coeffs(const BdfScheme &scheme)
	{
		// Synthetic division of delta by (1 - z) = -(z - 1).
		const auto &d = scheme.delta();
		const int n = static_cast<int>(d.size()) - 1;
		std::vector<Rational> q(n, Rational(0));
		Rational carry(0);
		for (int i = n; i >= 1; --i)
		{
			carry += d[i];
			q[i - 1] = carry;
		}
		if (d[0] + carry != Rational(0))
			throw ComputationError("delta(1) != 0: (1 - z) does not divide delta");
		for (auto &c : q)
			c = -c;
		return q;
	}

	std::vector<std::complex<double>> mu_roots(const BdfScheme &scheme)
	{
		const auto mu = mu_coeffs(scheme);
		if (mu.size() <= 1)
			return {};
		std::vector<std::complex<double>> c;
		for (const auto &r : mu)
			c.emplace_back(static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()));
		return polynomial_roots(c);
	}

	std::string validate(const BdfScheme &scheme, double root_margin)
	{
		const auto &d = scheme.delta();
		const auto &g = scheme.gamma();
		const int k = scheme.k();

		Rational sum_d(0), first_moment(0), sum_g(0);
		for (int i = 0; i <= k; ++i)
		{
			sum_d += d[i];
			first_moment += Rational(k - i) * d[i];
		}
		for (const auto &c : g)
			sum_g += c;

		if (sum_d != Rational(0))
			return "sum of delta coefficients is " + to_string(sum_d) + ", expected 0";
		if (first_moment != Rational(1))
			return "sum (k-i) delta_i is " + to_string(first_moment) + ", expected 1";
		if (sum_g != Rational(1))
			return "sum of gamma coefficients is " + to_string(sum_g) + ", expected 1";
		if (d[0] <= Rational(0))
			return "delta_0 must be positive";
		for (const auto &z : mu_roots(scheme))
			if (std::abs(z) <= 1.0 + root_margin)
			{
				std::ostringstream os;
				os << "root of mu with modulus " << std::abs(z) << " inside the margin";
				return os.str();
			}
		return {};
	}

	std::string to_string(const Rational &r)
	{
		if (r.denominator() == 1)
			return std::to_string(r.numerator());
		return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
	}
} // namespace imexbdf
