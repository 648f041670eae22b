#include <imexbdf/stability.hpp>

#include <imexbdf/errors.hpp>
#include <imexbdf/roots.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace imexbdf
{
	namespace
	{
		constexpr double kPi = std::numbers::pi;

		/// Maximizes f on [lo, hi]; returns the abscissa of the best value seen.
		template <typename F>
		double golden_section_max(F &&f, double lo, double hi, double tol = 1e-14)
		{
			const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
			double c = hi - inv_phi * (hi - lo);
			double d = lo + inv_phi * (hi - lo);
			double fc = f(c), fd = f(d);
			while (hi - lo > tol * std::max(1.0, std::abs(lo)))
			{
				if (fc > fd)
				{
					hi = d;
					d = c;
					fd = fc;
					c = hi - inv_phi * (hi - lo);
					fc = f(c);
				}
				else
				{
					lo = c;
					c = d;
					fc = fd;
					d = lo + inv_phi * (hi - lo);
					fd = f(d);
				}
			}
			return fc > fd ? c : d;
		}

		/// arg delta(e^{i theta}) on (0, 2pi). When delta = (1 - z) mu(z), uses
		/// arg(1 - e^{i theta}) = (theta - pi)/2 plus arg mu, which stays accurate as theta -> 0
		/// where delta itself vanishes.
		class ArgDelta
		{
		public:
			explicit ArgDelta(const BdfScheme &scheme) : scheme_(scheme)
			{
				try
				{
					for (const auto &c : mu_coeffs(scheme))
						mu_.push_back(static_cast<double>(c.numerator()) / static_cast<double>(c.denominator()));
				}
				catch (const ComputationError &)
				{
					mu_.clear();
				}
			}

			double operator()(double theta) const
			{
				const auto z = std::polar(1.0, theta);
				if (mu_.empty())
					return std::arg(scheme_.delta_at(z));
				std::complex<double> m = 0.0;
				for (auto it = mu_.rbegin(); it != mu_.rend(); ++it)
					m = m * z + *it;
				return std::remainder((theta - kPi) / 2.0 + std::arg(m), 2.0 * kPi);
			}

		private:
			const BdfScheme &scheme_;
			std::vector<double> mu_;
		};

		/// sup over theta in (0, 2pi) of |arg delta(e^{i theta})|, including the theta -> 0 limit.
		double sup_arg_delta(const BdfScheme &scheme, int n_samples)
		{
			if (n_samples < 10000)
				throw DomainError("a_alpha_angle needs at least 10^4 samples");

			const ArgDelta arg_delta(scheme);
			auto g = [&](double theta) { return std::abs(arg_delta(theta)); };

			double best = -1.0, max_modulus = 0.0;
			int best_j = -1;
			for (int j = 1; j < n_samples; ++j)
			{
				const double theta = 2.0 * kPi * j / n_samples;
				max_modulus = std::max(max_modulus, std::abs(scheme.delta_at(std::polar(1.0, theta))));
				const double a = g(theta);
				if (a > best)
				{
					best = a;
					best_j = j;
				}
			}
			if (max_modulus == 0.0)
				throw ComputationError("delta vanishes on all unit-circle samples");

			// Three refinement rounds, each on a bracket shrinking around the current optimum.
			double centre = 2.0 * kPi * best_j / n_samples;
			double half_width = 2.0 * kPi / n_samples;
			for (int round = 0; round < 3; ++round)
			{
				const double lo = std::max(centre - half_width, 1e-300);
				const double hi = std::min(centre + half_width, 2.0 * kPi);
				const double arg_max = golden_section_max(g, lo, hi);
				if (g(arg_max) >= best)
				{
					best = g(arg_max);
					centre = arg_max;
				}
				half_width *= 0.01;
			}
			// Round-off near theta = 0 can push |arg| a few ulps past pi/2 for A-stable schemes.
			if (best <= kPi / 2.0 + 1e-12)
				return kPi / 2.0;
			return best;
		}

		Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd &A)
		{
			return 0.5 * (A + A.adjoint());
		}

		double min_hermitian_eigenvalue(const Eigen::MatrixXcd &H)
		{
			Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
			if (es.info() != Eigen::Success)
				throw ComputationError("Hermitian eigenvalue iteration did not converge");
			return es.eigenvalues().minCoeff();
		}

		void require_coercive(const Eigen::MatrixXcd &A)
		{
			if (A.rows() != A.cols() || A.rows() == 0)
				throw DomainError("operator matrix must be square and non-empty");
			const double lmin = min_hermitian_eigenvalue(hermitian_part(A));
			// eigenvalues at round-off level relative to ||A|| count as zero
			if (!(lmin > 64.0 * std::numeric_limits<double>::epsilon() * A.norm()))
			{
				std::ostringstream os;
				os << "Hermitian part not positive definite (smallest eigenvalue " << lmin << ")";
				throw CoercivityError(os.str());
			}
		}

		/// Point of the numerical range extreme in direction theta.
		std::complex<double> support_point(const Eigen::MatrixXcd &A, double theta)
		{
			const Eigen::MatrixXcd H = hermitian_part(std::polar(1.0, -theta) * A);
			Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
			if (es.info() != Eigen::Success)
				throw ComputationError("Hermitian eigenvalue iteration did not converge");
			const Eigen::VectorXcd v = es.eigenvectors().col(H.rows() - 1);
			return v.dot(A * v) / v.squaredNorm();
		}
	} // namespace

	bool RootSweepResult::all_stable() const
	{
		return std::all_of(stable.begin(), stable.end(), [](bool b) { return b; });
	}

	double a_alpha_angle(const BdfScheme &scheme, int n_samples)
	{
		return rad_to_deg(kPi - sup_arg_delta(scheme, n_samples));
	}

	double lambda_threshold(const BdfScheme &scheme, int n_samples)
	{
		const double sup = sup_arg_delta(scheme, n_samples);
		if (sup <= kPi / 2.0)
			return std::numeric_limits<double>::infinity();
		return 1.0 / std::cos(kPi - sup);
	}

	StabilityReport stability_report(const BdfScheme &scheme, int n_samples, int locus_points)
	{
		StabilityReport r;
		r.k = scheme.k();
		const double sup = sup_arg_delta(scheme, n_samples);
		r.alpha_deg = rad_to_deg(kPi - sup);
		r.lambda_threshold = sup <= kPi / 2.0 ? std::numeric_limits<double>::infinity() : 1.0 / std::cos(kPi - sup);
		for (int j = 0; j < locus_points; ++j)
		{
			const double theta = 2.0 * kPi * j / (locus_points - 1);
			r.theta.push_back(theta);
			r.locus.push_back(scheme.delta_at(std::polar(1.0, theta)));
		}
		return r;
	}

	double stability_constant(const Eigen::MatrixXcd &A, int n_angles)
	{
		if (n_angles < 360)
			throw DomainError("stability_constant needs at least 360 angles");
		require_coercive(A);

		auto ratio = [&](double theta) {
			const auto z = support_point(A, theta);
			return std::abs(z) / z.real();
		};

		double best = 1.0;
		int best_j = 0;
		for (int j = 0; j < n_angles; ++j)
		{
			const double r = ratio(2.0 * kPi * j / n_angles);
			if (r > best)
			{
				best = r;
				best_j = j;
			}
		}
		const double step = 2.0 * kPi / n_angles;
		const double centre = step * best_j;
		const double refined = golden_section_max(ratio, centre - step, centre + step, 1e-12);
		return std::max(best, ratio(refined));
	}

	CoefficientLambda coefficient_lambda(std::span<const double> a, std::span<const double> b)
	{
		if (a.size() != b.size() || a.empty())
			throw DomainError("coefficient fields must be non-empty and of equal size");
		CoefficientLambda out;
		for (std::size_t i = 0; i < a.size(); ++i)
		{
			if (!(a[i] > 0.0))
				throw CoercivityError("coefficient a must be positive on the grid (index " + std::to_string(i) + ")");
			out.lambda = std::max(out.lambda, std::hypot(a[i], b[i]) / a[i]);
			out.max_b_over_a = std::max(out.max_b_over_a, std::abs(b[i]) / a[i]);
		}
		return out;
	}

	RootSweepResult von_neumann_sweep(const BdfScheme &scheme, double phi, std::span<const double> rho, double tau)
	{
		if (!(tau > 0.0))
			throw DomainError("tau must be positive");
		const int k = scheme.k();
		RootSweepResult out;
		out.k = k;
		out.phi = phi;
		out.tau = tau;
		for (double r : rho)
		{
			if (!(r > 0.0))
				throw DomainError("rho values must be positive");
			std::vector<std::complex<double>> c(k + 1);
			for (int i = 0; i <= k; ++i)
				c[k - i] = scheme.delta_f()[i];
			c[k] += tau * std::polar(r, phi);

			std::vector<std::complex<double>> roots;
			try
			{
				roots = polynomial_roots(c);
			}
			catch (const ComputationError &e)
			{
				std::ostringstream os;
				os << e.what() << " (rho = " << r << ")";
				throw ComputationError(os.str());
			}

			double max_mod = 0.0;
			bool ok = true;
			for (std::size_t i = 0; i < roots.size(); ++i)
			{
				const double m = std::abs(roots[i]);
				max_mod = std::max(max_mod, m);
				if (m > 1.0 + kRootTolerance)
					ok = false;
				else if (m >= 1.0 - kRootTolerance)
					for (std::size_t j = 0; j < roots.size(); ++j)
						if (j != i && std::abs(roots[i] - roots[j]) <= kRootSeparation)
							ok = false;
			}
			out.rho.push_back(r);
			out.max_root_modulus.push_back(max_mod);
			out.stable.push_back(ok);
		}
		return out;
	}

	AnalyticityCheck angle_of_analyticity_check(const Eigen::MatrixXcd &A, double lambda)
	{
		require_coercive(A);
		const double scale = A.norm();

		// W(A) lies in {|arg z| <= beta} iff Herm(e^{+-i(pi/2 - beta)} A) >= 0.
		auto inside_sector = [&](double beta) {
			const double psi = kPi / 2.0 - beta;
			const double tol = -1e-13 * scale;
			return min_hermitian_eigenvalue(hermitian_part(std::polar(1.0, psi) * A)) >= tol &&
				   min_hermitian_eigenvalue(hermitian_part(std::polar(1.0, -psi) * A)) >= tol;
		};

		double lo = 0.0, hi = kPi / 2.0;
		for (int it = 0; it < 64 && hi - lo > 1e-15; ++it)
		{
			const double mid = 0.5 * (lo + hi);
			if (inside_sector(mid))
				hi = mid;
			else
				lo = mid;
		}

		AnalyticityCheck out;
		out.measured_angle = kPi / 2.0 - hi;
		out.bound = std::asin(std::min(1.0, 1.0 / lambda));
		out.holds = out.measured_angle >= out.bound - 1e-6;
		return out;
	}

	std::vector<double> log_spaced(double lo, double hi, int count)
	{
		if (count < 2 || !(lo > 0.0) || !(hi > lo))
			throw DomainError("log_spaced needs count >= 2 and 0 < lo < hi");
		std::vector<double> out(count);
		const double a = std::log10(lo), b = std::log10(hi);
		for (int i = 0; i < count; ++i)
			out[i] = std::pow(10.0, a + (b - a) * i / (count - 1));
		return out;
	}
} // namespace imexbdf
