#pragma once

#include <imexbdf/grid.hpp>
#include <imexbdf/imex_stepper.hpp>

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace imexbdf
{
	struct NormKind
	{
		enum class Type
		{
			L2,
			Lq,
			Linf,
			W1inf, ///< max(||v||_inf, ||grad v||_inf)
			W1q,   ///< (||v||_q^q + ||grad v||_q^q)^(1/q)
			H1	   ///< W1q with q = 2
		};
		Type type = Type::L2;
		double q = 2.0; ///< used by Lq and W1q

		std::string to_string() const;
		bool operator==(const NormKind &) const = default;
	};

	/// Sum of norms, e.g. l2+linf for the intersection norm ||v||_X + ||v||_Y.
	struct NormSum
	{
		std::vector<NormKind> terms;

		/// Tokens: l2, lq:<q>, linf, w1inf, w1q:<q>, h1, joined by '+'. Throws ParseError.
		static NormSum parse(std::string_view text);
		std::string to_string() const;
		bool operator==(const NormSum &) const = default;
	};

	/// Comma-separated list of norm sums, e.g. "linf,l2,l2+linf". Throws ParseError with the
	/// offset into the whole text.
	std::vector<NormSum> parse_norm_list(std::string_view text);
	std::string to_string(const std::vector<NormSum> &norms);

	/// Quadrature weights: h^d on periodic grids; on Dirichlet grids the trapezoidal rule, whose
	/// boundary nodes carry zero values so the interior weights are h^d as well. Either way the
	/// weights including boundary nodes sum to the domain measure.
	double spatial_norm(const Eigen::VectorXcd &v, const NormKind &kind, const Grid &grid);
	double spatial_norm(const Eigen::VectorXcd &v, const NormSum &kind, const Grid &grid);

	/// Pointwise gradient magnitude |grad v| together with its quadrature weights. Dirichlet
	/// grids include the boundary nodes (centered differences inside, one-sided second order at
	/// the boundary); periodic grids use spectral differentiation.
	struct GradientField
	{
		std::vector<double> magnitude;
		std::vector<double> weight;
	};
	GradientField gradient_field(const Eigen::VectorXcd &v, const Grid &grid);

	/// (tau sum values_n^p)^(1/p), or max for p = infinity. Requires p > 1.
	double lp_time_norm(std::span<const double> values, double tau, double p);

	/// ||(v_n - v_{n-1}) / tau|| for n = 1..N.
	std::vector<double> difference_quotient_seq(std::span<const Eigen::VectorXcd> states, double tau, const NormSum &kind,
												const Grid &grid);
	std::vector<double> difference_quotient_seq(const Trajectory<Complex> &trajectory, const NormSum &kind, const Grid &grid);

	/// Neumaier-compensated sum.
	class CompensatedSum
	{
	public:
		void add(double x);
		double value() const { return sum_ + correction_; }

	private:
		double sum_ = 0.0;
		double correction_ = 0.0;
	};
} // namespace imexbdf
