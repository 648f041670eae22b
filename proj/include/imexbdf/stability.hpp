#pragma once

#include <imexbdf/bdf_coeffs.hpp>

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace imexbdf
{
	struct StabilityReport
	{
		int k = 0;
		double alpha_deg = 0.0;
		/// 1 / cos(alpha); +infinity for A-stable schemes.
		double lambda_threshold = 0.0;
		std::vector<double> theta;
		std::vector<std::complex<double>> locus; // delta(e^{i theta})
	};

	struct RootSweepResult
	{
		int k = 0;
		double phi = 0.0; // radians
		double tau = 1.0;
		std::vector<double> rho;
		std::vector<double> max_root_modulus;
		std::vector<bool> stable;

		bool all_stable() const;
	};

	struct CoefficientLambda
	{
		/// max |a + i b| / a over the grid
		double lambda = 1.0;
		/// max |b| / a over the grid
		double max_b_over_a = 0.0;
	};

	struct AnalyticityCheck
	{
		bool holds = false;
		double measured_angle = 0.0; // radians
		double bound = 0.0;			 // arcsin(1 / lambda), radians
	};

	inline constexpr double kRootTolerance = 1e-9;
	inline constexpr double kRootSeparation = 1e-6;

	/// Angle alpha (degrees) of A(alpha)-stability: pi - sup_{0<theta<2pi} |arg delta(e^{i theta})|,
	/// from dense sampling plus golden-section refinement at the extremum. The limit theta -> 0,
	/// where |arg delta| -> pi/2, is part of the supremum.
	double a_alpha_angle(const BdfScheme &scheme, int n_samples = 100000);

	/// 1 / cos(alpha_k), or +infinity when the scheme is A-stable (k = 1, 2).
	double lambda_threshold(const BdfScheme &scheme, int n_samples = 100000);

	StabilityReport stability_report(const BdfScheme &scheme, int n_samples = 100000, int locus_points = 721);

	/// Smallest lambda with |<Av,v>| <= lambda Re<Av,v>: the maximum of |z| / Re z over the
	/// boundary of the numerical range. Boundary points come from extreme eigenvectors of the
	/// Hermitian parts of e^{-i theta} A. Throws CoercivityError if Re<Av,v> > 0 fails.
	double stability_constant(const Eigen::MatrixXcd &A, int n_angles = 720);

	/// Pointwise max of |a + i b| / a and of |b| / a. Throws CoercivityError when a <= 0 somewhere.
	CoefficientLambda coefficient_lambda(std::span<const double> a, std::span<const double> b);

	/// Root test for the scheme applied to u' + rho e^{i phi} u = 0 at each rho.
	RootSweepResult von_neumann_sweep(const BdfScheme &scheme, double phi, std::span<const double> rho, double tau);

	/// Measures the sector half-opening theta_A = pi/2 - max |arg z| over the numerical range,
	/// by bisection on the definiteness of the Hermitian parts of e^{+-i psi} A, and compares it
	/// with arcsin(1/lambda).
	AnalyticityCheck angle_of_analyticity_check(const Eigen::MatrixXcd &A, double lambda);

	std::vector<double> log_spaced(double lo, double hi, int count);

	inline constexpr double deg_to_rad(double d) { return d * 3.14159265358979323846 / 180.0; }
	inline constexpr double rad_to_deg(double r) { return r * 180.0 / 3.14159265358979323846; }
} // namespace imexbdf
