#pragma once

#include <imexbdf/bdf_coeffs.hpp>
#include <imexbdf/expression.hpp>
#include <imexbdf/norms.hpp>
#include <imexbdf/operators.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace imexbdf
{
	/// A problem u' + A(t) u = B(t, u) + F(t) whose exact solution is known at the grid nodes.
	///
	/// The forcing is built from the discrete operators, F(t) = u'(t) + A(t) u(t) - B(t, u(t)) at
	/// the nodes, so the nodal values of u solve the semi-discrete system exactly and all measured
	/// errors are temporal. Without B (linear mode) F(t_n) enters at the implicit time level;
	/// otherwise F is added to B and extrapolated with the gamma weights.
	struct ManufacturedProblem
	{
		std::string name;
		Grid grid;
		std::shared_ptr<const LinearOperator<Complex>> A;
		std::shared_ptr<const NonlinearTerm<Complex>> B; ///< null in linear mode
		std::function<VectorXc(double t)> exact;
		std::function<VectorXc(double t)> exact_dt;

		bool linear_mode() const { return !B; }
		VectorXc forcing(double t) const;

		/// Explicit term handed to the stepper: B + F in nonlinear mode, zero in linear mode.
		std::shared_ptr<const NonlinearTerm<Complex>> explicit_term() const;
		/// Implicit source handed to the stepper: F in linear mode, empty otherwise.
		std::function<VectorXc(const double &)> implicit_source() const;

		/// Max over nodes of |F| residual check: ||u'(t) + A u(t) - B(t, u(t)) - F(t)||_inf.
		double residual(double t) const;
	};

	/// Builds the exact-solution callables from an expression in x, y, t.
	ManufacturedProblem make_manufactured(std::string name, const Grid &grid, const AssembledProblem &ops,
										  const Expression &u, bool linear_mode);

	/// Example I on a Dirichlet grid: -div((a + ib) grad u) with f = -u^3, g = (e^u, 0).
	ManufacturedProblem manufactured_example1(const Grid &grid, const Expression &a, const Expression &b,
											  const Expression &u, bool linear_mode = false);
	/// Example III on a periodic grid: |xi| with f(u) = e^u - 1.
	ManufacturedProblem manufactured_example3(const Grid &grid, const Expression &u);
	/// Example IV on a periodic grid: |xi|^4 with B = Laplace(u^3 - u).
	ManufacturedProblem manufactured_example4(const Grid &grid, const Expression &u);

	struct FitResult
	{
		double slope = 0.0;
		double intercept = 0.0;
		double residual = 0.0; ///< root-mean-square residual of the log-log fit
		int used = 0;
		int excluded = 0; ///< pairs dropped for nonpositive or non-finite errors
	};

	/// Least-squares slope of log(error) against log(tau). Throws ComputationError when fewer
	/// than three usable pairs remain.
	FitResult fit_order(std::span<const double> tau, std::span<const double> error);

	struct ConsistencyReport
	{
		double tau = 0.0;
		int steps = 0;
		std::vector<double> norms; ///< ||d_n|| for n = k..N
		double max_norm = 0.0;
		std::vector<VectorXc> defects; ///< d_n, kept only on request
	};

	/// d_n = (1/tau) sum delta_i u(t_{n-i}) + A(t_n) u(t_n) - (explicit side) - (implicit source),
	/// with the forcing placed exactly as the stepper places it.
	ConsistencyReport consistency_errors(const ManufacturedProblem &problem, const BdfScheme &scheme, double tau, int N,
										 const NormSum &norm, bool keep_defects = false);

	struct ConvergenceLevel
	{
		double tau = 0.0;
		int steps = 0;
		std::optional<int> blow_up;
		bool stable() const { return !blow_up; }
	};

	struct NormConvergence
	{
		std::string norm;
		std::vector<double> max_error; ///< max_n ||e_n||
		std::vector<double> lp_error;  ///< (tau sum ||e_n||^p)^(1/p)
		std::vector<double> dq_error;  ///< (tau sum ||(e_n - e_{n-1})/tau||^p)^(1/p)
		std::optional<FitResult> max_fit, lp_fit, dq_fit;
	};

	struct ConvergenceReport
	{
		std::string problem;
		int k = 0;
		double final_time = 0.0;
		double p = 2.0;
		int fit_points = 4;
		std::vector<ConvergenceLevel> levels;
		std::vector<NormConvergence> norms;

		/// Fitted max-in-time order of the first norm is at least k - tolerance.
		bool passed(double tolerance = 0.1) const;
	};

	struct StudyOptions
	{
		int fit_points = 4; ///< fit on the finest stable levels
		double p = 2.0;		///< time exponent of the L^p quantities
		unsigned threads = 0; ///< 0: hardware concurrency
	};

	/// tau_0 2^{-j}, j = 0..levels-1.
	std::vector<double> tau_ladder(double tau0, int levels);

	/// Runs every tau with exact starting values up to final_time (tau must divide it) and fits
	/// orders for each norm of the list. Levels run concurrently; the report does not depend on completion order.
	ConvergenceReport convergence_study(const ManufacturedProblem &problem, const BdfScheme &scheme,
										const std::vector<double> &taus, double final_time, const std::vector<NormSum> &norms,
										const StudyOptions &options = {});

	enum class Precision
	{
		Double,
		Quad
	};

	struct ScalarStudy
	{
		int k = 0;
		std::vector<double> taus;
		std::vector<double> errors; ///< |u_N - e^{-T}|
		FitResult fit;
	};

	/// u' = -u, u(0) = 1, exact starting values, error at final_time, in double or
	/// quad (113-bit) arithmetic.
	ScalarStudy scalar_convergence_study(int k, const std::vector<double> &taus, double final_time, Precision precision,
										 int fit_points = 4);

	struct ThresholdRow
	{
		double ratio = 0.0; ///< |b| / a
		bool bounded = true;
		std::optional<int> blow_up; ///< first blow-up step over all tested tau
		double blow_up_tau = 0.0;
	};

	struct ThresholdReport
	{
		int k = 0;
		double tan_alpha = 0.0;
		std::vector<ThresholdRow> rows;
		std::optional<double> largest_stable;
		std::optional<double> smallest_unstable;

		/// largest_stable < tan_alpha < smallest_unstable, nothing stable above the bracket.
		bool brackets() const;
		double bracket_width() const;
	};

	struct ThresholdSetup
	{
		int points = 200;						  ///< interior nodes of the Dirichlet grid on (0, 1)
		std::vector<double> taus{1e-5, 1e-4, 1e-3}; ///< each ratio is run with every tau
		int steps = 20000;
		unsigned seed = 20240611;
		unsigned threads = 0;
	};

	/// a = 1, b = ratio on a 1D Dirichlet grid, B = 0, random starting data; a ratio counts as
	/// unstable when any tested tau blows up within the step budget.
	ThresholdReport threshold_experiment(const BdfScheme &scheme, const std::vector<double> &ratios,
										 const ThresholdSetup &setup = {});

	/// tan(alpha_k) times {0.5, 0.8, 0.92, 1.08, 1.2, 1.5}.
	std::vector<double> default_threshold_ratios(const BdfScheme &scheme);
} // namespace imexbdf
