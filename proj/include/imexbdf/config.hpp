#pragma once

#include <imexbdf/convergence.hpp>
#include <imexbdf/grid.hpp>
#include <imexbdf/nonlinearities.hpp>

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace imexbdf
{
	/// Run configuration. Text form (one key per line, '#' comments, optional [section] headers;
	/// keys may also appear before any header):
	///
	///     [problem]  example = I|II|III|IV, a, b, exact, initial, nonlinearity, linear
	///     [grid]     dim, boundary = dirichlet|periodic, x_min, x_max, x_points, y_min, y_max, y_points
	///     [scheme]   k
	///     [time]     tau, steps, tau0, levels, final_time
	///     [output]   directory, prefix, norms, stride, dump_state
	///     [run]      seed, threads
	///
	/// A JSON object with the same sections (as emitted in report summaries) is accepted too.
	struct RunConfig
	{
		struct Problem
		{
			std::string example = "I";
			std::string a = "1";
			std::string b = "0";
			std::string exact;			 ///< manufactured solution u(x, y, t); empty if unknown
			std::string initial;		 ///< initial data u(x, y) when exact is empty
			std::string nonlinearity;	 ///< empty: the example's own choice
			bool linear = false;		 ///< drop B and use implicit forcing
			bool operator==(const Problem &) const = default;
		} problem;

		struct GridSpec
		{
			int dim = 1;
			std::string boundary; ///< empty: dirichlet for I/II, periodic for III/IV
			double x_min = 0.0, x_max = 1.0;
			int x_points = 128;
			double y_min = 0.0, y_max = 1.0;
			int y_points = 128;
			bool operator==(const GridSpec &) const = default;
		} grid;

		int k = 2;

		struct Time
		{
			double tau = 0.01;
			int steps = 100;
			double tau0 = 0.1;
			int levels = 5;
			double final_time = 1.0;
			bool operator==(const Time &) const = default;
		} time;

		struct Output
		{
			std::string directory = ".";
			std::string prefix = "imexbdf";
			std::string norms = "linf,l2"; ///< comma-separated norm sums
			int stride = 1;
			bool dump_state = false;
			bool operator==(const Output &) const = default;
		} output;

		unsigned seed = 20240611;
		unsigned threads = 0;

		bool operator==(const RunConfig &) const = default;

		/// Throws ConfigurationError naming the offending field, or ParseError for expressions.
		void validate() const;

		Grid make_grid() const;
		Boundary boundary() const;
		NonlinearityCombination nonlinearity() const;

		/// Operators for the configured example on the configured grid.
		AssembledProblem assemble() const;
		/// Requires an exact solution.
		ManufacturedProblem manufactured() const;
	};

	/// Parses the key-value text form or a JSON object. Unknown keys raise ConfigurationError
	/// with the nearest valid key; validation runs before returning, and the per-example
	/// boundary and nonlinearity defaults are written into the result.
	RunConfig parse_config(std::string_view text);
	RunConfig load_config(const std::string &path);

	nlohmann::ordered_json to_json(const RunConfig &config);
} // namespace imexbdf
