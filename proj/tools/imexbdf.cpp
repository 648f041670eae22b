#include <imexbdf/bdf_coeffs.hpp>
#include <imexbdf/config.hpp>
#include <imexbdf/convergence.hpp>
#include <imexbdf/errors.hpp>
#include <imexbdf/imex_stepper.hpp>
#include <imexbdf/norms.hpp>
#include <imexbdf/report.hpp>
#include <imexbdf/stability.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

using namespace imexbdf;

namespace
{
	enum ExitCode : int
	{
		Success = 0,
		ConfigFailure = 2,
		NumericalFailure = 3,
		AssertionFailure = 4
	};

	/// Blow-up where the command expects a bounded solution.
	class UnexpectedBlowUp : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

	constexpr const char *kThreadsEnv = "IMEXBDF_THREADS";

	struct Common
	{
		std::string config;
		std::optional<std::string> out_dir;
		std::optional<std::string> prefix;
		std::optional<unsigned> threads;
		bool assert_order = false;
		double tolerance = 0.1;
	};

	unsigned resolve_threads(const Common &c, unsigned from_config)
	{
		if (c.threads)
			return *c.threads;
		if (const char *env = std::getenv(kThreadsEnv); env && *env)
		{
			const std::string s(env);
			unsigned v = 0;
			const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
			if (ec != std::errc() || ptr != s.data() + s.size())
				throw ConfigurationError(std::string(kThreadsEnv) + ": expected a nonnegative integer, got '" + s + "'");
			return v;
		}
		return from_config;
	}

	RunConfig load(const Common &c)
	{
		RunConfig cfg = c.config.empty() ? parse_config("") : load_config(c.config);
		if (c.out_dir)
			cfg.output.directory = *c.out_dir;
		if (c.prefix)
			cfg.output.prefix = *c.prefix;
		return cfg;
	}

	template <typename T>
	void override_with(T &target, const std::optional<T> &value)
	{
		if (value)
			target = *value;
	}

	void add_common(CLI::App *app, Common &c, bool with_config)
	{
		if (with_config)
			app->add_option("--config", c.config, "Run configuration (key = value sections, or JSON)")->check(CLI::ExistingFile);
		app->add_option("--out-dir", c.out_dir, "Output directory (overrides output.directory)");
		app->add_option("--prefix", c.prefix, "Output file prefix (overrides output.prefix)");
		app->add_option("--threads", c.threads, std::string("Worker threads, 0 = hardware (overrides ") + kThreadsEnv + ")");
		app->add_flag("--assert-order", c.assert_order, "Exit with code 4 when the summary reports failure");
		app->add_option("--tolerance", c.tolerance, "Allowed shortfall of the observed order below k")->capture_default_str();
	}

	/// Summary without the table, for the terminal.
	void print_summary(const Report &r, const ReportPaths &paths)
	{
		nlohmann::ordered_json j = r.summary;
		j["csv"] = paths.csv;
		j["json"] = paths.json;
		std::cout << j.dump(2) << '\n';
	}

	int finish(const Report &r, const Common &c)
	{
		if (c.assert_order && r.summary.contains("passed") && !r.summary["passed"].get<bool>())
		{
			std::cerr << "assertion failed: " << r.kind << " summary reports passed = false\n";
			return AssertionFailure;
		}
		return Success;
	}

	int emit_and_finish(Report &r, const RunConfig &cfg, const Common &c)
	{
		r.summary["config"] = to_json(cfg);
		const ReportPaths paths = emit_report(r, cfg.output.directory, cfg.output.prefix);
		print_summary(r, paths);
		return finish(r, c);
	}

	/// Prints the report in the requested format and, with --out-dir, also writes both files.
	int print_or_emit(const Report &r, const std::string &format, const Common &c)
	{
		std::cout << format_report(r, parse_format(format));
		if (c.out_dir)
			emit_report(r, *c.out_dir, c.prefix.value_or("imexbdf"));
		return finish(r, c);
	}

	std::string csv_value(double v)
	{
		char buf[40];
		std::snprintf(buf, sizeof buf, "%.17g", v);
		return buf;
	}

	VectorXc evaluate_on_grid(const Expression &e, const Grid &grid, double t)
	{
		VectorXc v(grid.size());
		for (int i = 0; i < grid.size(); ++i)
		{
			const Point p = grid.node(i);
			v(i) = e({p[0], p[1], t});
		}
		return v;
	}
} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"Implicit-explicit BDF methods: coefficients, stability thresholds and convergence experiments.\n"
				 "Exit codes: 0 success, 2 configuration or I/O error, 3 numerical failure, 4 --assert-order failure.\n"
				 "The thread count defaults to the IMEXBDF_THREADS environment variable, then run.threads."};
	app.require_subcommand(1);
	app.set_version_flag("--version", "imexbdf 1.0");

	std::function<int()> action;

	// coeffs
	Common coeffs_common;
	int coeffs_k = 2;
	std::string coeffs_format = "json";
	auto *coeffs = app.add_subcommand("coeffs", "Coefficients delta_0..delta_k and gamma_0..gamma_{k-1} as fractions and decimals.\n"
											   "CSV columns: i, delta_fraction, delta, gamma_fraction, gamma");
	coeffs->add_option("--k", coeffs_k, "Step number")->required()->check(CLI::Range(1, 6));
	coeffs->add_option("--format", coeffs_format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
	add_common(coeffs, coeffs_common, false);
	coeffs->callback([&] { action = [&] { return print_or_emit(coeffs_report(BdfScheme(coeffs_k)), coeffs_format, coeffs_common); }; });

	// stability
	Common stab_common;
	int stab_k = 2;
	std::string stab_format = "json";
	std::optional<double> stab_phi;
	double rho_min = 1e-3, rho_max = 1e3, stab_tau = 1.0;
	int rho_count = 61, samples = 100000;
	auto *stab = app.add_subcommand("stability", "A(alpha) angle and threshold 1/cos(alpha); with --phi, the von Neumann root sweep.\n"
												"CSV columns: theta, re_delta, im_delta (locus), or rho, max_root_modulus, stable (sweep)");
	stab->add_option("--k", stab_k, "Step number")->required()->check(CLI::Range(1, 6));
	stab->add_option("--phi", stab_phi, "Rotation angle of the test equation in degrees");
	stab->add_option("--rho-min", rho_min, "Smallest modulus of the sweep")->capture_default_str()->check(CLI::PositiveNumber);
	stab->add_option("--rho-max", rho_max, "Largest modulus of the sweep")->capture_default_str()->check(CLI::PositiveNumber);
	stab->add_option("--rho-count", rho_count, "Log-spaced sweep points")->capture_default_str()->check(CLI::Range(2, 1000000));
	stab->add_option("--tau", stab_tau, "Step size of the sweep")->capture_default_str()->check(CLI::PositiveNumber);
	stab->add_option("--samples", samples, "Unit-circle samples for the angle")->capture_default_str()->check(CLI::Range(10000, 100000000));
	stab->add_option("--format", stab_format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
	add_common(stab, stab_common, false);
	stab->callback([&] {
		action = [&] {
			const BdfScheme scheme(stab_k);
			std::optional<RootSweepResult> sweep;
			if (stab_phi)
			{
				if (!(rho_max > rho_min))
					throw ConfigurationError("--rho-max must exceed --rho-min");
				const auto rho = log_spaced(rho_min, rho_max, rho_count);
				sweep = von_neumann_sweep(scheme, deg_to_rad(*stab_phi), rho, stab_tau);
			}
			return print_or_emit(stability_report(imexbdf::stability_report(scheme, samples), sweep), stab_format, stab_common);
		};
	});

	// consistency
	Common cons_common;
	std::optional<int> cons_k, cons_steps;
	std::optional<double> cons_tau;
	std::optional<std::string> cons_norms;
	auto *cons = app.add_subcommand("consistency", "Consistency errors d_n of the exact solution, at tau and tau/2 for the observed order.\n"
												  "CSV columns: n, t, defect (first norm of output.norms)");
	cons->add_option("--k", cons_k, "Step number (overrides scheme.k)")->check(CLI::Range(1, 6));
	cons->add_option("--tau", cons_tau, "Step size (overrides time.tau)");
	cons->add_option("--steps", cons_steps, "Number of steps N (overrides time.steps)");
	cons->add_option("--norms", cons_norms, "Norm tokens (overrides output.norms)");
	add_common(cons, cons_common, true);
	cons->callback([&] {
		action = [&] {
			RunConfig cfg = load(cons_common);
			override_with(cfg.k, cons_k);
			override_with(cfg.time.tau, cons_tau);
			override_with(cfg.time.steps, cons_steps);
			override_with(cfg.output.norms, cons_norms);
			cfg.validate();
			const BdfScheme scheme(cfg.k);
			const ManufacturedProblem problem = cfg.manufactured();
			const NormSum norm = parse_norm_list(cfg.output.norms).front();
			const auto full = consistency_errors(problem, scheme, cfg.time.tau, cfg.time.steps, norm);
			const auto half = consistency_errors(problem, scheme, cfg.time.tau / 2, 2 * cfg.time.steps, norm);
			Report r = consistency_report(full, half, cfg.k, cons_common.tolerance);
			r.summary["norm"] = norm.to_string();
			return emit_and_finish(r, cfg, cons_common);
		};
	});

	// converge
	Common conv_common;
	std::optional<int> conv_k, conv_levels;
	std::optional<double> conv_tau0, conv_final;
	std::optional<std::string> conv_norms;
	int fit_points = 4;
	double time_p = 2.0;
	auto *conv = app.add_subcommand("converge", "Errors on the ladder tau0 2^-j with exact starting values and fitted orders.\n"
											   "CSV columns: tau, steps, stable, then err_<norm>, lp_<norm>, dq_<norm> per norm");
	conv->add_option("--k", conv_k, "Step number (overrides scheme.k)")->check(CLI::Range(1, 6));
	conv->add_option("--tau0", conv_tau0, "Coarsest step size (overrides time.tau0)");
	conv->add_option("--levels", conv_levels, "Number of halvings plus one (overrides time.levels)");
	conv->add_option("--final-time", conv_final, "Final time T (overrides time.final_time)");
	conv->add_option("--norms", conv_norms, "Comma-separated norm sums, e.g. linf,l2+linf (overrides output.norms)");
	conv->add_option("--fit-points", fit_points, "Finest stable levels used in the fit")->capture_default_str()->check(CLI::Range(3, 100));
	conv->add_option("--p", time_p, "Time exponent of the L^p error quantities")->capture_default_str();
	add_common(conv, conv_common, true);
	conv->callback([&] {
		action = [&] {
			RunConfig cfg = load(conv_common);
			override_with(cfg.k, conv_k);
			override_with(cfg.time.tau0, conv_tau0);
			override_with(cfg.time.levels, conv_levels);
			override_with(cfg.time.final_time, conv_final);
			override_with(cfg.output.norms, conv_norms);
			cfg.validate();
			if (!(time_p > 1.0))
				throw ConfigurationError("--p must exceed 1");
			const ManufacturedProblem problem = cfg.manufactured();
			StudyOptions opts;
			opts.fit_points = fit_points;
			opts.p = time_p;
			opts.threads = resolve_threads(conv_common, cfg.threads);
			const auto rep = convergence_study(problem, BdfScheme(cfg.k), tau_ladder(cfg.time.tau0, cfg.time.levels),
											   cfg.time.final_time, parse_norm_list(cfg.output.norms), opts);
			Report r = convergence_report(rep, conv_common.tolerance);
			return emit_and_finish(r, cfg, conv_common);
		};
	});

	// threshold
	Common thr_common;
	int thr_k = 3;
	std::vector<double> ratios, thr_taus;
	std::optional<int> thr_points, thr_steps;
	std::optional<unsigned> thr_seed;
	auto *thr = app.add_subcommand("threshold", "Bounded or blow-up runs for a = 1, b = ratio around tan(alpha_k).\n"
											   "CSV columns: ratio, ratio_over_tan_alpha, bounded, blow_up_step, blow_up_tau");
	thr->add_option("--k", thr_k, "Step number")->required()->check(CLI::Range(3, 6));
	thr->add_option("--ratios", ratios, "Values of |b|/a (default: tan(alpha_k) times 0.5, 0.8, 0.92, 1.08, 1.2, 1.5)")->delimiter(',');
	thr->add_option("--taus", thr_taus, "Step sizes tried for every ratio")->delimiter(',');
	thr->add_option("--points", thr_points, "Interior grid nodes");
	thr->add_option("--steps", thr_steps, "Step budget per run");
	thr->add_option("--seed", thr_seed, "Seed of the random starting data (overrides run.seed)");
	add_common(thr, thr_common, true);
	thr->callback([&] {
		action = [&] {
			RunConfig cfg = load(thr_common);
			override_with(cfg.seed, thr_seed);
			cfg.k = thr_k;
			cfg.validate();
			const BdfScheme scheme(thr_k);
			ThresholdSetup setup;
			if (!thr_taus.empty())
				setup.taus = thr_taus;
			override_with(setup.points, thr_points);
			override_with(setup.steps, thr_steps);
			setup.seed = cfg.seed;
			setup.threads = resolve_threads(thr_common, cfg.threads);
			const auto rep = threshold_experiment(scheme, ratios.empty() ? default_threshold_ratios(scheme) : ratios, setup);
			Report r = threshold_report(rep);
			return emit_and_finish(r, cfg, thr_common);
		};
	});

	// solve
	Common solve_common;
	std::optional<int> solve_k, solve_steps, solve_stride;
	std::optional<double> solve_tau;
	std::optional<std::string> solve_out, solve_norms, solve_dump;
	auto *solve = app.add_subcommand("solve", "Runs the scheme on the configured problem.\n"
											 "CSV columns: n, t, then the norms of u_n (and err_<norm> of u_n - u(t_n) with an exact solution)");
	solve->add_option("--k", solve_k, "Step number (overrides scheme.k)")->check(CLI::Range(1, 6));
	solve->add_option("--tau", solve_tau, "Step size (overrides time.tau)");
	solve->add_option("--steps", solve_steps, "Number of steps N (overrides time.steps)");
	solve->add_option("--stride", solve_stride, "Save every stride-th step (overrides output.stride)");
	solve->add_option("--norms", solve_norms, "Comma-separated norm sums (overrides output.norms)");
	solve->add_option("--out", solve_out, "CSV path; the JSON summary goes next to it");
	solve->add_option("--dump", solve_dump, "Write the final state, one 're,im' line per node");
	add_common(solve, solve_common, true);
	solve->callback([&] {
		action = [&] {
			RunConfig cfg = load(solve_common);
			override_with(cfg.k, solve_k);
			override_with(cfg.time.tau, solve_tau);
			override_with(cfg.time.steps, solve_steps);
			override_with(cfg.output.stride, solve_stride);
			override_with(cfg.output.norms, solve_norms);
			cfg.validate();
			const BdfScheme scheme(cfg.k);
			const double tau = cfg.time.tau;
			const int N = cfg.time.steps;
			if (N < cfg.k)
				throw ConfigurationError("time.steps: must be at least k");
			const auto norms = parse_norm_list(cfg.output.norms);
			const Grid grid = cfg.make_grid();
			const bool has_exact = !cfg.problem.exact.empty();

			Report r;
			r.kind = "solve";
			r.table.columns = {"n", "t"};
			for (const auto &m : norms)
				r.table.columns.push_back(m.to_string());
			if (has_exact)
				for (const auto &m : norms)
					r.table.columns.push_back("err_" + m.to_string());

			std::shared_ptr<const LinearOperator<Complex>> A;
			std::shared_ptr<const NonlinearTerm<Complex>> B;
			StepOptions<Complex> opts;
			opts.keep_states = false;
			std::function<VectorXc(double)> exact;
			std::vector<VectorXc> start;
			if (has_exact)
			{
				const ManufacturedProblem mp = cfg.manufactured();
				A = mp.A;
				B = mp.explicit_term();
				opts.implicit_source = mp.implicit_source();
				exact = mp.exact;
				start = make_starting_values<Complex>(mp.exact, scheme, tau);
				r.summary["starting_values"] = "exact";
			}
			else
			{
				if (cfg.problem.initial.empty())
					throw ConfigurationError("problem.initial: solve needs initial data or an exact solution");
				const AssembledProblem ops = cfg.assemble();
				A = ops.A;
				B = ops.B;
				const VectorXc u0 = evaluate_on_grid(Expression::parse(cfg.problem.initial), grid, 0.0);
				start = bootstrap_starting_values<Complex>(scheme, *A, *B, u0, tau);
				r.summary["starting_values"] = "bootstrap";
				r.summary["bootstrap_substeps"] = cfg.k > 1 ? bootstrap_substeps(cfg.k, tau) : 0;
			}

			const int stride = cfg.output.stride;
			std::vector<double> max_error(norms.size(), 0.0);
			opts.observer = [&](int n, const double &t, const VectorXc &u) {
				if (n % stride != 0 && n != N)
					return;
				std::vector<Cell> row{static_cast<long long>(n), t};
				for (const auto &m : norms)
					row.emplace_back(spatial_norm(u, m, grid));
				if (has_exact)
				{
					const VectorXc e = u - exact(t);
					for (std::size_t j = 0; j < norms.size(); ++j)
					{
						const double en = spatial_norm(e, norms[j], grid);
						max_error[j] = std::max(max_error[j], en);
						row.emplace_back(en);
					}
				}
				r.table.add_row(std::move(row));
			};
			const auto traj = run<Complex>(scheme, *A, *B, start, tau, N, opts);

			r.summary["k"] = cfg.k;
			r.summary["tau"] = tau;
			r.summary["steps"] = N;
			r.summary["last_step"] = traj.last_index;
			r.summary["blow_up"] = traj.blow_up ? nlohmann::ordered_json(*traj.blow_up) : nlohmann::ordered_json(nullptr);
			if (has_exact)
			{
				nlohmann::ordered_json errs = nlohmann::ordered_json::object();
				for (std::size_t j = 0; j < norms.size(); ++j)
					errs[norms[j].to_string()] = max_error[j];
				r.summary["max_error"] = std::move(errs);
			}
			r.summary["config"] = to_json(cfg);

			ReportPaths paths;
			if (solve_out)
			{
				std::filesystem::path csv(*solve_out);
				if (csv.has_parent_path())
					std::filesystem::create_directories(csv.parent_path());
				paths.csv = csv.string();
				paths.json = std::filesystem::path(csv).replace_extension(".json").string();
				if (paths.json == paths.csv)
					paths.json += ".json";
				if (r.empty())
					throw OutputError("report 'solve' is empty; nothing written");
				write_text_file(paths.csv, format_csv(r.table));
				write_text_file(paths.json, format_json(r));
			}
			else
				paths = emit_report(r, cfg.output.directory, cfg.output.prefix);

			std::optional<std::string> dump = solve_dump;
			if (!dump && cfg.output.dump_state)
				dump = (std::filesystem::path(cfg.output.directory) / (cfg.output.prefix + "_state.txt")).string();
			if (dump)
			{
				std::string text;
				for (Eigen::Index i = 0; i < traj.last_state.size(); ++i)
					text += csv_value(traj.last_state(i).real()) + "," + csv_value(traj.last_state(i).imag()) + "\n";
				write_text_file(*dump, text);
			}
			print_summary(r, paths);
			if (traj.blow_up)
				throw UnexpectedBlowUp("solution blew up at step " + std::to_string(*traj.blow_up));
			return Success;
		};
	});

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::ParseError &e)
	{
		const int code = app.exit(e);
		return code == 0 ? Success : ConfigFailure;
	}

	try
	{
		return action();
	}
	catch (const ConfigurationError &e)
	{
		std::cerr << "configuration error: " << e.what() << '\n';
		return ConfigFailure;
	}
	catch (const ParseError &e)
	{
		std::cerr << "parse error: " << e.what() << '\n';
		return ConfigFailure;
	}
	catch (const DomainError &e)
	{
		std::cerr << "invalid argument: " << e.what() << '\n';
		return ConfigFailure;
	}
	catch (const CoercivityError &e)
	{
		std::cerr << "coercivity error: " << e.what() << '\n';
		return ConfigFailure;
	}
	catch (const OutputError &e)
	{
		std::cerr << "output error: " << e.what() << '\n';
		return ConfigFailure;
	}
	catch (const std::filesystem::filesystem_error &e)
	{
		std::cerr << "output error: " << e.what() << '\n';
		return ConfigFailure;
	}
	catch (const UnexpectedBlowUp &e)
	{
		std::cerr << "numerical failure: " << e.what() << '\n';
		return NumericalFailure;
	}
	catch (const StepError &e)
	{
		std::cerr << "numerical failure: " << e.what() << '\n';
		return NumericalFailure;
	}
	catch (const ComputationError &e)
	{
		std::cerr << "numerical failure: " << e.what() << '\n';
		return NumericalFailure;
	}
}
