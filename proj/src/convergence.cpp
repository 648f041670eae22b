#include <imexbdf/convergence.hpp>

#include <imexbdf/errors.hpp>
#include <imexbdf/imex_stepper.hpp>
#include <imexbdf/stability.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <random>
#include <sstream>
#include <thread>

namespace imexbdf
{
	namespace
	{
		/// Runs fn(0..count-1) on up to `threads` concurrent tasks; results are stored by index.
		template <typename Fn>
		void parallel_for(int count, unsigned threads, Fn fn)
		{
			if (threads == 0)
				threads = std::max(1u, std::thread::hardware_concurrency());
			std::vector<std::future<void>> running;
			for (int i = 0; i < count; ++i)
			{
				running.push_back(std::async(std::launch::async, fn, i));
				if (running.size() >= threads)
				{
					for (auto &f : running)
						f.get();
					running.clear();
				}
			}
			for (auto &f : running)
				f.get();
		}

		int steps_for(double tau, double final_time)
		{
			if (!(tau > 0.0) || !(final_time > 0.0))
				throw DomainError("step size and final time must be positive");
			const double n = std::round(final_time / tau);
			if (n < 1.0 || std::abs(n * tau - final_time) > 1e-9 * final_time)
			{
				std::ostringstream msg;
				msg << "tau = " << tau << " does not divide the final time " << final_time;
				throw DomainError(msg.str());
			}
			return static_cast<int>(n);
		}

		class ForcedTerm final : public NonlinearTerm<Complex>
		{
		public:
			explicit ForcedTerm(const ManufacturedProblem &p) : p_(p) {}
			VectorXc evaluate(const double &t, const VectorXc &v) const override
			{
				return p_.B->evaluate(t, v) + p_.forcing(t);
			}

		private:
			ManufacturedProblem p_;
		};

		Expression::Point at(const Point &x, double t) { return {x[0], x[1], t}; }

		template <typename Scalar>
		RealOf<Scalar> decay_error(int k, int N, double final_time)
		{
			using Real = RealOf<Scalar>;
			using std::abs;
			using std::exp;
			const Real T(final_time);
			const Real tau = T / Real(N);
			DiagonalOperator<Scalar> A(StateVector<Scalar>::Constant(1, Scalar(1)));
			ZeroTerm<Scalar> B;
			const BdfScheme scheme(k);
			auto exact = [](const Real &t) { return StateVector<Scalar>::Constant(1, Scalar(exp(-t))); };
			StepOptions<Scalar> opts;
			opts.keep_states = false;
			auto traj = run<Scalar>(scheme, A, B, make_starting_values<Scalar>(exact, scheme, tau), tau, N, opts);
			if (traj.blow_up)
				throw ComputationError("scalar decay problem blew up");
			return abs(traj.last_state(0) - Scalar(exp(-T)));
		}
	} // namespace

	VectorXc ManufacturedProblem::forcing(double t) const
	{
		const VectorXc u = exact(t);
		VectorXc F = exact_dt(t) + A->apply(t, u);
		if (B)
			F -= B->evaluate(t, u);
		return F;
	}

	std::shared_ptr<const NonlinearTerm<Complex>> ManufacturedProblem::explicit_term() const
	{
		if (linear_mode())
			return std::make_shared<ZeroTerm<Complex>>();
		return std::make_shared<ForcedTerm>(*this);
	}

	std::function<VectorXc(const double &)> ManufacturedProblem::implicit_source() const
	{
		if (!linear_mode())
			return {};
		auto self = *this;
		return [self](const double &t) { return self.forcing(t); };
	}

	double ManufacturedProblem::residual(double t) const
	{
		const VectorXc u = exact(t);
		VectorXc r = exact_dt(t) + A->apply(t, u) - forcing(t);
		if (B)
			r -= B->evaluate(t, u);
		return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
	}

	ManufacturedProblem make_manufactured(std::string name, const Grid &grid, const AssembledProblem &ops,
										  const Expression &u, bool linear_mode)
	{
		if (!ops.A)
			throw ConfigurationError("manufactured problem needs a linear operator");
		if (ops.A->size() != grid.size())
			throw ConfigurationError("operator size does not match the grid");
		ManufacturedProblem p{std::move(name), grid, ops.A, linear_mode ? nullptr : ops.B, {}, {}};
		const std::vector<Point> nodes = grid.nodes();
		auto sampler = [nodes](Expression e) {
			return [nodes, e](double t) {
				VectorXc v(static_cast<Eigen::Index>(nodes.size()));
				for (std::size_t i = 0; i < nodes.size(); ++i)
					v(static_cast<Eigen::Index>(i)) = e(at(nodes[i], t));
				return v;
			};
		};
		p.exact = sampler(u);
		p.exact_dt = sampler(u.derivative(Expression::Variable::T));
		return p;
	}

	ManufacturedProblem manufactured_example1(const Grid &grid, const Expression &a, const Expression &b,
											  const Expression &u, bool linear_mode)
	{
		CoefficientFn af = [a](const Point &x, double t) { return a(at(x, t)); };
		CoefficientFn bf = [b](const Point &x, double t) { return b(at(x, t)); };
		Nonlinearity nl;
		nl.f = [](Complex v, const Gradient &, const Point &, double) { return -v * v * v; };
		nl.g = [](Complex v, const Gradient &, const Point &, double) { return Gradient{std::exp(v), 0.0}; };
		const bool autonomous = a.independent_of(Expression::Variable::T) && b.independent_of(Expression::Variable::T);
		return make_manufactured("example1", grid, assemble_example1(grid, af, bf, nl, autonomous), u, linear_mode);
	}

	ManufacturedProblem manufactured_example3(const Grid &grid, const Expression &u)
	{
		return make_manufactured("example3", grid, assemble_example3(grid, [](Complex v) { return std::exp(v) - 1.0; }), u,
								 false);
	}

	ManufacturedProblem manufactured_example4(const Grid &grid, const Expression &u)
	{
		return make_manufactured("example4", grid, assemble_example4(grid, [](Complex v) { return v * v * v - v; }), u,
								 false);
	}

	FitResult fit_order(std::span<const double> tau, std::span<const double> error)
	{
		if (tau.size() != error.size())
			throw DomainError("fit_order needs as many errors as step sizes");
		FitResult r;
		std::vector<double> x, y;
		for (std::size_t i = 0; i < tau.size(); ++i)
		{
			if (!(error[i] > 0.0) || !std::isfinite(error[i]) || !(tau[i] > 0.0))
			{
				++r.excluded;
				continue;
			}
			x.push_back(std::log(tau[i]));
			y.push_back(std::log(error[i]));
		}
		if (x.size() < 3)
			throw ComputationError("order fit needs at least three positive errors");
		const double n = static_cast<double>(x.size());
		double mx = 0.0, my = 0.0;
		for (std::size_t i = 0; i < x.size(); ++i)
		{
			mx += x[i];
			my += y[i];
		}
		mx /= n;
		my /= n;
		double sxx = 0.0, sxy = 0.0;
		for (std::size_t i = 0; i < x.size(); ++i)
		{
			sxx += (x[i] - mx) * (x[i] - mx);
			sxy += (x[i] - mx) * (y[i] - my);
		}
		if (sxx == 0.0)
			throw ComputationError("order fit needs distinct step sizes");
		r.slope = sxy / sxx;
		r.intercept = my - r.slope * mx;
		double ss = 0.0;
		for (std::size_t i = 0; i < x.size(); ++i)
		{
			const double e = y[i] - (r.intercept + r.slope * x[i]);
			ss += e * e;
		}
		r.residual = std::sqrt(ss / n);
		r.used = static_cast<int>(x.size());
		return r;
	}

	ConsistencyReport consistency_errors(const ManufacturedProblem &problem, const BdfScheme &scheme, double tau, int N,
										 const NormSum &norm, bool keep_defects)
	{
		const int k = scheme.k();
		if (!(tau > 0.0))
			throw DomainError("step size must be positive");
		if (N < k)
			throw DomainError("number of steps must be at least k");
		const auto &delta = scheme.delta_f();
		const auto &gamma = scheme.gamma_f();
		const auto explicit_term = problem.explicit_term();
		const auto source = problem.implicit_source();

		ConsistencyReport rep;
		rep.tau = tau;
		rep.steps = N;
		std::deque<VectorXc> u;	 // u(t_{n-k}) .. u(t_n)
		std::deque<VectorXc> bx; // explicit term at t_{n-k} .. t_{n-1}
		for (int m = 0; m < k; ++m)
		{
			u.push_back(problem.exact(m * tau));
			bx.push_back(explicit_term->evaluate(m * tau, u.back()));
		}
		for (int n = k; n <= N; ++n)
		{
			const double t = n * tau;
			u.push_back(problem.exact(t));
			VectorXc d = problem.A->apply(t, u.back());
			for (int i = 0; i <= k; ++i)
				d += (delta[i] / tau) * u[k - i];
			for (int i = 0; i < k; ++i)
				d -= gamma[i] * bx[k - 1 - i];
			if (source)
				d -= source(t);
			const double nd = spatial_norm(d, norm, problem.grid);
			rep.norms.push_back(nd);
			rep.max_norm = std::max(rep.max_norm, nd);
			if (keep_defects)
				rep.defects.push_back(std::move(d));
			bx.push_back(explicit_term->evaluate(t, u.back()));
			bx.pop_front();
			u.pop_front();
		}
		return rep;
	}

	bool ConvergenceReport::passed(double tolerance) const
	{
		return !norms.empty() && norms.front().max_fit && norms.front().max_fit->slope >= k - tolerance;
	}

	std::vector<double> tau_ladder(double tau0, int levels)
	{
		if (!(tau0 > 0.0) || levels < 1)
			throw DomainError("tau ladder needs tau0 > 0 and at least one level");
		std::vector<double> taus;
		for (int j = 0; j < levels; ++j)
			taus.push_back(std::ldexp(tau0, -j));
		return taus;
	}

	ConvergenceReport convergence_study(const ManufacturedProblem &problem, const BdfScheme &scheme,
										const std::vector<double> &taus, double final_time, const std::vector<NormSum> &norms,
										const StudyOptions &options)
	{
		if (taus.empty())
			throw DomainError("convergence study needs at least one step size");
		for (std::size_t i = 1; i < taus.size(); ++i)
			if (!(taus[i] < taus[i - 1]))
				throw DomainError("step sizes must be strictly decreasing");
		if (norms.empty())
			throw DomainError("convergence study needs at least one norm");

		const int L = static_cast<int>(taus.size());
		const int M = static_cast<int>(norms.size());
		ConvergenceReport rep;
		rep.problem = problem.name;
		rep.k = scheme.k();
		rep.final_time = final_time;
		rep.p = options.p;
		rep.fit_points = options.fit_points;
		rep.levels.resize(L);
		rep.norms.resize(M);
		for (int m = 0; m < M; ++m)
		{
			rep.norms[m].norm = norms[m].to_string();
			rep.norms[m].max_error.assign(L, 0.0);
			rep.norms[m].lp_error.assign(L, 0.0);
			rep.norms[m].dq_error.assign(L, 0.0);
		}
		std::vector<int> steps(L);
		for (int l = 0; l < L; ++l)
			steps[l] = steps_for(taus[l], final_time);

		const auto explicit_term = problem.explicit_term();
		const auto source = problem.implicit_source();

		parallel_for(L, options.threads, [&](int l) {
			const double tau = taus[l];
			std::vector<double> emax(M, 0.0);
			std::vector<CompensatedSum> elp(M), dqlp(M);
			VectorXc previous;
			StepOptions<Complex> opts;
			opts.keep_states = false;
			opts.implicit_source = source;
			opts.observer = [&](int n, const double &t, const VectorXc &u) {
				VectorXc e = u - problem.exact(t);
				for (int m = 0; m < M; ++m)
				{
					const double en = spatial_norm(e, norms[m], problem.grid);
					emax[m] = std::max(emax[m], en);
					if (n > 0)
					{
						elp[m].add(std::pow(en, options.p));
						dqlp[m].add(std::pow(spatial_norm((e - previous) / tau, norms[m], problem.grid), options.p));
					}
				}
				previous = std::move(e);
			};
			const auto start = make_starting_values<Complex>(problem.exact, scheme, tau);
			const auto traj = run<Complex>(scheme, *problem.A, *explicit_term, start, tau, steps[l], opts);
			rep.levels[l].tau = tau;
			rep.levels[l].steps = steps[l];
			rep.levels[l].blow_up = traj.blow_up;
			for (int m = 0; m < M; ++m)
			{
				rep.norms[m].max_error[l] = emax[m];
				rep.norms[m].lp_error[l] = std::pow(tau * elp[m].value(), 1.0 / options.p);
				rep.norms[m].dq_error[l] = std::pow(tau * dqlp[m].value(), 1.0 / options.p);
			}
		});

		// fit on the finest stable levels
		std::vector<int> use;
		for (int l = L - 1; l >= 0 && static_cast<int>(use.size()) < options.fit_points; --l)
			if (rep.levels[l].stable())
				use.insert(use.begin(), l);
		auto fit = [&](const std::vector<double> &err) -> std::optional<FitResult> {
			std::vector<double> t, e;
			for (int l : use)
			{
				t.push_back(taus[l]);
				e.push_back(err[l]);
			}
			try
			{
				return fit_order(t, e);
			}
			catch (const ComputationError &)
			{
				return std::nullopt;
			}
		};
		for (auto &nc : rep.norms)
		{
			nc.max_fit = fit(nc.max_error);
			nc.lp_fit = fit(nc.lp_error);
			nc.dq_fit = fit(nc.dq_error);
		}
		return rep;
	}

	ScalarStudy scalar_convergence_study(int k, const std::vector<double> &taus, double final_time, Precision precision,
										 int fit_points)
	{
		const BdfScheme scheme(k);
		ScalarStudy s;
		s.k = k;
		s.taus = taus;
		for (double tau : taus)
		{
			const int N = steps_for(tau, final_time);
			if (precision == Precision::Quad)
				s.errors.push_back(static_cast<double>(decay_error<boost::multiprecision::cpp_complex_quad>(k, N, final_time)));
			else
				s.errors.push_back(decay_error<Complex>(k, N, final_time));
		}
		const std::size_t first = taus.size() > static_cast<std::size_t>(fit_points) ? taus.size() - fit_points : 0;
		s.fit = fit_order(std::span(s.taus).subspan(first), std::span(s.errors).subspan(first));
		return s;
	}

	bool ThresholdReport::brackets() const
	{
		return largest_stable && smallest_unstable && *largest_stable < tan_alpha && tan_alpha < *smallest_unstable;
	}

	double ThresholdReport::bracket_width() const
	{
		if (!largest_stable || !smallest_unstable)
			return std::numeric_limits<double>::infinity();
		return *smallest_unstable - *largest_stable;
	}

	std::vector<double> default_threshold_ratios(const BdfScheme &scheme)
	{
		const double t = std::tan(deg_to_rad(a_alpha_angle(scheme)));
		std::vector<double> r;
		for (double f : {0.5, 0.8, 0.92, 1.08, 1.2, 1.5})
			r.push_back(f * t);
		return r;
	}

	ThresholdReport threshold_experiment(const BdfScheme &scheme, const std::vector<double> &ratios,
										 const ThresholdSetup &setup)
	{
		if (ratios.empty())
			throw DomainError("threshold experiment needs at least one ratio");
		if (setup.taus.empty() || setup.steps < scheme.k())
			throw DomainError("threshold experiment needs step sizes and at least k steps");
		ThresholdReport rep;
		rep.k = scheme.k();
		const double alpha = a_alpha_angle(scheme);
		rep.tan_alpha = alpha >= 90.0 ? std::numeric_limits<double>::infinity() : std::tan(deg_to_rad(alpha));

		const Grid grid = Grid::line(0.0, 1.0, setup.points, Boundary::Dirichlet);
		std::mt19937_64 rng(setup.seed);
		std::normal_distribution<double> nd;
		std::vector<VectorXc> start;
		for (int j = 0; j < scheme.k(); ++j)
		{
			VectorXc v(grid.size());
			for (auto &z : v)
				z = {nd(rng), nd(rng)};
			start.push_back(std::move(v));
		}

		const int R = static_cast<int>(ratios.size());
		const int T = static_cast<int>(setup.taus.size());
		std::vector<std::optional<int>> blow(static_cast<std::size_t>(R) * T);
		parallel_for(R * T, setup.threads, [&](int job) {
			const double ratio = ratios[job / T];
			const double tau = setup.taus[job % T];
			auto A = assemble_diffusion(
				grid, [](const Point &, double) { return 1.0; }, [ratio](const Point &, double) { return ratio; }, true);
			ZeroTerm<Complex> B;
			StepOptions<Complex> opts;
			opts.keep_states = false;
			blow[job] = run<Complex>(scheme, *A, B, start, tau, setup.steps, opts).blow_up;
		});

		for (int r = 0; r < R; ++r)
		{
			ThresholdRow row;
			row.ratio = ratios[r];
			for (int j = 0; j < T; ++j)
				if (const auto &b = blow[r * T + j]; b && (!row.blow_up || *b < *row.blow_up))
				{
					row.blow_up = b;
					row.blow_up_tau = setup.taus[j];
				}
			row.bounded = !row.blow_up;
			if (row.bounded && (!rep.largest_stable || row.ratio > *rep.largest_stable))
				rep.largest_stable = row.ratio;
			if (!row.bounded && (!rep.smallest_unstable || row.ratio < *rep.smallest_unstable))
				rep.smallest_unstable = row.ratio;
			rep.rows.push_back(row);
		}
		return rep;
	}
} // namespace imexbdf
