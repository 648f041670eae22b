#pragma once

#include <imexbdf/bdf_coeffs.hpp>
#include <imexbdf/errors.hpp>
#include <imexbdf/operators.hpp>

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

namespace imexbdf
{
	struct StepDiagnostics
	{
		int n = 0;
		/// ||(delta_0/tau) u_n + A(t_n) u_n - rhs||_2 / (||rhs||_2 + ||(delta_0/tau) u_n||_2), NaN unless requested.
		double relative_residual = std::numeric_limits<double>::quiet_NaN();
	};

	template <typename Scalar>
	struct StepOptions
	{
		using Real = RealOf<Scalar>;
		using Vector = StateVector<Scalar>;

		/// Blow-up is flagged once ||u_n||_inf > divergence_factor * (1 + ||u_{k-1}||_inf).
		double divergence_factor = 1e8;
		/// Source S(t_n) added to the right-hand side at the implicit time level.
		std::function<Vector(const Real &t)> implicit_source;
		bool check_residual = false;
		/// When false only the most recent state is kept in the trajectory.
		bool keep_states = true;
		/// Called with (n, t_n, u_n) for every state, starting values included.
		std::function<void(int, const Real &, const Vector &)> observer;
	};

	template <typename Scalar>
	struct Trajectory
	{
		using Real = RealOf<Scalar>;
		using Vector = StateVector<Scalar>;

		Real tau{};
		std::vector<Real> times;
		std::vector<Vector> states;
		/// Index of the first state whose max-norm exceeded the divergence threshold.
		std::optional<int> blow_up;
		std::vector<StepDiagnostics> diagnostics;
		/// Index of the last computed state.
		int last_index = -1;
		Vector last_state;
	};

	namespace detail
	{
		template <typename Scalar>
		RealOf<Scalar> max_norm(const StateVector<Scalar> &v)
		{
			using std::abs;
			RealOf<Scalar> m(0);
			for (Eigen::Index i = 0; i < v.size(); ++i)
			{
				const RealOf<Scalar> a = abs(v(i));
				if (a > m)
					m = a;
			}
			return m;
		}

		template <typename Scalar>
		bool all_finite(const StateVector<Scalar> &v)
		{
			using std::imag;
			using std::isfinite;
			using std::real;
			for (Eigen::Index i = 0; i < v.size(); ++i)
				if (!isfinite(real(v(i))) || !isfinite(imag(v(i))))
					return false;
			return true;
		}

		template <typename Scalar>
		struct Coefficients
		{
			explicit Coefficients(const BdfScheme &scheme)
				: k(scheme.k()), delta(scheme.delta_as<RealOf<Scalar>>()), gamma(scheme.gamma_as<RealOf<Scalar>>())
			{
			}
			int k;
			std::vector<RealOf<Scalar>> delta;
			std::vector<RealOf<Scalar>> gamma;
		};

		/// One step of the recursion. history[j] = u_{n-k+j}, b_values[j] = B(t_{n-k+j}, u_{n-k+j}).
		template <typename Scalar>
		StateVector<Scalar> step(const Coefficients<Scalar> &c, const LinearOperator<Scalar> &A,
								 std::span<const StateVector<Scalar>> history, std::span<const StateVector<Scalar>> b_values,
								 const RealOf<Scalar> &t_n, const RealOf<Scalar> &tau, const StepOptions<Scalar> &options,
								 int n, StepDiagnostics *diag)
		{
			using Real = RealOf<Scalar>;
			using Vector = StateVector<Scalar>;
			const int k = c.k;
			if (static_cast<int>(history.size()) != k || static_cast<int>(b_values.size()) != k)
				throw DomainError("history must hold exactly k states");
			for (const auto &h : history)
				if (!all_finite<Scalar>(h))
					throw StepError("non-finite value in the step history", n);

			const Eigen::Index size = history[k - 1].size();
			Vector rhs = Vector::Zero(size);
			for (int i = 0; i < k; ++i)
				rhs += Scalar(c.gamma[i]) * b_values[k - 1 - i];
			const Real inv_tau = Real(1) / tau;
			for (int i = 1; i <= k; ++i)
				rhs -= Scalar(c.delta[i] * inv_tau) * history[k - i];
			if (options.implicit_source)
				rhs += options.implicit_source(t_n);

			const Real sigma = c.delta[0] * inv_tau;
			Vector u;
			try
			{
				u = A.shifted_solve(t_n, sigma, rhs);
			}
			catch (const std::exception &e)
			{
				std::ostringstream msg;
				msg << "linear solve failed at step " << n << ": " << e.what();
				throw StepError(msg.str(), n);
			}
			if (diag)
			{
				diag->n = n;
				if (options.check_residual)
				{
					const Vector shifted = Scalar(sigma) * u;
					const Vector res = shifted + A.apply(t_n, u) - rhs;
					const Real scale = rhs.norm() + shifted.norm();
					diag->relative_residual = scale > Real(0) ? static_cast<double>(Real(res.norm() / scale)) : 0.0;
				}
			}
			return u;
		}
	} // namespace detail

	/// Advances one step: solves (delta_0/tau) u_n + A(t_n) u_n
	///   = sum_{i<k} gamma_i B(t_{n-i-1}, u_{n-i-1}) - (1/tau) sum_{i=1}^k delta_i u_{n-i}.
	/// history holds u_{n-k}, ..., u_{n-1} (oldest first).
	template <typename Scalar>
	StateVector<Scalar> imex_step(const BdfScheme &scheme, const LinearOperator<Scalar> &A, const NonlinearTerm<Scalar> &B,
								  std::span<const StateVector<Scalar>> history, const RealOf<Scalar> &t_n,
								  const RealOf<Scalar> &tau, const StepOptions<Scalar> &options = {})
	{
		const int k = scheme.k();
		if (!(tau > RealOf<Scalar>(0)))
			throw DomainError("step size must be positive");
		if (static_cast<int>(history.size()) != k)
			throw DomainError("history must hold exactly k states");
		std::vector<StateVector<Scalar>> b;
		for (int j = 0; j < k; ++j)
			b.push_back(B.evaluate(t_n - RealOf<Scalar>(k - j) * tau, history[j]));
		return detail::step<Scalar>(detail::Coefficients<Scalar>(scheme), A, history, b, t_n, tau, options, 0, nullptr);
	}

	/// Runs the recursion for n = k..N from the starting values u_0..u_{k-1}.
	template <typename Scalar>
	Trajectory<Scalar> run(const BdfScheme &scheme, const LinearOperator<Scalar> &A, const NonlinearTerm<Scalar> &B,
						   const std::vector<StateVector<Scalar>> &starting, const RealOf<Scalar> &tau, int N,
						   const StepOptions<Scalar> &options = {})
	{
		using Real = RealOf<Scalar>;
		using Vector = StateVector<Scalar>;
		const int k = scheme.k();
		if (static_cast<int>(starting.size()) != k)
			throw DomainError("run needs exactly k starting states");
		if (N < k)
			throw DomainError("number of steps must be at least k");
		if (!(tau > Real(0)))
			throw DomainError("step size must be positive");

		const detail::Coefficients<Scalar> coeffs(scheme);
		Trajectory<Scalar> traj;
		traj.tau = tau;

		std::deque<Vector> history;
		std::deque<Vector> b_values;
		auto record = [&](int n, const Vector &u) {
			const Real t = Real(n) * tau;
			if (options.keep_states)
			{
				traj.times.push_back(t);
				traj.states.push_back(u);
			}
			traj.last_index = n;
			traj.last_state = u;
			if (options.observer)
				options.observer(n, t, u);
		};

		for (int n = 0; n < k; ++n)
		{
			const Vector &u = starting[n];
			if (!detail::all_finite<Scalar>(u))
				throw StepError("non-finite starting value", n);
			if (u.size() != A.size())
				throw DomainError("starting value has the wrong size");
			history.push_back(u);
			b_values.push_back(B.evaluate(Real(n) * tau, u));
			record(n, u);
		}

		const Real threshold = Real(options.divergence_factor) * (Real(1) + detail::max_norm<Scalar>(starting[k - 1]));
		std::vector<Vector> h(k), b(k);
		for (int n = k; n <= N; ++n)
		{
			for (int j = 0; j < k; ++j)
			{
				h[j] = history[j];
				b[j] = b_values[j];
			}
			const Real t_n = Real(n) * tau;
			StepDiagnostics diag;
			Vector u = detail::step<Scalar>(coeffs, A, h, b, t_n, tau, options, n, &diag);
			traj.diagnostics.push_back(diag);

			const bool finite = detail::all_finite<Scalar>(u);
			if (!finite || detail::max_norm<Scalar>(u) > threshold)
			{
				traj.blow_up = n;
				if (finite)
					record(n, u);
				break;
			}
			record(n, u);
			if (n == N)
				break;
			history.pop_front();
			b_values.pop_front();
			b_values.push_back(B.evaluate(t_n, u));
			history.push_back(std::move(u));
		}
		return traj;
	}

	/// Exact starting values u(t_0), ..., u(t_{k-1}) from a nodal evaluator.
	template <typename Scalar>
	std::vector<StateVector<Scalar>> make_starting_values(const std::function<StateVector<Scalar>(const RealOf<Scalar> &)> &exact,
														  const BdfScheme &scheme, const RealOf<Scalar> &tau)
	{
		std::vector<StateVector<Scalar>> out;
		for (int n = 0; n < scheme.k(); ++n)
			out.push_back(exact(RealOf<Scalar>(n) * tau));
		return out;
	}

	/// Number of substeps per step used by bootstrap_starting_values.
	int bootstrap_substeps(int k, double tau, int max_substeps = 10000);

	/// Starting values u_1..u_{k-1} for problems without a known solution. The interval
	/// [0, (k-1) tau] is covered with substeps tau/M, M = bootstrap_substeps(k, tau), using the
	/// IMEX BDF schemes of increasing order 1, 2, ..., k (one step each, then order k).
	/// The leading error is that of the first backward Euler step, O((tau/M)^2) = O(tau^(k+1)).
	template <typename Scalar>
	std::vector<StateVector<Scalar>> bootstrap_starting_values(const BdfScheme &scheme, const LinearOperator<Scalar> &A,
															   const NonlinearTerm<Scalar> &B, const StateVector<Scalar> &u0,
															   const RealOf<Scalar> &tau, const StepOptions<Scalar> &options = {},
															   int max_substeps = 10000)
	{
		using Real = RealOf<Scalar>;
		using Vector = StateVector<Scalar>;
		const int k = scheme.k();
		std::vector<Vector> out{u0};
		if (k == 1)
			return out;
		const int M = bootstrap_substeps(k, static_cast<double>(tau), max_substeps);
		const Real tau_s = tau / Real(M);

		std::vector<detail::Coefficients<Scalar>> ramp;
		for (int j = 1; j <= k; ++j)
			ramp.emplace_back(BdfScheme(j));

		std::deque<Vector> history{u0};
		std::deque<Vector> b_values{B.evaluate(Real(0), u0)};
		const int total = (k - 1) * M;
		for (int m = 1; m <= total; ++m)
		{
			const int order = std::min(m, k);
			const auto &c = ramp[order - 1];
			std::vector<Vector> h(history.end() - order, history.end());
			std::vector<Vector> b(b_values.end() - order, b_values.end());
			const Real t = Real(m) * tau_s;
			Vector u = detail::step<Scalar>(c, A, h, b, t, tau_s, options, m, nullptr);
			if (!detail::all_finite<Scalar>(u))
				throw StepError("bootstrap produced non-finite values", m);
			if (m % M == 0)
				out.push_back(u);
			b_values.push_back(B.evaluate(t, u));
			history.push_back(std::move(u));
			if (static_cast<int>(history.size()) > k)
			{
				history.pop_front();
				b_values.pop_front();
			}
		}
		return out;
	}
} // namespace imexbdf
