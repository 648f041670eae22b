#include <doctest.h>

#include <imexbdf/imex_stepper.hpp>
#include <imexbdf/stability.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace imexbdf;

namespace
{
	using Vec1 = StateVector<double>;

	Vec1 scalar(double v) { return Vec1::Constant(1, v); }

	std::shared_ptr<DiagonalOperator<double>> scalar_op(double a) { return std::make_shared<DiagonalOperator<double>>(scalar(a)); }

	VectorXc random_state(int n, std::mt19937_64 &rng)
	{
		std::normal_distribution<double> nd;
		VectorXc v(n);
		for (auto &z : v)
			z = {nd(rng), nd(rng)};
		return v;
	}

	/// Error at T = 1 of u' = -u with exact starting values.
	template <typename Scalar>
	RealOf<Scalar> decay_error(int k, int N)
	{
		using Real = RealOf<Scalar>;
		using std::exp;
		const Real tau = Real(1) / Real(N);
		DiagonalOperator<Scalar> A(StateVector<Scalar>::Constant(1, Scalar(1)));
		ZeroTerm<Scalar> B;
		const BdfScheme scheme(k);
		auto exact = [](const Real &t) { return StateVector<Scalar>::Constant(1, Scalar(exp(-t))); };
		auto traj = run<Scalar>(scheme, A, B, make_starting_values<Scalar>(exact, scheme, tau), tau, N);
		using std::abs;
		return abs(traj.last_state(0) - Scalar(exp(Real(-1))));
	}
} // namespace

TEST_CASE("backward Euler on the scalar decay equation")
{
	const double sigma0 = 3.0, tau = 0.1;
	const auto A = scalar_op(sigma0);
	ZeroTerm<double> B;
	const std::vector<Vec1> hist{scalar(1.0)};
	const Vec1 u1 = imex_step<double>(BdfScheme(1), *A, B, hist, tau, tau);
	CHECK(u1(0) == doctest::Approx(1.0 / (1.0 + tau * sigma0)).epsilon(1e-15));
}

TEST_CASE("two-step recurrence by hand")
{
	const double tau = 0.1;
	const auto A = scalar_op(1.0);
	ZeroTerm<double> B;
	const double u0 = 1.0, u1 = 1.0 / 1.1;
	const std::vector<Vec1> hist{scalar(u0), scalar(u1)};
	const Vec1 u2 = imex_step<double>(BdfScheme(2), *A, B, hist, 2 * tau, tau);
	// (3/2 u2 - 2 u1 + u0/2)/tau + u2 = 0
	CHECK(u2(0) == doctest::Approx((2 * u1 - u0 / 2) / (1.5 + 0.1)).epsilon(1e-14));
}

TEST_CASE("explicit part alone is forward Euler")
{
	const double tau = 0.05;
	const auto A = scalar_op(0.0);
	FunctionTerm<double> B([](const double &t, const Vec1 &v) { return Vec1(-2.0 * v.array() + t); });
	auto traj = run<double>(BdfScheme(1), *A, B, {scalar(1.0)}, tau, 20);
	for (int n = 1; n <= 20; ++n)
	{
		const double prev = traj.states[n - 1](0);
		CHECK(traj.states[n](0) == doctest::Approx(prev + tau * (-2.0 * prev + (n - 1) * tau)).epsilon(1e-14));
	}
}

TEST_CASE("zero data stays zero and times are uniform")
{
	const Grid g = Grid::line(0.0, 1.0, 20, Boundary::Dirichlet);
	const auto p = assemble_example1(
		g, [](const Point &, double) { return 1.0; }, [](const Point &, double) { return 0.5; });
	for (int k = 1; k <= 6; ++k)
	{
		std::vector<VectorXc> start(k, VectorXc::Zero(g.size()));
		auto traj = run<Complex>(BdfScheme(k), *p.A, *p.B, start, 0.01, 30);
		CHECK(traj.states.size() == 31u);
		CHECK_FALSE(traj.blow_up);
		for (std::size_t n = 0; n < traj.states.size(); ++n)
		{
			CHECK(traj.states[n].norm() == 0.0);
			CHECK(traj.times[n] == static_cast<double>(n) * 0.01);
		}
	}
}

TEST_CASE("rotated scalar test equation agrees with the root test")
{
	std::vector<double> rho = log_spaced(1e-3, 1e3, 61);
	for (int k = 3; k <= 6; ++k)
	{
		CAPTURE(k);
		const BdfScheme scheme(k);
		const double alpha = deg_to_rad(a_alpha_angle(scheme));
		const double tau = 1.0;
		{
			const double phi = alpha - deg_to_rad(1.0);
			for (double r : {1e-2, 1.0, 1e2})
			{
				DiagonalOperator<Complex> A(VectorXc::Constant(1, std::polar(r, phi)));
				ZeroTerm<Complex> B;
				std::vector<VectorXc> start(k, VectorXc::Ones(1));
				auto traj = run<Complex>(scheme, A, B, start, tau, 4000, {.keep_states = false});
				CHECK_FALSE(traj.blow_up);
			}
		}
		{
			const double phi = alpha + deg_to_rad(1.0);
			const auto sweep = von_neumann_sweep(scheme, phi, rho, tau);
			int unstable = -1;
			double worst = 1.0;
			for (std::size_t j = 0; j < rho.size(); ++j)
				if (!sweep.stable[j] && sweep.max_root_modulus[j] > worst)
				{
					worst = sweep.max_root_modulus[j];
					unstable = static_cast<int>(j);
				}
			REQUIRE(unstable >= 0);
			DiagonalOperator<Complex> A(VectorXc::Constant(1, std::polar(rho[unstable], phi)));
			ZeroTerm<Complex> B;
			std::vector<VectorXc> start;
			for (int j = 0; j < k; ++j)
				start.push_back(VectorXc::Constant(1, std::polar(1.0, 0.3 * j)));
			auto traj = run<Complex>(scheme, A, B, start, tau, 200000, {.keep_states = false});
			CHECK(traj.blow_up);
		}
	}
}

TEST_CASE("linearity for affine explicit terms")
{
	std::mt19937_64 rng(23);
	const Grid g = Grid::line(0.0, 1.0, 30, Boundary::Dirichlet);
	const auto A = assemble_diffusion(
		g, [](const Point &x, double t) { return 1.0 + x[0] * t; }, [](const Point &, double) { return 0.4; }, false);
	const Eigen::MatrixXcd M = Eigen::MatrixXcd::Random(g.size(), g.size()) * 0.5;
	const VectorXc f1 = random_state(g.size(), rng), f2 = random_state(g.size(), rng);
	auto term = [&](const VectorXc &f) {
		return FunctionTerm<Complex>([&M, f](const double &t, const VectorXc &v) { return VectorXc(M * v + std::cos(t) * f); });
	};
	const int k = 4;
	std::vector<VectorXc> s1, s2, s12;
	const Complex alpha(0.3, 2.0);
	for (int j = 0; j < k; ++j)
	{
		s1.push_back(random_state(g.size(), rng));
		s2.push_back(random_state(g.size(), rng));
		s12.push_back(alpha * s1.back() + s2.back());
	}
	const VectorXc f12 = alpha * f1 + f2;
	const auto B1 = term(f1), B2 = term(f2), B12 = term(f12);
	const auto t1 = run<Complex>(BdfScheme(k), *A, B1, s1, 0.01, 100);
	const auto t2 = run<Complex>(BdfScheme(k), *A, B2, s2, 0.01, 100);
	const auto t12 = run<Complex>(BdfScheme(k), *A, B12, s12, 0.01, 100);
	for (int n = 0; n <= 100; ++n)
	{
		const VectorXc combo = alpha * t1.states[n] + t2.states[n];
		CHECK((t12.states[n] - combo).norm() <= 1e-11 * (1.0 + combo.norm()));
	}
}

TEST_CASE("each step satisfies the scheme to solver precision")
{
	std::mt19937_64 rng(29);
	const Grid g = Grid::line(0.0, 1.0, 100, Boundary::Dirichlet);
	Nonlinearity nl;
	nl.f = [](Complex u, const Gradient &, const Point &, double) { return -u * u * u; };
	nl.g = [](Complex u, const Gradient &, const Point &, double) { return Gradient{std::exp(u), 0.0}; };
	const auto p = assemble_example1(
		g, [](const Point &x, double t) { return 1.0 + 0.5 * std::sin(x[0]) * std::cos(t); },
		[](const Point &x, double t) { return 0.15 * (2.0 + std::sin(x[0]) * std::cos(t)); }, nl);
	for (int k = 1; k <= 6; ++k)
	{
		std::vector<VectorXc> start;
		for (int j = 0; j < k; ++j)
			start.push_back(0.1 * random_state(g.size(), rng));
		auto traj = run<Complex>(BdfScheme(k), *p.A, *p.B, start, 1e-3, 50, {.check_residual = true});
		for (const auto &d : traj.diagnostics)
			CHECK(d.relative_residual <= 1e-10);

		// independent recomputation of the defining equation at the last step
		const BdfScheme scheme(k);
		const int N = 50;
		const double tau = 1e-3;
		VectorXc lhs = p.A->apply(N * tau, traj.states[N]);
		VectorXc rhs = VectorXc::Zero(g.size());
		for (int i = 0; i <= k; ++i)
			lhs += scheme.delta_f()[i] / tau * traj.states[N - i];
		for (int i = 0; i < k; ++i)
			rhs += scheme.gamma_f()[i] * p.B->evaluate((N - i - 1) * tau, traj.states[N - i - 1]);
		CHECK((lhs - rhs).norm() <= 1e-10 * (rhs.norm() + traj.states[N].norm() / tau));
	}
}

TEST_CASE("backward Euler contracts for Hermitian positive operators")
{
	std::mt19937_64 rng(31);
	const Grid g = Grid::line(0.0, 1.0, 60, Boundary::Dirichlet);
	const auto A = assemble_diffusion(
		g, [](const Point &x, double) { return 0.5 + x[0]; }, {}, true);
	ZeroTerm<Complex> B;
	auto traj = run<Complex>(BdfScheme(1), *A, B, {random_state(g.size(), rng)}, 1e-3, 200);
	for (std::size_t n = 1; n < traj.states.size(); ++n)
		CHECK(traj.states[n].norm() <= traj.states[n - 1].norm() * (1 + 1e-14));
}

TEST_CASE("decay equation converges at order k in double precision")
{
	for (int k = 1; k <= 4; ++k)
	{
		CAPTURE(k);
		const double e1 = decay_error<double>(k, 80), e2 = decay_error<double>(k, 160);
		CHECK(std::log2(e1 / e2) == doctest::Approx(k).epsilon(0.05));
	}
}

TEST_CASE("quad precision resolves the six-step order")
{
	using Q = boost::multiprecision::cpp_complex_quad;
	const auto e1 = decay_error<Q>(6, 160), e2 = decay_error<Q>(6, 320);
	const double ratio = static_cast<double>(log2(e1 / e2));
	CHECK(ratio == doctest::Approx(6.0).epsilon(0.02));
}

TEST_CASE("bootstrap starting values meet the accuracy target")
{
	for (int k = 2; k <= 5; ++k)
	{
		CAPTURE(k);
		const auto A = scalar_op(1.0);
		ZeroTerm<double> B;
		const BdfScheme scheme(k);
		double previous = 0.0;
		for (double tau : {0.1, 0.05})
		{
			const auto start = bootstrap_starting_values<double>(scheme, *A, B, scalar(1.0), tau);
			REQUIRE(start.size() == static_cast<std::size_t>(k));
			double err = 0.0;
			for (int j = 0; j < k; ++j)
				err = std::max(err, std::abs(start[j](0) - std::exp(-j * tau)));
			CHECK(err <= 2.0 * std::pow(tau, k + 1));
			if (previous > 0.0 && bootstrap_substeps(k, tau) < 10000)
				CHECK(previous / err >= 0.6 * std::pow(2.0, k + 1));
			previous = err;
		}
	}
	CHECK(bootstrap_substeps(1, 0.1) == 1);
	CHECK(bootstrap_substeps(3, 0.01) == 100);
	CHECK(bootstrap_substeps(6, 1e-3) == 10000);
}

TEST_CASE("invalid inputs")
{
	const auto A = scalar_op(1.0);
	ZeroTerm<double> B;
	CHECK_THROWS_AS(run<double>(BdfScheme(2), *A, B, {scalar(1.0)}, 0.1, 10), DomainError);
	CHECK_THROWS_AS(run<double>(BdfScheme(1), *A, B, {scalar(1.0)}, 0.0, 10), DomainError);
	CHECK_THROWS_AS(run<double>(BdfScheme(3), *A, B, {scalar(1), scalar(1), scalar(1)}, 0.1, 2), DomainError);
	const std::vector<Vec1> bad{scalar(1.0), scalar(std::nan(""))};
	CHECK_THROWS_AS(imex_step<double>(BdfScheme(2), *A, B, bad, 0.2, 0.1), StepError);
	CHECK_THROWS_AS(run<double>(BdfScheme(2), *A, B, bad, 0.1, 10), StepError);
}

TEST_CASE("divergence is flagged and states stop there")
{
	const auto A = scalar_op(0.0);
	FunctionTerm<double> B([](const double &, const Vec1 &v) { return Vec1(10.0 * v); });
	auto traj = run<double>(BdfScheme(1), *A, B, {scalar(1.0)}, 1.0, 1000);
	REQUIRE(traj.blow_up);
	CHECK(*traj.blow_up == 8); // 11^8 > 2e8 > 11^7
	CHECK(traj.states.size() == 9u);
	CHECK(traj.last_index == 8);
}
