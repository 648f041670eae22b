#include <doctest.h>

#include <imexbdf/errors.hpp>
#include <imexbdf/operators.hpp>
#include <imexbdf/stability.hpp>

#include <cmath>
#include <future>
#include <numbers>
#include <random>

using namespace imexbdf;
using std::numbers::pi;

namespace
{
	VectorXc sample(const Grid &g, const std::function<Complex(const Point &)> &fn)
	{
		VectorXc v(g.size());
		for (int i = 0; i < g.size(); ++i)
			v(i) = fn(g.node(i));
		return v;
	}

	VectorXc random_state(int n, std::mt19937_64 &rng)
	{
		std::normal_distribution<double> nd;
		VectorXc v(n);
		for (auto &z : v)
			z = {nd(rng), nd(rng)};
		return v;
	}

	const CoefficientFn one = [](const Point &, double) { return 1.0; };
	const CoefficientFn zero = [](const Point &, double) { return 0.0; };
} // namespace

TEST_CASE("finite difference sine mode is an eigenvector")
{
	const Grid g = Grid::line(0.0, 1.0, 63, Boundary::Dirichlet);
	const auto p = assemble_example1(g, one, zero);
	const VectorXc s = sample(g, [](const Point &x) { return Complex(std::sin(pi * x[0])); });
	const double h = g.h(0);
	const double lambda = 4.0 / (h * h) * std::pow(std::sin(pi * h / 2), 2);
	CHECK((p.A->apply(0.0, s) - lambda * s).norm() < 1e-9 * lambda * s.norm());
}

TEST_CASE("two dimensional eigenpair")
{
	const Grid g({{0.0, 1.0, 15}, {0.0, 2.0, 31}}, Boundary::Dirichlet);
	const auto p = assemble_example1(g, one, zero);
	const VectorXc s = sample(g, [](const Point &x) { return Complex(std::sin(pi * x[0]) * std::sin(pi * x[1])); });
	const double hx = g.h(0), hy = g.h(1);
	const double lambda =
		4.0 / (hx * hx) * std::pow(std::sin(pi * hx / 2), 2) + 4.0 / (hy * hy) * std::pow(std::sin(pi * hy / 2), 2);
	CHECK((p.A->apply(0.0, s) - lambda * s).norm() < 1e-9 * lambda * s.norm());
}

TEST_CASE("constant ratio b = c a gives lambda = sqrt(1 + c^2)")
{
	const Grid g = Grid::line(0.0, 1.0, 40, Boundary::Dirichlet);
	for (double c : {0.3, 1.0, 3.0})
	{
		CAPTURE(c);
		CoefficientFn a = [](const Point &x, double t) { return 1.0 + 0.5 * std::sin(x[0]) * std::cos(t); };
		CoefficientFn b = [a, c](const Point &x, double t) { return c * a(x, t); };
		const auto p = assemble_example1(g, a, b);
		CHECK(stability_constant(to_dense(*p.A, 0.4)) == doctest::Approx(std::sqrt(1 + c * c)).epsilon(1e-4));
	}
}

TEST_CASE("discrete stability constant is bounded by the coefficient bound")
{
	const Grid g = Grid::line(0.0, 2 * pi, 48, Boundary::Dirichlet);
	CoefficientFn a = [](const Point &x, double) { return 2.0 + std::sin(x[0]); };
	CoefficientFn b = [](const Point &x, double) { return std::cos(x[0]); };
	const auto p = assemble_example1(g, a, b, {}, true);
	// coefficients at the midpoints actually used by the stencil
	std::vector<double> av, bv;
	for (int i = -1; i < g.size(); ++i)
	{
		const Point m{g.axis(0).lo + (i + 1.5) * g.h(0), 0.0};
		av.push_back(a(m, 0));
		bv.push_back(b(m, 0));
	}
	const double bound = coefficient_lambda(av, bv).lambda;
	CHECK(stability_constant(to_dense(*p.A, 0.0)) <= bound + 1e-3);
}

TEST_CASE("zero nonlinearity evaluates to zero")
{
	const Grid g = Grid::line(0.0, 1.0, 16, Boundary::Dirichlet);
	const auto p = assemble_example1(g, one, zero);
	std::mt19937_64 rng(1);
	CHECK(p.B->evaluate(0.3, random_state(g.size(), rng)).norm() == 0.0);
}

TEST_CASE("example 1 divergence of the flux is second order")
{
	double previous = 0.0;
	for (int n : {63, 127, 255})
	{
		const Grid g = Grid::line(0.0, 1.0, n, Boundary::Dirichlet);
		Nonlinearity nl;
		nl.f = [](Complex u, const Gradient &, const Point &, double) { return -u * u * u; };
		nl.g = [](Complex u, const Gradient &, const Point &, double) { return Gradient{std::exp(u), 0.0}; };
		const auto p = assemble_example1(g, one, zero, nl);
		const VectorXc u = sample(g, [](const Point &x) { return Complex(std::sin(pi * x[0])); });
		const VectorXc exact = sample(g, [](const Point &x) {
			const double s = std::sin(pi * x[0]);
			return Complex(-s * s * s + pi * std::cos(pi * x[0]) * std::exp(s));
		});
		const double err = (p.B->evaluate(0.0, u) - exact).cwiseAbs().maxCoeff();
		if (previous > 0.0)
			CHECK(previous / err == doctest::Approx(4.0).epsilon(0.1));
		previous = err;
	}
}

TEST_CASE("example 2 gradient nonlinearities")
{
	Nonlinearity quartic;
	quartic.uses_gradient = true;
	quartic.f = [](Complex u, const Gradient &gr, const Point &, double) {
		const double s = std::norm(gr[0]) + std::norm(gr[1]);
		return -s * s * u;
	};

	SUBCASE("constant state on a periodic grid")
	{
		const Grid g = Grid::line(0.0, 2 * pi, 32, Boundary::Periodic);
		const auto p = assemble_example2(g, one, zero, quartic);
		CHECK(p.B->evaluate(0.0, VectorXc::Constant(g.size(), 0.7)).norm() == 0.0);
	}
	SUBCASE("identity source")
	{
		const Grid g = Grid::line(0.0, 1.0, 20, Boundary::Dirichlet);
		Nonlinearity id;
		id.f = [](Complex u, const Gradient &, const Point &, double) { return u; };
		const auto p = assemble_example2(g, one, zero, id);
		std::mt19937_64 rng(3);
		const VectorXc v = random_state(g.size(), rng);
		CHECK((p.B->evaluate(0.0, v) - v).norm() == 0.0);
	}
	SUBCASE("analytic value on sin x")
	{
		double previous = 0.0;
		for (int n : {64, 128, 256})
		{
			const Grid g = Grid::line(0.0, 2 * pi, n, Boundary::Periodic);
			const auto p = assemble_example2(g, one, zero, quartic);
			const VectorXc u = sample(g, [](const Point &x) { return Complex(std::sin(x[0])); });
			const VectorXc exact =
				sample(g, [](const Point &x) { return Complex(-std::pow(std::cos(x[0]), 4) * std::sin(x[0])); });
			const double err = (p.B->evaluate(0.0, u) - exact).cwiseAbs().maxCoeff();
			if (previous > 0.0)
				CHECK(previous / err == doctest::Approx(4.0).epsilon(0.05));
			previous = err;
		}
	}
	SUBCASE("flux of the gradient near Dirichlet boundaries")
	{
		double previous = 0.0;
		for (int n : {63, 127, 255})
		{
			const Grid g = Grid::line(0.0, 1.0, n, Boundary::Dirichlet);
			Nonlinearity flux;
			flux.uses_gradient = true;
			flux.g = [](Complex, const Gradient &gr, const Point &, double) { return gr; };
			const auto p = assemble_example2(g, one, zero, flux);
			const VectorXc u = sample(g, [](const Point &x) { return Complex(std::sin(pi * x[0])); });
			const double err = (p.B->evaluate(0.0, u) + pi * pi * u).cwiseAbs().maxCoeff();
			if (previous > 0.0)
				CHECK(previous / err == doctest::Approx(4.0).epsilon(0.1));
			previous = err;
		}
	}
}

TEST_CASE("example 3 spectral operator")
{
	const Grid g = Grid::line(-16.0, 16.0, 64, Boundary::Periodic);
	const auto p = assemble_example3(g, [](Complex u) { return std::exp(u) - 1.0; });
	CHECK(p.A->backend() == Backend::Spectral);
	const int m = 5;
	const double xi = 2 * pi * m / 32.0;
	const VectorXc mode = sample(g, [&](const Point &x) { return std::exp(Complex(0, xi * x[0])); });
	CHECK((p.A->apply(0.0, mode) - xi * mode).norm() < 1e-11 * mode.norm());
	CHECK((p.A->shifted_solve(0.0, 1.0, mode) - mode / (1.0 + xi)).norm() < 1e-12 * mode.norm());
	CHECK(p.B->evaluate(0.0, VectorXc::Zero(g.size())).norm() == 0.0);
	// constant mode has symbol zero
	CHECK(p.A->apply(0.0, VectorXc::Constant(g.size(), 2.0)).norm() < 1e-12);
	CHECK_THROWS_AS(p.A->shifted_solve(0.0, 0.0, mode), ComputationError);
	CHECK_THROWS_AS(assemble_example3(Grid::line(0, 1, 8, Boundary::Dirichlet), {}), ConfigurationError);
}

TEST_CASE("example 4 biharmonic operator")
{
	const Grid g = Grid::line(-pi, pi, 64, Boundary::Periodic);
	const auto p = assemble_example4(g, [](Complex u) { return u * u * u - u; });
	const VectorXc mode = sample(g, [](const Point &x) { return std::exp(Complex(0, 3 * x[0])); });
	CHECK((p.A->apply(0.0, mode) - 81.0 * mode).norm() < 1e-10 * 81.0 * mode.norm());
	CHECK(p.B->evaluate(0.0, VectorXc::Zero(g.size())).norm() == 0.0);
	const VectorXc u = sample(g, [](const Point &x) { return Complex(std::sin(x[0])); });
	const VectorXc exact = sample(g, [](const Point &x) {
		return Complex(0.25 * (-3 * std::sin(x[0]) + 9 * std::sin(3 * x[0])) + std::sin(x[0]));
	});
	CHECK((p.B->evaluate(0.0, u) - exact).cwiseAbs().maxCoeff() < 1e-12);
	CHECK_THROWS_AS(assemble_example4(Grid::line(0, 1, 8, Boundary::Dirichlet), {}), ConfigurationError);
}

TEST_CASE("hermitian and anti-hermitian parts")
{
	std::mt19937_64 rng(5);
	SUBCASE("self-adjoint assembly")
	{
		const Grid g = Grid::line(0.0, 1.0, 30, Boundary::Dirichlet);
		CoefficientFn a = [](const Point &x, double) { return 1.0 + x[0] * x[0]; };
		const auto p = assemble_example1(g, a, zero);
		const auto [As, Aa] = hermitian_parts(*p.A, 0.0);
		CHECK(Aa.norm() == 0.0);
		CHECK(As.imag().norm() == 0.0);
		Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(As);
		CHECK(eig.eigenvalues().minCoeff() > 0.0);
	}
	SUBCASE("rotated real SPD matrix")
	{
		Eigen::MatrixXd M = Eigen::MatrixXd::Random(6, 6);
		Eigen::MatrixXd S = M * M.transpose() + 6 * Eigen::MatrixXd::Identity(6, 6);
		const double phi = 0.4;
		DenseOperator op(std::polar(1.0, phi) * S.cast<Complex>());
		const auto [As, Aa] = hermitian_parts(op, 0.0);
		CHECK((As - std::cos(phi) * S.cast<Complex>()).norm() < 1e-12 * S.norm());
	}
	SUBCASE("random sparse complex operator")
	{
		const int n = 25;
		auto op = std::make_shared<SparseOperator>(
			n,
			[n](double) {
				std::mt19937_64 r(9);
				std::normal_distribution<double> nd;
				std::vector<Eigen::Triplet<Complex>> trip;
				for (int k = 0; k < 80; ++k)
					trip.emplace_back(static_cast<int>(r() % n), static_cast<int>(r() % n), Complex(nd(r), nd(r)));
				SparseMatrixXc A(n, n);
				A.setFromTriplets(trip.begin(), trip.end());
				return A;
			},
			true);
		const auto [As, Aa] = hermitian_parts(*op, 0.0);
		const Eigen::MatrixXcd A = to_dense(*op, 0.0);
		CHECK((As + Aa - A).norm() < 1e-14 * A.norm());
		CHECK((As - As.adjoint()).norm() == 0.0);
		CHECK((Aa + Aa.adjoint()).norm() == 0.0);
	}
}

TEST_CASE("operator invariants")
{
	std::mt19937_64 rng(17);
	CoefficientFn a = [](const Point &x, double t) { return 1.0 + 0.5 * std::sin(x[0]) * std::cos(t); };
	CoefficientFn b = [a](const Point &x, double t) { return 0.3 * a(x, t); };
	const Grid g = Grid::line(0.0, 1.0, 50, Boundary::Dirichlet);
	const auto p = assemble_example1(g, a, b);

	SUBCASE("linearity")
	{
		const VectorXc v = random_state(g.size(), rng), w = random_state(g.size(), rng);
		const Complex alpha(0.7, -1.3);
		const VectorXc lhs = p.A->apply(0.2, alpha * v + w);
		const VectorXc rhs = alpha * p.A->apply(0.2, v) + p.A->apply(0.2, w);
		CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
	}
	SUBCASE("shifted solve is a right inverse")
	{
		const VectorXc r = random_state(g.size(), rng);
		for (double sigma : {0.0, 1.0, 1e4})
		{
			const VectorXc u = p.A->shifted_solve(0.6, sigma, r);
			CHECK((p.A->apply(0.6, u) + sigma * u - r).norm() < 1e-10 * r.norm());
		}
	}
	SUBCASE("coercivity on random vectors")
	{
		CHECK(sampled_coercivity(*p.A, 0.8) > 0.0);
	}
	SUBCASE("lipschitz continuity in time")
	{
		double worst = 0.0;
		for (int s = 0; s < 10; ++s)
		{
			const double t = 0.1 * s, dt = 1e-3 * (1 + s);
			const Eigen::MatrixXcd diff = to_dense(*p.A, t + dt) - to_dense(*p.A, t);
			worst = std::max(worst, diff.norm() / dt);
		}
		// ||dA/dt|| <= 0.5 * 1.04 * ||stencil|| with ||stencil||_F < 4 sqrt(n) / h^2
		const double bound = 0.5 * std::abs(Complex(1, 0.3)) * 4 * std::sqrt(50.0) / (g.h(0) * g.h(0));
		CHECK(worst < bound);
		CHECK(worst > 0.0);
	}
	SUBCASE("concurrent shifted solves agree")
	{
		const VectorXc r = random_state(g.size(), rng);
		const VectorXc ref = p.A->shifted_solve(0.5, 3.0, r);
		std::vector<std::future<VectorXc>> futures;
		for (int j = 0; j < 8; ++j)
			futures.push_back(std::async(std::launch::async, [&, j] {
				return p.A->shifted_solve(j % 2 ? 0.5 : 0.25, j % 3 ? 3.0 : 2.0, r);
			}));
		for (int j = 0; j < 8; ++j)
		{
			const VectorXc u = futures[j].get();
			const VectorXc expect = p.A->shifted_solve(j % 2 ? 0.5 : 0.25, j % 3 ? 3.0 : 2.0, r);
			CHECK((u - expect).norm() < 1e-12 * expect.norm());
		}
		CHECK((p.A->shifted_solve(0.5, 3.0, r) - ref).norm() < 1e-12 * ref.norm());
	}
}

TEST_CASE("autonomous operators factor once per shift")
{
	const Grid g = Grid::line(0.0, 1.0, 30, Boundary::Dirichlet);
	auto op = assemble_diffusion(g, one, zero, true);
	const VectorXc r = VectorXc::Ones(g.size());
	for (int n = 0; n < 5; ++n)
		op->shifted_solve(0.1 * n, 2.0, r);
	CHECK(op->factorizations() == 1);
	op->shifted_solve(0.0, 4.0, r);
	CHECK(op->factorizations() == 2);

	auto dep = assemble_diffusion(g, one, zero, false);
	for (int n = 0; n < 5; ++n)
		dep->shifted_solve(0.1 * n, 2.0, r);
	CHECK(dep->factorizations() == 5);
}

TEST_CASE("periodic finite differences are only semi-definite")
{
	const Grid g = Grid::line(0.0, 1.0, 16, Boundary::Periodic);
	const auto p = assemble_example1(g, one, zero);
	CHECK(p.A->apply(0.0, VectorXc::Ones(g.size())).norm() < 1e-9);
	CHECK_THROWS_AS(stability_constant(to_dense(*p.A, 0.0)), CoercivityError);
}

TEST_CASE("nonpositive diffusion is rejected")
{
	const Grid g = Grid::line(0.0, 1.0, 10, Boundary::Dirichlet);
	CoefficientFn bad = [](const Point &x, double) { return x[0] - 0.5; };
	CHECK_THROWS_AS(assemble_example1(g, bad, zero), CoercivityError);
	CHECK_THROWS_AS(assemble_example1(g, zero, one), CoercivityError);
}

TEST_CASE("diagonal operator in extended and double precision")
{
	DiagonalOperator<double> d(Eigen::VectorXd::Constant(1, 2.0));
	const Eigen::VectorXd r = Eigen::VectorXd::Constant(1, 3.0);
	CHECK(d.shifted_solve(0.0, 1.0, r)(0) == doctest::Approx(1.0));
	CHECK(d.apply(0.0, r)(0) == 6.0);
}
