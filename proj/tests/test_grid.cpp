#include <doctest.h>

#include <imexbdf/errors.hpp>
#include <imexbdf/fourier.hpp>
#include <imexbdf/grid.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace imexbdf;
using std::numbers::pi;

TEST_CASE("dirichlet grids store interior nodes")
{
	const Grid g = Grid::line(0.0, 1.0, 9, Boundary::Dirichlet);
	CHECK(g.size() == 9);
	CHECK(g.h(0) == doctest::Approx(0.1));
	CHECK(g.coordinate(0, 0) == doctest::Approx(0.1));
	CHECK(g.coordinate(0, 8) == doctest::Approx(0.9));
	CHECK(g.measure() == doctest::Approx(1.0));
}

TEST_CASE("periodic grids exclude the duplicate endpoint")
{
	const Grid g({{-1.0, 1.0, 8}, {0.0, 2.0, 4}}, Boundary::Periodic);
	CHECK(g.size() == 32);
	CHECK(g.h(0) == doctest::Approx(0.25));
	CHECK(g.coordinate(0, 7) == doctest::Approx(0.75));
	CHECK(g.cell_volume() == doctest::Approx(0.25 * 0.5));
	CHECK(g.cell_volume() * g.size() == doctest::Approx(g.measure()));
	const Point p = g.node(g.index(3, 2));
	CHECK(p[0] == doctest::Approx(-0.25));
	CHECK(p[1] == doctest::Approx(1.0));
	CHECK(g.nodes().size() == 32u);
}

TEST_CASE("invalid grids are rejected")
{
	CHECK_THROWS_AS(Grid::line(0.0, 1.0, 3, Boundary::Dirichlet), ConfigurationError);
	CHECK_THROWS_AS(Grid::line(1.0, 1.0, 8, Boundary::Periodic), ConfigurationError);
	CHECK_THROWS_AS(Grid({}, Boundary::Periodic), ConfigurationError);
	CHECK_THROWS_AS(Grid({{0, 1, 4}, {0, 1, 4}, {0, 1, 4}}, Boundary::Periodic), ConfigurationError);
	CHECK_THROWS_AS(Spectral(Grid::line(0.0, 1.0, 8, Boundary::Dirichlet)), ConfigurationError);
}

TEST_CASE("spectral transforms invert and differentiate trigonometric data")
{
	const Grid g = Grid::line(-pi, pi, 32, Boundary::Periodic);
	const Spectral s(g);
	Eigen::VectorXcd v(g.size()), dv(g.size());
	for (int i = 0; i < g.size(); ++i)
	{
		const double x = g.node(i)[0];
		v(i) = std::sin(3 * x) + std::cos(x);
		dv(i) = 3 * std::cos(3 * x) - std::sin(x);
	}
	CHECK((s.inverse(s.forward(v)) - v).norm() < 1e-12);
	CHECK((s.derivative(v, 0) - dv).norm() < 1e-11);
}

TEST_CASE("two dimensional spectral derivative")
{
	const Grid g({{0.0, 2 * pi, 16}, {0.0, 2 * pi, 8}}, Boundary::Periodic);
	const Spectral s(g);
	Eigen::VectorXcd v(g.size()), dy(g.size());
	for (int i = 0; i < g.size(); ++i)
	{
		const Point p = g.node(i);
		v(i) = std::sin(p[0]) * std::cos(2 * p[1]);
		dy(i) = -2 * std::sin(p[0]) * std::sin(2 * p[1]);
	}
	CHECK((s.derivative(v, 1) - dy).norm() < 1e-11);
	for (int i = 0; i < g.size(); ++i)
		CHECK(s.xi_squared()(i) >= 0.0);
}

TEST_CASE("symbols commute with grid translation")
{
	const Grid g = Grid::line(-8.0, 8.0, 64, Boundary::Periodic);
	const Spectral s(g);
	std::mt19937_64 rng(11);
	std::normal_distribution<double> nd;
	Eigen::VectorXcd v(g.size());
	for (auto &z : v)
		z = {nd(rng), nd(rng)};
	Eigen::VectorXcd symbol = s.xi_squared().cast<std::complex<double>>();
	auto shift = [](const Eigen::VectorXcd &w, int m) {
		Eigen::VectorXcd out(w.size());
		for (Eigen::Index i = 0; i < w.size(); ++i)
			out((i + m) % w.size()) = w(i);
		return out;
	};
	const Eigen::VectorXcd lhs = s.apply_symbol(shift(v, 5), symbol);
	const Eigen::VectorXcd rhs = shift(s.apply_symbol(v, symbol), 5);
	CHECK((lhs - rhs).norm() < 1e-10 * rhs.norm());
}
