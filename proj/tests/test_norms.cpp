#include <doctest.h>

#include <imexbdf/errors.hpp>
#include <imexbdf/norms.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace imexbdf;
using std::numbers::pi;

namespace
{
	Eigen::VectorXcd sample(const Grid &g, const std::function<std::complex<double>(const Point &)> &fn)
	{
		Eigen::VectorXcd v(g.size());
		for (int i = 0; i < g.size(); ++i)
			v(i) = fn(g.node(i));
		return v;
	}

	Eigen::VectorXcd random_state(int n, std::mt19937_64 &rng)
	{
		std::normal_distribution<double> nd;
		Eigen::VectorXcd v(n);
		for (auto &z : v)
			z = {nd(rng), nd(rng)};
		return v;
	}

	const NormSum l2 = NormSum::parse("l2");
	const auto sine = [](const Point &x) { return std::complex<double>(std::sin(pi * x[0])); };
} // namespace

TEST_CASE("norm tokens")
{
	const NormSum s = NormSum::parse("l2+linf");
	REQUIRE(s.terms.size() == 2u);
	CHECK(s.terms[0].type == NormKind::Type::L2);
	CHECK(s.terms[1].type == NormKind::Type::Linf);
	const NormSum t = NormSum::parse("lq:4+w1q:1.5+w1inf+h1");
	CHECK(t.terms[0].q == 4.0);
	CHECK(t.terms[1].type == NormKind::Type::W1q);
	CHECK(t.terms[1].q == 1.5);
	CHECK(NormSum::parse(t.to_string()) == t);
	CHECK_THROWS_AS(NormSum::parse("l3"), ParseError);
	CHECK_THROWS_AS(NormSum::parse("lq:1"), ParseError);
	CHECK_THROWS_AS(NormSum::parse("lq:x"), ParseError);
	CHECK_THROWS_AS(NormSum::parse("l2+"), ParseError);
	try
	{
		NormSum::parse("l2+bogus");
	}
	catch (const ParseError &e)
	{
		CHECK(e.position() == 3u);
	}
}

TEST_CASE("spatial norm examples")
{
	const Grid periodic = Grid::line(0.0, 1.0, 64, Boundary::Periodic);
	CHECK(spatial_norm(Eigen::VectorXcd::Ones(64), l2, periodic) == doctest::Approx(1.0).epsilon(1e-14));

	const Grid g = Grid::line(0.0, 1.0, 2000, Boundary::Dirichlet);
	const Eigen::VectorXcd s = sample(g, sine);
	CHECK(std::abs(spatial_norm(s, l2, g) - 1.0 / std::sqrt(2.0)) < 1e-4);
	CHECK(std::abs(spatial_norm(s, NormSum::parse("w1inf"), g) - pi) < 1e-3);
	CHECK(std::abs(spatial_norm(s, NormSum::parse("linf+w1inf"), g) - (1.0 + pi)) < 1e-3);
	CHECK(spatial_norm(s, NormSum::parse("linf"), g) == doctest::Approx(1.0).epsilon(1e-6));
	// ||sin(pi x)||_H1^2 = 1/2 + pi^2/2
	CHECK(spatial_norm(s, NormSum::parse("h1"), g) == doctest::Approx(std::sqrt(0.5 + pi * pi / 2)).epsilon(1e-5));
	CHECK(spatial_norm(s, NormSum::parse("w1q:2"), g) == doctest::Approx(spatial_norm(s, NormSum::parse("h1"), g)));
	// ||sin||_4^4 on (0,1) = 3/8
	CHECK(spatial_norm(s, NormSum::parse("lq:4"), g) == doctest::Approx(std::pow(3.0 / 8.0, 0.25)).epsilon(1e-6));
}

TEST_CASE("two dimensional gradients")
{
	const Grid g({{0.0, 1.0, 199}, {0.0, 1.0, 199}}, Boundary::Dirichlet);
	const Eigen::VectorXcd v = sample(g, [](const Point &x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); });
	// ||grad v||_2^2 = pi^2/2, ||v||_2^2 = 1/4
	CHECK(spatial_norm(v, NormSum::parse("h1"), g) == doctest::Approx(std::sqrt(0.25 + pi * pi / 2)).epsilon(1e-4));
	CHECK(spatial_norm(v, NormSum::parse("w1inf"), g) == doctest::Approx(pi).epsilon(1e-4));

	const Grid p({{0.0, 2 * pi, 32}, {0.0, 2 * pi, 32}}, Boundary::Periodic);
	const Eigen::VectorXcd w = sample(p, [](const Point &x) { return std::sin(x[0]) * std::cos(x[1]); });
	CHECK(spatial_norm(w, NormSum::parse("w1inf"), p) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("norm axioms on random states")
{
	std::mt19937_64 rng(41);
	const Grid grids[] = {Grid::line(0.0, 1.0, 50, Boundary::Dirichlet), Grid::line(-4.0, 4.0, 64, Boundary::Periodic),
						  Grid({{0, 1, 12}, {0, 2, 9}}, Boundary::Dirichlet)};
	for (const Grid &g : grids)
		for (const char *token : {"l2", "lq:3", "linf", "w1inf", "w1q:1.5", "h1", "l2+linf"})
		{
			CAPTURE(token);
			const NormSum kind = NormSum::parse(token);
			for (int s = 0; s < 5; ++s)
			{
				const Eigen::VectorXcd v = random_state(g.size(), rng), w = random_state(g.size(), rng);
				const std::complex<double> c(-1.7, 0.4);
				const double nv = spatial_norm(v, kind, g), nw = spatial_norm(w, kind, g);
				CHECK(spatial_norm(c * v, kind, g) == doctest::Approx(std::abs(c) * nv).epsilon(1e-12));
				CHECK(spatial_norm(v + w, kind, g) <= (nv + nw) * (1 + 1e-12));
				CHECK(nv > 0.0);
			}
			CHECK(spatial_norm(Eigen::VectorXcd::Zero(g.size()), kind, g) == 0.0);
		}
}

TEST_CASE("quadrature converges at second order")
{
	auto fn = [](const Point &x) { return std::complex<double>(std::exp(x[0]) * std::sin(pi * x[0])); };
	// int_0^1 e^{2x} sin^2(pi x) dx
	const double exact2 = (std::exp(2.0) - 1.0) / 4.0 * (1.0 - 1.0 / (1.0 + pi * pi));
	double previous = 0.0;
	for (int n : {31, 63, 127, 255})
	{
		const Grid g = Grid::line(0.0, 1.0, n, Boundary::Dirichlet);
		const double err = std::abs(std::pow(spatial_norm(sample(g, fn), l2, g), 2) - exact2);
		if (previous > 0.0)
			CHECK(std::log2(previous / err) >= 1.9);
		previous = err;
	}
}

TEST_CASE("discrete time norms")
{
	const std::vector<double> c(10, 2.5);
	CHECK(lp_time_norm(c, 0.1, 2.0) == doctest::Approx(2.5 * std::sqrt(1.0)));
	CHECK(lp_time_norm(c, 0.1, 3.0) == doctest::Approx(2.5 * std::cbrt(1.0)));
	CHECK(lp_time_norm(c, 0.3, 4.0) == doctest::Approx(2.5 * std::pow(3.0, 0.25)));
	const std::vector<double> one{7.0};
	CHECK(lp_time_norm(one, 1.0, 2.0) == doctest::Approx(7.0));
	const std::vector<double> v{1.0, 2.0, 3.0};
	CHECK(lp_time_norm(v, 0.5, 2.0) == doctest::Approx(std::sqrt(7.0)).epsilon(1e-15));
	CHECK(lp_time_norm(v, 0.5, std::numeric_limits<double>::infinity()) == 3.0);
	CHECK_THROWS_AS(lp_time_norm(std::vector<double>{}, 0.5, 2.0), DomainError);
	CHECK_THROWS_AS(lp_time_norm(v, 0.0, 2.0), DomainError);
	CHECK_THROWS_AS(lp_time_norm(v, 0.5, 1.0), DomainError);

	std::mt19937_64 rng(43);
	std::uniform_real_distribution<double> u(0.0, 5.0);
	for (int s = 0; s < 50; ++s)
	{
		std::vector<double> seq(1 + s);
		for (double &x : seq)
			x = u(rng);
		const double p = 1.1 + 0.2 * s;
		const double tau = 0.01 * (1 + s % 7);
		const double mx = *std::max_element(seq.begin(), seq.end());
		CHECK(lp_time_norm(seq, tau, p) <= std::pow(seq.size() * tau, 1.0 / p) * mx * (1 + 1e-14));
	}
}

TEST_CASE("difference quotients")
{
	std::mt19937_64 rng(47);
	const Grid g = Grid::line(0.0, 1.0, 20, Boundary::Dirichlet);
	const Eigen::VectorXcd w = random_state(g.size(), rng);
	const double tau = 0.05;
	std::vector<Eigen::VectorXcd> constant(4, w), linear;
	for (int n = 0; n < 6; ++n)
		linear.push_back(n * tau * w);
	for (double x : difference_quotient_seq(constant, tau, l2, g))
		CHECK(x == 0.0);
	for (double x : difference_quotient_seq(linear, tau, l2, g))
		CHECK(x == doctest::Approx(spatial_norm(w, l2, g)).epsilon(1e-12));

	std::vector<Eigen::VectorXcd> three{random_state(g.size(), rng), random_state(g.size(), rng), random_state(g.size(), rng)};
	const auto q = difference_quotient_seq(three, tau, NormSum::parse("linf"), g);
	REQUIRE(q.size() == 2u);
	for (int n = 1; n <= 2; ++n)
		CHECK(q[n - 1] == doctest::Approx((three[n] - three[n - 1]).cwiseAbs().maxCoeff() / tau).epsilon(1e-14));
	CHECK_THROWS_AS(difference_quotient_seq(std::vector<Eigen::VectorXcd>{w}, tau, l2, g), DomainError);
	CHECK_THROWS_AS(spatial_norm(Eigen::VectorXcd::Ones(3), l2, g), DomainError);
}

TEST_CASE("compensated summation")
{
	CompensatedSum s;
	s.add(1.0);
	for (int i = 0; i < 1000; ++i)
		s.add(1e-16);
	s.add(-1.0);
	CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-10));
}

TEST_CASE("norm lists split on commas and keep sums intact")
{
	const auto list = parse_norm_list("linf,l2+linf, w1inf");
	REQUIRE(list.size() == 3);
	CHECK(list[1].terms.size() == 2);
	CHECK(to_string(list) == "linf,l2+linf,w1inf");
	try
	{
		parse_norm_list("linf,l2,bogus");
		FAIL("expected a parse error");
	}
	catch (const ParseError &e)
	{
		CHECK(e.position() == 8);
	}
	CHECK_THROWS_AS(parse_norm_list("linf,"), ParseError);
}
