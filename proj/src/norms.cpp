#include <imexbdf/norms.hpp>

#include <imexbdf/errors.hpp>
#include <imexbdf/fourier.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace imexbdf
{
	void CompensatedSum::add(double x)
	{
		const double t = sum_ + x;
		if (std::abs(sum_) >= std::abs(x))
			correction_ += (sum_ - t) + x;
		else
			correction_ += (x - t) + sum_;
		sum_ = t;
	}

	namespace
	{
		void require_size(const Eigen::VectorXcd &v, const Grid &grid)
		{
			if (v.size() != grid.size())
			{
				std::ostringstream msg;
				msg << "state has " << v.size() << " entries but the grid has " << grid.size() << " unknowns";
				throw DomainError(msg.str());
			}
		}

		/// Derivative along one axis of a line of values that includes both boundary nodes.
		void line_derivative(const std::vector<std::complex<double>> &f, double h, std::vector<std::complex<double>> &df)
		{
			const std::size_t n = f.size();
			df.resize(n);
			df[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
			df[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
			for (std::size_t j = 1; j + 1 < n; ++j)
				df[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
		}

		GradientField dirichlet_gradient(const Eigen::VectorXcd &v, const Grid &grid)
		{
			const int nx = grid.points(0) + 2;
			const int ny = grid.dim() == 2 ? grid.points(1) + 2 : 1;
			std::vector<std::complex<double>> ext(static_cast<std::size_t>(nx) * ny, 0.0);
			for (int i = 0; i < grid.size(); ++i)
			{
				const int ix = i % grid.points(0) + 1;
				const int iy = grid.dim() == 2 ? i / grid.points(0) + 1 : 0;
				ext[ix + nx * iy] = v(i);
			}
			std::vector<double> mag2(ext.size(), 0.0);
			std::vector<std::complex<double>> line, dline;
			for (int iy = 0; iy < ny; ++iy)
			{
				line.assign(ext.begin() + nx * iy, ext.begin() + nx * (iy + 1));
				line_derivative(line, grid.h(0), dline);
				for (int ix = 0; ix < nx; ++ix)
					mag2[ix + nx * iy] += std::norm(dline[ix]);
			}
			if (grid.dim() == 2)
			{
				for (int ix = 0; ix < nx; ++ix)
				{
					line.resize(ny);
					for (int iy = 0; iy < ny; ++iy)
						line[iy] = ext[ix + nx * iy];
					line_derivative(line, grid.h(1), dline);
					for (int iy = 0; iy < ny; ++iy)
						mag2[ix + nx * iy] += std::norm(dline[iy]);
				}
			}
			GradientField out;
			out.magnitude.resize(ext.size());
			out.weight.resize(ext.size());
			for (int iy = 0; iy < ny; ++iy)
				for (int ix = 0; ix < nx; ++ix)
				{
					double w = grid.h(0) * ((ix == 0 || ix == nx - 1) ? 0.5 : 1.0);
					if (grid.dim() == 2)
						w *= grid.h(1) * ((iy == 0 || iy == ny - 1) ? 0.5 : 1.0);
					out.magnitude[ix + nx * iy] = std::sqrt(mag2[ix + nx * iy]);
					out.weight[ix + nx * iy] = w;
				}
			return out;
		}

		GradientField periodic_gradient(const Eigen::VectorXcd &v, const Grid &grid)
		{
			const Spectral spectral(grid);
			std::vector<double> mag2(grid.size(), 0.0);
			for (int d = 0; d < grid.dim(); ++d)
			{
				const Eigen::VectorXcd dv = spectral.derivative(v, d);
				for (int i = 0; i < grid.size(); ++i)
					mag2[i] += std::norm(dv(i));
			}
			GradientField out;
			out.magnitude.resize(grid.size());
			out.weight.assign(grid.size(), grid.cell_volume());
			for (int i = 0; i < grid.size(); ++i)
				out.magnitude[i] = std::sqrt(mag2[i]);
			return out;
		}

		double lq_of(std::span<const double> values, std::span<const double> weights, double q)
		{
			const double scale = *std::max_element(values.begin(), values.end());
			if (scale == 0.0)
				return 0.0;
			CompensatedSum sum;
			for (std::size_t i = 0; i < values.size(); ++i)
				sum.add(weights[i] * std::pow(values[i] / scale, q));
			return scale * std::pow(sum.value(), 1.0 / q);
		}

		void require_q(double q)
		{
			if (!(q > 1.0) || !std::isfinite(q))
				throw DomainError("norm exponent q must lie in (1, infinity)");
		}

		double parse_exponent(std::string_view token, std::size_t offset)
		{
			double q = 0.0;
			const auto *first = token.data();
			const auto *last = token.data() + token.size();
			auto [ptr, ec] = std::from_chars(first, last, q);
			if (ec != std::errc() || ptr != last)
				throw ParseError("invalid norm exponent '" + std::string(token) + "'", offset);
			if (!(q > 1.0) || !std::isfinite(q))
				throw ParseError("norm exponent must lie in (1, infinity)", offset);
			return q;
		}

		std::string format_q(double q)
		{
			std::ostringstream os;
			os.precision(17);
			os << q;
			return os.str();
		}
	} // namespace

	std::string NormKind::to_string() const
	{
		switch (type)
		{
		case Type::L2:
			return "l2";
		case Type::Lq:
			return "lq:" + format_q(q);
		case Type::Linf:
			return "linf";
		case Type::W1inf:
			return "w1inf";
		case Type::W1q:
			return "w1q:" + format_q(q);
		case Type::H1:
			return "h1";
		}
		return "?";
	}

	NormSum NormSum::parse(std::string_view text)
	{
		NormSum out;
		std::size_t pos = 0;
		while (true)
		{
			std::size_t end = text.find('+', pos);
			if (end == std::string_view::npos)
				end = text.size();
			std::string_view token = text.substr(pos, end - pos);
			while (!token.empty() && token.front() == ' ')
			{
				token.remove_prefix(1);
				++pos;
			}
			while (!token.empty() && token.back() == ' ')
				token.remove_suffix(1);

			NormKind kind;
			if (token == "l2")
				kind.type = NormKind::Type::L2;
			else if (token == "linf")
				kind.type = NormKind::Type::Linf;
			else if (token == "w1inf")
				kind.type = NormKind::Type::W1inf;
			else if (token == "h1")
				kind.type = NormKind::Type::H1;
			else if (token.starts_with("lq:"))
			{
				kind.type = NormKind::Type::Lq;
				kind.q = parse_exponent(token.substr(3), pos + 3);
			}
			else if (token.starts_with("w1q:"))
			{
				kind.type = NormKind::Type::W1q;
				kind.q = parse_exponent(token.substr(4), pos + 4);
			}
			else
				throw ParseError("unknown norm '" + std::string(token) + "' (expected l2, lq:<q>, linf, w1inf, w1q:<q>, h1)",
								 pos);
			out.terms.push_back(kind);
			if (end == text.size())
				break;
			pos = end + 1;
		}
		return out;
	}

	std::string NormSum::to_string() const
	{
		std::string s;
		for (std::size_t i = 0; i < terms.size(); ++i)
			s += (i ? "+" : "") + terms[i].to_string();
		return s;
	}

	std::vector<NormSum> parse_norm_list(std::string_view text)
	{
		std::vector<NormSum> out;
		std::size_t pos = 0;
		while (true)
		{
			std::size_t end = text.find(',', pos);
			if (end == std::string_view::npos)
				end = text.size();
			const std::string_view item = text.substr(pos, end - pos);
			try
			{
				out.push_back(NormSum::parse(item));
			}
			catch (const ParseError &e)
			{
				throw ParseError("invalid norm '" + std::string(item) + "' in list", pos + e.position());
			}
			if (end == text.size())
				break;
			pos = end + 1;
		}
		return out;
	}

	std::string to_string(const std::vector<NormSum> &norms)
	{
		std::string s;
		for (std::size_t i = 0; i < norms.size(); ++i)
			s += (i ? "," : "") + norms[i].to_string();
		return s;
	}

	GradientField gradient_field(const Eigen::VectorXcd &v, const Grid &grid)
	{
		require_size(v, grid);
		return grid.boundary() == Boundary::Periodic ? periodic_gradient(v, grid) : dirichlet_gradient(v, grid);
	}

	double spatial_norm(const Eigen::VectorXcd &v, const NormKind &kind, const Grid &grid)
	{
		require_size(v, grid);
		std::vector<double> modulus(v.size());
		for (Eigen::Index i = 0; i < v.size(); ++i)
			modulus[i] = std::abs(v(i));
		const std::vector<double> weights(v.size(), grid.cell_volume());
		auto linf = [&] { return modulus.empty() ? 0.0 : *std::max_element(modulus.begin(), modulus.end()); };

		switch (kind.type)
		{
		case NormKind::Type::L2:
			return lq_of(modulus, weights, 2.0);
		case NormKind::Type::Lq:
			require_q(kind.q);
			return lq_of(modulus, weights, kind.q);
		case NormKind::Type::Linf:
			return linf();
		case NormKind::Type::W1inf:
		{
			const GradientField g = gradient_field(v, grid);
			return std::max(linf(), *std::max_element(g.magnitude.begin(), g.magnitude.end()));
		}
		case NormKind::Type::W1q:
		case NormKind::Type::H1:
		{
			const double q = kind.type == NormKind::Type::H1 ? 2.0 : kind.q;
			require_q(q);
			const GradientField g = gradient_field(v, grid);
			const double a = lq_of(modulus, weights, q);
			const double b = lq_of(g.magnitude, g.weight, q);
			const double m = std::max(a, b);
			if (m == 0.0)
				return 0.0;
			return m * std::pow(std::pow(a / m, q) + std::pow(b / m, q), 1.0 / q);
		}
		}
		throw DomainError("unknown norm kind");
	}

	double spatial_norm(const Eigen::VectorXcd &v, const NormSum &kind, const Grid &grid)
	{
		if (kind.terms.empty())
			throw DomainError("empty norm specification");
		double s = 0.0;
		for (const auto &t : kind.terms)
			s += spatial_norm(v, t, grid);
		return s;
	}

	double lp_time_norm(std::span<const double> values, double tau, double p)
	{
		if (values.empty())
			throw DomainError("lp_time_norm of an empty sequence");
		if (!(tau > 0.0))
			throw DomainError("step size must be positive");
		if (!(p > 1.0))
			throw DomainError("time exponent p must lie in (1, infinity]");
		double m = 0.0;
		for (double v : values)
		{
			if (!std::isfinite(v) || v < 0.0)
				throw DomainError("lp_time_norm needs finite nonnegative values");
			m = std::max(m, v);
		}
		if (std::isinf(p) || m == 0.0)
			return m;
		CompensatedSum sum;
		for (double v : values)
			sum.add(std::pow(v / m, p));
		return m * std::pow(tau * sum.value(), 1.0 / p);
	}

	std::vector<double> difference_quotient_seq(std::span<const Eigen::VectorXcd> states, double tau, const NormSum &kind,
												const Grid &grid)
	{
		if (states.size() < 2)
			throw DomainError("difference quotients need at least two states");
		if (!(tau > 0.0))
			throw DomainError("step size must be positive");
		std::vector<double> out;
		out.reserve(states.size() - 1);
		for (std::size_t n = 1; n < states.size(); ++n)
			out.push_back(spatial_norm((states[n] - states[n - 1]) / tau, kind, grid));
		return out;
	}

	std::vector<double> difference_quotient_seq(const Trajectory<Complex> &trajectory, const NormSum &kind, const Grid &grid)
	{
		return difference_quotient_seq(trajectory.states, trajectory.tau, kind, grid);
	}
} // namespace imexbdf
