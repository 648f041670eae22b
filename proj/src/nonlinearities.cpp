#include <imexbdf/nonlinearities.hpp>

#include <imexbdf/errors.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace imexbdf
{
	namespace
	{
		enum class Kind
		{
			Pointwise,
			Gradient,
			Flux
		};

		struct Entry
		{
			const char *name;
			Kind kind;
			std::function<Complex(Complex)> pointwise;
		};

		const std::vector<Entry> &entries()
		{
			static const std::vector<Entry> list{
				{"zero", Kind::Pointwise, [](Complex) { return Complex(0.0); }},
				{"identity", Kind::Pointwise, [](Complex u) { return u; }},
				{"cubic", Kind::Pointwise, [](Complex u) { return -u * u * u; }},
				{"exp_flux", Kind::Flux, {}},
				{"quartic_gradient", Kind::Gradient, {}},
				{"exp_minus_one", Kind::Pointwise, [](Complex u) { return std::exp(u) - 1.0; }},
				{"cubic_minus_linear", Kind::Pointwise, [](Complex u) { return u * u * u - u; }},
			};
			return list;
		}

		const Entry &lookup(const std::string &name)
		{
			for (const auto &e : entries())
				if (name == e.name)
					return e;
			throw ConfigurationError("unknown nonlinearity '" + name + "'");
		}

		void skip_space(std::string_view text, std::size_t &pos)
		{
			while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
				++pos;
		}
	} // namespace

	const std::vector<std::string> &NonlinearityCombination::registered()
	{
		static const std::vector<std::string> names = [] {
			std::vector<std::string> n;
			for (const auto &e : entries())
				n.emplace_back(e.name);
			return n;
		}();
		return names;
	}

	NonlinearityCombination NonlinearityCombination::parse(std::string_view text)
	{
		NonlinearityCombination out;
		std::size_t pos = 0;
		skip_space(text, pos);
		if (pos == text.size())
			throw ParseError("empty nonlinearity", pos);
		bool first = true;
		while (pos < text.size())
		{
			double sign = 1.0;
			if (text[pos] == '+' || text[pos] == '-')
			{
				sign = text[pos] == '-' ? -1.0 : 1.0;
				++pos;
				skip_space(text, pos);
			}
			else if (!first)
				throw ParseError("expected '+' or '-' between nonlinearity terms", pos);
			first = false;

			double coefficient = 1.0;
			if (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
			{
				const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), coefficient);
				if (ec != std::errc())
					throw ParseError("invalid coefficient", pos);
				pos = static_cast<std::size_t>(ptr - text.data());
				skip_space(text, pos);
				if (pos >= text.size() || text[pos] != '*')
					throw ParseError("expected '*' after coefficient", pos);
				++pos;
				skip_space(text, pos);
			}
			const std::size_t start = pos;
			while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
				++pos;
			const std::string name(text.substr(start, pos - start));
			if (name.empty())
				throw ParseError("expected a nonlinearity name", start);
			const auto &names = registered();
			if (std::find(names.begin(), names.end(), name) == names.end())
				throw ParseError("unknown nonlinearity '" + name + "'", start);
			out.terms_.emplace_back(sign * coefficient, name);
			skip_space(text, pos);
		}
		return out;
	}

	std::string NonlinearityCombination::to_string() const
	{
		std::string s;
		for (std::size_t i = 0; i < terms_.size(); ++i)
		{
			const auto &[c, name] = terms_[i];
			if (i > 0)
				s += c < 0 ? " - " : " + ";
			else if (c < 0)
				s += "-";
			const double m = std::abs(c);
			if (m != 1.0)
			{
				char buf[40];
				std::snprintf(buf, sizeof buf, "%.17g*", m);
				s += buf;
			}
			s += name;
		}
		return s;
	}

	Nonlinearity NonlinearityCombination::finite_difference() const
	{
		std::vector<std::pair<double, std::function<Complex(Complex)>>> point;
		double quartic = 0.0, flux = 0.0;
		for (const auto &[c, name] : terms_)
		{
			const Entry &e = lookup(name);
			if (e.kind == Kind::Pointwise)
				point.emplace_back(c, e.pointwise);
			else if (e.kind == Kind::Gradient)
				quartic += c;
			else
				flux += c;
		}
		Nonlinearity nl;
		nl.uses_gradient = quartic != 0.0;
		if (!point.empty() || quartic != 0.0)
			nl.f = [point, quartic](Complex u, const Gradient &gr, const Point &, double) {
				Complex s = 0.0;
				for (const auto &[c, f] : point)
					s += c * f(u);
				if (quartic != 0.0)
				{
					const double g2 = std::norm(gr[0]) + std::norm(gr[1]);
					s -= quartic * g2 * g2 * u;
				}
				return s;
			};
		if (flux != 0.0)
			nl.g = [flux](Complex u, const Gradient &, const Point &, double) { return Gradient{flux * std::exp(u), 0.0}; };
		return nl;
	}

	ScalarFn NonlinearityCombination::pointwise() const
	{
		std::vector<std::pair<double, std::function<Complex(Complex)>>> point;
		for (const auto &[c, name] : terms_)
		{
			const Entry &e = lookup(name);
			if (e.kind != Kind::Pointwise)
				throw ConfigurationError("nonlinearity '" + name + "' needs a finite-difference problem (examples I or II)");
			point.emplace_back(c, e.pointwise);
		}
		return [point](Complex u) {
			Complex s = 0.0;
			for (const auto &[c, f] : point)
				s += c * f(u);
			return s;
		};
	}
} // namespace imexbdf
