#include <imexbdf/config.hpp>

#include <imexbdf/errors.hpp>
#include <imexbdf/expression.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace imexbdf
{
	namespace
	{
		std::string trim(std::string_view s)
		{
			std::size_t a = 0, b = s.size();
			while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
				++a;
			while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
				--b;
			return std::string(s.substr(a, b - a));
		}

		std::string field_name(const std::string &section, const std::string &key) { return section + "." + key; }

		int to_int(const std::string &field, const std::string &v)
		{
			long long x = 0;
			const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
			if (ec != std::errc() || ptr != v.data() + v.size() || x < std::numeric_limits<int>::min() ||
				x > std::numeric_limits<int>::max())
				throw ConfigurationError(field + ": expected an integer, got '" + v + "'");
			return static_cast<int>(x);
		}

		unsigned to_unsigned(const std::string &field, const std::string &v)
		{
			const int x = to_int(field, v);
			if (x < 0)
				throw ConfigurationError(field + ": expected a nonnegative integer, got '" + v + "'");
			return static_cast<unsigned>(x);
		}

		double to_double(const std::string &field, const std::string &v)
		{
			double x = 0.0;
			const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
			if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
				throw ConfigurationError(field + ": expected a finite number, got '" + v + "'");
			return x;
		}

		bool to_bool(const std::string &field, std::string v)
		{
			std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
			if (v == "true" || v == "1" || v == "yes" || v == "on")
				return true;
			if (v == "false" || v == "0" || v == "no" || v == "off")
				return false;
			throw ConfigurationError(field + ": expected true or false, got '" + v + "'");
		}

		enum class Type
		{
			String,
			Int,
			Unsigned,
			Double,
			Bool
		};

		struct Field
		{
			const char *section;
			const char *key;
			Type type;
			std::function<void(RunConfig &, const std::string &)> set;
			std::function<nlohmann::ordered_json(const RunConfig &)> get;
		};

#define IMEXBDF_FIELD(SECTION, KEY, TYPE, MEMBER, CONVERT)                                                           \
	Field                                                                                                            \
	{                                                                                                                \
		SECTION, KEY, TYPE, [](RunConfig &c, const std::string &v) { c.MEMBER = CONVERT(field_name(SECTION, KEY), v); }, \
			[](const RunConfig &c) { return nlohmann::ordered_json(c.MEMBER); }                                      \
	}

		std::string as_string(const std::string &, const std::string &v) { return v; }

		const std::vector<Field> &fields()
		{
			static const std::vector<Field> list{
				IMEXBDF_FIELD("problem", "example", Type::String, problem.example, as_string),
				IMEXBDF_FIELD("problem", "a", Type::String, problem.a, as_string),
				IMEXBDF_FIELD("problem", "b", Type::String, problem.b, as_string),
				IMEXBDF_FIELD("problem", "exact", Type::String, problem.exact, as_string),
				IMEXBDF_FIELD("problem", "initial", Type::String, problem.initial, as_string),
				IMEXBDF_FIELD("problem", "nonlinearity", Type::String, problem.nonlinearity, as_string),
				IMEXBDF_FIELD("problem", "linear", Type::Bool, problem.linear, to_bool),
				IMEXBDF_FIELD("grid", "dim", Type::Int, grid.dim, to_int),
				IMEXBDF_FIELD("grid", "boundary", Type::String, grid.boundary, as_string),
				IMEXBDF_FIELD("grid", "x_min", Type::Double, grid.x_min, to_double),
				IMEXBDF_FIELD("grid", "x_max", Type::Double, grid.x_max, to_double),
				IMEXBDF_FIELD("grid", "x_points", Type::Int, grid.x_points, to_int),
				IMEXBDF_FIELD("grid", "y_min", Type::Double, grid.y_min, to_double),
				IMEXBDF_FIELD("grid", "y_max", Type::Double, grid.y_max, to_double),
				IMEXBDF_FIELD("grid", "y_points", Type::Int, grid.y_points, to_int),
				IMEXBDF_FIELD("scheme", "k", Type::Int, k, to_int),
				IMEXBDF_FIELD("time", "tau", Type::Double, time.tau, to_double),
				IMEXBDF_FIELD("time", "steps", Type::Int, time.steps, to_int),
				IMEXBDF_FIELD("time", "tau0", Type::Double, time.tau0, to_double),
				IMEXBDF_FIELD("time", "levels", Type::Int, time.levels, to_int),
				IMEXBDF_FIELD("time", "final_time", Type::Double, time.final_time, to_double),
				IMEXBDF_FIELD("output", "directory", Type::String, output.directory, as_string),
				IMEXBDF_FIELD("output", "prefix", Type::String, output.prefix, as_string),
				IMEXBDF_FIELD("output", "norms", Type::String, output.norms, as_string),
				IMEXBDF_FIELD("output", "stride", Type::Int, output.stride, to_int),
				IMEXBDF_FIELD("output", "dump_state", Type::Bool, output.dump_state, to_bool),
				IMEXBDF_FIELD("run", "seed", Type::Unsigned, seed, to_unsigned),
				IMEXBDF_FIELD("run", "threads", Type::Unsigned, threads, to_unsigned),
			};
			return list;
		}
#undef IMEXBDF_FIELD

		std::size_t edit_distance(std::string_view a, std::string_view b)
		{
			std::vector<std::size_t> row(b.size() + 1);
			for (std::size_t j = 0; j <= b.size(); ++j)
				row[j] = j;
			for (std::size_t i = 1; i <= a.size(); ++i)
			{
				std::size_t diag = row[0];
				row[0] = i;
				for (std::size_t j = 1; j <= b.size(); ++j)
				{
					const std::size_t up = row[j];
					row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
					diag = up;
				}
			}
			return row[b.size()];
		}

		[[noreturn]] void unknown_key(const std::string &section, const std::string &key)
		{
			const Field *best = nullptr;
			std::size_t best_d = std::numeric_limits<std::size_t>::max();
			for (const auto &f : fields())
			{
				std::size_t d = edit_distance(key, f.key);
				if (!section.empty() && section != f.section)
					++d;
				if (d < best_d)
				{
					best_d = d;
					best = &f;
				}
			}
			std::string where = section.empty() ? key : field_name(section, key);
			throw ConfigurationError("unknown key '" + where + "'; did you mean '" + field_name(best->section, best->key) +
									 "'?");
		}

		const Field &find_field(const std::string &section, const std::string &key)
		{
			for (const auto &f : fields())
				if (key == f.key && (section.empty() || section == f.section))
					return f;
			unknown_key(section, key);
		}

		bool is_section(const std::string &s)
		{
			for (const auto &f : fields())
				if (s == f.section)
					return true;
			return false;
		}

		RunConfig parse_json(std::string_view text)
		{
			nlohmann::json j;
			try
			{
				j = nlohmann::json::parse(text);
			}
			catch (const nlohmann::json::parse_error &e)
			{
				throw ParseError(std::string("invalid JSON configuration: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
			}
			if (!j.is_object())
				throw ConfigurationError("JSON configuration must be an object");
			RunConfig cfg;
			for (auto &[section, body] : j.items())
			{
				if (!is_section(section))
					unknown_key("", section);
				if (!body.is_object())
					throw ConfigurationError("section '" + section + "' must be an object");
				for (auto &[key, value] : body.items())
				{
					const Field &f = find_field(section, key);
					std::string v;
					if (value.is_string())
						v = value.get<std::string>();
					else if (value.is_boolean())
						v = value.get<bool>() ? "true" : "false";
					else if (value.is_number())
						v = value.dump();
					else
						throw ConfigurationError(field_name(section, key) + ": unsupported JSON value");
					f.set(cfg, v);
				}
			}
			return cfg;
		}

		Expression parse_field(const char *field, const std::string &text)
		{
			try
			{
				return Expression::parse(text);
			}
			catch (const ParseError &e)
			{
				throw ParseError(field, e);
			}
		}

		std::string default_nonlinearity(const std::string &example)
		{
			if (example == "I")
				return "cubic + exp_flux";
			if (example == "II")
				return "quartic_gradient";
			if (example == "III")
				return "exp_minus_one";
			return "cubic_minus_linear";
		}
	} // namespace

	RunConfig parse_config(std::string_view text)
	{
		const std::string trimmed = trim(text);
		RunConfig cfg;
		if (!trimmed.empty() && trimmed.front() == '{')
			cfg = parse_json(trimmed);
		else
		{
			std::string section;
			std::istringstream in{std::string(text)};
			std::string line;
			int line_no = 0;
			while (std::getline(in, line))
			{
				++line_no;
				if (const auto hash = line.find('#'); hash != std::string::npos)
					line.erase(hash);
				const std::string l = trim(line);
				if (l.empty())
					continue;
				if (l.front() == '[')
				{
					if (l.back() != ']')
						throw ConfigurationError("line " + std::to_string(line_no) + ": unterminated section header");
					section = trim(std::string_view(l).substr(1, l.size() - 2));
					if (!is_section(section))
						throw ConfigurationError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
					continue;
				}
				const auto eq = l.find('=');
				if (eq == std::string::npos)
					throw ConfigurationError("line " + std::to_string(line_no) + ": expected key = value");
				const std::string key = trim(std::string_view(l).substr(0, eq));
				std::string value = trim(std::string_view(l).substr(eq + 1));
				if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
					value = value.substr(1, value.size() - 2);
				find_field(section, key).set(cfg, value);
			}
		}
		cfg.validate();
		if (cfg.grid.boundary.empty())
			cfg.grid.boundary = cfg.boundary() == Boundary::Periodic ? "periodic" : "dirichlet";
		if (cfg.problem.nonlinearity.empty())
			cfg.problem.nonlinearity = default_nonlinearity(cfg.problem.example);
		return cfg;
	}

	RunConfig load_config(const std::string &path)
	{
		std::ifstream in(path);
		if (!in)
			throw ConfigurationError("cannot read configuration file '" + path + "'");
		std::ostringstream ss;
		ss << in.rdbuf();
		return parse_config(ss.str());
	}

	nlohmann::ordered_json to_json(const RunConfig &config)
	{
		nlohmann::ordered_json j = nlohmann::ordered_json::object();
		for (const auto &f : fields())
			j[f.section][f.key] = f.get(config);
		return j;
	}

	void RunConfig::validate() const
	{
		const std::string &ex = problem.example;
		if (ex != "I" && ex != "II" && ex != "III" && ex != "IV")
			throw ConfigurationError("problem.example: expected I, II, III or IV, got '" + ex + "'");
		if (k < 1 || k > 6)
			throw ConfigurationError("scheme.k: must lie in [1, 6], got " + std::to_string(k));
		if (!(time.tau > 0.0))
			throw ConfigurationError("time.tau: must be positive");
		if (time.steps < 1)
			throw ConfigurationError("time.steps: must be positive");
		if (!(time.tau0 > 0.0))
			throw ConfigurationError("time.tau0: must be positive");
		if (time.levels < 1)
			throw ConfigurationError("time.levels: must be positive");
		if (!(time.final_time > 0.0))
			throw ConfigurationError("time.final_time: must be positive");
		if (grid.dim != 1 && grid.dim != 2)
			throw ConfigurationError("grid.dim: must be 1 or 2");
		if (grid.x_points < 4 || (grid.dim == 2 && grid.y_points < 4))
			throw ConfigurationError("grid.x_points/y_points: at least 4 points per axis");
		if (!(grid.x_max > grid.x_min) || (grid.dim == 2 && !(grid.y_max > grid.y_min)))
			throw ConfigurationError("grid: each axis needs max > min");
		if (!grid.boundary.empty() && grid.boundary != "dirichlet" && grid.boundary != "periodic")
			throw ConfigurationError("grid.boundary: expected dirichlet or periodic, got '" + grid.boundary + "'");
		if ((ex == "III" || ex == "IV") && boundary() != Boundary::Periodic)
			throw ConfigurationError("grid.boundary: examples III and IV need a periodic grid");
		if (output.stride < 1)
			throw ConfigurationError("output.stride: must be positive");
		if (output.prefix.empty())
			throw ConfigurationError("output.prefix: must not be empty");
		parse_field("problem.a", problem.a);
		parse_field("problem.b", problem.b);
		if (!problem.exact.empty())
			parse_field("problem.exact", problem.exact);
		if (!problem.initial.empty())
			parse_field("problem.initial", problem.initial);
		if ((ex == "III" || ex == "IV") && (problem.a != "1" || problem.b != "0"))
			throw ConfigurationError("problem.a/b: coefficients apply to examples I and II only");
		try
		{
			parse_norm_list(output.norms);
		}
		catch (const ParseError &e)
		{
			throw ParseError("output.norms", e);
		}
		NonlinearityCombination nl;
		try
		{
			nl = nonlinearity();
		}
		catch (const ParseError &e)
		{
			throw ParseError("problem.nonlinearity", e);
		}
		if (ex == "III" || ex == "IV")
			nl.pointwise();
	}

	Boundary RunConfig::boundary() const
	{
		if (grid.boundary.empty())
			return (problem.example == "III" || problem.example == "IV") ? Boundary::Periodic : Boundary::Dirichlet;
		return grid.boundary == "periodic" ? Boundary::Periodic : Boundary::Dirichlet;
	}

	Grid RunConfig::make_grid() const
	{
		std::vector<Axis> axes{{grid.x_min, grid.x_max, grid.x_points}};
		if (grid.dim == 2)
			axes.push_back({grid.y_min, grid.y_max, grid.y_points});
		return Grid(std::move(axes), boundary());
	}

	NonlinearityCombination RunConfig::nonlinearity() const
	{
		return NonlinearityCombination::parse(problem.nonlinearity.empty() ? default_nonlinearity(problem.example)
																		   : problem.nonlinearity);
	}

	AssembledProblem RunConfig::assemble() const
	{
		const Grid g = make_grid();
		const NonlinearityCombination nl = nonlinearity();
		const std::string &ex = problem.example;
		if (ex == "III")
			return assemble_example3(g, nl.pointwise());
		if (ex == "IV")
			return assemble_example4(g, nl.pointwise());
		const Expression a = parse_field("problem.a", problem.a);
		const Expression b = parse_field("problem.b", problem.b);
		CoefficientFn af = [a](const Point &x, double t) { return a({x[0], x[1], t}); };
		CoefficientFn bf = [b](const Point &x, double t) { return b({x[0], x[1], t}); };
		const bool autonomous = a.independent_of(Expression::Variable::T) && b.independent_of(Expression::Variable::T);
		if (ex == "I")
		{
			Nonlinearity fd = nl.finite_difference();
			if (fd.uses_gradient)
				throw ConfigurationError("problem.nonlinearity: gradient terms need example II");
			return assemble_example1(g, af, bf, fd, autonomous);
		}
		return assemble_example2(g, af, bf, nl.finite_difference(), autonomous);
	}

	ManufacturedProblem RunConfig::manufactured() const
	{
		if (problem.exact.empty())
			throw ConfigurationError("problem.exact: this command needs a manufactured solution");
		const std::string name = "example" + problem.example;
		return make_manufactured(name, make_grid(), assemble(), parse_field("problem.exact", problem.exact), problem.linear);
	}
} // namespace imexbdf
