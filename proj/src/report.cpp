#include <imexbdf/report.hpp>

#include <imexbdf/errors.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace imexbdf
{
	namespace
	{
		using json = nlohmann::ordered_json;

		std::string csv_number(double v)
		{
			if (std::isnan(v))
				return "nan";
			if (std::isinf(v))
				return v > 0 ? "inf" : "-inf";
			char buf[32];
			std::snprintf(buf, sizeof buf, "%.12g", v);
			return buf;
		}

		std::string csv_text(const std::string &s)
		{
			if (s.find_first_of(",\"\n") == std::string::npos)
				return s;
			std::string out = "\"";
			for (char c : s)
			{
				if (c == '"')
					out += '"';
				out += c;
			}
			return out + "\"";
		}

		std::string csv_cell(const Cell &c)
		{
			return std::visit(
				[](const auto &v) -> std::string {
					using T = std::decay_t<decltype(v)>;
					if constexpr (std::is_same_v<T, double>)
						return csv_number(v);
					else if constexpr (std::is_same_v<T, long long>)
						return std::to_string(v);
					else if constexpr (std::is_same_v<T, bool>)
						return v ? "true" : "false";
					else
						return csv_text(v);
				},
				c);
		}

		/// JSON has no infinity or NaN; they become null.
		json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

		json json_cell(const Cell &c)
		{
			return std::visit(
				[](const auto &v) -> json {
					using T = std::decay_t<decltype(v)>;
					if constexpr (std::is_same_v<T, double>)
						return number(v);
					else
						return json(v);
				},
				c);
		}

		json optional_number(const std::optional<double> &v) { return v ? number(*v) : json(nullptr); }

		json fit_json(const std::optional<FitResult> &fit)
		{
			if (!fit)
				return nullptr;
			return json{{"order", number(fit->slope)},
						{"intercept", number(fit->intercept)},
						{"residual", number(fit->residual)},
						{"points", fit->used}};
		}

		double round_to(double v, int digits)
		{
			const double scale = std::pow(10.0, digits);
			return std::round(v * scale) / scale;
		}
	} // namespace

	void Table::add_row(std::vector<Cell> row)
	{
		if (row.size() != columns.size())
			throw OutputError("table row has " + std::to_string(row.size()) + " cells, expected " +
							  std::to_string(columns.size()));
		rows.push_back(std::move(row));
	}

	Format parse_format(const std::string &text)
	{
		if (text == "csv")
			return Format::Csv;
		if (text == "json")
			return Format::Json;
		throw ConfigurationError("format: expected csv or json, got '" + text + "'");
	}

	std::string format_csv(const Table &table)
	{
		std::string out;
		for (std::size_t j = 0; j < table.columns.size(); ++j)
			out += (j ? "," : "") + csv_text(table.columns[j]);
		out += '\n';
		for (const auto &row : table.rows)
		{
			for (std::size_t j = 0; j < row.size(); ++j)
				out += (j ? "," : "") + csv_cell(row[j]);
			out += '\n';
		}
		return out;
	}

	std::string format_json(const Report &report)
	{
		json j = json::object();
		j["kind"] = report.kind;
		for (const auto &[key, value] : report.summary.items())
			j[key] = value;
		json rows = json::array();
		for (const auto &row : report.table.rows)
		{
			json r = json::array();
			for (const auto &c : row)
				r.push_back(json_cell(c));
			rows.push_back(std::move(r));
		}
		j["table"] = json{{"columns", report.table.columns}, {"rows", std::move(rows)}};
		return j.dump(2) + "\n";
	}

	std::string format_report(const Report &report, Format format)
	{
		if (report.empty())
			throw OutputError("report '" + report.kind + "' is empty");
		return format == Format::Csv ? format_csv(report.table) : format_json(report);
	}

	void write_text_file(const std::string &path, const std::string &text)
	{
		std::ofstream out(path, std::ios::binary | std::ios::trunc);
		if (!out)
			throw OutputError("cannot open '" + path + "' for writing");
		out << text;
		out.close();
		if (!out)
			throw OutputError("failed writing '" + path + "'");
	}

	ReportPaths emit_report(const Report &report, const std::string &directory, const std::string &prefix)
	{
		if (report.empty())
			throw OutputError("report '" + report.kind + "' is empty; nothing written");
		const std::filesystem::path dir(directory.empty() ? "." : directory);
		std::error_code ec;
		std::filesystem::create_directories(dir, ec);
		if (ec || !std::filesystem::is_directory(dir))
			throw OutputError("cannot create output directory '" + dir.string() + "'");
		const std::string stem = prefix + "_" + report.kind;
		ReportPaths paths{(dir / (stem + ".csv")).string(), (dir / (stem + ".json")).string()};
		const std::string csv = format_csv(report.table);
		const std::string js = format_json(report);
		write_text_file(paths.csv, csv);
		write_text_file(paths.json, js);
		return paths;
	}

	Report coeffs_report(const BdfScheme &scheme)
	{
		Report r;
		r.kind = "coeffs";
		const int k = scheme.k();
		json delta = json::array(), gamma = json::array();
		for (int i = 0; i <= k; ++i)
			delta.push_back({{"fraction", to_string(scheme.delta()[i])}, {"value", scheme.delta_f()[i]}});
		for (int i = 0; i < k; ++i)
			gamma.push_back({{"fraction", to_string(scheme.gamma()[i])}, {"value", scheme.gamma_f()[i]}});
		const OrderConditionReport oc = verify_order_conditions(scheme);
		r.summary["k"] = k;
		r.summary["delta"] = std::move(delta);
		r.summary["gamma"] = std::move(gamma);
		r.summary["order_conditions_exact"] = oc.all_zero();
		r.summary["passed"] = oc.all_zero() && validate(scheme).empty();

		r.table.columns = {"i", "delta_fraction", "delta", "gamma_fraction", "gamma"};
		for (int i = 0; i <= k; ++i)
		{
			const bool has_gamma = i < k;
			r.table.add_row({static_cast<long long>(i), to_string(scheme.delta()[i]), scheme.delta_f()[i],
							 has_gamma ? to_string(scheme.gamma()[i]) : std::string(),
							 has_gamma ? Cell(scheme.gamma_f()[i]) : Cell(std::string())});
		}
		return r;
	}

	Report stability_report(const StabilityReport &s, const std::optional<RootSweepResult> &sweep)
	{
		Report r;
		r.kind = "stability";
		const bool a_stable = std::isinf(s.lambda_threshold);
		r.summary["k"] = s.k;
		r.summary["alpha"] = round_to(s.alpha_deg, 2);
		r.summary["alpha_exact"] = s.alpha_deg;
		r.summary["lambda"] = a_stable ? json("inf") : json(round_to(s.lambda_threshold, 5));
		r.summary["lambda_exact"] = a_stable ? json("inf") : json(s.lambda_threshold);
		r.summary["a_stable"] = a_stable;
		if (sweep)
		{
			r.summary["sweep"] = json{{"phi_deg", rad_to_deg(sweep->phi)},
									  {"tau", sweep->tau},
									  {"points", sweep->rho.size()},
									  {"all_stable", sweep->all_stable()}};
			r.table.columns = {"rho", "max_root_modulus", "stable"};
			for (std::size_t i = 0; i < sweep->rho.size(); ++i)
				r.table.add_row({sweep->rho[i], sweep->max_root_modulus[i], static_cast<bool>(sweep->stable[i])});
		}
		else
		{
			r.table.columns = {"theta", "re_delta", "im_delta"};
			for (std::size_t i = 0; i < s.theta.size(); ++i)
				r.table.add_row({s.theta[i], s.locus[i].real(), s.locus[i].imag()});
		}
		return r;
	}

	Report consistency_report(const ConsistencyReport &c, const std::optional<ConsistencyReport> &halved, int k,
							  double tolerance)
	{
		Report r;
		r.kind = "consistency";
		r.summary["k"] = k;
		r.summary["tau"] = c.tau;
		r.summary["steps"] = c.steps;
		r.summary["max_defect"] = number(c.max_norm);
		if (halved)
		{
			const double order = std::log2(c.max_norm / halved->max_norm);
			r.summary["max_defect_half_tau"] = number(halved->max_norm);
			r.summary["observed_order"] = number(order);
			r.summary["tolerance"] = tolerance;
			r.summary["passed"] = std::isfinite(order) && order >= k - tolerance;
		}
		r.table.columns = {"n", "t", "defect"};
		for (std::size_t i = 0; i < c.norms.size(); ++i)
		{
			const long long n = static_cast<long long>(i) + k;
			r.table.add_row({n, static_cast<double>(n) * c.tau, c.norms[i]});
		}
		return r;
	}

	Report convergence_report(const ConvergenceReport &c, double tolerance)
	{
		Report r;
		r.kind = "converge";
		r.summary["problem"] = c.problem;
		r.summary["k"] = c.k;
		r.summary["final_time"] = c.final_time;
		r.summary["p"] = c.p;
		r.summary["fit_points"] = c.fit_points;
		json fits = json::object();
		for (const auto &n : c.norms)
			fits[n.norm] = json{{"max", fit_json(n.max_fit)}, {"lp", fit_json(n.lp_fit)}, {"dq", fit_json(n.dq_fit)}};
		r.summary["orders"] = std::move(fits);
		int unstable = 0;
		for (const auto &l : c.levels)
			unstable += l.blow_up ? 1 : 0;
		r.summary["unstable_levels"] = unstable;
		r.summary["tolerance"] = tolerance;
		r.summary["passed"] = c.passed(tolerance);

		r.table.columns = {"tau", "steps", "stable"};
		for (const auto &n : c.norms)
		{
			r.table.columns.push_back("err_" + n.norm);
			r.table.columns.push_back("lp_" + n.norm);
			r.table.columns.push_back("dq_" + n.norm);
		}
		for (std::size_t i = 0; i < c.levels.size(); ++i)
		{
			std::vector<Cell> row{c.levels[i].tau, static_cast<long long>(c.levels[i].steps), c.levels[i].stable()};
			for (const auto &n : c.norms)
			{
				row.emplace_back(n.max_error[i]);
				row.emplace_back(n.lp_error[i]);
				row.emplace_back(n.dq_error[i]);
			}
			r.table.add_row(std::move(row));
		}
		return r;
	}

	Report threshold_report(const ThresholdReport &t)
	{
		Report r;
		r.kind = "threshold";
		r.summary["k"] = t.k;
		r.summary["tan_alpha"] = number(t.tan_alpha);
		r.summary["largest_stable"] = optional_number(t.largest_stable);
		r.summary["smallest_unstable"] = optional_number(t.smallest_unstable);
		r.summary["brackets"] = t.brackets();
		r.summary["bracket_width"] = number(t.bracket_width());
		r.summary["passed"] = t.brackets();
		r.table.columns = {"ratio", "ratio_over_tan_alpha", "bounded", "blow_up_step", "blow_up_tau"};
		for (const auto &row : t.rows)
			r.table.add_row({row.ratio, row.ratio / t.tan_alpha, row.bounded,
							 static_cast<long long>(row.blow_up ? *row.blow_up : -1), row.blow_up_tau});
		return r;
	}
} // namespace imexbdf
