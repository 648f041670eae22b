#pragma once

#include <imexbdf/bdf_coeffs.hpp>
#include <imexbdf/convergence.hpp>
#include <imexbdf/stability.hpp>

#include <json.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace imexbdf
{
	using Cell = std::variant<double, long long, bool, std::string>;

	/// Rows with a fixed column order.
	struct Table
	{
		std::vector<std::string> columns;
		std::vector<std::vector<Cell>> rows;

		/// Throws OutputError if the row length does not match the columns.
		void add_row(std::vector<Cell> row);
	};

	/// A structured summary plus a table; both are written by emit_report.
	struct Report
	{
		std::string kind; ///< coeffs, stability, consistency, converge, threshold or solve
		nlohmann::ordered_json summary = nlohmann::ordered_json::object();
		Table table;

		bool empty() const { return table.columns.empty() || table.rows.empty(); }
	};

	enum class Format
	{
		Csv,
		Json
	};

	Format parse_format(const std::string &text);

	/// Header line plus one line per row; reals use 12 significant digits.
	std::string format_csv(const Table &table);
	/// Summary object with the table embedded under "table"; reals round-trip exactly.
	std::string format_json(const Report &report);
	std::string format_report(const Report &report, Format format);

	struct ReportPaths
	{
		std::string csv;
		std::string json;
	};

	/// Writes <directory>/<prefix>_<kind>.csv and .json. Throws OutputError for an empty report
	/// (before touching the disk) or when a file cannot be written; the message names the path.
	ReportPaths emit_report(const Report &report, const std::string &directory, const std::string &prefix);

	/// Writes text to path, throwing OutputError with the path on failure.
	void write_text_file(const std::string &path, const std::string &text);

	Report coeffs_report(const BdfScheme &scheme);
	Report stability_report(const StabilityReport &stability, const std::optional<RootSweepResult> &sweep = {});
	/// `halved` is the same problem at tau / 2 over the same interval; it supplies the observed order.
	Report consistency_report(const ConsistencyReport &report, const std::optional<ConsistencyReport> &halved, int k,
							  double tolerance);
	Report convergence_report(const ConvergenceReport &report, double tolerance);
	Report threshold_report(const ThresholdReport &report);
} // namespace imexbdf
