#pragma once

#include <stdexcept>
#include <string>

namespace imexbdf
{
	/// Argument outside the admissible range (e.g. step number k not in [1,6]).
	class DomainError : public std::domain_error
	{
	public:
		using std::domain_error::domain_error;
	};

	/// The Hermitian part of an operator (or the coefficient a) is not positive.
	class CoercivityError : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

	/// Inconsistent problem setup, e.g. a spectral operator requested on a Dirichlet grid.
	class ConfigurationError : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

	/// A numerical procedure failed to produce a result (root finder, degenerate input, ...).
	class ComputationError : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

	/// Failure while advancing the time-stepping recursion.
	class StepError : public std::runtime_error
	{
	public:
		StepError(const std::string &what, int step) : std::runtime_error(what), step_(step) {}
		int step() const { return step_; }

	private:
		int step_;
	};

	/// An output file could not be written, or a report had nothing to write.
	class OutputError : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

	/// Syntax error in a coefficient expression; position is a 0-based character offset.
	class ParseError : public std::runtime_error
	{
	public:
		ParseError(const std::string &what, std::size_t position)
			: std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
		/// Same error with a context prefix, e.g. the configuration field being parsed.
		ParseError(const std::string &context, const ParseError &inner)
			: std::runtime_error(context + ": " + inner.what()), position_(inner.position()) {}
		std::size_t position() const { return position_; }

	private:
		std::size_t position_;
	};
} // namespace imexbdf
