#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace imexbdf
{
	/// Real-valued expressions in x, y, t used for coefficients, exact solutions and initial data.
	///
	/// Grammar (whitespace is ignored):
	///
	///     expr    := term (('+' | '-') term)*
	///     term    := unary (('*' | '/') unary)*
	///     unary   := ('+' | '-') unary | power
	///     power   := primary ('^' unary)?
	///     primary := number | name | name '(' expr ')' | '(' expr ')'
	///
	/// Variables: x, y, t. Constants: pi, e. Functions: sin, cos, exp, abs, sqrt, log.
	/// '^' is right-associative and binds tighter than unary minus on its left (-x^2 = -(x^2)).
	class Expression
	{
	public:
		struct Node;
		enum class Variable
		{
			X,
			Y,
			T
		};
		struct Point
		{
			double x = 0.0, y = 0.0, t = 0.0;
		};

		Expression();
		explicit Expression(double constant);

		/// Throws ParseError with the offending character offset.
		static Expression parse(std::string_view text);

		double operator()(const Point &p) const;
		double operator()(double x, double y, double t) const { return (*this)({x, y, t}); }

		/// Symbolic partial derivative.
		Expression derivative(Variable v) const;

		/// Canonical, fully parenthesized text that parses back to an equivalent expression.
		std::string to_string() const;

		/// True if the expression does not reference the given variable.
		bool independent_of(Variable v) const;

	private:
		explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
		std::shared_ptr<const Node> root_;
	};
} // namespace imexbdf
