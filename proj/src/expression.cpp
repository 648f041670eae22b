#include <imexbdf/expression.hpp>

#include <imexbdf/errors.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace imexbdf
{
	enum class Op
	{
		Const,
		Var,
		Add,
		Sub,
		Mul,
		Div,
		Pow,
		Neg,
		Sin,
		Cos,
		Exp,
		Abs,
		Sqrt,
		Log,
		Sign
	};

	struct Expression::Node
	{
		Op op;
		double value = 0.0;
		Variable var = Variable::X;
		std::shared_ptr<const Node> a, b;
	};

	namespace
	{
		using NodePtr = std::shared_ptr<const Expression::Node>;
		using Node = Expression::Node;

		NodePtr constant(double v) { return std::make_shared<Node>(Node{Op::Const, v, {}, nullptr, nullptr}); }
		NodePtr variable(Expression::Variable v) { return std::make_shared<Node>(Node{Op::Var, 0.0, v, nullptr, nullptr}); }
		bool is_const(const NodePtr &n, double v) { return n->op == Op::Const && n->value == v; }

		NodePtr unary(Op op, NodePtr a)
		{
			if (a->op == Op::Const && op == Op::Neg)
				return constant(-a->value);
			return std::make_shared<Node>(Node{op, 0.0, {}, std::move(a), nullptr});
		}

		NodePtr binary(Op op, NodePtr a, NodePtr b)
		{
			// Light folding keeps symbolic derivatives small.
			switch (op)
			{
			case Op::Add:
				if (is_const(a, 0.0))
					return b;
				if (is_const(b, 0.0))
					return a;
				break;
			case Op::Sub:
				if (is_const(b, 0.0))
					return a;
				if (is_const(a, 0.0))
					return unary(Op::Neg, b);
				break;
			case Op::Mul:
				if (is_const(a, 0.0) || is_const(b, 0.0))
					return constant(0.0);
				if (is_const(a, 1.0))
					return b;
				if (is_const(b, 1.0))
					return a;
				break;
			case Op::Div:
				if (is_const(a, 0.0))
					return constant(0.0);
				if (is_const(b, 1.0))
					return a;
				break;
			case Op::Pow:
				if (is_const(b, 0.0))
					return constant(1.0);
				if (is_const(b, 1.0))
					return a;
				break;
			default:
				break;
			}
			if (a->op == Op::Const && b->op == Op::Const)
			{
				const double x = a->value, y = b->value;
				switch (op)
				{
				case Op::Add: return constant(x + y);
				case Op::Sub: return constant(x - y);
				case Op::Mul: return constant(x * y);
				case Op::Div: return constant(x / y);
				case Op::Pow: return constant(std::pow(x, y));
				default: break;
				}
			}
			return std::make_shared<Node>(Node{op, 0.0, {}, std::move(a), std::move(b)});
		}

		class Parser
		{
		public:
			explicit Parser(std::string_view s) : s_(s) {}

			NodePtr parse()
			{
				auto n = expr();
				skip();
				if (pos_ != s_.size())
					throw ParseError(std::string("unexpected character '") + s_[pos_] + "'", pos_);
				return n;
			}

		private:
			void skip()
			{
				while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
					++pos_;
			}

			bool accept(char c)
			{
				skip();
				if (pos_ < s_.size() && s_[pos_] == c)
				{
					++pos_;
					return true;
				}
				return false;
			}

			NodePtr expr()
			{
				auto n = term();
				for (;;)
				{
					if (accept('+'))
						n = binary(Op::Add, n, term());
					else if (accept('-'))
						n = binary(Op::Sub, n, term());
					else
						return n;
				}
			}

			NodePtr term()
			{
				auto n = signed_factor();
				for (;;)
				{
					if (accept('*'))
						n = binary(Op::Mul, n, signed_factor());
					else if (accept('/'))
						n = binary(Op::Div, n, signed_factor());
					else
						return n;
				}
			}

			NodePtr signed_factor()
			{
				if (accept('-'))
					return unary(Op::Neg, signed_factor());
				if (accept('+'))
					return signed_factor();
				return power();
			}

			NodePtr power()
			{
				auto base = primary();
				if (accept('^'))
					return binary(Op::Pow, base, signed_factor());
				return base;
			}

			NodePtr primary()
			{
				skip();
				if (pos_ >= s_.size())
					throw ParseError("unexpected end of expression", pos_);
				const char c = s_[pos_];
				if (c == '(')
				{
					++pos_;
					auto n = expr();
					if (!accept(')'))
						throw ParseError("expected ')'", pos_);
					return n;
				}
				if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
					return number();
				if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
					return name();
				throw ParseError(std::string("unexpected character '") + c + "'", pos_);
			}

			NodePtr number()
			{
				const std::size_t start = pos_;
				while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
					++pos_;
				if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E'))
				{
					std::size_t p = pos_ + 1;
					if (p < s_.size() && (s_[p] == '+' || s_[p] == '-'))
						++p;
					if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p])))
					{
						pos_ = p;
						while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
							++pos_;
					}
				}
				double v = 0.0;
				const auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
				if (res.ec != std::errc() || res.ptr != s_.data() + pos_)
					throw ParseError("malformed number", start);
				return constant(v);
			}

			NodePtr name()
			{
				const std::size_t start = pos_;
				while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
					++pos_;
				const std::string id(s_.substr(start, pos_ - start));
				if (id == "x")
					return variable(Expression::Variable::X);
				if (id == "y")
					return variable(Expression::Variable::Y);
				if (id == "t")
					return variable(Expression::Variable::T);
				if (id == "pi")
					return constant(std::numbers::pi);
				if (id == "e")
					return constant(std::numbers::e);

				static const std::pair<const char *, Op> functions[] = {
					{"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp}, {"abs", Op::Abs}, {"sqrt", Op::Sqrt}, {"log", Op::Log}};
				for (const auto &[fname, op] : functions)
					if (id == fname)
					{
						if (!accept('('))
							throw ParseError("expected '(' after function " + id, pos_);
						auto arg = expr();
						if (!accept(')'))
							throw ParseError("expected ')'", pos_);
						return unary(op, arg);
					}
				throw ParseError("unknown identifier '" + id + "'", start);
			}

			std::string_view s_;
			std::size_t pos_ = 0;
		};

		double eval(const Node &n, const Expression::Point &p)
		{
			switch (n.op)
			{
			case Op::Const: return n.value;
			case Op::Var:
				switch (n.var)
				{
				case Expression::Variable::X: return p.x;
				case Expression::Variable::Y: return p.y;
				case Expression::Variable::T: return p.t;
				}
				return 0.0;
			case Op::Add: return eval(*n.a, p) + eval(*n.b, p);
			case Op::Sub: return eval(*n.a, p) - eval(*n.b, p);
			case Op::Mul: return eval(*n.a, p) * eval(*n.b, p);
			case Op::Div: return eval(*n.a, p) / eval(*n.b, p);
			case Op::Pow: return std::pow(eval(*n.a, p), eval(*n.b, p));
			case Op::Neg: return -eval(*n.a, p);
			case Op::Sin: return std::sin(eval(*n.a, p));
			case Op::Cos: return std::cos(eval(*n.a, p));
			case Op::Exp: return std::exp(eval(*n.a, p));
			case Op::Abs: return std::abs(eval(*n.a, p));
			case Op::Sqrt: return std::sqrt(eval(*n.a, p));
			case Op::Log: return std::log(eval(*n.a, p));
			case Op::Sign:
			{
				const double v = eval(*n.a, p);
				return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
			}
			}
			return 0.0;
		}

		NodePtr diff(const NodePtr &n, Expression::Variable v)
		{
			const auto &a = n->a;
			const auto &b = n->b;
			switch (n->op)
			{
			case Op::Const: return constant(0.0);
			case Op::Var: return constant(n->var == v ? 1.0 : 0.0);
			case Op::Add: return binary(Op::Add, diff(a, v), diff(b, v));
			case Op::Sub: return binary(Op::Sub, diff(a, v), diff(b, v));
			case Op::Mul: return binary(Op::Add, binary(Op::Mul, diff(a, v), b), binary(Op::Mul, a, diff(b, v)));
			case Op::Div:
				return binary(Op::Div, binary(Op::Sub, binary(Op::Mul, diff(a, v), b), binary(Op::Mul, a, diff(b, v))),
							  binary(Op::Mul, b, b));
			case Op::Pow:
				if (b->op == Op::Const)
					return binary(Op::Mul, binary(Op::Mul, constant(b->value), binary(Op::Pow, a, constant(b->value - 1.0))),
								  diff(a, v));
				// d(a^b) = a^b (b' log a + b a' / a)
				return binary(Op::Mul, n,
							  binary(Op::Add, binary(Op::Mul, diff(b, v), unary(Op::Log, a)),
									 binary(Op::Div, binary(Op::Mul, b, diff(a, v)), a)));
			case Op::Neg: return unary(Op::Neg, diff(a, v));
			case Op::Sin: return binary(Op::Mul, unary(Op::Cos, a), diff(a, v));
			case Op::Cos: return unary(Op::Neg, binary(Op::Mul, unary(Op::Sin, a), diff(a, v)));
			case Op::Exp: return binary(Op::Mul, n, diff(a, v));
			case Op::Abs: return binary(Op::Mul, unary(Op::Sign, a), diff(a, v));
			case Op::Sqrt: return binary(Op::Div, diff(a, v), binary(Op::Mul, constant(2.0), n));
			case Op::Log: return binary(Op::Div, diff(a, v), a);
			case Op::Sign: return constant(0.0);
			}
			return constant(0.0);
		}

		void print(const Node &n, std::ostream &os)
		{
			auto fn = [&](const char *name) {
				os << name << '(';
				print(*n.a, os);
				os << ')';
			};
			auto bin = [&](char c) {
				os << '(';
				print(*n.a, os);
				os << ' ' << c << ' ';
				print(*n.b, os);
				os << ')';
			};
			switch (n.op)
			{
			case Op::Const:
			{
				std::ostringstream s;
				s.precision(17);
				s << n.value;
				const std::string text = s.str();
				if (n.value < 0)
					os << '(' << text << ')';
				else
					os << text;
				break;
			}
			case Op::Var: os << (n.var == Expression::Variable::X ? 'x' : n.var == Expression::Variable::Y ? 'y' : 't'); break;
			case Op::Add: bin('+'); break;
			case Op::Sub: bin('-'); break;
			case Op::Mul: bin('*'); break;
			case Op::Div: bin('/'); break;
			case Op::Pow: bin('^'); break;
			case Op::Neg:
				os << "(-";
				print(*n.a, os);
				os << ')';
				break;
			case Op::Sin: fn("sin"); break;
			case Op::Cos: fn("cos"); break;
			case Op::Exp: fn("exp"); break;
			case Op::Abs: fn("abs"); break;
			case Op::Sqrt: fn("sqrt"); break;
			case Op::Log: fn("log"); break;
			case Op::Sign:
				// sign(u) = u / abs(u) away from 0; only appears in derivatives
				os << "(";
				print(*n.a, os);
				os << " / abs(";
				print(*n.a, os);
				os << "))";
				break;
			}
		}

		bool uses(const Node &n, Expression::Variable v)
		{
			if (n.op == Op::Var)
				return n.var == v;
			return (n.a && uses(*n.a, v)) || (n.b && uses(*n.b, v));
		}
	} // namespace

	Expression::Expression() : root_(constant(0.0)) {}
	Expression::Expression(double c) : root_(constant(c)) {}

	Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }

	double Expression::operator()(const Point &p) const { return eval(*root_, p); }

	Expression Expression::derivative(Variable v) const { return Expression(diff(root_, v)); }

	std::string Expression::to_string() const
	{
		std::ostringstream os;
		print(*root_, os);
		return os.str();
	}

	bool Expression::independent_of(Variable v) const { return !uses(*root_, v); }
} // namespace imexbdf
