#pragma once

#include <imexbdf/fourier.hpp>
#include <imexbdf/grid.hpp>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <array>
#include <atomic>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>

namespace imexbdf
{
	using Complex = std::complex<double>;
	using VectorXc = Eigen::VectorXcd;
	using SparseMatrixXc = Eigen::SparseMatrix<Complex>;

	template <typename Scalar>
	using RealOf = typename Eigen::NumTraits<Scalar>::Real;

	template <typename Scalar>
	using StateVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

	enum class Backend
	{
		Sparse,
		Spectral,
		Dense,
		Diagonal
	};

	/// Discrete, possibly time-dependent linear operator A(t).
	template <typename Scalar>
	class LinearOperator
	{
	public:
		using Real = RealOf<Scalar>;
		using Vector = StateVector<Scalar>;

		virtual ~LinearOperator() = default;

		virtual int size() const = 0;
		virtual Backend backend() const = 0;
		virtual bool autonomous() const = 0;

		virtual Vector apply(const Real &t, const Vector &v) const = 0;

		/// Solves (sigma I + A(t)) u = r.
		virtual Vector shifted_solve(const Real &t, const Real &sigma, const Vector &r) const = 0;
	};

	/// Explicitly treated term B(t, v).
	template <typename Scalar>
	class NonlinearTerm
	{
	public:
		using Real = RealOf<Scalar>;
		using Vector = StateVector<Scalar>;

		virtual ~NonlinearTerm() = default;
		virtual Vector evaluate(const Real &t, const Vector &v) const = 0;

		/// Radius of the tube in which B is assumed Lipschitz (informational only).
		double lipschitz_radius = std::numeric_limits<double>::infinity();
	};

	/// B given by a callable.
	template <typename Scalar>
	class FunctionTerm final : public NonlinearTerm<Scalar>
	{
	public:
		using typename NonlinearTerm<Scalar>::Real;
		using typename NonlinearTerm<Scalar>::Vector;
		using Fn = std::function<Vector(const Real &, const Vector &)>;

		explicit FunctionTerm(Fn fn) : fn_(std::move(fn)) {}
		Vector evaluate(const Real &t, const Vector &v) const override { return fn_(t, v); }

	private:
		Fn fn_;
	};

	template <typename Scalar>
	class ZeroTerm final : public NonlinearTerm<Scalar>
	{
	public:
		using typename NonlinearTerm<Scalar>::Real;
		using typename NonlinearTerm<Scalar>::Vector;
		Vector evaluate(const Real &, const Vector &v) const override { return Vector::Zero(v.size()); }
	};

	/// Autonomous diagonal operator; the scalar test equation is the 1x1 case.
	template <typename Scalar>
	class DiagonalOperator final : public LinearOperator<Scalar>
	{
	public:
		using typename LinearOperator<Scalar>::Real;
		using typename LinearOperator<Scalar>::Vector;

		explicit DiagonalOperator(Vector diagonal) : d_(std::move(diagonal)) {}

		int size() const override { return static_cast<int>(d_.size()); }
		Backend backend() const override { return Backend::Diagonal; }
		bool autonomous() const override { return true; }
		Vector apply(const Real &, const Vector &v) const override { return (d_.array() * v.array()).matrix(); }
		Vector shifted_solve(const Real &, const Real &sigma, const Vector &r) const override
		{
			Vector out(r.size());
			for (Eigen::Index i = 0; i < r.size(); ++i)
				out(i) = r(i) / (Scalar(sigma) + d_(i));
			return out;
		}
		const Vector &diagonal() const { return d_; }

	private:
		Vector d_;
	};

	/// Autonomous dense complex operator, for small test matrices.
	class DenseOperator final : public LinearOperator<Complex>
	{
	public:
		explicit DenseOperator(Eigen::MatrixXcd A) : A_(std::move(A)) {}

		int size() const override { return static_cast<int>(A_.rows()); }
		Backend backend() const override { return Backend::Dense; }
		bool autonomous() const override { return true; }
		VectorXc apply(const double &, const VectorXc &v) const override { return A_ * v; }
		VectorXc shifted_solve(const double &t, const double &sigma, const VectorXc &r) const override;
		const Eigen::MatrixXcd &matrix() const { return A_; }

	private:
		Eigen::MatrixXcd A_;
	};

	/// Sparse operator assembled on demand at time t. The most recent factorization of
	/// sigma I + A(t) is cached per (t, sigma); autonomous operators reuse it for every t.
	/// Assembly and factorization run outside the lock, so concurrent callers never block on
	/// each other's factorizations; the cache holds immutable shared snapshots.
	class SparseOperator final : public LinearOperator<Complex>
	{
	public:
		using Assembler = std::function<SparseMatrixXc(double t)>;

		SparseOperator(int size, Assembler assemble, bool autonomous);

		int size() const override { return size_; }
		Backend backend() const override { return Backend::Sparse; }
		bool autonomous() const override { return autonomous_; }
		VectorXc apply(const double &t, const VectorXc &v) const override;
		VectorXc shifted_solve(const double &t, const double &sigma, const VectorXc &r) const override;

		SparseMatrixXc matrix(double t) const;

		/// Number of LU factorizations performed so far.
		long factorizations() const { return factorizations_.load(); }

	private:
		int size_;
		Assembler assemble_;
		bool autonomous_;

		struct Factorization
		{
			double t;
			double sigma;
			Eigen::SparseLU<SparseMatrixXc> lu;
		};

		mutable std::mutex mutex_;
		mutable std::shared_ptr<const std::pair<double, SparseMatrixXc>> cached_matrix_;
		mutable std::shared_ptr<const Factorization> cached_lu_;
		mutable std::atomic<long> factorizations_{0};
	};

	/// Fourier multiplier with a real symbol on a periodic grid; autonomous.
	class SpectralOperator final : public LinearOperator<Complex>
	{
	public:
		SpectralOperator(const Grid &grid, Eigen::VectorXd symbol);

		int size() const override { return spectral_.grid().size(); }
		Backend backend() const override { return Backend::Spectral; }
		bool autonomous() const override { return true; }
		VectorXc apply(const double &t, const VectorXc &v) const override;
		VectorXc shifted_solve(const double &t, const double &sigma, const VectorXc &r) const override;

		const Eigen::VectorXd &symbol() const { return symbol_; }
		const Spectral &spectral() const { return spectral_; }

	private:
		Spectral spectral_;
		Eigen::VectorXd symbol_;
	};

	// ---------------------------------------------------------------------------------------
	// Example problems

	using Gradient = std::array<Complex, 2>;
	using CoefficientFn = std::function<double(const Point &x, double t)>;
	/// f(u, grad u, x, t)
	using SourceFn = std::function<Complex(Complex u, const Gradient &grad, const Point &x, double t)>;
	/// g(u, grad u, x, t), one component per axis
	using FluxFn = std::function<Gradient(Complex u, const Gradient &grad, const Point &x, double t)>;
	using ScalarFn = std::function<Complex(Complex u)>;

	struct Nonlinearity
	{
		SourceFn f;			   ///< empty means 0
		FluxFn g;			   ///< empty means 0
		bool uses_gradient = false; ///< whether f or g read grad u
	};

	struct AssembledProblem
	{
		std::shared_ptr<const LinearOperator<Complex>> A;
		std::shared_ptr<const NonlinearTerm<Complex>> B;
	};

	/// -div((a + i b) grad u) by conservative centered differences with midpoint coefficients,
	/// and B(t, v) = f(v, x, t) + div g(v, x, t). Throws CoercivityError if a <= 0 at a midpoint
	/// for t = 0 (later times are checked at assembly).
	AssembledProblem assemble_example1(const Grid &grid, CoefficientFn a, CoefficientFn b, Nonlinearity nonlinearity = {},
									   bool autonomous = false);

	/// As example 1 with f and g depending on grad u (centered differences; one-sided second
	/// order at Dirichlet boundary nodes).
	AssembledProblem assemble_example2(const Grid &grid, CoefficientFn a, CoefficientFn b, Nonlinearity nonlinearity,
									   bool autonomous = false);

	/// (-Laplace)^{1/2} as the multiplier |xi| (0 on the constant mode), B(v) = f(v).
	AssembledProblem assemble_example3(const Grid &grid, ScalarFn f);

	/// Laplace^2 as |xi|^4, B(v) = Laplace f(v) evaluated spectrally.
	AssembledProblem assemble_example4(const Grid &grid, ScalarFn f);

	/// Just the sparse FD operator of examples 1 and 2.
	std::shared_ptr<SparseOperator> assemble_diffusion(const Grid &grid, CoefficientFn a, CoefficientFn b, bool autonomous);

	/// Nodal gradient of a grid state: centered differences, periodic wrap or zero Dirichlet data.
	std::array<VectorXc, 2> fd_gradient(const Grid &grid, const VectorXc &v);

	/// Dense matrix of A(t), by unit-vector application for non-sparse backends.
	Eigen::MatrixXcd to_dense(const LinearOperator<Complex> &op, double t);

	/// (A_s, A_a) = ((A + A*)/2, (A - A*)/2). Throws ConfigurationError for spectral operators
	/// with non-real symbols (not produced by this library).
	std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> hermitian_parts(const LinearOperator<Complex> &op, double t);

	/// Smallest Re<Av, v> / <v, v> over a few pseudo-random vectors (fixed seed).
	double sampled_coercivity(const LinearOperator<Complex> &op, double t, int samples = 4);
} // namespace imexbdf
