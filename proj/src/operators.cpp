#include <imexbdf/operators.hpp>

#include <imexbdf/errors.hpp>

#include <cmath>
#include <random>
#include <sstream>

namespace imexbdf
{
	namespace
	{
		/// Index of the neighbour of unknown i along axis d in direction dir (+1/-1),
		/// or -1 when that neighbour is a Dirichlet boundary node.
		int neighbour(const Grid &grid, int i, int d, int dir)
		{
			const int nx = grid.points(0);
			int ix = i % nx;
			int iy = i / nx;
			int &j = d == 0 ? ix : iy;
			const int n = grid.points(d);
			j += dir;
			if (j < 0 || j >= n)
			{
				if (grid.boundary() == Boundary::Dirichlet)
					return -1;
				j = (j + n) % n;
			}
			return grid.index(ix, iy);
		}

		/// Midpoint between node jl and node jl + 1 along axis d; jl = -1 and jl + 1 = points
		/// denote the boundary (Dirichlet) or wrap around (periodic). Computed identically for
		/// both nodes of a pair so that symmetric coefficients give an exactly symmetric matrix.
		double midpoint(const Grid &grid, int d, int jl)
		{
			const int n = grid.points(d);
			if (jl < 0 && grid.boundary() == Boundary::Periodic)
				jl = n - 1;
			const double left = jl < 0 ? grid.axis(d).lo : grid.coordinate(d, jl);
			const double right = jl + 1 >= n ? grid.axis(d).hi : grid.coordinate(d, jl + 1);
			return 0.5 * (left + right);
		}

		void require_size(const Grid &grid, const VectorXc &v)
		{
			if (v.size() != grid.size())
			{
				std::ostringstream msg;
				msg << "state has " << v.size() << " entries but the grid has " << grid.size() << " unknowns";
				throw ConfigurationError(msg.str());
			}
		}

		SparseMatrixXc assemble_fd(const Grid &grid, const CoefficientFn &a, const CoefficientFn &b, double t)
		{
			const int n = grid.size();
			std::vector<Eigen::Triplet<Complex>> triplets;
			triplets.reserve(static_cast<std::size_t>(n) * (1 + 4 * grid.dim()));
			for (int i = 0; i < n; ++i)
			{
				const Point x = grid.node(i);
				for (int d = 0; d < grid.dim(); ++d)
				{
					const double inv_h2 = 1.0 / (grid.h(d) * grid.h(d));
					for (int dir : {-1, 1})
					{
						const int j_axis = d == 0 ? i % grid.points(0) : i / grid.points(0);
						Point mid = x;
						mid[d] = midpoint(grid, d, dir < 0 ? j_axis - 1 : j_axis);
						const double av = a(mid, t);
						if (!(av > 0.0))
						{
							std::ostringstream msg;
							msg << "coefficient a = " << av << " is not positive at (" << mid[0] << ", " << mid[1]
								<< "), t = " << t;
							throw CoercivityError(msg.str());
						}
						const Complex c = Complex(av, b ? b(mid, t) : 0.0) * inv_h2;
						triplets.emplace_back(i, i, c);
						const int j = neighbour(grid, i, d, dir);
						if (j >= 0)
							triplets.emplace_back(i, j, -c);
					}
				}
			}
			SparseMatrixXc A(n, n);
			A.setFromTriplets(triplets.begin(), triplets.end());
			A.makeCompressed();
			return A;
		}

		/// Normal derivative at the Dirichlet boundary node next to unknown i along axis d, from the
		/// boundary value 0 and the three nearest unknowns. The one-sided stencil is second order
		/// with the same leading error h^2 u'''/6 as the centered interior stencil, which keeps the
		/// centered divergence at the adjacent node second order as well.
		Complex boundary_normal_derivative(const Grid &grid, const VectorXc &v, int i, int d, int dir)
		{
			const int i1 = neighbour(grid, i, d, -dir);
			const int i2 = neighbour(grid, i1, d, -dir);
			const Complex s = 3.5 * v(i) - 2.0 * v(i1) + 0.5 * v(i2);
			return -static_cast<double>(dir) * s / grid.h(d);
		}

		class FdNonlinearTerm final : public NonlinearTerm<Complex>
		{
		public:
			FdNonlinearTerm(const Grid &grid, Nonlinearity fns) : grid_(grid), fns_(std::move(fns)) {}

			VectorXc evaluate(const double &t, const VectorXc &v) const override
			{
				require_size(grid_, v);
				const int n = grid_.size();
				VectorXc out = VectorXc::Zero(n);
				if (!fns_.f && !fns_.g)
					return out;

				std::array<VectorXc, 2> grad;
				if (fns_.uses_gradient)
					grad = fd_gradient(grid_, v);
				auto grad_at = [&](int i) {
					Gradient gr{Complex(0.0), Complex(0.0)};
					if (fns_.uses_gradient)
						for (int d = 0; d < grid_.dim(); ++d)
							gr[d] = grad[d](i);
					return gr;
				};

				std::vector<Gradient> flux;
				if (fns_.g)
				{
					flux.resize(n);
					for (int i = 0; i < n; ++i)
						flux[i] = fns_.g(v(i), grad_at(i), grid_.node(i), t);
				}

				for (int i = 0; i < n; ++i)
				{
					const Point x = grid_.node(i);
					if (fns_.f)
						out(i) += fns_.f(v(i), grad_at(i), x, t);
					if (!fns_.g)
						continue;
					for (int d = 0; d < grid_.dim(); ++d)
					{
						Complex side[2];
						for (int s = 0; s < 2; ++s)
						{
							const int dir = s == 0 ? -1 : 1;
							const int j = neighbour(grid_, i, d, dir);
							if (j >= 0)
							{
								side[s] = flux[j][d];
								continue;
							}
							Point xb = x;
							xb[d] = dir < 0 ? grid_.axis(d).lo : grid_.axis(d).hi;
							Gradient gb{Complex(0.0), Complex(0.0)};
							if (fns_.uses_gradient)
								gb[d] = boundary_normal_derivative(grid_, v, i, d, dir);
							side[s] = fns_.g(Complex(0.0), gb, xb, t)[d];
						}
						out(i) += (side[1] - side[0]) / (2.0 * grid_.h(d));
					}
				}
				return out;
			}

		private:
			Grid grid_;
			Nonlinearity fns_;
		};

		void require_periodic(const Grid &grid, const char *what)
		{
			if (grid.boundary() != Boundary::Periodic)
				throw ConfigurationError(std::string(what) + " requires a periodic grid");
		}
	} // namespace

	VectorXc DenseOperator::shifted_solve(const double &, const double &sigma, const VectorXc &r) const
	{
		Eigen::MatrixXcd M = A_;
		M.diagonal().array() += sigma;
		Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
		VectorXc u = lu.solve(r);
		if (!u.allFinite())
			throw ComputationError("dense shifted solve produced non-finite values");
		return u;
	}

	SparseOperator::SparseOperator(int size, Assembler assemble, bool autonomous)
		: size_(size), assemble_(std::move(assemble)), autonomous_(autonomous)
	{
		if (size_ <= 0 || !assemble_)
			throw ConfigurationError("sparse operator needs a positive size and an assembler");
	}

	SparseMatrixXc SparseOperator::matrix(double t) const
	{
		{
			std::lock_guard lock(mutex_);
			if (cached_matrix_ && (autonomous_ || cached_matrix_->first == t))
				return cached_matrix_->second;
		}
		SparseMatrixXc A = assemble_(t);
		if (A.rows() != size_ || A.cols() != size_)
			throw ConfigurationError("assembled operator has the wrong dimensions");
		A.makeCompressed();
		auto entry = std::make_shared<const std::pair<double, SparseMatrixXc>>(t, A);
		std::lock_guard lock(mutex_);
		cached_matrix_ = std::move(entry);
		return A;
	}

	VectorXc SparseOperator::apply(const double &t, const VectorXc &v) const
	{
		if (v.size() != size_)
			throw ConfigurationError("operator applied to a state of the wrong size");
		return matrix(t) * v;
	}

	VectorXc SparseOperator::shifted_solve(const double &t, const double &sigma, const VectorXc &r) const
	{
		if (r.size() != size_)
			throw ConfigurationError("shifted solve with a right-hand side of the wrong size");
		std::shared_ptr<const Factorization> f;
		{
			std::lock_guard lock(mutex_);
			if (cached_lu_ && cached_lu_->sigma == sigma && (autonomous_ || cached_lu_->t == t))
				f = cached_lu_;
		}
		if (!f)
		{
			SparseMatrixXc I(size_, size_);
			I.setIdentity();
			SparseMatrixXc M = matrix(t) + Complex(sigma) * I;
			M.makeCompressed();
			auto fresh = std::make_shared<Factorization>();
			fresh->t = t;
			fresh->sigma = sigma;
			fresh->lu.analyzePattern(M);
			fresh->lu.factorize(M);
			if (fresh->lu.info() != Eigen::Success)
			{
				std::ostringstream msg;
				msg << "sparse LU factorization failed at t = " << t << ", sigma = " << sigma << ": "
					<< fresh->lu.lastErrorMessage();
				throw ComputationError(msg.str());
			}
			++factorizations_;
			f = fresh;
			std::lock_guard lock(mutex_);
			cached_lu_ = f;
		}
		VectorXc u = f->lu.solve(r);
		if (!u.allFinite())
			throw ComputationError("sparse shifted solve produced non-finite values");
		return u;
	}

	SpectralOperator::SpectralOperator(const Grid &grid, Eigen::VectorXd symbol)
		: spectral_(grid), symbol_(std::move(symbol))
	{
		if (symbol_.size() != grid.size())
			throw ConfigurationError("spectral symbol size does not match the grid");
	}

	VectorXc SpectralOperator::apply(const double &, const VectorXc &v) const
	{
		require_size(spectral_.grid(), v);
		return spectral_.apply_symbol(v, symbol_.cast<Complex>());
	}

	VectorXc SpectralOperator::shifted_solve(const double &, const double &sigma, const VectorXc &r) const
	{
		require_size(spectral_.grid(), r);
		VectorXc c = spectral_.forward(r);
		for (Eigen::Index i = 0; i < c.size(); ++i)
		{
			const double denom = sigma + symbol_(i);
			if (denom == 0.0)
				throw ComputationError("shifted spectral operator is singular");
			c(i) /= denom;
		}
		return spectral_.inverse(c);
	}

	std::array<VectorXc, 2> fd_gradient(const Grid &grid, const VectorXc &v)
	{
		require_size(grid, v);
		std::array<VectorXc, 2> grad{VectorXc::Zero(v.size()), VectorXc::Zero(v.size())};
		for (int d = 0; d < grid.dim(); ++d)
		{
			const double scale = 1.0 / (2.0 * grid.h(d));
			for (int i = 0; i < grid.size(); ++i)
			{
				const int jm = neighbour(grid, i, d, -1);
				const int jp = neighbour(grid, i, d, 1);
				const Complex um = jm >= 0 ? v(jm) : Complex(0.0);
				const Complex up = jp >= 0 ? v(jp) : Complex(0.0);
				grad[d](i) = (up - um) * scale;
			}
		}
		return grad;
	}

	std::shared_ptr<SparseOperator> assemble_diffusion(const Grid &grid, CoefficientFn a, CoefficientFn b, bool autonomous)
	{
		if (!a)
			throw ConfigurationError("diffusion coefficient a is required");
		auto op = std::make_shared<SparseOperator>(
			grid.size(), [grid, a = std::move(a), b = std::move(b)](double t) { return assemble_fd(grid, a, b, t); },
			autonomous);
		// eager assembly validates a > 0 at t = 0
		const double c = sampled_coercivity(*op, 0.0);
		if (!(c > 0.0))
			throw CoercivityError("assembled operator is not coercive on sampled vectors");
		return op;
	}

	AssembledProblem assemble_example1(const Grid &grid, CoefficientFn a, CoefficientFn b, Nonlinearity nonlinearity,
									   bool autonomous)
	{
		nonlinearity.uses_gradient = false;
		return assemble_example2(grid, std::move(a), std::move(b), std::move(nonlinearity), autonomous);
	}

	AssembledProblem assemble_example2(const Grid &grid, CoefficientFn a, CoefficientFn b, Nonlinearity nonlinearity,
									   bool autonomous)
	{
		AssembledProblem p;
		p.A = assemble_diffusion(grid, std::move(a), std::move(b), autonomous);
		p.B = std::make_shared<FdNonlinearTerm>(grid, std::move(nonlinearity));
		return p;
	}

	AssembledProblem assemble_example3(const Grid &grid, ScalarFn f)
	{
		require_periodic(grid, "example 3");
		Spectral spectral(grid);
		Eigen::VectorXd symbol = spectral.xi_squared().array().sqrt();
		AssembledProblem p;
		p.A = std::make_shared<SpectralOperator>(grid, std::move(symbol));
		p.B = std::make_shared<FunctionTerm<Complex>>([f = std::move(f)](const double &, const VectorXc &v) {
			VectorXc out(v.size());
			if (!f)
				return VectorXc(VectorXc::Zero(v.size()));
			for (Eigen::Index i = 0; i < v.size(); ++i)
				out(i) = f(v(i));
			return out;
		});
		return p;
	}

	AssembledProblem assemble_example4(const Grid &grid, ScalarFn f)
	{
		require_periodic(grid, "example 4");
		Spectral spectral(grid);
		Eigen::VectorXd symbol = spectral.xi_squared().array().square();
		Eigen::VectorXcd laplace = (-spectral.xi_squared()).cast<Complex>();
		AssembledProblem p;
		p.A = std::make_shared<SpectralOperator>(grid, std::move(symbol));
		p.B = std::make_shared<FunctionTerm<Complex>>(
			[spectral, laplace, f = std::move(f)](const double &, const VectorXc &v) {
				if (!f)
					return VectorXc(VectorXc::Zero(v.size()));
				VectorXc fv(v.size());
				for (Eigen::Index i = 0; i < v.size(); ++i)
					fv(i) = f(v(i));
				return spectral.apply_symbol(fv, laplace);
			});
		return p;
	}

	Eigen::MatrixXcd to_dense(const LinearOperator<Complex> &op, double t)
	{
		if (const auto *sparse = dynamic_cast<const SparseOperator *>(&op))
			return Eigen::MatrixXcd(sparse->matrix(t));
		if (const auto *dense = dynamic_cast<const DenseOperator *>(&op))
			return dense->matrix();
		const int n = op.size();
		Eigen::MatrixXcd M(n, n);
		VectorXc e = VectorXc::Zero(n);
		for (int j = 0; j < n; ++j)
		{
			e(j) = 1.0;
			M.col(j) = op.apply(t, e);
			e(j) = 0.0;
		}
		return M;
	}

	std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> hermitian_parts(const LinearOperator<Complex> &op, double t)
	{
		const Eigen::MatrixXcd A = to_dense(op, t);
		Eigen::MatrixXcd As = 0.5 * (A + A.adjoint());
		Eigen::MatrixXcd Aa = 0.5 * (A - A.adjoint());
		return {std::move(As), std::move(Aa)};
	}

	double sampled_coercivity(const LinearOperator<Complex> &op, double t, int samples)
	{
		std::mt19937_64 rng(20240611);
		std::normal_distribution<double> normal;
		double worst = std::numeric_limits<double>::infinity();
		for (int s = 0; s < samples; ++s)
		{
			VectorXc v(op.size());
			for (Eigen::Index i = 0; i < v.size(); ++i)
				v(i) = Complex(normal(rng), normal(rng));
			const Complex q = v.dot(op.apply(t, v));
			worst = std::min(worst, q.real() / v.squaredNorm());
		}
		return worst;
	}
} // namespace imexbdf
