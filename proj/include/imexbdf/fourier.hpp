#pragma once

#include <imexbdf/grid.hpp>

#include <Eigen/Dense>

#include <vector>

namespace imexbdf
{
	/// Discrete Fourier transforms on a periodic grid (1D or 2D tensor product).
	/// Instances are immutable; each call uses its own FFT plan so concurrent use is safe.
	class Spectral
	{
	public:
		/// Throws ConfigurationError unless the grid is periodic.
		explicit Spectral(const Grid &grid);

		const Grid &grid() const { return grid_; }

		Eigen::VectorXcd forward(const Eigen::VectorXcd &v) const;
		/// Inverse of forward (includes the 1/N normalization).
		Eigen::VectorXcd inverse(const Eigen::VectorXcd &c) const;

		/// Angular wavenumber xi_d of each coefficient index along axis d.
		const std::vector<double> &wavenumbers(int d) const { return xi_[d]; }

		/// |xi|^2 for every coefficient in storage order.
		const Eigen::VectorXd &xi_squared() const { return xi2_; }

		/// inverse(symbol .* forward(v)).
		Eigen::VectorXcd apply_symbol(const Eigen::VectorXcd &v, const Eigen::VectorXcd &symbol) const;

		/// Spectral partial derivative along axis d (Nyquist mode dropped).
		Eigen::VectorXcd derivative(const Eigen::VectorXcd &v, int d) const;

	private:
		void transform(Eigen::VectorXcd &v, bool inverse) const;

		Grid grid_;
		std::vector<std::vector<double>> xi_;
		Eigen::VectorXd xi2_;
	};
} // namespace imexbdf
