#include <imexbdf/fourier.hpp>

#include <imexbdf/errors.hpp>

#include <unsupported/Eigen/FFT>

#include <numbers>

namespace imexbdf
{
	Spectral::Spectral(const Grid &grid) : grid_(grid)
	{
		if (grid.boundary() != Boundary::Periodic)
			throw ConfigurationError("spectral operators require a periodic grid");
		for (int d = 0; d < grid.dim(); ++d)
		{
			const int n = grid.points(d);
			const double length = grid.axis(d).hi - grid.axis(d).lo;
			std::vector<double> xi(n);
			for (int m = 0; m < n; ++m)
			{
				const int wave = m < n / 2 ? m : m - n;
				xi[m] = 2.0 * std::numbers::pi * wave / length;
			}
			xi_.push_back(std::move(xi));
		}
		xi2_.resize(grid.size());
		const int nx = grid.points(0);
		for (int i = 0; i < grid.size(); ++i)
		{
			double s = xi_[0][i % nx] * xi_[0][i % nx];
			if (grid.dim() == 2)
				s += xi_[1][i / nx] * xi_[1][i / nx];
			xi2_(i) = s;
		}
	}

	void Spectral::transform(Eigen::VectorXcd &v, bool inverse) const
	{
		Eigen::FFT<double> fft;
		const int nx = grid_.points(0);
		const int ny = grid_.dim() == 2 ? grid_.points(1) : 1;

		std::vector<std::complex<double>> in(nx), out(nx);
		for (int iy = 0; iy < ny; ++iy)
		{
			for (int ix = 0; ix < nx; ++ix)
				in[ix] = v(ix + nx * iy);
			if (inverse)
				fft.inv(out, in);
			else
				fft.fwd(out, in);
			for (int ix = 0; ix < nx; ++ix)
				v(ix + nx * iy) = out[ix];
		}
		if (ny > 1)
		{
			in.resize(ny);
			out.resize(ny);
			for (int ix = 0; ix < nx; ++ix)
			{
				for (int iy = 0; iy < ny; ++iy)
					in[iy] = v(ix + nx * iy);
				if (inverse)
					fft.inv(out, in);
				else
					fft.fwd(out, in);
				for (int iy = 0; iy < ny; ++iy)
					v(ix + nx * iy) = out[iy];
			}
		}
	}

	Eigen::VectorXcd Spectral::forward(const Eigen::VectorXcd &v) const
	{
		Eigen::VectorXcd c = v;
		transform(c, false);
		return c;
	}

	Eigen::VectorXcd Spectral::inverse(const Eigen::VectorXcd &c) const
	{
		Eigen::VectorXcd v = c;
		transform(v, true);
		return v;
	}

	Eigen::VectorXcd Spectral::apply_symbol(const Eigen::VectorXcd &v, const Eigen::VectorXcd &symbol) const
	{
		Eigen::VectorXcd c = forward(v);
		c.array() *= symbol.array();
		return inverse(c);
	}

	Eigen::VectorXcd Spectral::derivative(const Eigen::VectorXcd &v, int d) const
	{
		const int nx = grid_.points(0);
		const int n_axis = grid_.points(d);
		Eigen::VectorXcd symbol(grid_.size());
		for (int i = 0; i < grid_.size(); ++i)
		{
			const int m = d == 0 ? i % nx : i / nx;
			const bool nyquist = n_axis % 2 == 0 && m == n_axis / 2;
			symbol(i) = nyquist ? std::complex<double>(0.0) : std::complex<double>(0.0, xi_[d][m]);
		}
		return apply_symbol(v, symbol);
	}
} // namespace imexbdf
