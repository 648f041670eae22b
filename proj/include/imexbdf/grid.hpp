#pragma once

#include <array>
#include <string>
#include <vector>

namespace imexbdf
{
	enum class Boundary
	{
		Dirichlet, ///< homogeneous; unknowns are the interior nodes
		Periodic   ///< the duplicate endpoint is excluded
	};

	struct Axis
	{
		double lo = 0.0;
		double hi = 1.0;
		int points = 0; ///< number of unknowns along this axis
	};

	using Point = std::array<double, 2>;

	/// Tensor-product grid in one or two dimensions. Unknowns are stored with x fastest.
	///
	/// Dirichlet: nodes x_j = lo + (j+1) h, j = 0..points-1, h = (hi - lo) / (points + 1);
	/// the boundary nodes lo and hi carry the value 0 and are not stored.
	/// Periodic: nodes x_j = lo + j h, h = (hi - lo) / points.
	class Grid
	{
	public:
		/// Throws ConfigurationError on fewer than 4 points, empty extents or dim not in {1, 2}.
		Grid(std::vector<Axis> axes, Boundary boundary);

		static Grid line(double lo, double hi, int points, Boundary boundary) { return Grid({{lo, hi, points}}, boundary); }

		int dim() const { return static_cast<int>(axes_.size()); }
		Boundary boundary() const { return boundary_; }
		const Axis &axis(int d) const { return axes_[d]; }
		double h(int d) const { return h_[d]; }
		int points(int d) const { return axes_[d].points; }

		/// Total number of unknowns.
		int size() const { return size_; }

		/// Quadrature weight of one node: product of mesh widths.
		double cell_volume() const;

		/// Measure of the domain.
		double measure() const;

		double coordinate(int d, int j) const;
		Point node(int index) const;
		int index(int ix, int iy = 0) const { return ix + axes_[0].points * iy; }

		std::vector<Point> nodes() const;

		std::string describe() const;

	private:
		std::vector<Axis> axes_;
		Boundary boundary_;
		std::array<double, 2> h_{};
		int size_ = 0;
	};
} // namespace imexbdf
