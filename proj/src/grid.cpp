#include <imexbdf/grid.hpp>

#include <imexbdf/errors.hpp>

#include <sstream>

namespace imexbdf
{
	Grid::Grid(std::vector<Axis> axes, Boundary boundary) : axes_(std::move(axes)), boundary_(boundary)
	{
		if (axes_.empty() || axes_.size() > 2)
			throw ConfigurationError("grid dimension must be 1 or 2");
		size_ = 1;
		for (std::size_t d = 0; d < axes_.size(); ++d)
		{
			const auto &a = axes_[d];
			if (a.points < 4)
				throw ConfigurationError("grid needs at least 4 points per axis");
			if (!(a.hi > a.lo))
				throw ConfigurationError("grid axis must have hi > lo");
			h_[d] = boundary_ == Boundary::Dirichlet ? (a.hi - a.lo) / (a.points + 1) : (a.hi - a.lo) / a.points;
			size_ *= a.points;
		}
	}

	double Grid::cell_volume() const
	{
		double v = 1.0;
		for (int d = 0; d < dim(); ++d)
			v *= h_[d];
		return v;
	}

	double Grid::measure() const
	{
		double m = 1.0;
		for (const auto &a : axes_)
			m *= a.hi - a.lo;
		return m;
	}

	double Grid::coordinate(int d, int j) const
	{
		const int offset = boundary_ == Boundary::Dirichlet ? 1 : 0;
		return axes_[d].lo + (j + offset) * h_[d];
	}

	Point Grid::node(int index) const
	{
		const int nx = axes_[0].points;
		Point p{coordinate(0, index % nx), 0.0};
		if (dim() == 2)
			p[1] = coordinate(1, index / nx);
		return p;
	}

	std::vector<Point> Grid::nodes() const
	{
		std::vector<Point> out;
		out.reserve(size_);
		for (int i = 0; i < size_; ++i)
			out.push_back(node(i));
		return out;
	}

	std::string Grid::describe() const
	{
		std::ostringstream os;
		os << (boundary_ == Boundary::Dirichlet ? "dirichlet" : "periodic");
		for (const auto &a : axes_)
			os << " [" << a.lo << "," << a.hi << "]x" << a.points;
		return os.str();
	}
} // namespace imexbdf
