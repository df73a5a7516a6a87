#include "polpair/spectrum_grid.hpp"

#include <cmath>

#include <fmt/format.h>

#include "polpair/errors.hpp"

namespace polpair {

std::size_t SpectrumGrid::size() const
{
    std::size_t n = 1;
    for (const auto& axis : axes) {
        n *= axis.values.size();
    }
    return n;
}

double& SpectrumGrid::at(std::size_t i, std::size_t j)
{
    const std::size_t stride = axes.size() > 1 ? axes[1].values.size() : 1;
    return values.at(i * stride + j);
}

double SpectrumGrid::at(std::size_t i, std::size_t j) const
{
    const std::size_t stride = axes.size() > 1 ? axes[1].values.size() : 1;
    return values.at(i * stride + j);
}

void SpectrumGrid::validate() const
{
    if (axes.empty() || axes.size() > 2) {
        throw InvalidArgument(fmt::format("a spectrum grid has 1 or 2 axes (got {})", axes.size()));
    }
    for (const auto& axis : axes) {
        if (axis.values.empty()) {
            throw InvalidArgument(fmt::format("grid axis '{}' is empty", axis.name));
        }
    }
    if (values.size() != size()) {
        throw InvalidArgument(fmt::format("grid holds {} values for {} cells", values.size(), size()));
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("grid value is not finite");
        }
    }
}

SpectrumGrid make_grid(std::string quantity, std::string unit, std::vector<GridAxis> axes)
{
    SpectrumGrid grid;
    grid.quantity = std::move(quantity);
    grid.unit = std::move(unit);
    grid.axes = std::move(axes);
    grid.values.assign(grid.size(), 0.0);
    return grid;
}

}  // namespace polpair
