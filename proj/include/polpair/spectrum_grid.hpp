#pragma once

#include <map>
#include <string>
#include <vector>

namespace polpair {

struct GridAxis {
    std::string name;
    std::string unit;
    std::vector<double> values;
};

// Rectangular grid of one real quantity over one or two axes. Values are
// stored row-major: the last axis varies fastest.
struct SpectrumGrid {
    std::string quantity;
    std::string unit;
    std::vector<GridAxis> axes;
    std::vector<double> values;
    std::map<std::string, std::string> metadata;

    std::size_t size() const;
    double& at(std::size_t i, std::size_t j = 0);
    double at(std::size_t i, std::size_t j = 0) const;

    // Throws InvalidArgument unless there are 1 or 2 non-empty axes, the
    // value count matches and every value is finite.
    void validate() const;
};

// Builds an all-zero grid over the given axes.
SpectrumGrid make_grid(std::string quantity, std::string unit, std::vector<GridAxis> axes);

}  // namespace polpair
