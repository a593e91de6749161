#pragma once

#include <string>
#include <vector>

namespace odflow::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Static polyline chart (loss curves); one color per series, legend included.
std::string line_chart(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                       const std::string& y_label);

// Observed-vs-predicted scatter with the identity diagonal for reference.
std::string scatter_chart(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                          const std::string& x_label, const std::string& y_label);

}  // namespace odflow::svg
