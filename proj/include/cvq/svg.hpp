#pragma once

// Minimal self-contained SVG line charts for run artifacts. CSV stays the
// canonical output; these are a convenience for eyeballing runs.

#include <string>
#include <vector>

namespace cvq::svg {

struct Series {
    std::string label;
    std::vector<double> values;  // x is the index (epoch)
    std::string color = "#1f77b4";
    bool dashed = false;
};

/// Horizontal reference line with a label (e.g. an equilibrium value).
struct RefLine {
    std::string label;
    double value;
};

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& y_label, const std::vector<Series>& series,
                      const std::vector<RefLine>& ref_lines = {});

}  // namespace cvq::svg
