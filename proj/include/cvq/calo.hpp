#pragma once

// Calorimeter-style data handling: 25x25 energy grids are averaged over the
// longitudinal axis (rows) into a 25-vector and binned 8/9/8 into 3 pixels,
// as well as a synthetic stand-in generator whose samples peak at pixel 1
// with an occasional peak at pixel 2.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cvq {

using ImageSample = std::vector<double>;     // 3 pixels
using Dataset = std::vector<ImageSample>;

inline constexpr std::size_t kRawEdge = 25;

struct RawImage {
    /// row-major kRawEdge x kRawEdge grid, all entries finite and >= 0
    std::vector<double> grid;

    static RawImage constant(double value);
    void validate() const;
    double& at(std::size_t row, std::size_t col) { return grid[row * kRawEdge + col]; }
    double at(std::size_t row, std::size_t col) const { return grid[row * kRawEdge + col]; }
};

/// Average over rows, then average columns 0-7 / 8-16 / 17-24 into 3 pixels.
ImageSample reduce(const RawImage& raw);

struct ScaleRecord {
    double max_pixel = 1.0;  // dataset-wide maximum before normalization
};

/// Divides every pixel by the dataset-wide maximum; outputs land in [0, 1].
/// Throws on an all-zero dataset.
std::pair<Dataset, ScaleRecord> normalize(const Dataset& dataset);
Dataset denormalize(const Dataset& dataset, const ScaleRecord& scale);

/// n samples of template (0.3, 1.0, 0.45) — or (0.3, 0.45, 1.0) with
/// probability peak2_fraction — times a lognormal energy factor (sigma 0.25)
/// with per-pixel relative jitter (sigma 0.08), clamped at zero.
Dataset synth_dataset(std::size_t n, double peak2_fraction, std::uint64_t seed);

enum class DatasetFormat { Raw25, Reduced };
DatasetFormat dataset_format_from_name(const std::string& name);
const char* dataset_format_name(DatasetFormat format);

/// Reduced CSV: 3 comma-separated values per line. Raw25 CSV: 625 values per
/// line, reduced while loading. Malformed lines are reported with their line
/// number; negative or non-finite entries are validation errors.
Dataset load_dataset(const std::string& path, DatasetFormat format = DatasetFormat::Reduced);

/// Writes reduced CSV with 17 significant digits, so a load round-trips
/// exactly.
void save_dataset(const std::string& path, const Dataset& dataset);

ImageSample dataset_mean(const Dataset& dataset);

}  // namespace cvq
