#include "cvq/calo.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cvq/rng.hpp"

namespace cvq {

namespace {

// contiguous 8/9/8 binning of the 25 columns
constexpr std::array<std::pair<std::size_t, std::size_t>, 3> kBins{
    {{0, 8}, {8, 17}, {17, 25}}};

constexpr std::array<double, 3> kPeak1Template{0.3, 1.0, 0.45};
constexpr std::array<double, 3> kPeak2Template{0.3, 0.45, 1.0};
constexpr double kEnergySigma = 0.25;
constexpr double kJitterSigma = 0.08;

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

RawImage RawImage::constant(double value) {
    RawImage img;
    img.grid.assign(kRawEdge * kRawEdge, value);
    return img;
}

void RawImage::validate() const {
    if (grid.size() != kRawEdge * kRawEdge) {
        throw std::invalid_argument("RawImage must hold exactly " +
                                    std::to_string(kRawEdge * kRawEdge) + " values");
    }
    for (double v : grid) {
        if (!std::isfinite(v)) throw std::invalid_argument("RawImage contains a non-finite value");
        if (v < 0.0) throw std::invalid_argument("RawImage contains a negative energy");
    }
}

ImageSample reduce(const RawImage& raw) {
    raw.validate();
    // longitudinal average: over rows, per column
    std::array<double, kRawEdge> col_mean{};
    for (std::size_t r = 0; r < kRawEdge; ++r) {
        for (std::size_t c = 0; c < kRawEdge; ++c) {
            col_mean[c] += raw.at(r, c);
        }
    }
    for (double& v : col_mean) v /= static_cast<double>(kRawEdge);

    ImageSample out(3, 0.0);
    for (std::size_t b = 0; b < 3; ++b) {
        const auto [begin, end] = kBins[b];
        double acc = 0.0;
        for (std::size_t c = begin; c < end; ++c) acc += col_mean[c];
        out[b] = acc / static_cast<double>(end - begin);
    }
    return out;
}

std::pair<Dataset, ScaleRecord> normalize(const Dataset& dataset) {
    if (dataset.empty()) throw std::invalid_argument("normalize: empty dataset");
    double max_pixel = 0.0;
    for (const auto& img : dataset) {
        for (double v : img) max_pixel = std::max(max_pixel, v);
    }
    if (max_pixel == 0.0) throw std::invalid_argument("normalize: all-zero dataset");
    Dataset out = dataset;
    for (auto& img : out) {
        for (double& v : img) v /= max_pixel;
    }
    return {std::move(out), ScaleRecord{max_pixel}};
}

Dataset denormalize(const Dataset& dataset, const ScaleRecord& scale) {
    Dataset out = dataset;
    for (auto& img : out) {
        for (double& v : img) v *= scale.max_pixel;
    }
    return out;
}

Dataset synth_dataset(std::size_t n, double peak2_fraction, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("synth_dataset: n must be >= 1");
    if (peak2_fraction < 0.0 || peak2_fraction > 1.0) {
        throw std::invalid_argument("synth_dataset: peak2_fraction must be in [0, 1]");
    }
    Rng rng(seed);
    Dataset out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool peak2 = rng.uniform() < peak2_fraction;
        const auto& tmpl = peak2 ? kPeak2Template : kPeak1Template;
        const double energy = rng.lognormal(kEnergySigma);
        ImageSample img(3);
        for (std::size_t p = 0; p < 3; ++p) {
            const double jitter = 1.0 + rng.normal(0.0, kJitterSigma);
            img[p] = std::max(0.0, tmpl[p] * energy * jitter);
        }
        out.push_back(std::move(img));
    }
    return out;
}

DatasetFormat dataset_format_from_name(const std::string& name) {
    if (name == "raw25") return DatasetFormat::Raw25;
    if (name == "reduced") return DatasetFormat::Reduced;
    throw std::invalid_argument("unknown dataset format: " + name);
}

const char* dataset_format_name(DatasetFormat format) {
    return format == DatasetFormat::Raw25 ? "raw25" : "reduced";
}

Dataset load_dataset(const std::string& path, DatasetFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    const std::size_t expected = format == DatasetFormat::Raw25 ? kRawEdge * kRawEdge : 3;

    Dataset out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> values;
        values.reserve(expected);
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t comma = line.find(',', pos);
            const std::string field =
                line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(field, &used);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": unparsable value '" + field + "'");
            }
            if (used == 0) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": unparsable value '" + field + "'");
            }
            values.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (values.size() != expected) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(expected) + " values, got " +
                                     std::to_string(values.size()));
        }
        for (double v : values) {
            if (!std::isfinite(v)) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": non-finite value");
            }
            if (v < 0.0) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": negative energy value");
            }
        }
        if (format == DatasetFormat::Raw25) {
            RawImage raw;
            raw.grid = std::move(values);
            out.push_back(reduce(raw));
        } else {
            out.push_back(std::move(values));
        }
    }
    return out;
}

void save_dataset(const std::string& path, const Dataset& dataset) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path);
    for (const auto& img : dataset) {
        for (std::size_t p = 0; p < img.size(); ++p) {
            if (p) out << ',';
            out << format17(img[p]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failure on dataset file: " + path);
}

ImageSample dataset_mean(const Dataset& dataset) {
    if (dataset.empty()) throw std::invalid_argument("dataset_mean: empty dataset");
    ImageSample mean(dataset.front().size(), 0.0);
    for (const auto& img : dataset) {
        for (std::size_t p = 0; p < mean.size(); ++p) mean[p] += img[p];
    }
    for (double& v : mean) v /= static_cast<double>(dataset.size());
    return mean;
}

}  // namespace cvq
