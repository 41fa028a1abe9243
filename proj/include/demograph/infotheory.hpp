#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "demograph/trajectory.hpp"

namespace demograph {

/// Sliding-window estimator settings.
///  phi      window length in frames (even, >= 2)
///  stride   frames between consecutive window centers
///  zeta     histogram bin width in meters
///  epsilon  positive scale applied to every entropy term (1/ln 2 gives bits)
///  derivative_smoothing  boxcar width applied before differencing; 0 or 1 = off
struct WindowConfig {
    int phi = 8;
    int stride = 1;
    double zeta = 0.005;
    double epsilon = 1.0;
    int derivative_smoothing = 0;

    /// Throws InvalidConfig.
    void validate() const;
    friend bool operator==(const WindowConfig&, const WindowConfig&) = default;
};

/// Window-center grid for a signal of a given length. Window at center c
/// covers frames [c - phi/2, c + phi/2).
struct WindowGrid {
    int phi = 2;
    int stride = 1;
    std::int64_t length = 0;

    WindowGrid(const WindowConfig& cfg, std::int64_t signal_length);

    std::int64_t count() const { return length < phi ? 0 : (length - phi) / stride + 1; }
    std::int64_t center(std::int64_t index) const { return phi / 2 + index * stride; }
    std::int64_t begin(std::int64_t center) const { return center - phi / 2; }
    /// Index of a center on the grid, or -1 if the frame is not a center.
    std::int64_t index_of(std::int64_t center) const;
};

struct Histogram1D {
    double bin_origin = 0.0;
    double bin_width = 0.0;
    std::map<std::int64_t, std::int64_t> counts;
    std::int64_t total = 0;
};

struct SeriesPoint {
    std::int64_t center_frame = 0;
    double value = 0.0;

    friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

/// Values on a window-center grid. Centers increase strictly with spacing `stride`.
struct ScalarSeries {
    std::vector<SeriesPoint> points;
    int stride = 1;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    const SeriesPoint& operator[](std::size_t i) const { return points[i]; }
    /// Value at a center frame; throws FrameOutOfBounds when off-grid.
    double at_frame(std::int64_t center) const;
    std::vector<double> values() const;

    friend bool operator==(const ScalarSeries&, const ScalarSeries&) = default;
};

/// Bin index of a sample: floor(s / zeta) with the bin origin fixed at 0.
std::int64_t bin_index(double sample, double zeta);

Histogram1D build_histogram(std::span<const double> samples, double zeta);

/// -epsilon * sum p ln p over the non-empty bins, in nats when epsilon = 1.
double window_entropy(std::span<const double> samples, double zeta, double epsilon = 1.0);

/// Unscaled plug-in joint entropy under a square zeta x zeta grid.
double joint_entropy(std::span<const double> x, std::span<const double> y, double zeta);

/// H(x) + H(y) - epsilon * H(x, y). Bit-for-bit symmetric in its arguments.
double mutual_information(std::span<const double> x, std::span<const double> y, double zeta, double epsilon = 1.0);

ScalarSeries entropy_series(std::span<const double> signal, const WindowConfig& cfg);
ScalarSeries mi_series(std::span<const double> x, std::span<const double> y, const WindowConfig& cfg);

/// Per-window sum of the x, y and z mutual information of two position traces.
ScalarSeries mi_3d(const EntityTrack& a, const EntityTrack& b, const WindowConfig& cfg);

/// Time derivative of a windowed series: central differences inside, one-sided
/// at both ends, in units per second given the frame rate. A smoothing width
/// > 1 applies a centered boxcar (truncated at the ends) first.
ScalarSeries series_derivative(const ScalarSeries& s, double frame_rate = 1.0, int smoothing_width = 0);

std::string series_to_csv(const ScalarSeries& s);

// ---------------------------------------------------------------------------
// Building blocks shared with the detectors, which evaluate windows lazily.

/// Entropy of pre-binned samples. Counts are summed in ascending count order,
/// so the result depends only on the multiset of bin occupancies.
double entropy_of_bins(std::span<const std::int64_t> bins, double epsilon);
double joint_entropy_of_bins(std::span<const std::int64_t> x, std::span<const std::int64_t> y);
double mi_of_bins(std::span<const std::int64_t> x, std::span<const std::int64_t> y, double epsilon);

std::vector<std::int64_t> bin_signal(std::span<const double> signal, double zeta);

namespace detail {

/// Shared derivative kernel. `value(j)` yields the raw series value at grid
/// index j in [0, n).
template <typename ValueFn>
double derivative_at(ValueFn&& value, std::int64_t j, std::int64_t n, double dt, int smoothing_width) {
    auto smoothed = [&](std::int64_t i) {
        if (smoothing_width <= 1) return value(i);
        const std::int64_t half = smoothing_width / 2;
        const std::int64_t lo = i - half < 0 ? 0 : i - half;
        const std::int64_t hi = i + half >= n ? n - 1 : i + half;
        double sum = 0.0;
        for (std::int64_t k = lo; k <= hi; ++k) sum += value(k);
        return sum / static_cast<double>(hi - lo + 1);
    };
    if (j == 0) return (smoothed(1) - smoothed(0)) / dt;
    if (j == n - 1) return (smoothed(n - 1) - smoothed(n - 2)) / dt;
    return (smoothed(j + 1) - smoothed(j - 1)) / (2.0 * dt);
}

}  // namespace detail

}  // namespace demograph
