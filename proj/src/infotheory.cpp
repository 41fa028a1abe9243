#include "demograph/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "demograph/errors.hpp"

namespace demograph {

void WindowConfig::validate() const {
    if (phi < 2 || phi % 2 != 0) fail(ErrorCode::InvalidConfig, "window.phi must be even and >= 2");
    if (stride < 1) fail(ErrorCode::InvalidConfig, "window.stride must be >= 1");
    if (!(zeta > 0.0) || !std::isfinite(zeta)) fail(ErrorCode::InvalidConfig, "window.zeta must be positive");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail(ErrorCode::InvalidConfig, "window.epsilon must be positive");
    if (derivative_smoothing < 0) fail(ErrorCode::InvalidConfig, "window.derivative_smoothing must be >= 0");
}

WindowGrid::WindowGrid(const WindowConfig& cfg, std::int64_t signal_length)
    : phi(cfg.phi), stride(cfg.stride), length(signal_length) {}

std::int64_t WindowGrid::index_of(std::int64_t c) const {
    const std::int64_t off = c - phi / 2;
    if (off < 0 || off % stride != 0) return -1;
    const std::int64_t j = off / stride;
    return j < count() ? j : -1;
}

double ScalarSeries::at_frame(std::int64_t center) const {
    if (points.empty()) fail(ErrorCode::FrameOutOfBounds, "empty series");
    const std::int64_t off = center - points.front().center_frame;
    if (off < 0 || off % stride != 0 || off / stride >= static_cast<std::int64_t>(points.size()))
        fail(ErrorCode::FrameOutOfBounds, "frame " + std::to_string(center) + " is not a series center");
    return points[static_cast<std::size_t>(off / stride)].value;
}

std::vector<double> ScalarSeries::values() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.value);
    return out;
}

std::int64_t bin_index(double sample, double zeta) {
    if (!std::isfinite(sample)) fail(ErrorCode::NonFiniteSample, "non-finite sample");
    const double q = std::floor(sample / zeta);
    constexpr double limit = 4.0e18;
    if (!(std::abs(q) < limit)) fail(ErrorCode::NonFiniteSample, "sample outside the representable bin range");
    return static_cast<std::int64_t>(q);
}

std::vector<std::int64_t> bin_signal(std::span<const double> signal, double zeta) {
    std::vector<std::int64_t> out;
    out.reserve(signal.size());
    for (double s : signal) out.push_back(bin_index(s, zeta));
    return out;
}

namespace {

void require_zeta(double zeta) {
    if (!(zeta > 0.0) || !std::isfinite(zeta)) fail(ErrorCode::InvalidConfig, "bin width must be positive");
}

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail(ErrorCode::InvalidConfig, "epsilon must be positive");
}

// -sum p ln p over a set of occupancy counts, summed in ascending count order.
double plugin_entropy(std::vector<std::int64_t>& counts, std::int64_t total) {
    std::sort(counts.begin(), counts.end());
    const double n = static_cast<double>(total);
    double sum = 0.0;
    for (std::int64_t c : counts) {
        const double p = static_cast<double>(c) / n;
        sum += p * std::log(p);
    }
    return sum == 0.0 ? 0.0 : -sum;
}

template <typename T>
std::vector<std::int64_t> run_lengths(std::vector<T>& keys) {
    std::sort(keys.begin(), keys.end());
    std::vector<std::int64_t> counts;
    std::size_t i = 0;
    while (i < keys.size()) {
        std::size_t j = i + 1;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        counts.push_back(static_cast<std::int64_t>(j - i));
        i = j;
    }
    return counts;
}

void require_same_nonempty(std::size_t a, std::size_t b) {
    if (a != b) fail(ErrorCode::LengthMismatch, "signals differ in length (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
    if (a == 0) fail(ErrorCode::EmptyInput, "empty signal");
}

}  // namespace

double entropy_of_bins(std::span<const std::int64_t> bins, double epsilon) {
    if (bins.empty()) fail(ErrorCode::EmptyInput, "empty sample set");
    std::vector<std::int64_t> keys(bins.begin(), bins.end());
    auto counts = run_lengths(keys);
    const double h = plugin_entropy(counts, static_cast<std::int64_t>(bins.size()));
    return h == 0.0 ? 0.0 : epsilon * h;
}

double joint_entropy_of_bins(std::span<const std::int64_t> x, std::span<const std::int64_t> y) {
    require_same_nonempty(x.size(), y.size());
    std::vector<std::pair<std::int64_t, std::int64_t>> keys;
    keys.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) keys.emplace_back(x[i], y[i]);
    auto counts = run_lengths(keys);
    return plugin_entropy(counts, static_cast<std::int64_t>(x.size()));
}

double mi_of_bins(std::span<const std::int64_t> x, std::span<const std::int64_t> y, double epsilon) {
    require_same_nonempty(x.size(), y.size());
    const double hx = entropy_of_bins(x, epsilon);
    const double hy = entropy_of_bins(y, epsilon);
    const double hxy = joint_entropy_of_bins(x, y);
    return (hx + hy) - epsilon * hxy;
}

Histogram1D build_histogram(std::span<const double> samples, double zeta) {
    require_zeta(zeta);
    if (samples.empty()) fail(ErrorCode::EmptyInput, "empty sample set");
    Histogram1D h;
    h.bin_origin = 0.0;
    h.bin_width = zeta;
    for (double s : samples) ++h.counts[bin_index(s, zeta)];
    h.total = static_cast<std::int64_t>(samples.size());
    return h;
}

double window_entropy(std::span<const double> samples, double zeta, double epsilon) {
    require_zeta(zeta);
    require_epsilon(epsilon);
    if (samples.empty()) fail(ErrorCode::EmptyInput, "empty sample set");
    const auto bins = bin_signal(samples, zeta);
    return entropy_of_bins(bins, epsilon);
}

double joint_entropy(std::span<const double> x, std::span<const double> y, double zeta) {
    require_zeta(zeta);
    require_same_nonempty(x.size(), y.size());
    const auto bx = bin_signal(x, zeta);
    const auto by = bin_signal(y, zeta);
    return joint_entropy_of_bins(bx, by);
}

double mutual_information(std::span<const double> x, std::span<const double> y, double zeta, double epsilon) {
    require_zeta(zeta);
    require_epsilon(epsilon);
    require_same_nonempty(x.size(), y.size());
    const auto bx = bin_signal(x, zeta);
    const auto by = bin_signal(y, zeta);
    return mi_of_bins(bx, by, epsilon);
}

namespace {

WindowGrid checked_grid(const WindowConfig& cfg, std::size_t length) {
    cfg.validate();
    WindowGrid grid(cfg, static_cast<std::int64_t>(length));
    if (static_cast<std::int64_t>(length) < cfg.phi)
        fail(ErrorCode::SignalTooShort,
             "signal of length " + std::to_string(length) + " is shorter than the window " + std::to_string(cfg.phi));
    return grid;
}

}  // namespace

ScalarSeries entropy_series(std::span<const double> signal, const WindowConfig& cfg) {
    const auto grid = checked_grid(cfg, signal.size());
    const auto bins = bin_signal(signal, cfg.zeta);
    ScalarSeries out;
    out.stride = cfg.stride;
    out.points.reserve(static_cast<std::size_t>(grid.count()));
    const std::span<const std::int64_t> all(bins);
    for (std::int64_t j = 0; j < grid.count(); ++j) {
        const auto c = grid.center(j);
        const auto w = all.subspan(static_cast<std::size_t>(grid.begin(c)), static_cast<std::size_t>(cfg.phi));
        out.points.push_back({c, entropy_of_bins(w, cfg.epsilon)});
    }
    return out;
}

ScalarSeries mi_series(std::span<const double> x, std::span<const double> y, const WindowConfig& cfg) {
    require_same_nonempty(x.size(), y.size());
    const auto grid = checked_grid(cfg, x.size());
    const auto bx = bin_signal(x, cfg.zeta);
    const auto by = bin_signal(y, cfg.zeta);
    ScalarSeries out;
    out.stride = cfg.stride;
    out.points.reserve(static_cast<std::size_t>(grid.count()));
    const std::span<const std::int64_t> sx(bx), sy(by);
    for (std::int64_t j = 0; j < grid.count(); ++j) {
        const auto c = grid.center(j);
        const auto b = static_cast<std::size_t>(grid.begin(c));
        const auto n = static_cast<std::size_t>(cfg.phi);
        out.points.push_back({c, mi_of_bins(sx.subspan(b, n), sy.subspan(b, n), cfg.epsilon)});
    }
    return out;
}

ScalarSeries mi_3d(const EntityTrack& a, const EntityTrack& b, const WindowConfig& cfg) {
    if (a.poses.size() != b.poses.size())
        fail(ErrorCode::LengthMismatch, "tracks '" + a.id + "' and '" + b.id + "' differ in length");
    ScalarSeries total;
    for (std::size_t axis = 0; axis < 3; ++axis) {
        const auto xa = a.axis(axis);
        const auto xb = b.axis(axis);
        auto s = mi_series(xa, xb, cfg);
        if (axis == 0) {
            total = std::move(s);
        } else {
            for (std::size_t i = 0; i < total.points.size(); ++i) total.points[i].value += s.points[i].value;
        }
    }
    return total;
}

ScalarSeries series_derivative(const ScalarSeries& s, double frame_rate, int smoothing_width) {
    if (s.size() < 3) fail(ErrorCode::SeriesTooShort, "derivative needs at least 3 points");
    if (!(frame_rate > 0.0)) fail(ErrorCode::InvalidConfig, "frame_rate must be positive");
    const double dt = static_cast<double>(s.stride) / frame_rate;
    const auto n = static_cast<std::int64_t>(s.size());
    auto value = [&](std::int64_t i) { return s.points[static_cast<std::size_t>(i)].value; };
    ScalarSeries out;
    out.stride = s.stride;
    out.points.reserve(s.size());
    for (std::int64_t j = 0; j < n; ++j)
        out.points.push_back({s.points[static_cast<std::size_t>(j)].center_frame,
                              detail::derivative_at(value, j, n, dt, smoothing_width)});
    return out;
}

std::string series_to_csv(const ScalarSeries& s) {
    std::ostringstream out;
    out.precision(17);
    out << "center_frame,value\n";
    for (const auto& p : s.points) out << p.center_frame << ',' << p.value << '\n';
    return out.str();
}

}  // namespace demograph
