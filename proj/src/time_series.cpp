#include "ntw/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ntw/errors.hpp"

namespace ntw {

TimeSeries::TimeSeries(std::vector<double> values, std::optional<int> label, std::string name)
    : values_(std::move(values)), label_(label), name_(std::move(name)) {
    if (values_.size() < 2) {
        throw InvalidArgument("time series needs at least 2 samples, got " +
                              std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw InvalidArgument("time series sample " + std::to_string(i) + " is not finite");
        }
    }
}

std::vector<int> last_indices(std::span<const TimeSeries> series) {
    std::vector<int> out;
    out.reserve(series.size());
    for (const auto& s : series) out.push_back(s.last_index());
    return out;
}

int max_last_index(std::span<const TimeSeries> series) {
    int m = 0;
    for (const auto& s : series) m = std::max(m, s.last_index());
    return m;
}

TimeSeries z_normalized(const TimeSeries& series) {
    const auto v = series.values();
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / n);
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x = sd > 0.0 ? (x - mean) / sd : x - mean;
    return TimeSeries(std::move(out), series.label(), series.name());
}

}  // namespace ntw
