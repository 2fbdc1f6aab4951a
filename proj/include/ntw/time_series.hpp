#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ntw {

/// One input sequence x^(0)..x^(T). Always holds at least two finite samples.
class TimeSeries {
public:
    explicit TimeSeries(std::vector<double> values, std::optional<int> label = std::nullopt,
                        std::string name = {});

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    /// Index of the last sample, T.
    int last_index() const noexcept { return static_cast<int>(values_.size()) - 1; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    const std::optional<int>& label() const noexcept { return label_; }
    const std::string& name() const noexcept { return name_; }

private:
    std::vector<double> values_;
    std::optional<int> label_;
    std::string name_;
};

std::vector<int> last_indices(std::span<const TimeSeries> series);
int max_last_index(std::span<const TimeSeries> series);

/// Zero-mean, unit-variance copy. Constant series are only centered.
TimeSeries z_normalized(const TimeSeries& series);

}  // namespace ntw
