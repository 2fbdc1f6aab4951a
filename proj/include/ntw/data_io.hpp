#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ntw/time_series.hpp"
#include "ntw/training.hpp"
#include "ntw/warp_model.hpp"

namespace ntw {

enum class Delimiter { Auto, Comma, Tab, Whitespace };

Delimiter parse_delimiter(const std::string& name);

struct Dataset {
    std::vector<TimeSeries> series;
    std::filesystem::path source;
    Delimiter delimiter = Delimiter::Comma;
};

/// UCR-style text file: one series per line, label first. Trailing empty or NaN fields
/// are dropped, so ragged rows are fine. With Delimiter::Auto the first line decides
/// (tab, then comma, else whitespace).
Dataset load_ucr(const std::filesystem::path& path, Delimiter delimiter = Delimiter::Auto);

/// Series with the given label in file order. More than max_series matches are reduced
/// to a seeded uniform sample without replacement, still in file order.
std::vector<TimeSeries> select_class(const Dataset& dataset, int label, int max_series,
                                     std::uint64_t seed);

/// As select_class, but without a label filter every series is a candidate.
std::vector<TimeSeries> select_series(const Dataset& dataset, std::optional<int> label,
                                      int max_series, std::uint64_t seed);

/// A bare list of numbers separated by commas, tabs, spaces or newlines. May hold a
/// single value.
std::vector<double> load_values(const std::filesystem::path& path);

/// Writes warpings.csv, aligned.csv, average.csv, loss_history.csv, metrics.json and
/// plot.svg into out_dir (created if needed). Returns the written paths in that order.
std::vector<std::filesystem::path> write_outputs(const AlignmentResult& result,
                                                 const std::filesystem::path& out_dir);

/// Shortest round-trip decimal text (up to 17 significant digits).
std::string format_double(double value);

void write_warpings_csv(const SampledWarping& warping, const std::filesystem::path& path);
void write_aligned_csv(const AlignedSet& aligned, const std::filesystem::path& path);
void write_average_csv(const std::vector<double>& mean, const std::vector<double>& sd,
                       const std::filesystem::path& path);
void write_loss_history_csv(const LossHistory& history, const std::filesystem::path& path);

/// Training-side numbers that cannot be recovered from warpings alone.
struct TrainingMetrics {
    double penalty_residual = 0.0;
    double data_loss_final = 0.0;
    int updates = 0;
    double alpha_final = 0.0;
};

/// metrics.json text (two-space indented, trailing newline).
std::string metrics_json(double barycenter_loss, const Validity& validity,
                         const TrainingMetrics& training);
TrainingMetrics read_training_metrics(const std::filesystem::path& metrics_path);

/// Integer warp table from warpings.csv: rows are z, one column per series.
std::vector<std::vector<int>> read_warpings_csv(const std::filesystem::path& path);

/// Rows of aligned.csv (z column dropped), as N x (Z+1).
std::vector<std::vector<double>> read_aligned_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Static figure: aligned series in grey, warped average with a +-SD band.
std::string render_plot_svg(const AlignedSet& aligned, const std::vector<double>& mean,
                            const std::vector<double>& sd);

}  // namespace ntw
