#include "tool_commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "ntw/data_io.hpp"
#include "ntw/errors.hpp"
#include "ntw/metrics.hpp"
#include "ntw/training.hpp"

namespace ntw::cli {
namespace {

namespace fs = std::filesystem;

struct DataOptions {
    std::string input;
    std::string format = "auto";
    std::optional<int> label;
    int max_series = 100;
    std::uint64_t seed = 0;
    bool znorm = false;
};

void add_data_options(CLI::App& app, DataOptions& o) {
    app.add_option("--input", o.input, "UCR-style data file (label, then values per line)")->required();
    app.add_option("--format", o.format, "Field delimiter: auto, comma, tab or whitespace")
        ->capture_default_str();
    app.add_option("--label", o.label, "Class label to align (default: every series)");
    app.add_option("--max-series", o.max_series, "Sample at most this many series")
        ->capture_default_str();
    app.add_option("--seed", o.seed, "Seed for series sampling and network init")
        ->capture_default_str();
    app.add_flag("--znorm", o.znorm, "Z-normalize each series before aligning");
}

std::vector<TimeSeries> load_selection(const DataOptions& o) {
    const auto ds = load_ucr(o.input, parse_delimiter(o.format));
    auto series = select_series(ds, o.label, o.max_series, o.seed);
    if (o.znorm) {
        for (auto& s : series) s = z_normalized(s);
    }
    return series;
}

std::string validity_text(const Validity& v) {
    return format_double(100.0 * v.v_mono) + "/" + format_double(100.0 * v.v_cont) + "/" +
           format_double(100.0 * v.v_bound);
}

// Checks a warp table against the data selection and returns it as a SampledWarping.
SampledWarping load_warping(const fs::path& path, std::span<const TimeSeries> series,
                            std::optional<int> z_out) {
    const auto table = read_warpings_csv(path);
    const std::size_t n = series.size();
    const std::size_t rows = table.empty() ? 0 : table[0].size();
    if (table.size() != n) {
        throw InvalidArgument("shape mismatch: " + path.string() + " has " +
                              std::to_string(table.size()) + " series x " + std::to_string(rows) +
                              " rows, data selection has " + std::to_string(n) + " series");
    }
    const int expected_z = z_out.value_or(static_cast<int>(n) * max_last_index(series));
    if (rows != static_cast<std::size_t>(expected_z) + 1) {
        throw InvalidArgument("row count mismatch: " + path.string() + " has " +
                              std::to_string(rows) + " rows, expected " +
                              std::to_string(expected_z + 1) + " (Z = " +
                              std::to_string(expected_z) + ")");
    }
    return SampledWarping(last_indices(series), table);
}

int cmd_align(const DataOptions& data, NtwConfig config, const std::string& out_dir, bool verbose,
              std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    const auto series = load_selection(data);
    config.seed = data.seed;
    validate(config, series);
    ProgressCallback progress;
    if (verbose) {
        progress = [&err](const LossRecord& r) {
            if (r.step % 100 == 0) {
                err << "update " << r.step << "  data " << format_double(r.data_loss) << "  penalty "
                    << format_double(r.penalty) << "  alpha " << format_double(r.alpha) << '\n';
            }
        };
    }
    const auto result = align(series, config, progress);
    const auto written = write_outputs(result, out_dir);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << "aligned " << series.size() << " series: data loss " << format_double(result.data_loss_initial)
        << " -> " << format_double(result.data_loss_final) << ", barycenter loss "
        << format_double(result.barycenter_loss) << ", validity (mono/cont/bound %) "
        << validity_text(result.validity) << ", penalty residual "
        << format_double(result.penalty_residual) << ", " << format_double(std::round(elapsed * 100) / 100)
        << " s\n";
    for (const auto& p : written) out << p.string() << '\n';
    return kOk;
}

int cmd_dtw(const std::string& a_path, const std::string& b_path, const std::string& path_out,
            std::ostream& out) {
    const auto a = load_values(a_path);
    const auto b = load_values(b_path);
    const auto r = dtw(a, b, !path_out.empty());
    out << format_double(r.discrepancy) << '\n';
    if (!path_out.empty()) {
        std::string text = "i,j\n";
        for (const auto& [i, j] : r.path) text += std::to_string(i) + "," + std::to_string(j) + "\n";
        write_text(path_out, text);
    }
    return kOk;
}

int cmd_metrics(const DataOptions& data, const std::string& warpings, std::optional<int> z_out,
                std::string run_metrics, int threads, const std::string& out_dir, std::ostream& out) {
    const auto series = load_selection(data);
    const auto warping = load_warping(warpings, series, z_out);
    const auto summary = summarize(series, warping, threads);
    if (run_metrics.empty()) run_metrics = (fs::path(warpings).parent_path() / "metrics.json").string();
    TrainingMetrics training;
    if (fs::exists(run_metrics)) training = read_training_metrics(run_metrics);
    const auto text = metrics_json(summary.barycenter_loss, summary.validity, training);
    if (out_dir.empty()) {
        out << text;
    } else {
        fs::create_directories(out_dir);
        const auto p = fs::path(out_dir) / "metrics.json";
        write_text(p, text);
        out << p.string() << '\n';
    }
    return kOk;
}

int cmd_average(const DataOptions& data, const std::string& warpings, std::optional<int> z_out,
                const std::string& out_dir, std::ostream& out) {
    const auto series = load_selection(data);
    const auto warping = load_warping(warpings, series, z_out);
    const auto aligned = make_aligned(series, warping);
    fs::create_directories(out_dir);
    const auto p = fs::path(out_dir) / "average.csv";
    write_average_csv(warped_average(aligned), warped_std(aligned), p);
    out << p.string() << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multiple time-series alignment with a neural continuous warping"};
    app.name("ntw");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "INI/TOML file with an [align] section; keys mirror flag names, flags win");

    DataOptions data;
    NtwConfig config;
    std::optional<int> z_train;
    std::optional<int> z_out;
    std::string out_dir = "ntw_out";
    bool verbose = false;

    auto* align_cmd = app.add_subcommand("align", "Align a class of series and write all outputs");
    add_data_options(*align_cmd, data);
    align_cmd->add_option("--updates", config.updates, "Optimizer updates")->capture_default_str();
    align_cmd->add_option("--lr", config.learning_rate, "Adam learning rate")->capture_default_str();
    align_cmd->add_option("--lambda", config.lambda, "Monotonicity penalty weight")->capture_default_str();
    align_cmd->add_option("--alpha0", config.alpha0, "Initial annealing parameter")->capture_default_str();
    align_cmd->add_option("--alpha-decay", config.alpha_decay, "Annealing multiplier per update")
        ->capture_default_str();
    align_cmd->add_option("--z-train", z_train, "Trapezoid intervals (default: max T)");
    align_cmd->add_option("--z-out", z_out, "Output resolution Z (default: N * max T)");
    align_cmd->add_option("--threads", config.threads, "Worker threads (1 = serial)")
        ->capture_default_str();
    align_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
    align_cmd->add_flag("--verbose", verbose, "Print progress every 100 updates");

    std::string dtw_a, dtw_b, dtw_path;
    auto* dtw_cmd = app.add_subcommand("dtw", "DTW discrepancy between two single-series files");
    dtw_cmd->add_option("a", dtw_a, "First series file")->required();
    dtw_cmd->add_option("b", dtw_b, "Second series file")->required();
    dtw_cmd->add_option("--path", dtw_path, "Write the optimal path as CSV");

    DataOptions m_data;
    std::string m_warpings, m_run_metrics, m_out;
    std::optional<int> m_z_out;
    int m_threads = 1;
    auto* metrics_cmd = app.add_subcommand("metrics", "Recompute metrics.json from saved warpings");
    add_data_options(*metrics_cmd, m_data);
    metrics_cmd->add_option("--warpings", m_warpings, "warpings.csv from an align run")->required();
    metrics_cmd->add_option("--run-metrics", m_run_metrics,
                            "metrics.json supplying the training fields (default: next to warpings)");
    metrics_cmd->add_option("--z-out", m_z_out, "Expected Z (default: N * max T)");
    metrics_cmd->add_option("--threads", m_threads, "Worker threads")->capture_default_str();
    metrics_cmd->add_option("--out", m_out, "Output directory (default: print to stdout)");

    DataOptions a_data;
    std::string a_warpings, a_out = "ntw_out";
    std::optional<int> a_z_out;
    auto* average_cmd = app.add_subcommand("average", "Recompute average.csv from saved warpings");
    add_data_options(*average_cmd, a_data);
    average_cmd->add_option("--warpings", a_warpings, "warpings.csv from an align run")->required();
    average_cmd->add_option("--z-out", a_z_out, "Expected Z (default: N * max T)");
    average_cmd->add_option("--out", a_out, "Output directory")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*align_cmd) {
            config.z_train = z_train;
            config.z_out = z_out;
            return cmd_align(data, config, out_dir, verbose, out, err);
        }
        if (*dtw_cmd) return cmd_dtw(dtw_a, dtw_b, dtw_path, out);
        if (*metrics_cmd) {
            return cmd_metrics(m_data, m_warpings, m_z_out, m_run_metrics, m_threads, m_out, out);
        }
        if (*average_cmd) return cmd_average(a_data, a_warpings, a_z_out, a_out, out);
    } catch (const DivergenceError& e) {
        err << "error: numerical divergence: " << e.what() << '\n';
        return kDiverged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace ntw::cli
