#include "ntw/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ntw/errors.hpp"

namespace ntw {
namespace {

std::vector<std::string> split(const std::string& line, Delimiter delimiter) {
    std::vector<std::string> fields;
    if (delimiter == Delimiter::Whitespace) {
        std::istringstream in(line);
        std::string f;
        while (in >> f) fields.push_back(f);
        return fields;
    }
    const char sep = delimiter == Delimiter::Tab ? '\t' : ',';
    std::string current;
    for (char c : line) {
        if (c == sep) {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool is_missing(const std::string& field) {
    const std::string t = trim(field);
    if (t.empty()) return true;
    std::string lower(t.size(), ' ');
    std::transform(t.begin(), t.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    return lower == "nan" || lower == "?";
}

bool parse_number(const std::string& field, double& out) {
    const std::string t = trim(field);
    if (t.empty()) return false;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
    return ec == std::errc() && ptr == t.data() + t.size();
}

Delimiter detect(const std::string& line) {
    if (line.find('\t') != std::string::npos) return Delimiter::Tab;
    if (line.find(',') != std::string::npos) return Delimiter::Comma;
    return Delimiter::Whitespace;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw InputError("failed writing " + path.string());
}

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path,
                                                    std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw InputError(path.string() + " is empty");
    header = split(trim(line), Delimiter::Comma);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split(trim(line), Delimiter::Comma));
    }
    return rows;
}

}  // namespace

Delimiter parse_delimiter(const std::string& name) {
    if (name == "auto") return Delimiter::Auto;
    if (name == "comma" || name == "csv") return Delimiter::Comma;
    if (name == "tab" || name == "tsv") return Delimiter::Tab;
    if (name == "whitespace" || name == "space") return Delimiter::Whitespace;
    throw InvalidArgument("unknown format '" + name + "' (expected auto, comma, tab or whitespace)");
}

Dataset load_ucr(const std::filesystem::path& path, Delimiter delimiter) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    Dataset ds;
    ds.source = path;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (first) {
            ds.delimiter = delimiter == Delimiter::Auto ? detect(line) : delimiter;
            first = false;
        }
        auto fields = split(line, ds.delimiter);
        while (!fields.empty() && is_missing(fields.back())) fields.pop_back();
        const auto where = [&](std::size_t col) {
            return path.string() + ":" + std::to_string(line_no) + ":" + std::to_string(col + 1);
        };
        if (fields.empty()) continue;
        double label_value = 0.0;
        if (!parse_number(fields[0], label_value) || label_value != std::floor(label_value) ||
            std::abs(label_value) > 1e9) {
            throw InputError(where(0) + ": label '" + trim(fields[0]) + "' is not an integer");
        }
        std::vector<double> values;
        values.reserve(fields.size() - 1);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            double v = 0.0;
            if (!parse_number(fields[c], v) || !std::isfinite(v)) {
                throw InputError(where(c) + ": cannot parse value '" + trim(fields[c]) + "'");
            }
            values.push_back(v);
        }
        if (values.size() < 2) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": series shorter than 2 samples");
        }
        const auto index = ds.series.size();
        ds.series.emplace_back(std::move(values), static_cast<int>(label_value),
                               "row" + std::to_string(index + 1));
    }
    if (ds.series.empty()) throw InputError(path.string() + " contains no series");
    return ds;
}

std::vector<TimeSeries> select_class(const Dataset& dataset, int label, int max_series,
                                     std::uint64_t seed) {
    return select_series(dataset, label, max_series, seed);
}

std::vector<TimeSeries> select_series(const Dataset& dataset, std::optional<int> label,
                                      int max_series, std::uint64_t seed) {
    if (max_series < 2) throw InvalidArgument("max-series must be >= 2");
    std::vector<TimeSeries> matches;
    for (const auto& s : dataset.series) {
        if (!label || s.label() == label) matches.push_back(s);
    }
    const std::string what = label ? "label " + std::to_string(*label) : std::string("dataset");
    if (matches.empty()) {
        throw InvalidArgument(what + " not found in " + dataset.source.string());
    }
    if (matches.size() < 2) {
        throw InvalidArgument(what + " has fewer than two series; nothing to align");
    }
    if (matches.size() <= static_cast<std::size_t>(max_series)) return matches;
    std::vector<TimeSeries> sample;
    sample.reserve(static_cast<std::size_t>(max_series));
    std::mt19937_64 rng(seed);
    std::sample(matches.begin(), matches.end(), std::back_inserter(sample),
                static_cast<std::size_t>(max_series), rng);
    return sample;
}

std::vector<double> load_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::string f;
        while (fields >> f) {
            double v = 0.0;
            if (!parse_number(f, v) || !std::isfinite(v)) {
                throw InputError(path.string() + ":" + std::to_string(line_no) +
                                 ": cannot parse value '" + f + "'");
            }
            values.push_back(v);
        }
    }
    if (values.empty()) throw InputError(path.string() + " contains no values");
    return values;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    finish(out, path);
}

void write_warpings_csv(const SampledWarping& warping, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "z";
    for (int i = 1; i <= warping.n_series(); ++i) out << ",tau_" << i;
    out << '\n';
    for (int z = 0; z <= warping.z_max(); ++z) {
        out << z;
        for (int i = 0; i < warping.n_series(); ++i) out << ',' << warping(i, z);
        out << '\n';
    }
    finish(out, path);
}

void write_aligned_csv(const AlignedSet& aligned, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "z";
    for (int i = 1; i <= aligned.n_series(); ++i) out << ",x_" << i;
    out << '\n';
    for (int z = 0; z <= aligned.z_max(); ++z) {
        out << z;
        for (int i = 0; i < aligned.n_series(); ++i) out << ',' << format_double(aligned.values(i, z));
        out << '\n';
    }
    finish(out, path);
}

void write_average_csv(const std::vector<double>& mean, const std::vector<double>& sd,
                       const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "z,mean,sd\n";
    for (std::size_t z = 0; z < mean.size(); ++z) {
        out << z << ',' << format_double(mean[z]) << ',' << format_double(sd[z]) << '\n';
    }
    finish(out, path);
}

void write_loss_history_csv(const LossHistory& history, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "step,data_loss,penalty,alpha,total\n";
    for (const auto& r : history) {
        out << r.step << ',' << format_double(r.data_loss) << ',' << format_double(r.penalty) << ','
            << format_double(r.alpha) << ',' << format_double(r.total) << '\n';
    }
    finish(out, path);
}

std::string metrics_json(double barycenter_loss, const Validity& validity,
                         const TrainingMetrics& training) {
    nlohmann::ordered_json j;
    j["barycenter_loss"] = barycenter_loss;
    j["v_mono"] = validity.v_mono;
    j["v_cont"] = validity.v_cont;
    j["v_bound"] = validity.v_bound;
    j["penalty_residual"] = training.penalty_residual;
    j["data_loss_final"] = training.data_loss_final;
    j["updates"] = training.updates;
    j["alpha_final"] = training.alpha_final;
    return j.dump(2) + "\n";
}

TrainingMetrics read_training_metrics(const std::filesystem::path& metrics_path) {
    std::ifstream in(metrics_path);
    if (!in) throw InputError("cannot read " + metrics_path.string());
    try {
        const auto j = nlohmann::json::parse(in);
        return {j.at("penalty_residual").get<double>(), j.at("data_loss_final").get<double>(),
                j.at("updates").get<int>(), j.at("alpha_final").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw InputError(metrics_path.string() + ": " + e.what());
    }
}

std::vector<std::vector<int>> read_warpings_csv(const std::filesystem::path& path) {
    std::vector<std::string> header;
    const auto rows = read_csv_rows(path, header);
    if (header.size() < 2 || trim(header[0]) != "z") {
        throw InputError(path.string() + ": expected header z,tau_1,...");
    }
    const std::size_t n = header.size() - 1;
    std::vector<std::vector<int>> tau(n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            throw InputError(path.string() + ":" + std::to_string(r + 2) + ": expected " +
                             std::to_string(header.size()) + " columns, got " +
                             std::to_string(rows[r].size()));
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            double v = 0.0;
            if (!parse_number(rows[r][c], v) || v != std::floor(v)) {
                throw InputError(path.string() + ":" + std::to_string(r + 2) + ":" +
                                 std::to_string(c + 1) + ": not an integer");
            }
            if (c == 0 && static_cast<std::size_t>(v) != r) {
                throw InputError(path.string() + ":" + std::to_string(r + 2) +
                                 ": z column out of sequence");
            }
            if (c > 0) tau[c - 1].push_back(static_cast<int>(v));
        }
    }
    return tau;
}

std::vector<std::vector<double>> read_aligned_csv(const std::filesystem::path& path) {
    std::vector<std::string> header;
    const auto rows = read_csv_rows(path, header);
    const std::size_t n = header.size() - 1;
    std::vector<std::vector<double>> values(n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            throw InputError(path.string() + ":" + std::to_string(r + 2) + ": wrong column count");
        }
        for (std::size_t c = 1; c < rows[r].size(); ++c) {
            double v = 0.0;
            if (!parse_number(rows[r][c], v)) {
                throw InputError(path.string() + ":" + std::to_string(r + 2) + ":" +
                                 std::to_string(c + 1) + ": not a number");
            }
            values[c - 1].push_back(v);
        }
    }
    return values;
}

std::vector<std::filesystem::path> write_outputs(const AlignmentResult& result,
                                                 const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    auto path = [&](const char* name) { return written.emplace_back(out_dir / name); };
    write_warpings_csv(result.warping, path("warpings.csv"));
    write_aligned_csv(result.aligned, path("aligned.csv"));
    write_average_csv(result.average, result.sd, path("average.csv"));
    write_loss_history_csv(result.history, path("loss_history.csv"));
    const TrainingMetrics training{result.penalty_residual, result.data_loss_final, result.updates,
                                   result.alpha_final};
    write_text(path("metrics.json"), metrics_json(result.barycenter_loss, result.validity, training));
    write_text(path("plot.svg"), render_plot_svg(result.aligned, result.average, result.sd));
    return written;
}

}  // namespace ntw
