#include "respilab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string_view>

namespace respilab::io {

namespace {

std::runtime_error file_error(const std::filesystem::path& path, const std::string& what) {
    return std::runtime_error(path.string() + ": " + what);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);  // '\n' endings on every platform
    if (!os) throw file_error(path, "cannot open for writing");
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw file_error(path, "cannot open for reading");
    return is;
}

double parse_double(std::string_view field, const std::filesystem::path& path, std::size_t row,
                    std::size_t col) {
    double value = 0.0;
    const auto* begin = field.data();
    const auto* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw file_error(path, "row " + std::to_string(row) + ", field " + std::to_string(col) +
                                   ": not a number: '" + std::string(field) + "'");
    }
    return value;
}

int parse_label(std::string_view field, const std::filesystem::path& path, std::size_t row) {
    int value = 0;
    const auto* begin = field.data();
    const auto* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || value < 0 || value > 7) {
        throw file_error(path, "row " + std::to_string(row) + ": bad label '" +
                                   std::string(field) + "' (expected an integer 0-7)");
    }
    return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string format_sig9(double v) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

void write_data_csv(const std::filesystem::path& path,
                    std::span<const synth::SensedRecord> records) {
    auto os = open_out(path);
    for (const auto& record : records) {
        for (double v : record.samples) {
            os << format_sig9(v) << ',';
        }
        os << record.label << '\n';
    }
}

std::vector<DataRow> read_data_csv(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::vector<DataRow> rows;
    std::string line;
    std::size_t row_number = 0;
    std::size_t expected_fields = 0;
    while (std::getline(is, line)) {
        ++row_number;
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() < 2) {
            throw file_error(path, "row " + std::to_string(row_number) + ": too few fields");
        }
        if (expected_fields == 0) {
            expected_fields = fields.size();
        } else if (fields.size() != expected_fields) {
            throw file_error(path, "row " + std::to_string(row_number) + ": expected " +
                                       std::to_string(expected_fields) + " fields, got " +
                                       std::to_string(fields.size()));
        }
        DataRow row;
        row.samples.reserve(fields.size() - 1);
        for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
            row.samples.push_back(parse_double(fields[i], path, row_number, i + 1));
        }
        row.label = parse_label(fields.back(), path, row_number);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw file_error(path, "no data rows");
    return rows;
}

void write_timestamps_csv(const std::filesystem::path& path,
                          std::span<const synth::SensedRecord> records) {
    auto os = open_out(path);
    for (const auto& record : records) {
        for (std::size_t i = 0; i < record.timestamps.size(); ++i) {
            if (i != 0) os << ',';
            os << format_sig9(record.timestamps[i]);
        }
        os << '\n';
    }
}

void write_noise_csv(const std::filesystem::path& path, std::span<const double> samples) {
    auto os = open_out(path);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i != 0) os << ',';
        os << format_sig9(samples[i]);
    }
    os << '\n';
}

std::vector<double> read_noise_csv(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::string line;
    std::vector<double> samples;
    std::size_t row_number = 0;
    while (std::getline(is, line)) {
        ++row_number;
        strip_cr(line);
        if (line.empty()) continue;
        if (!samples.empty()) throw file_error(path, "expected a single row of noise samples");
        const auto fields = split_fields(line);
        samples.reserve(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            samples.push_back(parse_double(fields[i], path, row_number, i + 1));
        }
    }
    if (samples.empty()) throw file_error(path, "no noise samples");
    return samples;
}

void write_features_csv(const std::filesystem::path& path,
                        std::span<const features::FeatureVector> rows) {
    auto os = open_out(path);
    for (const auto& f : rows) {
        os << format_sig9(f.peak_to_peak) << ',' << format_sig9(f.rate_bpm) << ','
           << format_sig9(f.effective_spectral_amplitude) << ',' << format_sig9(f.snr_db) << ','
           << f.label << '\n';
    }
}

std::vector<features::FeatureVector> read_features_csv(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::vector<features::FeatureVector> rows;
    std::string line;
    std::size_t row_number = 0;
    while (std::getline(is, line)) {
        ++row_number;
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 5) {
            throw file_error(path, "row " + std::to_string(row_number) +
                                       ": expected 5 fields (4 features + label), got " +
                                       std::to_string(fields.size()));
        }
        features::FeatureVector f;
        f.peak_to_peak = parse_double(fields[0], path, row_number, 1);
        f.rate_bpm = parse_double(fields[1], path, row_number, 2);
        f.effective_spectral_amplitude = parse_double(fields[2], path, row_number, 3);
        f.snr_db = parse_double(fields[3], path, row_number, 4);
        f.label = parse_label(fields[4], path, row_number);
        rows.push_back(f);
    }
    if (rows.empty()) throw file_error(path, "no feature rows");
    return rows;
}

void save_model(const std::filesystem::path& path, const ml::DecisionTreeModel& model) {
    auto os = open_out(path);
    ml::write_model(os, model);
}

void save_model(const std::filesystem::path& path, const ml::RandomForestModel& model) {
    auto os = open_out(path);
    ml::write_model(os, model);
}

ml::AnyModel load_model(const std::filesystem::path& path) {
    auto is = open_in(path);
    try {
        return ml::read_model(is);
    } catch (const std::runtime_error& e) {
        throw file_error(path, e.what());
    }
}

void write_report_csv(const std::filesystem::path& path, std::span<const ReportRow> rows) {
    auto os = open_out(path);
    os << "distances,train_accuracy,validation_accuracy,test_accuracy,"
          "cv_train_accuracy,cv_test_accuracy\n";
    for (const auto& row : rows) {
        os << row.distances << ',' << format_sig9(row.report.train_accuracy) << ','
           << format_sig9(row.report.validation_accuracy) << ','
           << format_sig9(row.report.test_accuracy) << ','
           << format_sig9(row.report.cv_train_accuracy) << ','
           << format_sig9(row.report.cv_test_accuracy) << '\n';
    }
}

void write_sweep_csv(const std::filesystem::path& path, const eval::SweepCurve& curve) {
    auto os = open_out(path);
    os << "value,train_accuracy,validation_accuracy\n";
    for (const auto& p : curve.points) {
        os << p.value << ',' << format_sig9(p.train_accuracy) << ','
           << format_sig9(p.validation_accuracy) << '\n';
    }
}

void write_confusion_csv(const std::filesystem::path& path,
                         const std::vector<std::vector<int>>& counts) {
    auto os = open_out(path);
    for (const auto& row : counts) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j != 0) os << ',';
            os << row[j];
        }
        os << '\n';
    }
}

}  // namespace respilab::io
