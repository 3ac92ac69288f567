// experiment_io.hpp — CSV tables, atomic file output and the exit-code contract of the experiment front end

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"

#include "poissonbath/errors.hpp"
#include "poissonbath/experiment_config.hpp"

namespace poissonbath::experiment {

enum ExitCode : int { ok = 0, config_parse_error = 2, validation_error = 3, numerical_error = 4 };

/// Shortest round-trip-safe text for a double: 17 significant digits, '.' decimal point.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(format_double(v));
        add_row(std::move(cells));
    }

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) throw DimensionMismatch("CSV row width differs from header");
        rows_.push_back(std::move(cells));
    }

    std::size_t rows() const noexcept { return rows_.size(); }
    const std::vector<std::string>& header() const noexcept { return header_; }

    std::string str() const {
        std::string out;
        auto line = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i > 0) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes `content` to `path` through a temporary file in the same directory and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigParseError*>(&e)) return config_parse_error;
    if (dynamic_cast<const ValidationError*>(&e)) return validation_error;
    if (const auto* lib = dynamic_cast<const Error*>(&e)) {
        switch (lib->code()) {
            case ErrorCode::dimension_mismatch:
            case ErrorCode::non_hermitian_input:
            case ErrorCode::negative_rate:
            case ErrorCode::cost_guard_exceeded:
            case ErrorCode::size_guard_exceeded:
            case ErrorCode::invalid_argument: return validation_error;
            default: return numerical_error;
        }
    }
    return numerical_error;
}

inline std::string error_class(int code) {
    switch (code) {
        case config_parse_error: return "ConfigParseError";
        case validation_error: return "ValidationError";
        default: return "NumericalError";
    }
}

/// Single-line machine-readable error record.
inline json error_record(const std::exception& e) {
    const int code = exit_code_for(e);
    json j{{"error", error_class(code)}, {"exit_code", code}, {"message", e.what()}};
    if (const auto* lib = dynamic_cast<const Error*>(&e)) j["cause"] = std::string(to_string(lib->code()));
    return j;
}

} // namespace poissonbath::experiment
