#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace arstat::cli {

/// "%.17g" with '.' as decimal separator regardless of locale.
std::string format_number(double v);

class CsvWriter {
public:
    /// Rows are buffered and written when the writer goes out of scope.
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(long long v);
    CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
    CsvWriter& operator<<(const std::string& v);
    void end_row();

private:
    std::string buffer_;
    std::filesystem::path path_;
    bool first_ = true;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Run record: the checks decide the exit status; timings and the start time
/// stay here and never enter the data files.
class Report {
public:
    Report(std::string command, std::string config_hash);

    /// Passes when value <= tolerance.
    void check_below(const std::string& name, double value, double tolerance);
    void check_true(const std::string& name, bool ok);
    void warn(const std::string& message);
    void diagnostic(const std::string& name, nlohmann::json value);
    void time(const std::string& name, double seconds);

    bool passed() const;
    const std::vector<Check>& checks() const { return checks_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    nlohmann::json to_json() const;

private:
    std::string command_;
    std::string hash_;
    std::string started_;
    std::vector<Check> checks_;
    std::vector<std::string> warnings_;
    nlohmann::json diagnostics_ = nlohmann::json::object();
    nlohmann::json timings_ = nlohmann::json::object();
};

/// Wall-clock seconds since construction.
class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace arstat::cli
