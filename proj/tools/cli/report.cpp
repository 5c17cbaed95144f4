#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "arstat/errors.hpp"

namespace arstat::cli {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    for (auto& ch : s) {
        if (ch == ',') ch = '.';
    }
    return s;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : path_(path) {
    for (const auto& h : header) *this << h;
    end_row();
}

CsvWriter& CsvWriter::operator<<(double v) { return *this << format_number(v); }

CsvWriter& CsvWriter::operator<<(long long v) { return *this << std::to_string(v); }

CsvWriter& CsvWriter::operator<<(const std::string& v) {
    if (!first_) buffer_ += ',';
    buffer_ += v;
    first_ = false;
    return *this;
}

void CsvWriter::end_row() {
    buffer_ += '\n';
    first_ = true;
}

CsvWriter::~CsvWriter() {
    std::ofstream out(path_, std::ios::binary);
    out << buffer_;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

Report::Report(std::string command, std::string config_hash) : command_(std::move(command)), hash_(std::move(config_hash)) {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    started_ = buf;
}

void Report::check_below(const std::string& name, double value, double tolerance) {
    checks_.push_back({name, value, tolerance, std::isfinite(value) && value <= tolerance});
}

void Report::check_true(const std::string& name, bool ok) { checks_.push_back({name, ok ? 0.0 : 1.0, 0.0, ok}); }

void Report::warn(const std::string& message) { warnings_.push_back(message); }

void Report::diagnostic(const std::string& name, nlohmann::json value) { diagnostics_[name] = std::move(value); }

void Report::time(const std::string& name, double seconds) { timings_[name] = seconds; }

bool Report::passed() const {
    for (const auto& c : checks_) {
        if (!c.pass) return false;
    }
    return true;
}

nlohmann::json Report::to_json() const {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : checks_) {
        checks.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    }
    return {{"command", command_},
            {"config_hash", hash_},
            {"status", passed() ? "pass" : "fail"},
            {"checks", checks},
            {"warnings", warnings_},
            {"diagnostics", diagnostics_},
            {"timings_seconds", timings_},
            {"metadata", {{"started_utc", started_}, {"version", "0.1.0"}}}};
}

}  // namespace arstat::cli
