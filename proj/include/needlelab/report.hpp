#pragma once

#include <string>
#include <vector>

#include "needlelab/check_report.hpp"

namespace needlelab {

inline constexpr int kReportFormatVersion = 1;

/// Deterministic structured-text report: fixed key order, fixed float
/// formatting (17 significant digits), no timestamps or machine state.
class Report {
public:
    explicit Report(const std::string& title);

    void section(const std::string& name);
    void kv(const std::string& key, const std::string& value);
    void kv(const std::string& key, double value);
    void kv(const std::string& key, bool value);
    void raw(const std::string& block);
    void check(const std::string& name, const CheckReport& rep);

    const std::string& text() const { return text_; }
    void write(const std::string& path) const;

private:
    std::string text_;
};

/// Two-or-more-column CSV with a header row and %.17g cells.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<double>& values);
    const std::string& text() const { return text_; }
    void write(const std::string& path) const;

private:
    std::size_t columns_;
    std::string text_;
};

std::string format_g17(double v);

/// Named plot series attached to a run: emit_plot_series writes the selected
/// one as CSV and rejects unknown or empty selectors.
class SeriesBundle {
public:
    void add(const std::string& name, CsvWriter csv) {
        names_.push_back(name);
        series_.push_back(std::move(csv));
    }
    std::vector<std::string> names() const { return names_; }
    /// Writes <out_dir>/<selector>.csv; throws std::invalid_argument when the
    /// selector is empty or names no series in the bundle.
    void emit_plot_series(const std::string& selector,
                          const std::string& out_dir) const;
    void emit_all(const std::string& out_dir) const;

private:
    std::vector<std::string> names_;
    std::vector<CsvWriter> series_;
};

} // namespace needlelab
