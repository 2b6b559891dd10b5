#include "needlelab/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace needlelab {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Report::Report(const std::string& title) {
    text_ = "# " + title + "\n";
    kv("format_version", static_cast<double>(kReportFormatVersion));
}

void Report::section(const std::string& name) {
    text_ += "\n[" + name + "]\n";
}

void Report::kv(const std::string& key, const std::string& value) {
    text_ += key + " = " + value + "\n";
}

void Report::kv(const std::string& key, double value) {
    kv(key, format_g17(value));
}

void Report::kv(const std::string& key, bool value) {
    kv(key, std::string(value ? "pass" : "fail"));
}

void Report::raw(const std::string& block) { text_ += block; }

void Report::check(const std::string& name, const CheckReport& rep) {
    kv(name + ".verdict", rep.verdict);
    kv(name + ".worst_violation", rep.worst_violation);
    kv(name + ".tolerance", rep.tolerance);
    std::string w;
    for (double v : rep.witness) {
        if (!w.empty()) w += " ";
        w += format_g17(v);
    }
    kv(name + ".witness", w);
    if (!rep.witness_note.empty()) kv(name + ".witness_note", rep.witness_note);
    if (!rep.grid_spec.empty()) kv(name + ".grid", rep.grid_spec);
    if (!rep.detail.empty()) kv(name + ".detail", rep.detail);
}

void Report::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << text_;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text_ += ",";
        text_ += header[i];
    }
    text_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_)
        throw std::invalid_argument("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) text_ += ",";
        text_ += format_g17(values[i]);
    }
    text_ += "\n";
}

void CsvWriter::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write csv: " + path);
    out << text_;
}

void SeriesBundle::emit_plot_series(const std::string& selector,
                                    const std::string& out_dir) const {
    if (selector.empty())
        throw std::invalid_argument("emit_plot_series: selector absent");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == selector) {
            series_[i].write(out_dir + "/" + selector + ".csv");
            return;
        }
    }
    throw std::invalid_argument("emit_plot_series: unknown selector " + selector);
}

void SeriesBundle::emit_all(const std::string& out_dir) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        series_[i].write(out_dir + "/" + names_[i] + ".csv");
}

} // namespace needlelab
