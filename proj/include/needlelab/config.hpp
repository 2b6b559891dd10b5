#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "needlelab/disintegration.hpp"

namespace needlelab {

/// Flat key=value config with '#' comments and dotted keys for nesting.
class KeyValueConfig {
public:
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& dflt = "") const;
    double get_num(const std::string& key, double dflt) const;
    void set(const std::string& key, const std::string& value);

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Fully resolved run configuration; unspecified fields take the documented
/// defaults and the resolved form is echoed into every report.
struct RunConfig {
    std::string command = "suite";
    std::string space_kind = "space_form";
    double space_N = 2.0;
    double space_K = 1.0;
    double space_L = 2.0 * M_PI;
    double space_a = 0.0, space_b = M_PI;
    std::string space_weight = "constant a=0 b=3.141592653589793 amp=1";
    double space_broken_amp = 0.0, space_broken_freq = 1.0;
    double r_max = 50.0;
    double chart_halfwidth = 8.0;
    std::string base_variant = "point";
    double base_level = 0.0;
    ResolutionSpec resolution;
    double tolerance_scale = 1.0;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;

    static RunConfig from_config(const KeyValueConfig& kv);
    ModelSpace make_space() const;
    BaseDescriptor make_base(const ModelSpace& space) const;
    /// Deterministic echo of every resolved field (execution-only options
    /// such as the worker count are deliberately not part of the config).
    std::string echo() const;
};

} // namespace needlelab
