#include "needlelab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace needlelab {

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
    KeyValueConfig kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            // blank or comment-only lines are fine, anything else is not
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::invalid_argument("config parse error at line " +
                                            std::to_string(lineno));
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config parse error at line " +
                                        std::to_string(lineno));
        kv.values_[key] = val;
    }
    return kv;
}

std::string KeyValueConfig::get(const std::string& key,
                                const std::string& dflt) const {
    const auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
}

double KeyValueConfig::get_num(const std::string& key, double dflt) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for " + key);
    }
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

RunConfig RunConfig::from_config(const KeyValueConfig& kv) {
    RunConfig rc;
    rc.command = kv.get("command", rc.command);
    rc.space_kind = kv.get("space.kind", rc.space_kind);
    rc.space_N = kv.get_num("space.N", rc.space_N);
    rc.space_K = kv.get_num("space.K", rc.space_K);
    rc.space_L = kv.get_num("space.L", rc.space_L);
    rc.space_a = kv.get_num("space.a", rc.space_a);
    rc.space_b = kv.get_num("space.b", rc.space_b);
    rc.space_weight = kv.get("space.weight", rc.space_weight);
    rc.space_broken_amp = kv.get_num("space.broken_amp", rc.space_broken_amp);
    rc.space_broken_freq = kv.get_num("space.broken_freq", rc.space_broken_freq);
    rc.r_max = kv.get_num("space.r_max", rc.r_max);
    rc.chart_halfwidth = kv.get_num("space.chart_halfwidth", rc.chart_halfwidth);
    rc.base_variant = kv.get("base.variant", rc.base_variant);
    rc.base_level = kv.get_num("base.level", rc.base_level);
    rc.resolution.n_rays =
        static_cast<int>(kv.get_num("resolution.rays", rc.resolution.n_rays));
    rc.resolution.n_phi =
        static_cast<int>(kv.get_num("resolution.phi", rc.resolution.n_phi));
    rc.resolution.n_cos =
        static_cast<int>(kv.get_num("resolution.cos", rc.resolution.n_cos));
    rc.resolution.sampled_grid = kv.get_num("resolution.sampled_grid", 0.0) != 0.0;
    rc.resolution.grid_nodes =
        static_cast<int>(kv.get_num("resolution.grid_nodes", rc.resolution.grid_nodes));
    rc.tolerance_scale = kv.get_num("tolerance.scale", rc.tolerance_scale);
    rc.out_dir = kv.get("out", rc.out_dir);
    if (kv.has("seed"))
        rc.seed = static_cast<std::uint64_t>(kv.get_num("seed", 0.0));
    return rc;
}

ModelSpace RunConfig::make_space() const {
    ModelSpace sp = [&]() {
        if (space_kind == "space_form")
            return ModelSpace::space_form(static_cast<int>(space_N), space_K);
        if (space_kind == "flat_cylinder") return ModelSpace::flat_cylinder(space_L);
        if (space_kind == "weighted_interval")
            return ModelSpace::weighted_interval(Interval(space_a, space_b),
                                                 Density1D::parse(space_weight),
                                                 space_N, space_K);
        if (space_kind == "weighted_half_line")
            return ModelSpace::weighted_half_line(Density1D::parse(space_weight),
                                                  space_N, space_K);
        if (space_kind == "product_line")
            return ModelSpace::product_line(Interval(space_a, space_b),
                                            Density1D::parse(space_weight), space_N,
                                            space_broken_amp, space_broken_freq);
        throw std::invalid_argument("unknown space kind: " + space_kind);
    }();
    sp.set_r_max(r_max);
    sp.set_chart_halfwidth(chart_halfwidth);
    return sp;
}

BaseDescriptor RunConfig::make_base(const ModelSpace& space) const {
    if (base_variant == "point")
        return BaseDescriptor::at_point(space.base_point_default());
    if (base_variant == "hyperplane")
        return BaseDescriptor::level_set(BaseVariant::Hyperplane);
    if (base_variant == "equator")
        return BaseDescriptor::level_set(BaseVariant::Equator);
    if (base_variant == "generator")
        return BaseDescriptor::level_set(BaseVariant::Generator);
    if (base_variant == "level_point")
        return BaseDescriptor::level_set(BaseVariant::LevelPoint, base_level);
    if (base_variant == "line") return BaseDescriptor::line(base_level);
    throw std::invalid_argument("unknown base variant: " + base_variant);
}

std::string RunConfig::echo() const {
    char buf[256];
    std::string s;
    auto kv = [&](const char* k, const std::string& v) {
        s += k;
        s += " = ";
        s += v;
        s += "\n";
    };
    auto kvn = [&](const char* k, double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        kv(k, buf);
    };
    kv("command", command);
    kv("space.kind", space_kind);
    kvn("space.N", space_N);
    kvn("space.K", space_K);
    kvn("space.L", space_L);
    kvn("space.a", space_a);
    kvn("space.b", space_b);
    kv("space.weight", space_weight);
    kvn("space.broken_amp", space_broken_amp);
    kvn("space.broken_freq", space_broken_freq);
    kvn("space.r_max", r_max);
    kvn("space.chart_halfwidth", chart_halfwidth);
    kv("base.variant", base_variant);
    kvn("base.level", base_level);
    kvn("resolution.rays", resolution.n_rays);
    kvn("resolution.phi", resolution.n_phi);
    kvn("resolution.cos", resolution.n_cos);
    kvn("resolution.sampled_grid", resolution.sampled_grid ? 1 : 0);
    kvn("resolution.grid_nodes", resolution.grid_nodes);
    kvn("tolerance.scale", tolerance_scale);
    // the output directory and worker count are execution-level options and
    // stay out of the echo so reports from identical experiments diff clean
    if (seed) {
        std::snprintf(buf, sizeof(buf), "%llu",
                      static_cast<unsigned long long>(*seed));
        kv("seed", buf);
    }
    return s;
}

} // namespace needlelab
