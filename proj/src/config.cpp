#include "agg/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "agg/report.hpp"

namespace agg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void require_keys(const json& j, const std::string& path, const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.contains(key)) fail(path, "unknown key '" + key + "'");
    }
    for (const auto& key : required) {
        if (!j.contains(key)) fail(path, "missing key '" + key + "'");
    }
}

double get_finite(const json& j, const std::string& path, const std::string& key) {
    if (!j.at(key).is_number()) fail(path + "." + key, "expected a number");
    const double v = j.at(key).get<double>();
    if (!std::isfinite(v)) fail(path + "." + key, "must be finite");
    return v;
}

double get_positive(const json& j, const std::string& path, const std::string& key) {
    const double v = get_finite(j, path, key);
    if (!(v > 0.0)) fail(path + "." + key, "must be positive");
    return v;
}

int get_int(const json& j, const std::string& path, const std::string& key) {
    if (!j.at(key).is_number_integer()) fail(path + "." + key, "expected an integer");
    return j.at(key).get<int>();
}

std::array<double, 2> get_center(const json& j, const std::string& path, int dim) {
    std::array<double, 2> c = {0.0, 0.0};
    if (!j.contains("center")) return c;
    const json& arr = j.at("center");
    if (!arr.is_array() || static_cast<int>(arr.size()) != dim)
        fail(path + ".center", "expected an array of " + std::to_string(dim) + " coordinates");
    for (int i = 0; i < dim; ++i) {
        if (!arr[i].is_number()) fail(path + ".center", "expected numbers");
        c[i] = arr[i].get<double>();
        if (!std::isfinite(c[i])) fail(path + ".center", "must be finite");
    }
    return c;
}

GaussianBump parse_bump(const json& j, const std::string& path, int dim, bool allow_type) {
    std::set<std::string> allowed = {"mass", "center", "sigma"};
    if (allow_type) allowed.insert("type");
    require_keys(j, path, allowed, {"mass", "sigma"});
    GaussianBump b;
    b.mass = get_positive(j, path, "mass");
    b.sigma = get_positive(j, path, "sigma");
    b.center = get_center(j, path, dim);
    return b;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

RadialTable load_radial_table_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("kernel.table: cannot open '" + path.string() + "'");
    RadialTable table;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string cell;
        double vals[3];
        for (int i = 0; i < 3; ++i) {
            if (!std::getline(ss, cell, ','))
                throw ConfigError("kernel.table: expected 'r,k,k_prime' rows in " + path.string());
            vals[i] = std::strtod(cell.c_str(), nullptr);
        }
        table.r.push_back(vals[0]);
        table.k.push_back(vals[1]);
        table.k_prime.push_back(vals[2]);
    }
    return table;
}

KernelSpec kernel_from_json(const json& j, const std::filesystem::path& base_dir) {
    const std::string path = "kernel";
    require_keys(j, path,
                 {"variant", "alpha", "beta", "c", "amplitude", "sigma", "dim", "sign", "table"},
                 {"variant"});
    if (!j.at("variant").is_string()) fail(path + ".variant", "expected a string");
    const std::string variant = j.at("variant").get<std::string>();

    auto dim_of = [&](int fallback) {
        return j.contains("dim") ? get_int(j, path, "dim") : fallback;
    };
    KernelSpec spec;
    try {
        if (variant == "zero") {
            spec = KernelSpec::zero();
        } else if (variant == "gaussian") {
            spec = KernelSpec::gaussian(j.contains("amplitude") ? get_positive(j, path, "amplitude") : 1.0,
                                        j.contains("sigma") ? get_positive(j, path, "sigma") : 1.0);
        } else if (variant == "exponential") {
            spec = KernelSpec::exponential(j.contains("alpha") ? get_positive(j, path, "alpha") : 1.0);
        } else if (variant == "bessel") {
            spec = KernelSpec::bessel(j.contains("alpha") ? get_positive(j, path, "alpha") : 1.0,
                                      dim_of(2));
        } else if (variant == "newtonian") {
            spec = KernelSpec::newtonian(dim_of(2));
        } else if (variant == "power_law") {
            spec = KernelSpec::power_law(get_positive(j, path, "beta"), dim_of(2),
                                         j.contains("c") ? get_positive(j, path, "c") : 1.0);
        } else if (variant == "repulsive_bessel") {
            spec = KernelSpec::repulsive_bessel();
        } else if (variant == "custom_radial") {
            if (!j.contains("table") || !j.at("table").is_string())
                fail(path + ".table", "custom_radial needs a csv path");
            spec = KernelSpec::custom_radial(
                load_radial_table_csv(base_dir / j.at("table").get<std::string>()));
        } else {
            fail(path + ".variant", "unknown variant '" + variant + "'");
        }
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    if (j.contains("sign")) {
        const std::string s = j.at("sign").get<std::string>();
        if (s == "attractive")
            spec.sign = KernelSign::Attractive;
        else if (s == "repulsive")
            spec.sign = KernelSign::Repulsive;
        else
            fail(path + ".sign", "expected 'attractive' or 'repulsive'");
    }
    return spec;
}

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " +
                          std::to_string(col));
    }

    ExperimentConfig cfg;
    cfg.raw = doc;
    require_keys(doc, "config", {"grid", "kernel", "initial_data", "time", "caps", "outputs", "sweep"},
                 {"grid", "kernel", "initial_data", "time"});

    const json& jg = doc.at("grid");
    require_keys(jg, "grid", {"dim", "half_length", "points_per_dim"},
                 {"dim", "half_length", "points_per_dim"});
    try {
        cfg.grid = Grid::make(get_int(jg, "grid", "dim"), get_positive(jg, "grid", "half_length"),
                              get_int(jg, "grid", "points_per_dim"));
    } catch (const std::invalid_argument& e) {
        fail("grid", e.what());
    }

    cfg.kernel = kernel_from_json(doc.at("kernel"), base_dir);
    if (auto bound = cfg.kernel.bound_dim(); bound && *bound != cfg.grid.dim)
        fail("kernel", "kernel dimension " + std::to_string(*bound) + " does not match grid.dim");

    const json& ji = doc.at("initial_data");
    require_keys(ji, "initial_data", {"type", "mass", "center", "sigma", "bumps", "path"}, {"type"});
    const std::string itype = ji.at("type").get<std::string>();
    if (itype == "gaussian") {
        cfg.bumps.push_back(parse_bump(ji, "initial_data", cfg.grid.dim, true));
    } else if (itype == "gaussians") {
        if (!ji.contains("bumps") || !ji.at("bumps").is_array() || ji.at("bumps").empty())
            fail("initial_data.bumps", "expected a nonempty array");
        int idx = 0;
        for (const json& b : ji.at("bumps"))
            cfg.bumps.push_back(parse_bump(b, "initial_data.bumps[" + std::to_string(idx++) + "]",
                                           cfg.grid.dim, false));
    } else if (itype == "file") {
        if (!ji.contains("path") || !ji.at("path").is_string())
            fail("initial_data.path", "expected a snapshot path");
        cfg.u0_file = (base_dir / ji.at("path").get<std::string>()).string();
    } else {
        fail("initial_data.type", "expected 'gaussian', 'gaussians' or 'file'");
    }

    const json& jt = doc.at("time");
    require_keys(jt, "time", {"t_end", "dt_init", "dt_min", "scheme"}, {"t_end"});
    cfg.t_end = get_finite(jt, "time", "t_end");
    if (cfg.t_end < 0.0) fail("time.t_end", "must be nonnegative");
    if (jt.contains("dt_init")) cfg.dt_init = get_positive(jt, "time", "dt_init");
    if (jt.contains("dt_min")) cfg.dt_min = get_positive(jt, "time", "dt_min");
    if (cfg.dt_min > cfg.dt_init) fail("time", "dt_min must not exceed dt_init");
    if (jt.contains("scheme")) {
        const std::string s = jt.at("scheme").get<std::string>();
        if (s == "etd_rk2")
            cfg.scheme = Scheme::EtdRk2;
        else if (s == "strang")
            cfg.scheme = Scheme::Strang;
        else
            fail("time.scheme", "expected 'etd_rk2' or 'strang'");
    }

    if (doc.contains("caps")) {
        const json& jc = doc.at("caps");
        require_keys(jc, "caps", {"linf_cap", "negativity_cap", "moment_floor"}, {});
        if (jc.contains("linf_cap")) cfg.caps.linf_cap = get_positive(jc, "caps", "linf_cap");
        if (jc.contains("negativity_cap"))
            cfg.caps.negativity_cap = get_positive(jc, "caps", "negativity_cap");
        if (jc.contains("moment_floor")) cfg.caps.moment_floor = get_positive(jc, "caps", "moment_floor");
    }

    if (doc.contains("outputs")) {
        const json& jo = doc.at("outputs");
        require_keys(jo, "outputs",
                     {"directory", "diagnostics_stride", "lq_exponent", "virial_rhs",
                      "snapshot_count", "plot"},
                     {});
        if (jo.contains("directory")) cfg.out_directory = jo.at("directory").get<std::string>();
        if (jo.contains("diagnostics_stride")) {
            cfg.diagnostics_stride = get_int(jo, "outputs", "diagnostics_stride");
            if (cfg.diagnostics_stride < 1) fail("outputs.diagnostics_stride", "must be >= 1");
        }
        if (jo.contains("lq_exponent")) {
            cfg.lq_exponent = get_finite(jo, "outputs", "lq_exponent");
            if (!(cfg.lq_exponent >= 1.0)) fail("outputs.lq_exponent", "must be >= 1");
        }
        if (jo.contains("virial_rhs")) cfg.record_virial = jo.at("virial_rhs").get<bool>();
        if (jo.contains("snapshot_count")) {
            cfg.snapshot_count = get_int(jo, "outputs", "snapshot_count");
            if (cfg.snapshot_count < 0) fail("outputs.snapshot_count", "must be >= 0");
        }
        if (jo.contains("plot")) cfg.plot = jo.at("plot").get<bool>();
    }

    if (doc.contains("sweep")) {
        const json& js = doc.at("sweep");
        require_keys(js, "sweep", {"parameter", "values"}, {"parameter", "values"});
        cfg.has_sweep = true;
        cfg.sweep_parameter = js.at("parameter").get<std::string>();
        if (!js.at("values").is_array() || js.at("values").empty())
            fail("sweep.values", "expected a nonempty array of numbers");
        for (const json& v : js.at("values")) {
            if (!v.is_number()) fail("sweep.values", "expected numbers");
            cfg.sweep_values.push_back(v.get<double>());
        }
        // the parameter path must resolve in the document
        with_sweep_value(doc, cfg.sweep_parameter, cfg.sweep_values.front());
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_experiment_config(ss.str(), path.parent_path());
}

nlohmann::json with_sweep_value(const nlohmann::json& doc, const std::string& parameter,
                                double value) {
    json out = doc;
    json* node = &out;
    std::string rest = parameter;
    std::string leaf;
    while (true) {
        const auto dot = rest.find('.');
        const std::string key = rest.substr(0, dot);
        if (dot == std::string::npos) {
            leaf = key;
            break;
        }
        if (!node->contains(key)) throw ConfigError("sweep.parameter: no such path '" + parameter + "'");
        node = &node->at(key);
        rest = rest.substr(dot + 1);
    }
    if (!node->is_object() || !node->contains(leaf))
        throw ConfigError("sweep.parameter: no such path '" + parameter + "'");
    if (!node->at(leaf).is_number())
        throw ConfigError("sweep.parameter: '" + parameter + "' is not numeric");
    (*node)[leaf] = value;
    out.erase("sweep");
    return out;
}

SimConfig build_sim_config(const ExperimentConfig& cfg, const std::filesystem::path& base_dir) {
    SimConfig sim;
    sim.grid = cfg.grid;
    sim.kernel = cfg.kernel;
    if (!cfg.u0_file.empty()) {
        std::filesystem::path p = cfg.u0_file;
        if (p.is_relative()) p = base_dir / p;
        Field u0 = read_snapshot(p);
        if (!(u0.grid == cfg.grid))
            throw ConfigError("initial_data.path: snapshot grid does not match config grid");
        u0.time_tag = 0.0;
        sim.u0 = std::move(u0);
    } else {
        sim.u0 = gaussian_field(cfg.grid, cfg.bumps);
    }
    sim.t_end = cfg.t_end;
    sim.dt_init = cfg.dt_init;
    sim.dt_min = cfg.dt_min;
    sim.scheme = cfg.scheme;
    sim.caps = cfg.caps;
    sim.diagnostics_stride = cfg.diagnostics_stride;
    sim.lq_exponent = cfg.lq_exponent;
    sim.record_virial_rhs = cfg.record_virial;
    if (cfg.snapshot_count >= 2) {
        for (int i = 0; i < cfg.snapshot_count; ++i)
            sim.snapshot_times.push_back(cfg.t_end * i / (cfg.snapshot_count - 1));
    } else if (cfg.snapshot_count == 1) {
        sim.snapshot_times.push_back(0.0);
    }
    return sim;
}

}  // namespace agg
