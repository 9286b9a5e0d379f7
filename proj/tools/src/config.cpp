#include "etd_app/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace etd::app {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where("") + "expected an object");
    }
    // Rejects keys that were never asked for.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError(where(it.key()) + "unknown key");
    }

    std::string where(const std::string& key) const {
        const std::string p = path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
        return p.empty() ? std::string("config: ") : p + ": ";
    }

    bool has(const std::string& key) {
        used_.insert(key);
        return j_.contains(key);
    }

    const json& at(const std::string& key) const { return j_.at(key); }

    void num(const std::string& key, double& v) {
        if (!has(key)) return;
        const json& x = at(key);
        if (!x.is_number()) throw ConfigError(where(key) + "expected a number");
        v = x.get<double>();
        if (!std::isfinite(v)) throw ConfigError(where(key) + "must be finite");
    }
    void integer(const std::string& key, int& v) {
        if (!has(key)) return;
        const json& x = at(key);
        if (!x.is_number_integer()) throw ConfigError(where(key) + "expected an integer");
        v = x.get<int>();
    }
    void u64(const std::string& key, std::uint64_t& v) {
        if (!has(key)) return;
        const json& x = at(key);
        if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<std::int64_t>() >= 0))
            throw ConfigError(where(key) + "expected a non-negative integer");
        v = x.get<std::uint64_t>();
    }
    void str(const std::string& key, std::string& v) {
        if (!has(key)) return;
        const json& x = at(key);
        if (!x.is_string()) throw ConfigError(where(key) + "expected a string");
        v = x.get<std::string>();
    }
    void nums(const std::string& key, std::vector<double>& v) {
        if (!has(key)) return;
        const json& x = at(key);
        if (!x.is_array()) throw ConfigError(where(key) + "expected an array of numbers");
        v.clear();
        for (const auto& e : x) {
            if (!e.is_number()) throw ConfigError(where(key) + "expected an array of numbers");
            v.push_back(e.get<double>());
        }
    }
    void strs(const std::string& key, std::vector<std::string>& v) {
        if (!has(key)) return;
        const json& x = at(key);
        if (!x.is_array()) throw ConfigError(where(key) + "expected an array of strings");
        v.clear();
        for (const auto& e : x) {
            if (!e.is_string()) throw ConfigError(where(key) + "expected an array of strings");
            v.push_back(e.get<std::string>());
        }
    }
    template <class Fn>
    void object(const std::string& key, Fn&& fn) {
        if (!has(key)) return;
        Reader sub(at(key), path_.empty() ? key : path_ + "." + key);
        fn(sub);
        sub.finish();
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void read_emt(Reader& r, EMTConfig& e) {
    r.str("type", e.type);
    r.num("a", e.a);
    r.num("b", e.b);
}

json emt_json(const EMTConfig& e) { return json{{"type", e.type}, {"a", e.a}, {"b", e.b}}; }

EMT4 make_emt(const EMTConfig& e, int d) {
    if (e.type == "none") return zero_emt(d);
    return emt_from_iso({e.a, e.b}, d);
}

double unit_volume(int d) { return d == 2 ? std::numbers::pi : 4.0 * std::numbers::pi / 3.0; }

void require(bool ok, const std::string& path, const std::string& msg) {
    if (!ok) throw ConfigError(path + ": " + msg);
}

void flatten(const json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
    } else {
        out.emplace_back(path, j.dump());
    }
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    {
        Reader r(j, "");
        r.integer("dim", c.dim);
        r.str("length_unit", c.length_unit);
        if (c.dim == 3) {
            // 3D defaults for vector fields, overridden below when present
            c.inclusion.za = {0.4, -0.25, 0.1};
            c.search.center = {0.0, 0.0, 0.0};
        }
        r.object("medium", [&](Reader& m) {
            m.num("lambda0", c.medium.lambda0);
            m.num("mu0", c.medium.mu0);
            m.num("rho0", c.medium.rho0);
            m.num("omega", c.medium.omega);
        });
        r.object("inclusion", [&](Reader& m) {
            m.nums("za", c.inclusion.za);
            m.num("delta", c.inclusion.delta);
            m.num("volume", c.inclusion.volume);
            m.num("rho1", c.inclusion.rho1);
            m.object("emt", [&](Reader& e) { read_emt(e, c.inclusion.emt); });
        });
        r.object("trial", [&](Reader& m) {
            m.num("rho1", c.trial.rho1);
            m.num("volume", c.trial.volume);
            m.object("emt", [&](Reader& e) { read_emt(e, c.trial.emt); });
        });
        r.object("boundary", [&](Reader& m) {
            m.num("radius", c.boundary.radius);
            m.integer("nodes", c.boundary.nodes);
            m.integer("ntheta", c.boundary.ntheta);
            m.integer("nphi", c.boundary.nphi);
            m.num("margin", c.boundary.margin);
        });
        r.object("probes", [&](Reader& m) {
            m.str("mode", c.probes.mode);
            m.integer("directions", c.probes.directions);
        });
        r.object("search", [&](Reader& m) {
            m.nums("center", c.search.center);
            m.num("extent", c.search.extent);
            m.num("spacing", c.search.spacing);
        });
        r.object("noise", [&](Reader& m) {
            m.num("sigma_noise", c.noise.sigma_noise);
            m.object("medium", [&](Reader& g) {
                g.num("sigma_gamma", c.noise.medium.sigma_gamma);
                g.num("corr_len", c.noise.medium.corr_len);
                g.num("radius", c.noise.medium.radius);
                g.num("h", c.noise.medium.h);
            });
        });
        r.object("mc", [&](Reader& m) {
            m.integer("trials", c.mc.trials);
            m.u64("seed", c.mc.seed);
        });
        r.object("output", [&](Reader& m) {
            m.str("dir", c.output.dir);
            m.strs("formats", c.output.formats);
        });
        r.finish();
    }
    validate_config(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j);
}

json numerics_json(const ExperimentConfig& c) {
    json j = to_json(c);
    j.erase("output");
    return j;
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["dim"] = c.dim;
    j["length_unit"] = c.length_unit;
    j["medium"] = {{"lambda0", c.medium.lambda0}, {"mu0", c.medium.mu0}, {"rho0", c.medium.rho0}, {"omega", c.medium.omega}};
    j["inclusion"] = {{"za", c.inclusion.za},
                      {"delta", c.inclusion.delta},
                      {"volume", c.inclusion.volume},
                      {"rho1", c.inclusion.rho1},
                      {"emt", emt_json(c.inclusion.emt)}};
    j["trial"] = {{"rho1", c.trial.rho1}, {"volume", c.trial.volume}, {"emt", emt_json(c.trial.emt)}};
    j["boundary"] = {{"radius", c.boundary.radius},
                     {"nodes", c.boundary.nodes},
                     {"ntheta", c.boundary.ntheta},
                     {"nphi", c.boundary.nphi},
                     {"margin", c.boundary.margin}};
    j["probes"] = {{"mode", c.probes.mode}, {"directions", c.probes.directions}};
    j["search"] = {{"center", c.search.center}, {"extent", c.search.extent}, {"spacing", c.search.spacing}};
    j["noise"] = {{"sigma_noise", c.noise.sigma_noise},
                  {"medium",
                   {{"sigma_gamma", c.noise.medium.sigma_gamma},
                    {"corr_len", c.noise.medium.corr_len},
                    {"radius", c.noise.medium.radius},
                    {"h", c.noise.medium.h}}}};
    j["mc"] = {{"trials", c.mc.trials}, {"seed", c.mc.seed}};
    j["output"] = {{"dir", c.output.dir}, {"formats", c.output.formats}};
    return j;
}

std::string config_hash(const ExperimentConfig& c) {
    // FNV-1a over the canonical dump (sorted keys, shortest round-trip reals)
    const std::string s = numerics_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> json_diff(const json& a, const json& b) {
    std::vector<std::pair<std::string, std::string>> fa, fb;
    flatten(a, "", fa);
    flatten(b, "", fb);
    std::map<std::string, std::pair<std::string, std::string>> m;
    for (const auto& [k, v] : fa) m[k].first = v;
    for (const auto& [k, v] : fb) m[k].second = v;
    std::vector<std::string> out;
    for (const auto& [k, v] : m)
        if (v.first != v.second)
            out.push_back(k + ": " + (v.first.empty() ? "(absent)" : v.first) + " -> " +
                          (v.second.empty() ? "(absent)" : v.second));
    return out;
}

void validate_config(const ExperimentConfig& c) {
    require(c.dim == 2 || c.dim == 3, "dim", "must be 2 or 3");
    require(!c.length_unit.empty(), "length_unit", "must be non-empty");
    require(c.medium.mu0 > 0.0, "medium.mu0", "must be positive");
    require(c.medium.rho0 > 0.0, "medium.rho0", "must be positive");
    require(c.medium.omega > 0.0, "medium.omega", "must be positive");
    require(c.medium.lambda0 + 2.0 * c.medium.mu0 / c.dim > 0.0, "medium.lambda0", "lambda0 + 2 mu0 / d must be positive");
    require(static_cast<int>(c.inclusion.za.size()) == c.dim, "inclusion.za", "length must equal dim");
    require(c.inclusion.delta > 0.0, "inclusion.delta", "must be positive");
    require(c.inclusion.volume >= 0.0, "inclusion.volume", "must be non-negative");
    require(c.inclusion.rho1 > 0.0, "inclusion.rho1", "must be positive");
    require(c.trial.rho1 > 0.0, "trial.rho1", "must be positive");
    require(c.trial.volume >= 0.0, "trial.volume", "must be non-negative");
    for (const auto& [p, e] : {std::pair{"inclusion.emt", &c.inclusion.emt}, std::pair{"trial.emt", &c.trial.emt}}) {
        require(e->type == "none" || e->type == "iso", std::string(p) + ".type", "must be \"none\" or \"iso\"");
        if (e->type == "iso") {
            require(e->a >= 0.0 && e->b >= 0.0, std::string(p), "a and b must be non-negative");
            require(e->a + e->b > 0.0, std::string(p), "an iso tensor needs a or b nonzero (use type none)");
        }
    }
    require(c.boundary.radius > 0.0, "boundary.radius", "must be positive");
    require(c.boundary.margin >= 0.0, "boundary.margin", "must be non-negative");
    if (c.dim == 2) require(c.boundary.nodes >= 8, "boundary.nodes", "must be >= 8");
    else require(c.boundary.ntheta >= 2 && c.boundary.nphi >= 4, "boundary.ntheta", "need ntheta >= 2 and nphi >= 4");
    require(c.probes.mode == "P" || c.probes.mode == "S", "probes.mode", "must be \"P\" or \"S\"");
    require(c.probes.directions >= 1, "probes.directions", "must be >= 1");
    require(static_cast<int>(c.search.center.size()) == c.dim, "search.center", "length must equal dim");
    require(c.search.spacing > 0.0, "search.spacing", "must be positive");
    require(c.search.extent >= 0.0, "search.extent", "must be non-negative");
    require(c.noise.sigma_noise >= 0.0, "noise.sigma_noise", "must be non-negative");
    require(c.noise.medium.sigma_gamma >= 0.0, "noise.medium.sigma_gamma", "must be non-negative");
    require(c.noise.medium.corr_len > 0.0, "noise.medium.corr_len", "must be positive");
    require(c.noise.medium.radius > 0.0, "noise.medium.radius", "must be positive");
    require(c.noise.medium.h > 0.0, "noise.medium.h", "must be positive");
    require(c.mc.trials >= 2, "mc.trials", "must be >= 2");
    for (const auto& f : c.output.formats) require(f == "csv" || f == "pgm", "output.formats", "entries must be csv or pgm");
    require(!c.output.dir.empty(), "output.dir", "must be non-empty");

    // module-level invariants
    try {
        const Medium med = make_medium(c);
        med.validate(c.dim);
        const auto grid = make_boundary(c);
        validate_scene(med, make_inclusion(c), make_trial(c), grid, c.boundary.margin);
        validate_targets(make_search(c), grid.R, c.boundary.margin);
        validate_field_spec(make_field_spec(c));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::vector<std::string> config_warnings(const ExperimentConfig& c) {
    auto w = scene_warnings(make_medium(c), make_inclusion(c));
    for (auto& s : field_spec_warnings(make_field_spec(c))) w.push_back(std::move(s));
    const bool inc_el = c.inclusion.emt.type != "none", tr_el = c.trial.emt.type != "none";
    if (inc_el != tr_el) w.push_back("inclusion and trial differ in contrast type; predicted peak uses the trial type");
    return w;
}

Medium make_medium(const ExperimentConfig& c) {
    Medium m;
    m.lambda0 = c.medium.lambda0;
    m.mu0 = c.medium.mu0;
    m.rho0 = c.medium.rho0;
    m.omega = c.medium.omega;
    return m;
}

Inclusion make_inclusion(const ExperimentConfig& c) {
    Inclusion inc;
    inc.za = make_point(c.inclusion.za[0], c.inclusion.za[1]);
    if (c.dim == 3) inc.za = make_point(c.inclusion.za[0], c.inclusion.za[1], c.inclusion.za[2]);
    inc.delta = c.inclusion.delta;
    inc.volumeB = c.inclusion.volume > 0.0 ? c.inclusion.volume : unit_volume(c.dim);
    inc.rho1 = c.inclusion.rho1;
    inc.emt = make_emt(c.inclusion.emt, c.dim);
    return inc;
}

TrialInclusion make_trial(const ExperimentConfig& c) {
    TrialInclusion t;
    t.rho1p = c.trial.rho1;
    t.volumeBp = c.trial.volume > 0.0 ? c.trial.volume : unit_volume(c.dim);
    t.emtp = make_emt(c.trial.emt, c.dim);
    return t;
}

BoundaryGrid make_boundary(const ExperimentConfig& c) {
    if (c.dim == 2) return circle_boundary(c.boundary.radius, c.boundary.nodes);
    return sphere_boundary(c.boundary.radius, c.boundary.ntheta, c.boundary.nphi);
}

Mode probe_mode(const ExperimentConfig& c) { return parse_mode(c.probes.mode.c_str()); }

std::vector<PlaneWave> make_probe_set(const ExperimentConfig& c) {
    return make_probes(probe_mode(c), uniform_directions(c.probes.directions, c.dim));
}

int search_count(const ExperimentConfig& c) {
    return static_cast<int>(std::lround(c.search.extent / c.search.spacing)) + 1;
}

SearchGrid make_search(const ExperimentConfig& c) {
    const auto& s = c.search.center;
    const Point center = c.dim == 2 ? make_point(s[0], s[1]) : make_point(s[0], s[1], s[2]);
    return make_lattice(center, search_count(c), c.search.spacing);
}

GaussianFieldSpec make_field_spec(const ExperimentConfig& c) {
    GaussianFieldSpec g;
    g.d = c.dim;
    g.sigma_gamma = c.noise.medium.sigma_gamma;
    g.corr_len = c.noise.medium.corr_len;
    g.radius = c.noise.medium.radius;
    g.h = c.noise.medium.h;
    return g;
}

}  // namespace etd::app
