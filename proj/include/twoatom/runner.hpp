#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "oracles.hpp"
#include "quantum_jump.hpp"

namespace twoatom {

inline constexpr const char* engine_version = "0.1.0";

enum class ScenarioKind { evolve, steady, g2, variance, jump, visibility, sweep, figure };

inline const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::evolve: return "evolve";
        case ScenarioKind::steady: return "steady";
        case ScenarioKind::g2: return "g2";
        case ScenarioKind::variance: return "variance";
        case ScenarioKind::jump: return "jump";
        case ScenarioKind::visibility: return "visibility";
        case ScenarioKind::sweep: return "sweep";
        case ScenarioKind::figure: return "figure";
    }
    return "?";
}

struct GridSpec {
    double start = 0.0;
    double stop = 10.0;
    std::size_t points = 101;
};

struct SweepSpec {
    std::string parameter = "drive.detuning";
    double start = -10.0;
    double stop = 10.0;
    std::size_t points = 41;
};

struct CavitySpec {
    double coupling = 10.0;
    double gamma_c = 100.0;
    double drive = 0.0;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::steady;
    Scenario model = Scenario::vacuum_drive;
    std::string initial = "ground";
    AtomPairConfig pair;
    DriveField drive;
    SqueezedReservoir reservoir;
    CavitySpec cavity;
    DetectionGeometry detection;
    double alpha = 0.0;
    GridSpec grid;
    SweepSpec sweep;
    // Curves of a figure: each entry of family_values assigns one value per
    // parameter in family.
    std::vector<std::string> family;
    std::vector<std::vector<double>> family_values;
    std::uint64_t seed = 1;
    std::size_t trajectories = 1000;
    IntegratorOptions solver;
    std::string output;
    std::string figure;
    std::string note;
};

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> records;  // JSON lines
};

namespace detail {

inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_plain(const std::string& s, const std::string& key) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ValidationError("key '" + key + "': cannot parse number '" + s + "'");
    return v;
}

// Numbers, optionally written as [a*]pi[/b].
inline double parse_number(const std::string& raw, const std::string& key) {
    std::string s = trim(raw);
    auto p = s.find("pi");
    if (p == std::string::npos) return parse_plain(s, key);
    double f = 1.0, d = 1.0;
    std::string pre = trim(std::string_view(s).substr(0, p));
    std::string post = trim(std::string_view(s).substr(p + 2));
    if (!pre.empty()) {
        if (pre == "-") f = -1.0;
        else if (pre.back() == '*') f = parse_plain(trim(pre.substr(0, pre.size() - 1)), key);
        else throw ValidationError("key '" + key + "': cannot parse number '" + s + "'");
    }
    if (!post.empty()) {
        if (post.front() != '/') throw ValidationError("key '" + key + "': cannot parse number '" + s + "'");
        d = parse_plain(trim(post.substr(1)), key);
    }
    return f * pi / d;
}

inline std::size_t parse_count(const std::string& s, const std::string& key) {
    std::size_t v = 0;
    std::string t = trim(s);
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size())
        throw ValidationError("key '" + key + "': expected a non-negative integer, got '" + s + "'");
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

struct Key {
    std::string section;
    std::string name;
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
    bool numeric = true;

    std::string full() const { return section.empty() ? name : section + "." + name; }
};

#define TWOATOM_NUM(sec, nm, field)                                                                    \
    Key {                                                                                              \
        sec, nm, [](ScenarioConfig& c, const std::string& v) { c.field = parse_number(v, nm); },     \
            [](const ScenarioConfig& c) { return fmt(c.field); }                                       \
    }
#define TWOATOM_COUNT(sec, nm, field)                                                                  \
    Key {                                                                                              \
        sec, nm, [](ScenarioConfig& c, const std::string& v) { c.field = parse_count(v, nm); },      \
            [](const ScenarioConfig& c) { return std::to_string(c.field); }, false                     \
    }
#define TWOATOM_TEXT(sec, nm, field)                                                                   \
    Key {                                                                                              \
        sec, nm, [](ScenarioConfig& c, const std::string& v) { c.field = v; },                        \
            [](const ScenarioConfig& c) { return c.field; }, false                                     \
    }

inline ScenarioKind parse_kind(const std::string& s) {
    for (auto k : {ScenarioKind::evolve, ScenarioKind::steady, ScenarioKind::g2, ScenarioKind::variance,
                   ScenarioKind::jump, ScenarioKind::visibility, ScenarioKind::sweep, ScenarioKind::figure})
        if (s == to_string(k)) return k;
    throw ValidationError("key 'scenario': unknown scenario kind '" + s + "'");
}

inline Scenario parse_model(const std::string& s) {
    for (auto m : {Scenario::vacuum_drive, Scenario::squeezed, Scenario::dicke_dressed, Scenario::bad_cavity})
        if (s == to_string(m)) return m;
    throw ValidationError("key 'model': unknown model '" + s + "'");
}

inline std::string family_values_text(const ScenarioConfig& c) {
    std::string out;
    for (std::size_t i = 0; i < c.family_values.size(); ++i) {
        if (i) out += "; ";
        for (std::size_t j = 0; j < c.family_values[i].size(); ++j) {
            if (j) out += ", ";
            out += fmt(c.family_values[i][j]);
        }
    }
    return out;
}

inline const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        Key{"", "scenario", [](ScenarioConfig& c, const std::string& v) { c.kind = parse_kind(v); },
            [](const ScenarioConfig& c) { return std::string(to_string(c.kind)); }, false},
        Key{"", "model", [](ScenarioConfig& c, const std::string& v) { c.model = parse_model(v); },
            [](const ScenarioConfig& c) { return std::string(to_string(c.model)); }, false},
        TWOATOM_TEXT("", "initial", initial),
        TWOATOM_TEXT("", "figure", figure),
        TWOATOM_TEXT("", "output", output),
        TWOATOM_TEXT("", "note", note),
        TWOATOM_COUNT("", "seed", seed),
        TWOATOM_COUNT("", "trajectories", trajectories),
        Key{"", "family",
            [](ScenarioConfig& c, const std::string& v) {
                c.family.clear();
                if (!trim(v).empty()) c.family = split(v, ',');
            },
            [](const ScenarioConfig& c) {
                std::string s;
                for (std::size_t i = 0; i < c.family.size(); ++i) s += (i ? ", " : "") + c.family[i];
                return s;
            },
            false},
        Key{"", "family_values",
            [](ScenarioConfig& c, const std::string& v) {
                c.family_values.clear();
                if (trim(v).empty()) return;
                for (auto& tuple : split(v, ';')) {
                    std::vector<double> row;
                    for (auto& x : split(tuple, ',')) row.push_back(parse_number(x, "family_values"));
                    c.family_values.push_back(row);
                }
            },
            family_values_text, false},
        TWOATOM_NUM("pair", "gamma1", pair.gamma1),
        TWOATOM_NUM("pair", "gamma2", pair.gamma2),
        TWOATOM_NUM("pair", "delta", pair.delta),
        TWOATOM_NUM("pair", "separation", pair.separation),
        TWOATOM_NUM("pair", "dipole_angle", pair.dipole_angle),
        TWOATOM_NUM("drive", "rabi", drive.rabi),
        TWOATOM_NUM("drive", "detuning", drive.detuning),
        TWOATOM_NUM("drive", "propagation_angle", drive.propagation_angle),
        Key{"drive", "wave",
            [](ScenarioConfig& c, const std::string& v) {
                if (v == "running") c.drive.wave_type = WaveType::running;
                else if (v == "standing") c.drive.wave_type = WaveType::standing;
                else throw ValidationError("key 'wave': expected running or standing, got '" + v + "'");
            },
            [](const ScenarioConfig& c) {
                return std::string(c.drive.wave_type == WaveType::running ? "running" : "standing");
            },
            false},
        TWOATOM_NUM("drive", "phase", drive.phase),
        TWOATOM_NUM("squeezed", "n_photons", reservoir.n_photons),
        TWOATOM_NUM("squeezed", "m_magnitude", reservoir.m_magnitude),
        TWOATOM_NUM("squeezed", "squeeze_phase", reservoir.squeeze_phase),
        TWOATOM_NUM("squeezed", "matching", reservoir.matching),
        TWOATOM_NUM("squeezed", "solid_angle", reservoir.solid_angle),
        TWOATOM_NUM("squeezed", "carrier_offset", reservoir.carrier_offset),
        TWOATOM_NUM("cavity", "coupling", cavity.coupling),
        TWOATOM_NUM("cavity", "gamma_c", cavity.gamma_c),
        TWOATOM_NUM("cavity", "drive", cavity.drive),
        TWOATOM_NUM("detection", "theta1", detection.theta1),
        TWOATOM_NUM("detection", "theta2", detection.theta2),
        TWOATOM_NUM("detection", "phi", detection.phi),
        TWOATOM_NUM("detection", "alpha", alpha),
        TWOATOM_NUM("grid", "start", grid.start),
        TWOATOM_NUM("grid", "stop", grid.stop),
        TWOATOM_COUNT("grid", "points", grid.points),
        TWOATOM_TEXT("sweep", "parameter", sweep.parameter),
        TWOATOM_NUM("sweep", "start", sweep.start),
        TWOATOM_NUM("sweep", "stop", sweep.stop),
        TWOATOM_COUNT("sweep", "points", sweep.points),
        TWOATOM_NUM("solver", "rtol", solver.rtol),
        TWOATOM_NUM("solver", "atol", solver.atol),
    };
    return table;
}

#undef TWOATOM_NUM
#undef TWOATOM_COUNT
#undef TWOATOM_TEXT

inline const Key& find_key(const std::string& section, const std::string& name) {
    const auto& t = keys();
    std::string sec = section, nm = name;
    if (sec.empty()) {
        auto dot = name.find('.');
        if (dot != std::string::npos) {
            sec = name.substr(0, dot);
            nm = name.substr(dot + 1);
        }
    }
    if (!sec.empty()) {
        for (auto& k : t)
            if (k.section == sec && k.name == nm) return k;
        throw ValidationError("unknown key '" + sec + "." + nm + "'");
    }
    const Key* hit = nullptr;
    for (auto& k : t) {
        if (k.name != nm) continue;
        if (k.section.empty()) return k;
        if (hit) throw ValidationError("ambiguous key '" + nm + "'; qualify it with its section");
        hit = &k;
    }
    if (!hit) throw ValidationError("unknown key '" + nm + "'");
    return *hit;
}

}  // namespace detail

/// Assigns a parameter by its (optionally section-qualified) key name.
inline void set_parameter(ScenarioConfig& c, const std::string& key, const std::string& value) {
    detail::find_key("", key).set(c, value);
}

inline void set_parameter(ScenarioConfig& c, const std::string& key, double value) {
    auto& k = detail::find_key("", key);
    if (!k.numeric) throw ValidationError("key '" + key + "' is not numeric");
    k.set(c, detail::fmt(value));
}

inline void validate(const ScenarioConfig& c) {
    validate(c.pair);
    validate(c.drive);
    validate(c.reservoir);
    validate(c.detection);
    bool series = c.kind == ScenarioKind::evolve || c.kind == ScenarioKind::g2 ||
                  c.kind == ScenarioKind::variance || c.kind == ScenarioKind::jump;
    if (series && c.grid.points < 2) throw ValidationError("invariant violated: grid points >= 2");
    if (series && !(c.grid.stop > c.grid.start)) throw ValidationError("invariant violated: grid stop > start");
    if (c.kind == ScenarioKind::sweep) {
        if (c.sweep.points < 2) throw ValidationError("invariant violated: sweep points >= 2");
        if (!detail::find_key("", c.sweep.parameter).numeric)
            throw ValidationError("invariant violated: sweep parameter must be numeric");
    }
    if (c.kind == ScenarioKind::jump && c.trajectories < 1)
        throw ValidationError("invariant violated: trajectories >= 1");
    if (c.model == Scenario::bad_cavity && !(c.cavity.gamma_c > 0))
        throw ValidationError("invariant violated: cavity gamma_c > 0");
    if (!(c.solver.rtol > 0 && c.solver.atol > 0)) throw ValidationError("invariant violated: tolerances > 0");
    for (auto& f : c.family)
        if (!detail::find_key("", f).numeric) throw ValidationError("family parameter '" + f + "' is not numeric");
    for (auto& row : c.family_values)
        if (row.size() != c.family.size())
            throw ValidationError("invariant violated: each family_values entry has one value per family key");
}

inline ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig c;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError("line " + std::to_string(lineno) + ": malformed section");
            section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(std::string_view(line).substr(0, eq));
        std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        detail::find_key(section, key).set(c, value);
    }
    validate(c);
    return c;
}

inline std::string serialize(const ScenarioConfig& c) {
    std::string out, section;
    for (auto& k : detail::keys()) {
        if (k.section != section) {
            section = k.section;
            out += "[" + section + "]\n";
        }
        out += k.name + " = " + k.get(c) + "\n";
    }
    return out;
}

// ------------------------------------------------------------------ engine glue

inline Generator16 make_generator(const ScenarioConfig& c) {
    switch (c.model) {
        case Scenario::vacuum_drive: return build_vacuum_drive(c.pair, c.drive);
        case Scenario::squeezed: return build_squeezed(c.pair, c.reservoir);
        case Scenario::dicke_dressed: return build_dicke_dressed(c.drive, c.pair.gamma1);
        case Scenario::bad_cavity: return build_bad_cavity(c.pair, c.cavity.coupling, c.cavity.gamma_c, c.cavity.drive);
    }
    throw ValidationError("unknown model");
}

inline DensityMatrix4 initial_state(const std::string& name) {
    const double r = 1 / std::numbers::sqrt2;
    Vec4 v = Vec4::Zero();
    if (name == "ground") v(0) = 1;
    else if (name == "excited") v(3) = 1;
    else if (name == "atom1") v(1) = 1;
    else if (name == "atom2") v(2) = 1;
    else if (name == "symmetric") v(1) = v(2) = r;
    else if (name == "antisymmetric") {
        v(1) = r;
        v(2) = -r;
    } else {
        throw ValidationError("key 'initial': unknown state '" + name +
                              "' (ground, excited, atom1, atom2, symmetric, antisymmetric)");
    }
    return DensityMatrix4::pure(v);
}

namespace detail {

inline double nan_on_error(const std::function<double()>& f) {
    try {
        return f();
    } catch (const DomainError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

inline std::vector<std::string> state_columns() {
    return {"rho_gg",    "rho_ss",    "rho_aa",    "rho_ee",    "re_rho_sa",  "im_rho_sa", "re_rho_eg",
            "im_rho_eg", "intensity", "angular_intensity", "visibility", "g2_zero",   "variance",  "purity"};
}

inline std::vector<double> state_row(const DensityMatrix4& rho, const ScenarioConfig& c) {
    using namespace level;
    Mat4 m = collective_elements(rho.matrix());
    auto vis = visibility(rho);
    auto g2 = g2_zero(rho, c.pair, c.detection);
    return {m(g, g).real(),
            m(s, s).real(),
            m(a, a).real(),
            m(e, e).real(),
            m(s, a).real(),
            m(s, a).imag(),
            m(e, g).real(),
            m(e, g).imag(),
            total_intensity(rho, c.pair),
            angular_intensity(rho, c.pair, c.detection),
            vis.value,
            g2.value,
            nan_on_error([&] { return quadrature_variance(rho, c.pair, c.alpha, c.detection); }),
            purity(rho)};
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex lock;
    auto work = [&] {
        for (std::size_t i = cursor++; i < n; i = cursor++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(lock);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    unsigned nw = worker_count(0, n);
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < nw; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

inline std::vector<double> sweep_row(const ScenarioConfig& c) {
    double g12 = collective_damping(c.pair);
    double o12 = c.pair.separation > 0 ? dipole_dipole_shift(c.pair) : std::numeric_limits<double>::quiet_NaN();
    double gs = std::numeric_limits<double>::quiet_NaN(), ga = gs;
    if (c.pair.separation > 0) {
        auto b = build_basis(c.pair);
        auto r = superposition_rates({b.beta, b.alpha}, c.pair);
        gs = r.ss.real();
        ga = r.aa.real();
    }
    auto ss = steady_state(make_generator(c));
    auto ent = oracle::entangled_eigenstates(ss.state);
    std::vector<double> row = {g12, o12, gs, ga};
    auto st = state_row(ss.state, c);
    row.insert(row.end(), st.begin(), st.end());
    for (double p : ent.populations) row.push_back(p);
    return row;
}

inline ResultTable run_single(const ScenarioConfig& c);

inline ResultTable run_sweep(const ScenarioConfig& c) {
    ResultTable t;
    t.columns = {c.sweep.parameter, "gamma12", "omega12", "gamma_s_prime", "gamma_a_prime"};
    for (auto& s : state_columns()) t.columns.push_back(s);
    for (auto s : {"P1", "P2", "P3", "P4"}) t.columns.push_back(s);
    auto values = linspace(c.sweep.start, c.sweep.stop, c.sweep.points);
    t.rows.resize(values.size());
    parallel_for(values.size(), [&](std::size_t i) {
        ScenarioConfig local = c;
        set_parameter(local, c.sweep.parameter, values[i]);
        validate(local);
        auto row = sweep_row(local);
        row.insert(row.begin(), values[i]);
        t.rows[i] = std::move(row);
    });
    return t;
}

inline std::string record_json(const TrajectoryRecord& r) {
    nlohmann::json j;
    j["seed"] = r.seed;
    j["index"] = r.index;
    j["jump_count"] = r.jump_times.size();
    j["jump_times"] = r.jump_times;
    j["channels"] = r.channels;
    std::vector<std::array<double, 2>> fin;
    for (int k = 0; k < 4; ++k) fin.push_back({r.final_state(k).real(), r.final_state(k).imag()});
    j["final_state"] = fin;
    return j.dump();
}

inline ResultTable run_single(const ScenarioConfig& c) {
    ResultTable t;
    auto grid = linspace(c.grid.start, c.grid.stop, c.grid.points);
    switch (c.kind) {
        case ScenarioKind::evolve: {
            auto l = make_generator(c);
            auto series = evolve(l, initial_state(c.initial), grid, c.solver);
            t.columns = {"t"};
            for (auto& s : state_columns()) t.columns.push_back(s);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                auto row = state_row(series.states[i], c);
                row.insert(row.begin(), grid[i]);
                t.rows.push_back(row);
            }
            break;
        }
        case ScenarioKind::steady:
        case ScenarioKind::visibility: {
            auto ss = steady_state(make_generator(c));
            t.columns = {"null_dimension"};
            for (auto& s : state_columns()) t.columns.push_back(s);
            auto row = state_row(ss.state, c);
            row.insert(row.begin(), static_cast<double>(ss.null_dimension));
            t.rows.push_back(row);
            break;
        }
        case ScenarioKind::g2: {
            auto l = make_generator(c);
            auto ss = steady_state(l);
            auto g2 = g2_tau(l, ss.state, c.pair, c.detection, grid, c.solver);
            t.columns = {"tau", "g2"};
            for (std::size_t i = 0; i < grid.size(); ++i) t.rows.push_back({grid[i], g2.values[i]});
            break;
        }
        case ScenarioKind::variance: {
            auto series = evolve(make_generator(c), initial_state(c.initial), grid, c.solver);
            t.columns = {"t", "variance", "variance_conjugate"};
            for (std::size_t i = 0; i < grid.size(); ++i)
                t.rows.push_back({grid[i], quadrature_variance(series.states[i], c.pair, c.alpha, c.detection),
                                  quadrature_variance(series.states[i], c.pair, c.alpha + pi / 2, c.detection)});
            break;
        }
        case ScenarioKind::jump: {
            auto ens = run_trajectories(c.pair, c.drive, initial_state(c.initial), c.trajectories, c.seed, grid);
            t.columns = {"t",         "p_gg",         "p_e1g2",       "p_g1e2",          "p_ee",  "se_gg",
                         "se_e1g2",   "se_g1e2",      "se_ee",        "emission_rate",   "emission_rate_se"};
            for (std::size_t i = 0; i < grid.size(); ++i) {
                std::vector<double> row = {grid[i]};
                for (double p : ens.population_mean[i]) row.push_back(p);
                for (double p : ens.population_stderr[i]) row.push_back(p);
                row.push_back(ens.emission_rate_mean[i]);
                row.push_back(ens.emission_rate_stderr[i]);
                t.rows.push_back(row);
            }
            for (auto& r : ens.records) t.records.push_back(record_json(r));
            break;
        }
        case ScenarioKind::sweep: return run_sweep(c);
        case ScenarioKind::figure: throw ValidationError("figure scenarios are resolved through figure_preset");
    }
    return t;
}

}  // namespace detail

ScenarioConfig figure_preset(const std::string& id);

/// Dispatches the configured scenario. Figure scenarios run their preset;
/// families produce one block of rows per curve with a leading curve index.
inline ResultTable run_scenario(const ScenarioConfig& config) {
    auto t0 = std::chrono::steady_clock::now();
    validate(config);
    ScenarioConfig c = config.kind == ScenarioKind::figure ? figure_preset(config.figure) : config;
    ResultTable out;
    try {
        if (c.family.empty()) {
            out = detail::run_single(c);
        } else {
            for (std::size_t k = 0; k < c.family_values.size(); ++k) {
                ScenarioConfig local = c;
                for (std::size_t j = 0; j < c.family.size(); ++j)
                    set_parameter(local, c.family[j], c.family_values[k][j]);
                validate(local);
                auto part = detail::run_single(local);
                if (out.columns.empty()) {
                    out.columns = {"curve"};
                    out.columns.insert(out.columns.end(), part.columns.begin(), part.columns.end());
                }
                for (auto& row : part.rows) {
                    row.insert(row.begin(), static_cast<double>(k));
                    out.rows.push_back(std::move(row));
                }
                out.records.insert(out.records.end(), part.records.begin(), part.records.end());
            }
        }
    } catch (const PartialResultError& e) {
        throw PartialResultError(std::string(to_string(c.kind)) + " scenario failed: " + e.what(), e.completed);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(to_string(c.kind)) + " scenario failed: " + e.what(), e.last_time);
    } catch (const DomainError& e) {
        throw DomainError(std::string(to_string(c.kind)) + " scenario: " + e.what());
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.metadata = {{"engine_version", engine_version}, {"wall_time_s", detail::fmt(wall)}};
    if (!c.note.empty()) out.metadata.push_back({"preset_note", c.note});
    out.metadata.insert(out.metadata.begin(), {"config", serialize(config)});
    return out;
}

/// CSV with the resolved configuration as a "# " comment block and run
/// information as "#! key = value" lines.
inline std::string to_csv(const ResultTable& t) {
    std::string out;
    for (auto& [k, v] : t.metadata) {
        if (k == "config") {
            std::istringstream in(v);
            std::string line;
            while (std::getline(in, line)) out += "# " + line + "\n";
        } else {
            out += "#! " + k + " = " + v + "\n";
        }
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + detail::fmt(row[i]);
        out += '\n';
    }
    return out;
}

inline std::string to_jsonl(const ResultTable& t) {
    std::string out;
    for (auto& r : t.records) out += r + "\n";
    return out;
}

/// Reconstructs the configuration recorded in a CSV header.
inline ScenarioConfig config_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, text;
    while (std::getline(in, line)) {
        if (line.rfind("#!", 0) == 0) continue;
        if (line.rfind("# ", 0) != 0) break;
        text += line.substr(2) + "\n";
    }
    return parse_config(text);
}

// ---------------------------------------------------------------- figure presets

inline std::vector<std::string> figure_ids() {
    return {"fig1",  "fig3",  "fig4",  "fig5",  "fig6",  "fig7",  "fig8",  "fig9",  "fig10", "fig11",
            "fig12", "fig13", "fig14", "fig15", "fig16", "fig17", "fig18", "fig19", "fig20", "fig21", "fig22"};
}

/// Separation (in wavelengths, perpendicular dipoles) at which the
/// dipole-dipole shift equals `target`, on the near-field branch.
inline double separation_for_shift(double target) {
    AtomPairConfig p;
    double lo = 0.01, hi = 0.2;
    for (int i = 0; i < 200; ++i) {
        p.separation = 0.5 * (lo + hi);
        (dipole_dipole_shift(p) > target ? lo : hi) = p.separation;
    }
    return 0.5 * (lo + hi);
}

inline ScenarioConfig figure_preset(const std::string& id) {
    ScenarioConfig c;
    c.figure = id;
    auto series = [&](ScenarioKind k, double stop, std::size_t points) {
        c.kind = k;
        c.grid = {0.0, stop, points};
    };
    auto sweep = [&](const std::string& param, double a, double b, std::size_t n) {
        c.kind = ScenarioKind::sweep;
        c.sweep = {param, a, b, n};
    };
    auto quantum = [](double n) { return std::vector<double>{n, std::sqrt(n * (n + 1))}; };
    auto classical = [](double n) { return std::vector<double>{n, n}; };
    if (id == "fig1") {
        sweep("pair.separation", 0.01, 1.5, 150);
        c.drive.rabi = 0;
        c.family = {"pair.dipole_angle"};
        c.family_values = {{pi / 2}, {0.0}};
    } else if (id == "fig3") {
        sweep("pair.delta", 0.0, 10.0, 101);
        c.family = {"pair.separation"};
        c.family_values = {{0.05}, {0.1}, {0.5}};
        c.note = "gamma_a_prime column";
    } else if (id == "fig4") {
        series(ScenarioKind::evolve, 10.0, 501);
        c.initial = "atom1";
        c.pair.separation = 1.0 / 12;
        c.family = {"pair.delta"};
        c.family_values = {{0.0}, {-2.0}, {-3.0}};
    } else if (id == "fig5") {
        series(ScenarioKind::evolve, 10.0, 501);
        c.initial = "atom1";
        c.pair.separation = 1.0 / 12;
        c.family = {"pair.gamma2"};
        c.family_values = {{1.0}, {2.5}, {5.0}};
    } else if (id == "fig6" || id == "fig7") {
        series(ScenarioKind::evolve, 50.0, 1001);
        c.drive.rabi = 0.2;
        c.drive.propagation_angle = 0.0;
        c.drive.wave_type = id == "fig6" ? WaveType::running : WaveType::standing;
        c.family = {"pair.separation"};
        c.family_values = {{0.2}, {0.16}, {0.14}};
    } else if (id == "fig8") {
        series(ScenarioKind::g2, 5.0, 501);
        c.model = Scenario::dicke_dressed;
        c.family = {"drive.rabi"};
        c.family_values = {{2.5}, {10.0}};
    } else if (id == "fig9" || id == "fig11") {
        sweep("drive.detuning", -15.0, 15.0, 301);
        c.drive.rabi = 0.5;
        c.alpha = pi / 2;
        c.family = {"pair.separation"};
        c.family_values = {{10.0}, {0.15}, {0.08}};
        c.note = id == "fig9" ? "g2_zero column; rabi 0.5 per caption (the text mentions 0.25 for a related plot)"
                              : "variance column at alpha = pi/2 (theta = 0 quadrature); rabi 0.5 per caption "
                                "(the text mentions 0.25 for a related plot)";
    } else if (id == "fig10") {
        series(ScenarioKind::variance, 0.2, 4001);
        c.alpha = pi / 2;
        c.family = {"drive.rabi"};
        c.family_values = {{100.0}, {200.0}};
        c.note = "small-sample limit; alpha = pi/2 is the theta = 0 quadrature";
    } else if (id == "fig12") {
        sweep("drive.detuning", -30.0, 30.0, 601);
        c.pair.separation = 0.05;
        c.drive.rabi = 3.0;
        c.family = {"detection.alpha"};
        c.family_values = {{pi / 2}, {3 * pi / 4}};
    } else if (id == "fig13" || id == "fig14" || id == "fig15") {
        sweep("drive.detuning", -20.0, 20.0, 401);
        c.pair.separation = separation_for_shift(10.0);
        c.drive.rabi = 10.0;
        c.note = "separation chosen so that omega12 = 10";
        if (id == "fig13") {
            c.family = {"pair.gamma2", "pair.delta"};
            c.family_values = {{1.0, 1.0}, {2.0, 0.0}};
        } else if (id == "fig14") {
            c.pair.delta = 1.0;
        } else {
            c.pair.delta = 1.0;
            c.family = {"drive.rabi"};
            c.family_values = {{1.0}, {5.0}, {20.0}};
        }
    } else if (id == "fig16") {
        sweep("drive.detuning", -10.0, 10.0, 401);
        c.drive.rabi = 2.5;
        c.drive.propagation_angle = 0.0;
        c.pair.separation = 0.08;
    } else if (id == "fig17" || id == "fig18") {
        sweep("drive.detuning", -10.0, 10.0, 401);
        c.pair.separation = 0.1;
        c.drive.rabi = 0.5;
        if (id == "fig17") {
            c.family = {"drive.propagation_angle"};
            c.family_values = {{pi / 2}, {pi / 4}, {0.0}};
        } else {
            c.drive.propagation_angle = 0.0;
        }
    } else if (id == "fig19" || id == "fig20" || id == "fig21" || id == "fig22") {
        sweep("pair.separation", 0.005, 1.0, 200);
        c.model = Scenario::squeezed;
        c.family = {"squeezed.n_photons", "squeezed.m_magnitude"};
        if (id == "fig19") c.family_values = {quantum(0.05), classical(0.05)};
        if (id == "fig20") c.family_values = {quantum(0.05), quantum(0.5), quantum(5)};
        if (id == "fig21") c.family_values = {quantum(0.5), classical(0.5)};
        if (id == "fig22")
            c.family_values = {quantum(0.05), quantum(0.5), quantum(5), classical(0.05), classical(0.5), classical(5)};
    } else {
        std::string list;
        for (auto& f : figure_ids()) list += (list.empty() ? "" : ", ") + f;
        throw ValidationError("unknown figure '" + id + "'; available: " + list);
    }
    validate(c);
    return c;
}

}  // namespace twoatom
