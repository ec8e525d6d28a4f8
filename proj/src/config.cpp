#include "vlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "vlab/error.hpp"

namespace vlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(const std::string& s, T& out) {
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_bool(const std::string& s, bool& out) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
        out = true;
        return true;
    }
    if (s == "false" || s == "0" || s == "no" || s == "off") {
        out = false;
        return true;
    }
    return false;
}

bool parse_list(const std::string& s, std::vector<double>& out) {
    out.clear();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double x;
        if (!parse_number(trim(item), x)) return false;
        out.push_back(x);
    }
    return !out.empty();
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* type) {
    throw DomainError("config key '" + key + "': '" + value + "' is not a valid " + type);
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config c;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw DomainError("config line " + std::to_string(lineno) + ": empty key");
        c.values_[key] = trim(line.substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    long long v;
    if (!parse_number(it->second, v)) bad(key, it->second, "integer");
    return v;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::uint64_t v;
    if (!parse_number(it->second, v)) bad(key, it->second, "unsigned integer");
    return v;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v;
    if (!parse_number(it->second, v)) bad(key, it->second, "number");
    return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    bool v;
    if (!parse_bool(it->second, v)) bad(key, it->second, "boolean");
    return v;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> v;
    if (!parse_list(it->second, v)) bad(key, it->second, "list of numbers");
    return v;
}

void Config::check(const std::vector<ConfigKey>& schema) const {
    for (const auto& [key, value] : values_) {
        auto it = std::find_if(schema.begin(), schema.end(), [&](const ConfigKey& k) { return k.name == key; });
        if (it == schema.end()) throw DomainError("unknown config key '" + key + "'");
        switch (it->type) {
            case ValueType::String:
                break;
            case ValueType::Int:
                get_int(key, 0);
                break;
            case ValueType::UInt:
                get_u64(key, 0);
                break;
            case ValueType::Double:
                get_double(key, 0.0);
                break;
            case ValueType::Bool:
                get_bool(key, false);
                break;
            case ValueType::DoubleList:
                get_list(key, {});
                break;
        }
    }
}

const std::vector<ConfigKey>& experiment_schema() {
    static const std::vector<ConfigKey> keys = {
        {"experiment", ValueType::String, "meanfield | quasineutral | combined | lemmas"},
        {"seed", ValueType::UInt, "base seed (required)"},
        {"out", ValueType::String, "output directory"},
        {"threads", ValueType::Int, "worker threads (1 = reproducible single-threaded)"},
        {"force", ValueType::Bool, "run even when the regime is inadmissible"},
        {"d", ValueType::Int, "spatial dimension"},
        {"eps", ValueType::Double, "scaled Debye length"},
        {"r", ValueType::Double, "mollification radius (0 = unregularized)"},
        {"N", ValueType::Double, "particle number for regime checks"},
        {"gamma", ValueType::Double, "support growth exponent"},
        {"delta", ValueType::Double, "2D exponent (> 2)"},
        {"T", ValueType::Double, "time horizon"},
        {"eta", ValueType::Double, "placement exponent"},
        {"eta_prime", ValueType::Double, "intermediate rate exponent"},
        {"alpha", ValueType::Double, "r_min exponent offset"},
        {"beta", ValueType::Double, "growth exponent (< eta)"},
        {"lambda", ValueType::Double, "anisotropy"},
        {"M", ValueType::Double, "density bound"},
        {"C", ValueType::Double, "constant C"},
        {"C_T", ValueType::Double, "constant C_T"},
        {"C_2", ValueType::Double, "constant C_2"},
        {"A", ValueType::Double, "schedule constant of eps = A / log N"},
        {"A_T", ValueType::Double, "constant A_T of r_min"},
        {"kappa", ValueType::Double, "concentration scale"},
        {"c", ValueType::Double, "concentration rate"},
        {"f0.family", ValueType::String, "uniform | monokinetic | perturbed"},
        {"f0.amplitude", ValueType::Double, "density perturbation amplitude a"},
        {"f0.eps_scaled", ValueType::Bool, "perturbation is eps * a (default true)"},
        {"f0.mode", ValueType::Int, "perturbation mode"},
        {"f0.profile", ValueType::String, "bump | waterbag | truncated_gaussian"},
        {"f0.width", ValueType::Double, "velocity half-width"},
        {"f0.drift", ValueType::Double, "velocity drift"},
        {"grid.mx", ValueType::Int, "PDE nodes in x"},
        {"grid.mv", ValueType::Int, "PDE cells in v"},
        {"grid.vmax", ValueType::Double, "velocity truncation"},
        {"dt", ValueType::Double, "particle time step (0 = eps / 20)"},
        {"pde_dt", ValueType::Double, "PDE time step (0 = eps / 20)"},
        {"snapshot_dt", ValueType::Double, "spacing of comparison times"},
        {"seeds", ValueType::Int, "independent samples per point"},
        {"N_values", ValueType::DoubleList, "particle numbers of the sweep"},
        {"eps_values", ValueType::DoubleList, "eps values of the sweep"},
        {"metric", ValueType::String, "euclidean | torus"},
        {"blocks_x", ValueType::Int, "quantization blocks in x"},
        {"blocks_v", ValueType::Int, "quantization blocks in v"},
        {"deposit", ValueType::String, "cic | exact"},
        {"table_m", ValueType::Int, "kernel table resolution for r > 0"},
        {"trials", ValueType::Int, "lemma trials"},
    };
    return keys;
}

}  // namespace vlab
