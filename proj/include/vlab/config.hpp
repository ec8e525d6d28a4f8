#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vlab {

enum class ValueType { String, Int, UInt, Double, Bool, DoubleList };

struct ConfigKey {
    std::string name;
    ValueType type;
    std::string help;
};

// Flat `key = value` file. `#` starts a comment; lists are comma separated.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

    // DomainError for keys missing from the schema or values that fail to parse as their type.
    void check(const std::vector<ConfigKey>& schema) const;

private:
    std::map<std::string, std::string> values_;
};

// Keys understood by the experiment runners.
const std::vector<ConfigKey>& experiment_schema();

}  // namespace vlab
