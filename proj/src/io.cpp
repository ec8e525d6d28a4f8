#include "vlab/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "vlab/error.hpp"

namespace vlab {

namespace {

constexpr char kMagic[8] = {'V', 'L', 'A', 'B', 'K', 'T', 'B', '1'};

std::string cell_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number()) {
        std::ostringstream os;
        os << std::setprecision(17) << v.get<double>();
        return os.str();
    }
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_null()) return "nan";
    return v.dump();
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

template <class T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T take(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw Error("truncated kernel table file");
    return v;
}

}  // namespace

void Table::add(std::vector<json> row) {
    if (row.size() != header.size()) throw MismatchError("row width does not match the header of " + name);
    rows.push_back(std::move(row));
}

json Table::to_json() const {
    json j;
    j["name"] = name;
    j["header"] = header;
    j["rows"] = rows;
    return j;
}

void write_csv(const Table& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
        out << '\n';
    }
}

Table read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    Table t;
    t.name = path;
    std::string line;
    while (std::getline(in, line) && (line.empty() || line[0] == '#')) {
    }
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<json> row;
        for (const auto& cell : split(line)) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end && *end == '\0' && !cell.empty())
                row.emplace_back(v);
            else
                row.emplace_back(cell);
        }
        t.add(std::move(row));
    }
    return t;
}

void write_json(const json& value, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << value.dump(2) << '\n';
}

void write_kernel_table_csv(const KernelTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << std::setprecision(17);
    out << "# d=" << table.d << " M=" << table.m << " eps=" << table.eps << " r=" << table.r
        << " profile=" << table.profile << '\n';
    for (int a = 0; a < table.d; ++a) out << "lag" << a << ',';
    for (int a = 0; a < table.d; ++a) out << "force" << a << ',';
    out << "green\n";
    const std::size_t n = table.points();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rem = i;
        std::vector<double> lag(static_cast<std::size_t>(table.d));
        for (int a = table.d - 1; a >= 0; --a) {
            lag[a] = static_cast<double>(rem % static_cast<std::size_t>(table.m)) / table.m;
            rem /= static_cast<std::size_t>(table.m);
        }
        for (double l : lag) out << l << ',';
        for (int a = 0; a < table.d; ++a) out << table.force[a * n + i] << ',';
        out << table.green[i] << '\n';
    }
}

void write_kernel_table_binary(const KernelTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out.write(kMagic, sizeof kMagic);
    put(out, static_cast<std::int32_t>(table.d));
    put(out, static_cast<std::int32_t>(table.m));
    put(out, table.eps);
    put(out, table.r);
    put(out, static_cast<std::uint32_t>(table.profile.size()));
    out.write(table.profile.data(), static_cast<std::streamsize>(table.profile.size()));
    auto block = [&](const std::vector<double>& v) {
        put(out, static_cast<std::uint64_t>(v.size()));
        out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    block(table.force);
    block(table.green);
    block(table.chi_hat);
}

KernelTable read_kernel_table_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw Error(path + " is not a kernel table file");
    KernelTable t;
    t.d = take<std::int32_t>(in);
    t.m = take<std::int32_t>(in);
    t.eps = take<double>(in);
    t.r = take<double>(in);
    const auto len = take<std::uint32_t>(in);
    t.profile.resize(len);
    in.read(t.profile.data(), len);
    auto block = [&](std::vector<double>& v) {
        v.resize(take<std::uint64_t>(in));
        in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
        if (!in) throw Error("truncated kernel table file");
    };
    block(t.force);
    block(t.green);
    block(t.chi_hat);
    if (t.force.size() != t.points() * static_cast<std::size_t>(t.d) || t.green.size() != t.points())
        throw Error("kernel table file has inconsistent sizes");
    t.fourier = kernel_fourier(t.d, t.m);
    return t;
}

Table trajectory_table(const VlasovTrajectory& traj) {
    Table t;
    t.name = "trajectory";
    t.header = {"t", "probe_E", "mass", "energy"};
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const json e = k < traj.energy.size() ? json(traj.energy[k]) : json(nullptr);
        t.add({traj.times[k], k < traj.probe_E.size() ? json(traj.probe_E[k]) : json(nullptr),
               k < traj.mass.size() ? json(traj.mass[k]) : json(nullptr), e});
    }
    return t;
}

Table energy_table(const std::vector<EnergyReport>& series) {
    Table t;
    t.name = "energy";
    t.header = {"t", "kinetic", "potential", "total"};
    for (const auto& e : series) t.add({e.time, e.kinetic, e.potential, e.total});
    return t;
}

Table plan_table(const TransportPlan& plan) {
    Table t;
    t.name = "plan";
    t.header = {"i", "j", "mass"};
    for (const auto& e : plan.entries) t.add({e.i, e.j, e.mass});
    return t;
}

}  // namespace vlab
