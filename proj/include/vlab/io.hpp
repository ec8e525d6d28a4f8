#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vlab/kernels.hpp"
#include "vlab/particles.hpp"
#include "vlab/transport.hpp"
#include "vlab/vlasov.hpp"

namespace vlab {

using json = nlohmann::json;

// Column-typed table with a declared header; cells are numbers or strings.
struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<json>> rows;

    void add(std::vector<json> row);
    json to_json() const;
};

void write_csv(const Table& table, const std::string& path);
Table read_csv(const std::string& path);
void write_json(const json& value, const std::string& path);

// Kernel tables: CSV (lag, components, green) with a `#` header line, or a binary file
// with a magic string and the header (d, M, eps, r, profile) followed by the values.
void write_kernel_table_csv(const KernelTable& table, const std::string& path);
void write_kernel_table_binary(const KernelTable& table, const std::string& path);
KernelTable read_kernel_table_binary(const std::string& path);

Table trajectory_table(const VlasovTrajectory& traj);
Table energy_table(const std::vector<EnergyReport>& series);
Table plan_table(const TransportPlan& plan);

}  // namespace vlab
