#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vlab/config.hpp"
#include "vlab/correctors.hpp"
#include "vlab/error.hpp"
#include "vlab/initial_data.hpp"
#include "vlab/io.hpp"
#include "vlab/kernels.hpp"
#include "vlab/lab.hpp"
#include "vlab/particles.hpp"
#include "vlab/random.hpp"
#include "vlab/regimes.hpp"
#include "vlab/transport.hpp"
#include "vlab/vlasov.hpp"

namespace fs = std::filesystem;
using namespace vlab;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out = "vlab_out";
    bool force = false;
};

Config load_config(const Common& c) {
    Config cfg = c.config_path.empty() ? Config() : Config::load(c.config_path);
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw DomainError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (c.seed_given) cfg.set("seed", std::to_string(c.seed));
    if (c.force) cfg.set("force", "true");
    cfg.check(experiment_schema());
    return cfg;
}

fs::path out_dir(const Common& c) {
    fs::create_directories(c.out);
    return fs::path(c.out);
}

InitialSpec initial_spec(const Config& cfg, double eps) {
    InitialSpec s;
    s.d = static_cast<int>(cfg.get_int("d", 1));
    s.family = cfg.get_string("f0.family", s.family);
    const double a = cfg.get_double("f0.amplitude", 1.0);
    s.amplitude = cfg.get_bool("f0.eps_scaled", true) ? eps * a : a;
    s.mode = static_cast<int>(cfg.get_int("f0.mode", s.mode));
    s.profile = cfg.get_string("f0.profile", s.profile);
    s.width = cfg.get_double("f0.width", s.width);
    s.drift = cfg.get_double("f0.drift", s.drift);
    return s;
}

RegimeParams regime_params(const Config& cfg) {
    Config copy = cfg;
    copy.set("seed", "0");
    return experiment_config(copy).regime;
}

WeightedPointCloud read_cloud(const std::string& path, int pos_dims) {
    const auto t = read_csv(path);
    const bool weighted = !t.header.empty() && t.header.back() == "weight";
    const int dim = static_cast<int>(t.header.size()) - (weighted ? 1 : 0);
    WeightedPointCloud c;
    c.dim = dim;
    c.pos_dims = pos_dims < 0 ? dim / 2 : pos_dims;
    std::vector<double> pt(static_cast<std::size_t>(dim));
    for (const auto& row : t.rows) {
        for (int k = 0; k < dim; ++k) pt[k] = row[k].get<double>();
        c.add(pt, weighted ? row[dim].get<double>() : 1.0);
    }
    double total = 0.0;
    for (double w : c.weights) total += w;
    for (double& w : c.weights) w /= total;
    return c;
}

int cmd_kernel(const Common& common, const std::string& format) {
    const auto cfg = load_config(common);
    const MollifierSpec spec{cfg.get_double("r", 1.0 / 32.0), "bump"};
    const auto table = mollified_force_table(spec, cfg.get_double("eps", 1.0), static_cast<int>(cfg.get_int("table_m", 256)),
                                             static_cast<int>(cfg.get_int("d", 1)));
    const auto dir = out_dir(common);
    const auto path = dir / (format == "binary" ? "kernel_table.bin" : "kernel_table.csv");
    if (format == "binary")
        write_kernel_table_binary(table, path.string());
    else
        write_kernel_table_csv(table, path.string());
    json meta = {{"d", table.d}, {"M", table.m}, {"eps", table.eps}, {"r", table.r}, {"profile", table.profile},
                 {"file", path.string()}, {"version", code_version()}};
    write_json(meta, (dir / "kernel_table.json").string());
    std::cout << meta.dump(2) << '\n';
    return 0;
}

int cmd_simulate(const Common& common) {
    const auto cfg = load_config(common);
    if (!cfg.has("seed")) throw DomainError("a seed is required (--seed)");
    const double eps = cfg.get_double("eps", 0.5);
    const double r = cfg.get_double("r", 0.0);
    const double T = cfg.get_double("T", 1.0);
    const double dt = cfg.get_double("dt", 0.0) > 0.0 ? cfg.get_double("dt", 0.0) : eps / 20.0;
    const auto n = static_cast<std::size_t>(cfg.get_double("N", 1000.0));
    const auto spec = initial_spec(cfg, eps);
    auto ens = sample_initial(spec, n, cfg.get_u64("seed", 0));
    ens.eps = eps;
    ens.r = r;
    std::optional<KernelTable> table;
    ForceFn force;
    std::function<EnergyReport(const ParticleEnsemble&)> energy;
    if (r > 0.0) {
        table = mollified_force_table({r, "bump"}, eps, static_cast<int>(cfg.get_int("table_m", 256)), spec.d);
        const Deposit dep = cfg.get_string("deposit", "exact") == "cic" ? Deposit::CloudInCell : Deposit::ExactFourier;
        force = [&, dep](const ParticleEnsemble& e) { return force_pic(e, *table, dep); };
        energy = [&](const ParticleEnsemble& e) { return regularized_energy(e, *table); };
    } else {
        force = [](const ParticleEnsemble& e) { return force_exact_1d(e); };
        energy = [](const ParticleEnsemble& e) { return unregularized_energy_1d(e); };
    }
    std::vector<EnergyReport> series{energy(ens)};
    const int steps = static_cast<int>(std::ceil(T / dt - 1e-9));
    advance_leapfrog(ens, T / steps, steps, force, [&](const ParticleEnsemble& e) { series.push_back(energy(e)); });
    const auto dir = out_dir(common);
    write_csv(energy_table(series), (dir / "energy.csv").string());
    Table particles{"particles", {}, {}};
    for (int a = 0; a < ens.d; ++a) particles.header.push_back("x" + std::to_string(a));
    for (int a = 0; a < ens.d; ++a) particles.header.push_back("v" + std::to_string(a));
    for (std::size_t i = 0; i < ens.n; ++i) {
        std::vector<json> row;
        for (int a = 0; a < ens.d; ++a) row.emplace_back(ens.pos(i)[a]);
        for (int a = 0; a < ens.d; ++a) row.emplace_back(ens.vel(i)[a]);
        particles.add(std::move(row));
    }
    write_csv(particles, (dir / "particles.csv").string());
    const double drift = std::abs(series.back().total - series.front().total) / std::abs(series.front().total);
    json meta = {{"f0", describe(spec)}, {"N", n}, {"eps", eps}, {"r", r}, {"T", T}, {"dt", T / steps},
                 {"seed", cfg.get_u64("seed", 0)}, {"relative_energy_drift", drift}, {"version", code_version()}};
    write_json(meta, (dir / "simulate.json").string());
    std::cout << meta.dump(2) << '\n';
    return 0;
}

int cmd_vlasov(const Common& common) {
    const auto cfg = load_config(common);
    const double eps = cfg.get_double("eps", 0.5);
    const double T = cfg.get_double("T", 1.0);
    const double r = cfg.get_double("r", 0.0);
    const double dt = cfg.get_double("pde_dt", 0.0) > 0.0 ? cfg.get_double("pde_dt", 0.0) : eps / 40.0;
    const auto spec = initial_spec(cfg, eps);
    const auto f0 = initial_grid(spec, static_cast<int>(cfg.get_int("grid.mx", 64)),
                                 static_cast<int>(cfg.get_int("grid.mv", 256)), cfg.get_double("grid.vmax", 2.0));
    std::optional<MollifierSpec> moll;
    if (r > 0.0) moll = MollifierSpec{r, "bump"};
    const int steps = static_cast<int>(std::ceil(T / dt - 1e-9));
    const auto traj = run_vp(f0, eps, moll, T, T / steps);
    const auto dir = out_dir(common);
    write_csv(trajectory_table(traj), (dir / "trajectory.csv").string());
    Table fin{"final", {"x", "v", "f"}, {}};
    for (int i = 0; i < traj.final_state.mx; ++i)
        for (int j = 0; j < traj.final_state.mv; ++j)
            fin.add({traj.final_state.x(i), traj.final_state.v(j), traj.final_state.at(i, j)});
    write_csv(fin, (dir / "final_density.csv").string());
    json meta = {{"f0", describe(spec)},
                 {"eps", eps},
                 {"T", T},
                 {"dt", T / steps},
                 {"steps", traj.steps},
                 {"clipped_mass", traj.clipped_mass},
                 {"max_undershoot", traj.max_undershoot},
                 {"omega", dominant_angular_frequency(traj.probe_E, T / steps)},
                 {"version", code_version()}};
    write_json(meta, (dir / "vlasov.json").string());
    std::cout << meta.dump(2) << '\n';
    return 0;
}

int cmd_distance(const Common& common, const std::string& a, const std::string& b, int p, int pos_dims,
                 const std::string& plan_path) {
    const auto cfg = load_config(common);
    const Metric metric = parse_metric(cfg.get_string("metric", "euclidean"));
    const auto mu = read_cloud(a, pos_dims);
    const auto nu = read_cloud(b, pos_dims);
    const auto res = wasserstein_discrete(mu, nu, p, metric);
    if (!plan_path.empty()) write_csv(plan_table(res.plan), plan_path);
    json meta = {{"metric", to_string(metric)}, {"p", p}, {"value", res.distance}, {"tolerance", 0.0},
                 {"method", "exact-lp"}};
    std::cout << meta.dump(2) << '\n';
    return 0;
}

int cmd_corrector(const Common& common) {
    const auto cfg = load_config(common);
    const double eps = cfg.get_double("eps", 0.1);
    const double T = cfg.get_double("T", 1.0);
    const double dt = cfg.get_double("pde_dt", 0.0) > 0.0 ? cfg.get_double("pde_dt", 0.0) : eps / 20.0;
    const auto spec = initial_spec(cfg, eps);
    const int mx = static_cast<int>(cfg.get_int("grid.mx", 64));
    const auto f0 = initial_grid(spec, mx, static_cast<int>(cfg.get_int("grid.mv", 256)), cfg.get_double("grid.vmax", 2.0));
    const auto state = corrector_init(f0, eps);
    const int steps = static_cast<int>(std::ceil(T / dt - 1e-9));
    const auto states = corrector_evolve(state, T, T / steps);
    Table t{"corrector", {"t", "x", "R", "grad_sup"}, {}};
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto f = corrector_R(states[k], states[k].time);
        for (int i = 0; i < mx; ++i) t.add({states[k].time, SpatialField::node(i, mx), f.R.values[i], f.grad_sup});
    }
    const auto dir = out_dir(common);
    write_csv(t, (dir / "corrector.csv").string());
    std::cout << json({{"eps", eps}, {"T", T}, {"steps", steps}, {"file", (dir / "corrector.csv").string()}}).dump(2)
              << '\n';
    return 0;
}

int cmd_regime(const Common& common, double t) {
    const auto cfg = load_config(common);
    const auto p = regime_params(cfg);
    const auto report = regime_report(p, nullptr, t);
    const auto dir = out_dir(common);
    write_json(report, (dir / "regime.json").string());
    std::cout << report.dump(2) << '\n';
    return report["admissible"].get<bool>() ? 0 : 3;
}

int cmd_experiment(const Common& common, const std::string& name) {
    auto cfg = load_config(common);
    if (!name.empty()) cfg.set("experiment", name);
    auto ec = experiment_config(cfg);
    const auto rep = run_experiment(ec);
    const std::string dir = ec.out_dir.empty() ? common.out : ec.out_dir;
    rep.write(dir);
    if (rep.forced) {
        std::cout << "forced run in an inadmissible regime:";
        for (const auto& v : rep.violations) std::cout << ' ' << v << ';';
        std::cout << '\n';
    }
    for (const auto& c : rep.checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
    std::cout << "report written to " << dir << '\n';
    return rep.passed() ? 0 : 1;
}

int cmd_lemmas(const Common& common, int trials) {
    auto cfg = load_config(common);
    if (!cfg.has("seed")) throw DomainError("a seed is required (--seed)");
    const auto rep = run_lemma_suite(cfg.get_u64("seed", 0), static_cast<int>(cfg.get_int("trials", trials)));
    rep.write(common.out);
    for (const auto& c : rep.checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
    return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean-field and quasineutral limit lab for Vlasov-Poisson"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "flat key = value config file");
        sub->add_option("--set", common.sets, "override a config key (key=value)");
        sub->add_option("--seed", common.seed, "seed")->each([&](const std::string&) { common.seed_given = true; });
        sub->add_option("--out", common.out, "output directory");
        sub->add_flag("--force", common.force, "run even when the regime is inadmissible");
    };

    std::string format = "csv";
    auto* kernel = app.add_subcommand("kernel", "tabulate the mollified force kernel");
    add_common(kernel);
    kernel->add_option("--format", format, "csv | binary")->check(CLI::IsMember({"csv", "binary"}));

    auto* simulate = app.add_subcommand("simulate", "run the N-particle system and record its energy");
    add_common(simulate);

    auto* vlasov = app.add_subcommand("vlasov", "run the semi-Lagrangian Vlasov-Poisson solver");
    add_common(vlasov);

    std::string file_a, file_b, plan_path;
    int p = 2, pos_dims = -1;
    auto* distance = app.add_subcommand("distance", "exact W_p between two weighted clouds (CSV)");
    add_common(distance);
    distance->add_option("a", file_a, "first cloud CSV (coordinates, optional weight column)")->required();
    distance->add_option("b", file_b, "second cloud CSV")->required();
    distance->add_option("-p", p, "order p");
    distance->add_option("--pos-dims", pos_dims, "leading position columns (default half)");
    distance->add_option("--plan", plan_path, "write the optimal plan as i,j,mass CSV");

    auto* corrector = app.add_subcommand("corrector", "corrector fields and the filter R(t, x)");
    add_common(corrector);

    double t = 1.0;
    auto* regime = app.add_subcommand("regime", "schedules, bounds and admissibility verdicts");
    add_common(regime);
    regime->add_option("-t", t, "time for the Gronwall bounds");

    std::string exp_name;
    auto* experiment = app.add_subcommand("experiment", "run an experiment (meanfield, quasineutral, combined, lemmas)");
    add_common(experiment);
    experiment->add_option("name", exp_name, "experiment name (overrides the config)");

    int trials = 1000;
    auto* lemmas = app.add_subcommand("lemmas", "randomized lemma suite");
    add_common(lemmas);
    lemmas->add_option("--trials", trials, "trials per lemma");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*kernel) return cmd_kernel(common, format);
        if (*simulate) return cmd_simulate(common);
        if (*vlasov) return cmd_vlasov(common);
        if (*distance) return cmd_distance(common, file_a, file_b, p, pos_dims, plan_path);
        if (*corrector) return cmd_corrector(common);
        if (*regime) return cmd_regime(common, t);
        if (*experiment) return cmd_experiment(common, exp_name);
        if (*lemmas) return cmd_lemmas(common, trials);
    } catch (const SupportError& e) {
        std::cerr << "error: " << e.what() << " (suggested vmax " << e.suggested_vmax() << ")\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
