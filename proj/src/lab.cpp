#include "vlab/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>

#include "vlab/correctors.hpp"
#include "vlab/error.hpp"
#include "vlab/kernels.hpp"
#include "vlab/parallel.hpp"
#include "vlab/random.hpp"
#include "vlab/vlasov.hpp"

#ifndef VLAB_VERSION
#define VLAB_VERSION "unknown"
#endif

namespace vlab {

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) s += (s.empty() ? "" : "; ") + p;
    return s;
}

InitialSpec f0_for(const ExperimentConfig& cfg, double eps) {
    InitialSpec s = cfg.f0;
    s.amplitude = cfg.eps_scaled ? eps * cfg.amplitude : cfg.amplitude;
    return s;
}

InitialSpec homogeneous(const InitialSpec& s) {
    InitialSpec h = s;
    h.amplitude = 0.0;
    return h;
}

std::vector<double> snapshot_times(double T, double spacing) {
    const int k = std::max(1, static_cast<int>(std::llround(T / spacing)));
    std::vector<double> t;
    for (int i = 0; i <= k; ++i) t.push_back(T * i / k);
    return t;
}

// largest step <= dt_max dividing `interval`
int substeps(double interval, double dt_max) {
    return std::max(1, static_cast<int>(std::ceil(interval / dt_max - 1e-9)));
}

WeightedPointCloud grid_cloud(const PhaseSpaceGrid& g) {
    WeightedPointCloud c;
    c.dim = 2;
    c.pos_dims = 1;
    double total = 0.0;
    for (double v : g.f) total += std::max(0.0, v);
    for (int i = 0; i < g.mx; ++i)
        for (int j = 0; j < g.mv; ++j) {
            const double w = g.at(i, j);
            if (w <= 0.0) continue;
            const double p[2] = {g.x(i), g.v(j)};
            c.add(p, w / total);
        }
    return c;
}

ForceFn make_force(const ParticleEnsemble& ens, const ExperimentConfig& cfg, std::shared_ptr<KernelTable>& table) {
    if (ens.r == 0.0) {
        if (ens.d != 1) throw DomainError("the unregularized force is implemented in d = 1");
        return [](const ParticleEnsemble& e) { return force_exact_1d(e); };
    }
    table = std::make_shared<KernelTable>(mollified_force_table({ens.r, "bump"}, ens.eps, cfg.table_m, ens.d));
    const Deposit dep = cfg.deposit;
    return [table, dep](const ParticleEnsemble& e) { return force_pic(e, *table, dep); };
}

void enforce_admissible(const std::vector<std::string>& violations, bool force, const std::string& what) {
    if (!violations.empty() && !force)
        throw AdmissibilityError("inadmissible regime for " + what + ": violates " + join(violations) +
                                 " (use --force to override)");
}

json schedules_json(const Schedules& s) {
    json j;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    j["zeta"] = opt(s.zeta);
    j["M"] = opt(s.M);
    j["r_max"] = opt(s.r_max);
    j["log_r_max"] = opt(s.log_r_max);
    j["log_r_gronwall"] = opt(s.log_r_gronwall);
    j["eps_min"] = s.eps_min;
    j["r_min"] = s.r_min;
    j["phi"] = s.phi;
    j["log_phi"] = s.log_phi;
    j["phi_inner"] = opt(s.phi_inner);
    j["placement_budget"] = s.placement_budget;
    j["log_placement_budget"] = s.log_placement_budget;
    j["admissible"] = s.admissible;
    j["violations"] = s.violations;
    return j;
}

}  // namespace

std::string code_version() { return VLAB_VERSION; }

ExperimentConfig experiment_config(const Config& cfg) {
    cfg.check(experiment_schema());
    ExperimentConfig e;
    e.name = cfg.get_string("experiment", e.name);
    if (!cfg.has("seed")) throw DomainError("config key 'seed' is required");
    e.seed = cfg.get_u64("seed", 0);
    e.out_dir = cfg.get_string("out", e.out_dir);
    e.threads = static_cast<int>(cfg.get_int("threads", e.threads));
    e.force = cfg.get_bool("force", e.force);

    auto& p = e.regime;
    p.d = static_cast<int>(cfg.get_int("d", p.d));
    p.eps = cfg.get_double("eps", p.eps);
    p.r = cfg.get_double("r", p.r);
    p.N = cfg.get_double("N", p.N);
    p.gamma = cfg.get_double("gamma", p.gamma);
    p.delta = cfg.get_double("delta", p.delta);
    p.T = cfg.get_double("T", p.T);
    p.eta = cfg.get_double("eta", p.eta);
    if (cfg.has("eta_prime")) p.eta_prime = cfg.get_double("eta_prime", 0.0);
    p.alpha = cfg.get_double("alpha", p.alpha);
    p.beta = cfg.get_double("beta", p.beta);
    p.lambda = cfg.get_double("lambda", p.lambda);
    if (cfg.has("M")) p.M = cfg.get_double("M", 0.0);
    auto& c = p.constants;
    c.C = cfg.get_double("C", c.C);
    c.C_T = cfg.get_double("C_T", c.C_T);
    c.C_2 = cfg.get_double("C_2", c.C_2);
    c.A = cfg.get_double("A", c.A);
    c.A_T = cfg.get_double("A_T", c.A_T);
    c.kappa = cfg.get_double("kappa", c.kappa);
    c.c = cfg.get_double("c", c.c);

    e.f0.d = p.d;
    e.f0.family = cfg.get_string("f0.family", e.f0.family);
    e.amplitude = cfg.get_double("f0.amplitude", e.amplitude);
    e.eps_scaled = cfg.get_bool("f0.eps_scaled", e.eps_scaled);
    e.f0.mode = static_cast<int>(cfg.get_int("f0.mode", e.f0.mode));
    e.f0.profile = cfg.get_string("f0.profile", e.f0.profile);
    e.f0.width = cfg.get_double("f0.width", e.f0.width);
    e.f0.drift = cfg.get_double("f0.drift", e.f0.drift);

    e.mx = static_cast<int>(cfg.get_int("grid.mx", e.mx));
    e.mv = static_cast<int>(cfg.get_int("grid.mv", e.mv));
    e.vmax = cfg.get_double("grid.vmax", e.vmax);
    e.dt = cfg.get_double("dt", e.dt);
    e.pde_dt = cfg.get_double("pde_dt", e.pde_dt);
    e.snapshot_dt = cfg.get_double("snapshot_dt", e.snapshot_dt);
    e.seeds = static_cast<int>(cfg.get_int("seeds", e.seeds));
    e.N_values = cfg.get_list("N_values", e.N_values);
    e.eps_values = cfg.get_list("eps_values", e.eps_values);
    e.distance.metric = parse_metric(cfg.get_string("metric", to_string(e.distance.metric)));
    e.distance.blocks_x = static_cast<int>(cfg.get_int("blocks_x", e.distance.blocks_x));
    e.distance.blocks_v = static_cast<int>(cfg.get_int("blocks_v", e.distance.blocks_v));
    const auto dep = cfg.get_string("deposit", "cic");
    if (dep == "cic")
        e.deposit = Deposit::CloudInCell;
    else if (dep == "exact")
        e.deposit = Deposit::ExactFourier;
    else
        throw DomainError("unknown deposit '" + dep + "'");
    e.table_m = static_cast<int>(cfg.get_int("table_m", e.table_m));
    e.trials = static_cast<int>(cfg.get_int("trials", e.trials));
    if (e.seeds < 1) throw DomainError("seeds must be at least 1");
    return e;
}

json to_json(const RegimeParams& p) {
    json j;
    j["d"] = p.d;
    j["eps"] = p.eps;
    j["r"] = p.r;
    j["log_r"] = p.log_r ? json(*p.log_r) : json(nullptr);
    j["N"] = p.N;
    j["gamma"] = p.gamma;
    j["delta"] = p.delta;
    j["T"] = p.T;
    j["eta"] = p.eta;
    j["eta_prime"] = p.eta_prime ? json(*p.eta_prime) : json(nullptr);
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["lambda"] = p.lambda;
    j["M"] = p.M ? json(*p.M) : json(nullptr);
    const auto& c = p.constants;
    j["constants"] = {{"C", c.C}, {"C_T", c.C_T}, {"C_2", c.C_2}, {"A", c.A},
                      {"A_T", c.A_T}, {"kappa", c.kappa}, {"c", c.c}};
    return j;
}

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["experiment"] = cfg.name;
    j["regime"] = to_json(cfg.regime);
    j["f0"] = {{"family", cfg.f0.family}, {"profile", cfg.f0.profile}, {"width", cfg.f0.width},
               {"mode", cfg.f0.mode}, {"drift", cfg.f0.drift}, {"amplitude", cfg.amplitude},
               {"eps_scaled", cfg.eps_scaled}};
    j["grid"] = {{"mx", cfg.mx}, {"mv", cfg.mv}, {"vmax", cfg.vmax}};
    j["dt"] = cfg.dt;
    j["pde_dt"] = cfg.pde_dt;
    j["snapshot_dt"] = cfg.snapshot_dt;
    j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
    j["seeds"] = cfg.seeds;
    j["N_values"] = cfg.N_values;
    j["eps_values"] = cfg.eps_values;
    j["distance"] = {{"p", cfg.distance.p},
                     {"metric", to_string(cfg.distance.metric)},
                     {"blocks_x", cfg.distance.blocks_x},
                     {"blocks_v", cfg.distance.blocks_v},
                     {"max_cloud_atoms", cfg.distance.max_cloud_atoms}};
    j["deposit"] = cfg.deposit == Deposit::CloudInCell ? "cic" : "exact";
    j["table_m"] = cfg.table_m;
    j["trials"] = cfg.trials;
    j["spectrum_periods"] = cfg.spectrum_periods;
    j["force"] = cfg.force;
    j["threads"] = cfg.threads;
    return j;
}

bool RunReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Table& RunReport::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return t;
    throw Error("report has no table '" + name + "'");
}

json RunReport::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["version"] = version;
    j["seed"] = seed;
    j["config"] = config;
    j["forced"] = forced;
    j["violations"] = violations;
    j["wall_seconds"] = wall_seconds;
    j["steps"] = steps;
    j["diagnostics"] = diagnostics;
    json checks_j = json::array();
    for (const auto& c : checks) checks_j.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    j["checks"] = checks_j;
    json tables_j = json::array();
    for (const auto& t : tables) tables_j.push_back(t.to_json());
    j["tables"] = tables_j;
    return j;
}

void RunReport::write(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    write_json(to_json(), (base / (experiment + ".json")).string());
    for (const auto& t : tables) write_csv(t, (base / (experiment + "_" + t.name + ".csv")).string());
}

std::vector<std::string> admissibility_violations(const std::string& kind, const RegimeParams& p) {
    validate(p);
    std::vector<std::string> v;
    if (kind == "meanfield" || kind == "quasineutral") {
        if (p.d != 1) v.push_back("d = 1 (the PDE reference is one-dimensional)");
        if (p.eps > 1.0) v.push_back("eps <= 1 (eps = " + std::to_string(p.eps) + ")");
        return v;
    }
    if (kind == "combined") {
        const auto s = schedules(p);
        v = s.violations;
        if (!(p.constants.A > 2.0 * p.constants.C_2)) v.push_back("A > 2 C_2");
        return v;
    }
    throw DomainError("unknown experiment kind '" + kind + "'");
}

json regime_report(const RegimeParams& p, const DensityHistory* history, double t) {
    json j;
    j["inputs"] = to_json(p);
    const auto s = schedules(p);
    j["schedules"] = schedules_json(s);
    j["admissible"] = s.admissible;
    j["violations"] = s.violations;
    const bool has_r = p.log_r || (p.r > 0.0 && p.r < 1.0);
    if (history || (has_r && (p.d >= 2 || p.M))) {
        const DensityHistory empty;
        const auto g = gronwall_bounds(p, history ? *history : empty, t);
        j["gronwall"] = {{"t", t},
                         {"alpha_1d", g.alpha_1d},
                         {"bound_1d", g.bound_1d},
                         {"log_bound_1d", g.log_bound_1d},
                         {"M", g.M},
                         {"lambda_opt", g.lambda_opt},
                         {"alpha_opt", g.alpha_opt},
                         {"growth_factor", g.growth_factor},
                         {"log_growth_factor", g.log_growth_factor},
                         {"rur_bound", g.rur_bound},
                         {"log_rur_bound", g.log_rur_bound}};
    }
    j["weak_lambda"] = p.lambda * p.lambda <= 2.0;
    j["version"] = code_version();
    return j;
}

RunReport run_meanfield_convergence(const ExperimentConfig& cfg) {
    const auto t0 = Clock::now();
    if (!cfg.seed) throw DomainError("a seed is required");
    RegimeParams p = cfg.regime;
    if (p.d != 1) throw DomainError("the mean-field experiment needs d = 1 (PDE reference)");
    const std::vector<double> Ns = cfg.N_values.empty() ? std::vector<double>{1000, 4000, 16000} : cfg.N_values;

    RunReport rep;
    rep.experiment = "meanfield";
    rep.config = to_json(cfg);
    rep.seed = *cfg.seed;
    rep.version = code_version();
    for (double N : Ns) {
        p.N = N;
        for (const auto& v : admissibility_violations("meanfield", p))
            if (std::find(rep.violations.begin(), rep.violations.end(), v) == rep.violations.end())
                rep.violations.push_back(v);
    }
    enforce_admissible(rep.violations, cfg.force, "the mean-field sweep");
    rep.forced = !rep.violations.empty();

    const double eps = p.eps;
    const auto spec = f0_for(cfg, eps);
    auto grid = initial_grid(spec, cfg.mx, cfg.mv, cfg.vmax);
    const auto times = snapshot_times(p.T, cfg.snapshot_dt);
    const double interval = times[1] - times[0];
    const int pde_sub = substeps(interval, cfg.pde_dt > 0.0 ? cfg.pde_dt : eps / 40.0);
    VlasovOptions opt;
    opt.snapshot_times = times;
    std::optional<MollifierSpec> moll;
    if (p.r > 0.0) moll = MollifierSpec{p.r, "bump"};
    const auto traj = run_vp(grid, eps, moll, p.T, interval / pde_sub, opt);
    rep.steps += traj.steps;

    const int sub = substeps(interval, cfg.dt > 0.0 ? cfg.dt : eps / 20.0);
    const double dt = interval / sub;
    Table runs{"runs", {"N", "seed", "sup_W1", "W1_T"}, {}};
    Table summary{"summary", {"N", "median_sup_W1", "mean_sup_W1", "min_sup_W1", "max_sup_W1"}, {}};
    std::vector<double> medians, logN, logmed;
    double qerr = 0.0;
    for (std::size_t a = 0; a < Ns.size(); ++a) {
        const auto n = static_cast<std::size_t>(Ns[a]);
        std::vector<double> sups;
        for (int s = 0; s < cfg.seeds; ++s) {
            const auto seed = derive_seed(derive_seed(*cfg.seed, n), static_cast<std::uint64_t>(s));
            auto ens = sample_initial(spec, n, seed);
            ens.eps = eps;
            ens.r = p.r;
            std::shared_ptr<KernelTable> table;
            const auto force = make_force(ens, cfg, table);
            double sup = 0.0, last = 0.0;
            for (std::size_t k = 0; k < times.size(); ++k) {
                if (k > 0) {
                    advance_leapfrog(ens, dt, sub, force);
                    rep.steps += sub;
                }
                const auto w = grid_vs_cloud_w(traj.snapshots[k].f, cloud_from_ensemble(ens), cfg.distance);
                qerr = std::max(qerr, w.quantization_error);
                sup = std::max(sup, w.value);
                last = w.value;
            }
            sups.push_back(sup);
            runs.add({n, seed, sup, last});
        }
        const double med = median(sups);
        medians.push_back(med);
        logN.push_back(std::log(static_cast<double>(n)));
        logmed.push_back(std::log(med));
        summary.add({n, med, std::accumulate(sups.begin(), sups.end(), 0.0) / sups.size(),
                     *std::min_element(sups.begin(), sups.end()), *std::max_element(sups.begin(), sups.end())});
    }
    const double slope = Ns.size() > 1 ? fit_slope(logN, logmed) : 0.0;
    rep.tables = {runs, summary, trajectory_table(traj)};
    rep.diagnostics["slope_log_median_vs_log_N"] = slope;
    rep.diagnostics["quantization_error_bound"] = qerr;
    rep.diagnostics["pde_clipped_mass"] = traj.clipped_mass;
    rep.diagnostics["pde_max_undershoot"] = traj.max_undershoot;
    rep.diagnostics["particle_dt"] = dt;
    rep.diagnostics["pde_dt"] = interval / pde_sub;
    rep.diagnostics["metric"] = to_string(cfg.distance.metric);
    if (Ns.size() > 1) {
        rep.checks.push_back({"median sup W1 strictly decreasing in N", strictly_decreasing(medians), ""});
        rep.checks.push_back({"slope of log median vs log N <= -0.3", slope <= -0.3, "slope = " + std::to_string(slope)});
    }
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

RunReport run_quasineutral_sweep(const ExperimentConfig& cfg) {
    const auto t0 = Clock::now();
    if (!cfg.seed) throw DomainError("a seed is required");
    RegimeParams p = cfg.regime;
    const std::vector<double> epss = cfg.eps_values.empty() ? std::vector<double>{0.2, 0.1, 0.05} : cfg.eps_values;

    RunReport rep;
    rep.experiment = "quasineutral";
    rep.config = to_json(cfg);
    rep.seed = *cfg.seed;
    rep.version = code_version();
    for (double e : epss) {
        p.eps = e;
        for (const auto& v : admissibility_violations("quasineutral", p))
            if (std::find(rep.violations.begin(), rep.violations.end(), v) == rep.violations.end())
                rep.violations.push_back(v);
    }
    enforce_admissible(rep.violations, cfg.force, "the quasineutral sweep");
    rep.forced = !rep.violations.empty();

    Table dist{"distances", {"eps", "t", "W1_filtered", "W1_unfiltered"}, {}};
    Table summary{"summary", {"eps", "sup_W1_filtered", "sup_W1_unfiltered", "omega", "omega_times_eps", "clipped_mass"}, {}};
    std::vector<double> sup_f, sup_u;
    bool filtered_below = true, freq_ok = true;
    double qerr = 0.0;
    for (double eps : epss) {
        const auto spec = f0_for(cfg, eps);
        const auto f0 = initial_grid(spec, cfg.mx, cfg.mv, cfg.vmax);
        const auto kie = kie_reference(initial_grid(homogeneous(spec), cfg.mx, cfg.mv, cfg.vmax));
        const auto times = snapshot_times(p.T, cfg.snapshot_dt);
        const double interval = times[1] - times[0];
        const int sub = substeps(interval, cfg.pde_dt > 0.0 ? cfg.pde_dt : eps / 20.0);
        const double dt = interval / sub;
        const double horizon = std::max(p.T, cfg.spectrum_periods * 2.0 * kPi * eps);
        const double T_run = dt * std::ceil(horizon / dt - 1e-9);
        VlasovOptions opt;
        opt.snapshot_times = times;
        opt.probe_node = cfg.mx / 4;
        const auto traj = run_vp(f0, eps, std::nullopt, T_run, dt, opt);
        rep.steps += traj.steps;
        const double omega = dominant_angular_frequency(traj.probe_E, dt);

        auto state = corrector_init(f0, eps);
        state.j = moments(kie.g0).j;
        const auto states = corrector_evolve(state, p.T, dt);
        double sf = 0.0, su = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto idx = std::min(states.size() - 1, k * static_cast<std::size_t>(sub));
            const auto R = corrector_R(states[idx], times[k]).R;
            const auto cloud = grid_cloud(traj.snapshots[k].f);
            const auto g = kie.at(times[k]);
            const auto wf = grid_vs_cloud_w(g, filter_measure(cloud, R), cfg.distance);
            const auto wu = grid_vs_cloud_w(g, cloud, cfg.distance);
            qerr = std::max({qerr, wf.quantization_error, wu.quantization_error});
            sf = std::max(sf, wf.value);
            su = std::max(su, wu.value);
            dist.add({eps, times[k], wf.value, wu.value});
        }
        sup_f.push_back(sf);
        sup_u.push_back(su);
        filtered_below = filtered_below && sf < su;
        freq_ok = freq_ok && std::abs(omega * eps - 1.0) <= 0.1;
        summary.add({eps, sf, su, omega, omega * eps, traj.clipped_mass});
    }
    rep.tables = {dist, summary};
    rep.diagnostics["quantization_error_bound"] = qerr;
    rep.diagnostics["metric"] = to_string(cfg.distance.metric);
    rep.diagnostics["spectrum_periods"] = cfg.spectrum_periods;
    if (epss.size() > 1)
        rep.checks.push_back({"sup filtered W1 strictly decreasing as eps decreases", strictly_decreasing(sup_f), ""});
    rep.checks.push_back({"filtered distance below unfiltered for every eps", filtered_below, ""});
    rep.checks.push_back({"dominant E frequency within 10% of 1/eps", freq_ok, ""});
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

RunReport run_combined_limit(const ExperimentConfig& cfg) {
    const auto t0 = Clock::now();
    if (!cfg.seed) throw DomainError("a seed is required");
    RegimeParams p = cfg.regime;
    if (p.d != 1) throw DomainError("the combined-limit experiment needs d = 1");
    const std::vector<double> Ns =
        cfg.N_values.empty() ? std::vector<double>{1024, 4096, 16384, 65536} : cfg.N_values;

    RunReport rep;
    rep.experiment = "combined";
    rep.config = to_json(cfg);
    rep.seed = *cfg.seed;
    rep.version = code_version();
    for (double N : Ns) {
        p.N = N;
        p.eps = N > 1.0 ? p.constants.A / std::log(N) : std::numeric_limits<double>::infinity();
        if (!std::isfinite(p.eps)) {
            rep.violations.push_back("N > 1 (N = " + std::to_string(N) + ")");
            continue;
        }
        for (const auto& v : admissibility_violations("combined", p))
            rep.violations.push_back("N = " + std::to_string(static_cast<long long>(N)) + ": " + v);
    }
    enforce_admissible(rep.violations, cfg.force, "the combined-limit schedule");
    rep.forced = !rep.violations.empty();

    Table runs{"runs", {"N", "eps", "seed", "sup_W1_filtered", "W2_initial", "placement_statistic"}, {}};
    Table summary{"summary", {"N", "eps", "median_sup_W1_filtered", "median_placement_statistic"}, {}};
    std::vector<double> medians;
    double qerr = 0.0;
    for (double N : Ns) {
        const auto n = static_cast<std::size_t>(N);
        p.N = N;
        p.eps = p.constants.A / std::log(N);
        const double eps = p.eps;
        const auto spec = f0_for(cfg, eps);
        const auto f0 = initial_grid(spec, cfg.mx, cfg.mv, cfg.vmax);
        const auto kie = kie_reference(initial_grid(homogeneous(spec), cfg.mx, cfg.mv, cfg.vmax));
        const auto times = snapshot_times(p.T, cfg.snapshot_dt);
        const double interval = times[1] - times[0];
        const int sub = substeps(interval, cfg.dt > 0.0 ? cfg.dt : eps / 20.0);
        const double dt = interval / sub;
        auto state = corrector_init(f0, eps);
        state.j = moments(kie.g0).j;
        const auto states = corrector_evolve(state, p.T, dt);
        std::vector<SpatialField> R;
        for (std::size_t k = 0; k < times.size(); ++k)
            R.push_back(corrector_R(states[std::min(states.size() - 1, k * static_cast<std::size_t>(sub))], times[k]).R);

        const auto sched = schedules(p);
        const double r_eff = p.r > 0.0 ? p.r : sched.r_min;
        const double denom = std::pow(eps, -p.gamma) * std::pow(r_eff, 1.0 + p.d / 2.0 + p.eta / 2.0);
        std::vector<double> sups, stats;
        for (int s = 0; s < cfg.seeds; ++s) {
            const auto seed = derive_seed(derive_seed(*cfg.seed, n), static_cast<std::uint64_t>(s));
            auto ens = sample_initial(spec, n, seed);
            ens.eps = eps;
            ens.r = p.r;
            GridCloudOptions o2 = cfg.distance;
            o2.p = 2;
            const double w2 = grid_vs_cloud_w(f0, cloud_from_ensemble(ens), o2).value;
            std::shared_ptr<KernelTable> table;
            const auto force = make_force(ens, cfg, table);
            double sup = 0.0;
            for (std::size_t k = 0; k < times.size(); ++k) {
                if (k > 0) {
                    advance_leapfrog(ens, dt, sub, force);
                    rep.steps += sub;
                }
                const auto w = grid_vs_cloud_w(kie.at(times[k]), filter_measure(cloud_from_ensemble(ens), R[k]),
                                               cfg.distance);
                qerr = std::max(qerr, w.quantization_error);
                sup = std::max(sup, w.value);
            }
            sups.push_back(sup);
            stats.push_back(w2 / denom);
            runs.add({n, eps, seed, sup, w2, w2 / denom});
        }
        medians.push_back(median(sups));
        summary.add({n, eps, medians.back(), median(stats)});
    }
    rep.tables = {runs, summary};
    rep.diagnostics["quantization_error_bound"] = qerr;
    rep.diagnostics["metric"] = to_string(cfg.distance.metric);
    rep.diagnostics["placement_radius"] = p.r > 0.0 ? "r" : "r_min(N) (unregularized run)";
    if (Ns.size() > 1)
        rep.checks.push_back({"median sup filtered W1 strictly decreasing in N", strictly_decreasing(medians), ""});
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

namespace {

WeightedPointCloud random_cloud(Rng& rng, int max_atoms) {
    WeightedPointCloud c;
    c.dim = 2;
    c.pos_dims = 1;
    const int k = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(max_atoms)));
    double total = 0.0;
    std::vector<double> w;
    for (int i = 0; i < k; ++i) {
        const double p[2] = {rng.uniform(-0.5, 0.5), rng.uniform(-1.0, 1.0)};
        c.add(p, 0.0);
        w.push_back(0.05 + rng.uniform());
        total += w.back();
    }
    for (int i = 0; i < k; ++i) c.weights[i] = w[i] / total;
    return c;
}

SpatialField random_filter(Rng& rng, int m) {
    SpatialField R(1, m, 1, FieldKind::Corrector);
    double c[3], ph[3];
    for (int k = 0; k < 3; ++k) {
        c[k] = rng.uniform(-0.5, 0.5) / (k + 1);
        ph[k] = rng.uniform(0.0, 2.0 * kPi);
    }
    for (int i = 0; i < m; ++i) {
        const double x = SpatialField::node(i, m);
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += c[k] * std::sin(2.0 * kPi * (k + 1) * x + ph[k]);
        R.values[i] = s;
    }
    return R;
}

// random trigonometric perturbation with sum of |coefficients| <= 0.9
void random_trig(Rng& rng, int K, std::vector<double>& a, std::vector<double>& b) {
    a.assign(K, 0.0);
    b.assign(K, 0.0);
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
        a[k] = rng.uniform(-1.0, 1.0);
        b[k] = rng.uniform(-1.0, 1.0);
        total += std::abs(a[k]) + std::abs(b[k]);
    }
    const double scale = rng.uniform(0.05, 0.9) / total;
    for (int k = 0; k < K; ++k) {
        a[k] *= scale;
        b[k] *= scale;
    }
}

SpatialField random_density_2d(Rng& rng, int m) {
    SpatialField h(2, m, 1, FieldKind::Density);
    struct Mode {
        int k0, k1;
        double amp, phase;
    };
    std::vector<Mode> modes;
    double total = 0.0;
    for (int k0 = -2; k0 <= 2; ++k0)
        for (int k1 = 0; k1 <= 2; ++k1) {
            if (k1 == 0 && k0 <= 0) continue;
            modes.push_back({k0, k1, rng.uniform(), rng.uniform(0.0, 2.0 * kPi)});
            total += modes.back().amp;
        }
    const double scale = rng.uniform(0.1, 0.9) / total;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double x0 = SpatialField::node(i, m), x1 = SpatialField::node(j, m);
            double s = 1.0;
            for (const auto& md : modes)
                s += scale * md.amp * std::cos(2.0 * kPi * (md.k0 * x0 + md.k1 * x1) + md.phase);
            h.values[static_cast<std::size_t>(i) * m + j] = s;
        }
    return h;
}

struct LemmaTally {
    std::string name;
    int trials = 0;
    int violations = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    double worst_ratio = 0.0;

    void record(double lhs, double rhs, double tol) {
        ++trials;
        const double excess = lhs - rhs - tol;
        if (excess > 0.0) ++violations;
        worst_excess = std::max(worst_excess, excess);
        if (rhs > 0.0) worst_ratio = std::max(worst_ratio, lhs / rhs);
    }
};

}  // namespace

RunReport run_lemma_suite(std::uint64_t seed, int trials, ConcentrationOptions co) {
    const auto t0 = Clock::now();
    RunReport rep;
    rep.experiment = "lemmas";
    rep.seed = seed;
    rep.version = code_version();
    rep.config = {{"seed", seed}, {"trials", trials}};
    constexpr double tol = 1e-8;

    LemmaTally conv{"mollification contraction"}, self{"self-mollification <= r"}, filt{"filtering factor"},
        scale{"scaling inequality"}, loep1{"Loeper estimate (1D, exact W2)"},
        loep2{"Loeper estimate (2D, quantized W2)"};
    Rng rng(derive_seed(seed, 1));
    MollifyOptions mo;
    for (int t = 0; t < trials; ++t) {
        const auto mu = random_cloud(rng, 6);
        const auto nu = random_cloud(rng, 6);
        const int p = 1 + static_cast<int>(rng.index(2));
        const double r = rng.uniform(0.005, 0.24);
        const double w = wasserstein_discrete(mu, nu, p).distance;
        const auto cm = mollify_measure(mu, r, mo);
        const auto cn = mollify_measure(nu, r, mo);
        conv.record(wasserstein_discrete(cm, cn, p).distance, w, tol);
        self.record(wasserstein_discrete(cm, mu, p).distance, r, tol);

        const auto R = random_filter(rng, 64);
        const double lip = interpolated_lipschitz(R);
        const double w1 = wasserstein_discrete(mu, nu, 1).distance;
        filt.record(wasserstein_discrete(filter_measure(mu, R), filter_measure(nu, R), 1).distance, (1.0 + lip) * w1,
                    tol);

        const double Rs = rng.uniform(1.0, 5.0);
        scale.record(w, Rs * wasserstein_discrete(scale_measure(mu, Rs), scale_measure(nu, Rs), p).distance, tol);
    }
    Rng lrng(derive_seed(seed, 2));
    for (int t = 0; t < trials; ++t) {
        std::vector<double> a1, b1, a2, b2;
        random_trig(lrng, 3, a1, b1);
        random_trig(lrng, 3, a2, b2);
        const double eps = lrng.uniform(0.1, 1.0);
        const auto c = loeper_check_1d(a1, b1, a2, b2, eps);
        loep1.record(c.lhs, c.rhs, tol + c.tolerance);
    }
    const int trials2d = std::max(1, trials / 50);
    for (int t = 0; t < trials2d; ++t) {
        const auto h1 = random_density_2d(lrng, 16);
        const auto h2 = random_density_2d(lrng, 16);
        const double eps = lrng.uniform(0.1, 1.0);
        const auto c = loeper_check_2d(h1, h2, eps, 16);
        loep2.record(c.lhs, c.rhs, tol + c.tolerance);
    }

    // R = 0: the filtering inequality holds with equality
    double eq_gap = 0.0;
    {
        Rng erng(derive_seed(seed, 3));
        SpatialField zero(1, 64, 1, FieldKind::Corrector);
        for (int t = 0; t < 20; ++t) {
            const auto mu = random_cloud(erng, 6);
            const auto nu = random_cloud(erng, 6);
            const double a = wasserstein_discrete(mu, nu, 1).distance;
            const double b = wasserstein_discrete(filter_measure(mu, zero), filter_measure(nu, zero), 1).distance;
            eq_gap = std::max(eq_gap, std::abs(a - b));
        }
    }

    co.calibration_seed = derive_seed(seed, 4);
    co.seed = derive_seed(seed, 5);
    const auto conc = concentration_check(co);

    Table lemmas{"lemmas", {"lemma", "trials", "violations", "worst_excess", "worst_ratio"}, {}};
    for (const auto* l : {&conv, &self, &filt, &scale, &loep1, &loep2}) {
        lemmas.add({l->name, l->trials, l->violations, l->worst_excess, l->worst_ratio});
        rep.checks.push_back({l->name + ": zero violations", l->violations == 0,
                              std::to_string(l->violations) + " of " + std::to_string(l->trials)});
    }
    rep.checks.push_back({"filtering with R = 0 is an equality", eq_gap <= 1e-12, "gap = " + std::to_string(eq_gap)});
    Table conc_t{"concentration", {"x", "calibration_frequency", "frequency", "bound"}, {}};
    for (std::size_t i = 0; i < conc.x.size(); ++i)
        conc_t.add({conc.x[i], conc.calibration_frequency[i], conc.frequency[i], conc.bound[i]});
    rep.checks.push_back({"concentration frequencies below the calibrated bound", conc.passed,
                          "C = " + std::to_string(conc.C) + ", c = " + std::to_string(conc.c)});
    rep.diagnostics["concentration"] = {{"C", conc.C},
                                        {"c", conc.c},
                                        {"kappa", co.kappa},
                                        {"N", co.N},
                                        {"resamples", co.resamples},
                                        {"quantization_error", conc.quantization_error},
                                        {"calibration_seed", co.calibration_seed},
                                        {"seed", co.seed}};
    rep.tables = {lemmas, conc_t};
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

ConcentrationResult concentration_check(const ConcentrationOptions& o) {
    const int g = o.reference_grid;
    WeightedPointCloud ref;
    ref.dim = 2;
    ref.pos_dims = 0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            const double p[2] = {-1.0 + (2.0 * i + 1.0) / g, -1.0 + (2.0 * j + 1.0) / g};
            ref.add(p, 1.0 / (static_cast<double>(g) * g));
        }
    auto frequencies = [&](std::uint64_t seed) {
        std::vector<double> d;
        for (int s = 0; s < o.resamples; ++s) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
            WeightedPointCloud emp;
            emp.dim = 2;
            emp.pos_dims = 0;
            for (int i = 0; i < o.N; ++i) {
                const double p[2] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
                emp.add(p, 1.0 / o.N);
            }
            d.push_back(wasserstein_discrete(emp, ref, 1).distance);
        }
        std::vector<double> f;
        for (double x : o.x_grid) {
            const auto hits = std::count_if(d.begin(), d.end(), [&](double w) { return w >= o.kappa * x; });
            f.push_back(static_cast<double>(hits) / o.resamples);
        }
        return f;
    };
    ConcentrationResult res;
    res.x = o.x_grid;
    res.quantization_error = std::sqrt(2.0) / g;
    res.calibration_frequency = frequencies(o.calibration_seed);
    res.C = o.C;
    // largest c with the calibration frequencies under C exp(-c N g(x)), then the safety factor
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < res.x.size(); ++i) {
        const double f = res.calibration_frequency[i];
        if (f <= 0.0) continue;
        const double q = res.x[i] / std::log(2.0 + 1.0 / res.x[i]);
        const double gN = o.N * q * q;
        c = std::min(c, std::log(o.C / f) / gN);
    }
    if (!std::isfinite(c)) c = 1.0;
    res.c = o.safety * c;
    res.frequency = frequencies(o.seed);
    res.passed = res.c > 0.0;
    for (std::size_t i = 0; i < res.x.size(); ++i) {
        res.bound.push_back(concentration_bound(2.0, 1.0, res.x[i], o.N, res.C, res.c));
        if (res.frequency[i] > res.bound.back()) res.passed = false;
    }
    return res;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
    set_num_threads(cfg.threads);
    if (cfg.name == "meanfield") return run_meanfield_convergence(cfg);
    if (cfg.name == "quasineutral") return run_quasineutral_sweep(cfg);
    if (cfg.name == "combined") return run_combined_limit(cfg);
    if (cfg.name == "lemmas") {
        if (!cfg.seed) throw DomainError("a seed is required");
        return run_lemma_suite(*cfg.seed, cfg.trials);
    }
    throw DomainError("unknown experiment '" + cfg.name + "'");
}

}  // namespace vlab
