// qlap: numerical toolkit for normalized solutions of the (2,q)-Laplacian
// equation -Du - D_q u + lambda u = alpha |u|^{p-2} u with prescribed L^2
// mass, on radially symmetric discretizations.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <qlap/functionals.hpp>
#include <qlap/io.hpp>
#include <qlap/minimize.hpp>
#include <qlap/params.hpp>
#include <qlap/radial.hpp>
#include <qlap/scaling.hpp>
#include <qlap/shoot.hpp>
#include <qlap/verify.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitVanishing = 3;
constexpr int kExitNumerical = 4;

struct RunConfig {
    qlap::ProblemParams params;
    // grid
    double r_max = 16.0;
    int n = 1025;
    std::string spacing = "uniform";
    double ratio = 1.04;
    // minimize
    qlap::MinimizeOptions minimize;
    // shoot
    qlap::ShootConfig shoot;
    // run
    std::string out_dir;
    std::string format = "json";

    qlap::GridPtr make_grid_from_config() const {
        const auto sp = spacing == "geometric" ? qlap::Spacing::Geometric
                                               : qlap::Spacing::Uniform;
        return qlap::make_grid(params.N, r_max, n, sp,
                               sp == qlap::Spacing::Geometric ? ratio : 1.0);
    }
};

void add_param_options(CLI::App* cmd, RunConfig& cfg, bool need_mass) {
    cmd->add_option("--N", cfg.params.N, "space dimension (>= 1)")->required();
    cmd->add_option("--q", cfg.params.q, "gradient exponent (> 2)")->required();
    cmd->add_option("--p", cfg.params.p, "nonlinearity exponent (> 2)")->required();
    cmd->add_option("--alpha", cfg.params.alpha, "nonlinearity strength (>= 0)");
    auto* m = cmd->add_option("--m", cfg.params.m, "prescribed mass ||u||_2^2");
    if (need_mass)
        m->required();
}

void add_grid_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--rmax", cfg.r_max, "truncation radius");
    cmd->add_option("--n", cfg.n, "grid nodes (>= 16)");
    cmd->add_option("--spacing", cfg.spacing, "uniform | geometric")
        ->check(CLI::IsMember({"uniform", "geometric"}));
    cmd->add_option("--ratio", cfg.ratio, "geometric cell growth ratio");
}

void add_minimize_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--max-iter", cfg.minimize.max_iter, "descent iteration cap");
    cmd->add_option("--step", cfg.minimize.step, "initial step size");
    cmd->add_option("--step-shrink", cfg.minimize.step_shrink, "backtracking factor");
    cmd->add_option("--tol-grad", cfg.minimize.tol_grad, "tangent-gradient tolerance");
    cmd->add_option("--restarts", cfg.minimize.restarts, "multistart seeds");
    cmd->add_option("--seed", cfg.minimize.seed, "PRNG seed");
}

void add_output_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--format", cfg.format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

fs::path prepare_out_dir(const RunConfig& cfg, const CLI::App& app) {
    fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
    fs::create_directories(dir);
    // config echo: re-running with --config on this file reproduces the run
    const CLI::App* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands()[0];
    std::ofstream echo(dir / "config_echo.ini");
    if (sub) {
        echo << "[" << sub->get_name() << "]\n";
        echo << sub->config_to_str(true, false);
    }
    return dir;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
    if (!os)
        throw std::runtime_error("failed to write " + p.string());
}

json params_json(const qlap::ProblemParams& p) {
    return json{{"N", p.N}, {"q", p.q}, {"p", p.p}, {"alpha", p.alpha}, {"m", p.m}};
}

int cmd_regime(const RunConfig& cfg) {
    cfg.params.validate();
    const auto table = qlap::gn_exponents(cfg.params);
    const auto regime = qlap::classify_regime(cfg.params);
    const auto cert =
        qlap::liouville_certificate(cfg.params.N, cfg.params.p, cfg.params.q);

    std::cout << "regime: " << qlap::to_string(regime.kind) << "\n"
              << "p2 = " << qlap::format_double(table.p2)
              << ", pq = " << qlap::format_double(table.pq) << "\n"
              << "2* = " << table.two_star.str() << ", q* = " << table.q_star.str() << "\n"
              << "delta_p = " << qlap::format_double(table.delta_p)
              << ", delta_q = " << qlap::format_double(table.delta_q) << "\n";
    if (table.nu_p2)
        std::cout << "nu(p,2) = " << qlap::format_double(*table.nu_p2) << "\n";
    if (table.nu_pq)
        std::cout << "nu(p,q) = " << qlap::format_double(*table.nu_pq) << "\n";
    std::cout << "zero_mass_eligible: " << (regime.zero_mass_eligible ? "true" : "false")
              << "\n"
              << "liouville: " << qlap::to_string(cert.outcome) << " (" << cert.reason
              << ")\n";
    return kExitOk;
}

int cmd_minimize(RunConfig& cfg, const CLI::App& app, bool local, double rho) {
    cfg.params.validate();
    const auto grid = cfg.make_grid_from_config();
    const fs::path dir = prepare_out_dir(cfg, app);

    qlap::MinimizeResult res = [&] {
        if (!local)
            return qlap::global_minimize(cfg.params, grid, cfg.minimize);
        double r = rho;
        if (r <= 0.0)
            r = qlap::estimate_rho_hat(cfg.params, grid, cfg.minimize);
        return qlap::local_minimize(cfg.params, grid, r, cfg.minimize);
    }();

    json j = qlap::to_json(res);
    j["params"] = params_json(cfg.params);
    write_text(dir / "minimize_result.json", j.dump(2) + "\n");

    std::ofstream csv(dir / "profile.csv");
    qlap::write_csv(res.u, csv);

    const auto rep = qlap::energy_report(res.u, cfg.params);
    write_text(dir / "energy_report.json", qlap::to_json(rep).dump(2) + "\n");

    std::cout << "energy = " << qlap::format_double(res.energy)
              << ", lambda = " << qlap::format_double(res.lambda)
              << ", K = " << qlap::format_double(res.K)
              << (res.vanishing ? " [vanishing infimum]" : "")
              << (res.domain_flag ? " [domain too small]" : "") << "\n";

    if (res.vanishing)
        return kExitVanishing;
    return res.converged ? kExitOk : kExitNumerical;
}

int cmd_alpha0(RunConfig& cfg, const CLI::App& app) {
    cfg.params.validate();
    const auto regime = qlap::classify_regime(cfg.params);
    if (regime.kind != qlap::RegimeKind::Intermediate)
        throw std::invalid_argument(
            "alpha0 requires the intermediate regime p2 < p < pq; this configuration is " +
            qlap::to_string(regime.kind));
    const auto grid = cfg.make_grid_from_config();
    const fs::path dir = prepare_out_dir(cfg, app);

    qlap::ThresholdReport rep;
    rep.mass = cfg.params.m;
    rep.d1 = qlap::estimate_d1(cfg.params, grid, cfg.minimize);
    rep.dm = std::pow(cfg.params.m, qlap::d_mass_exponent(cfg.params)) * rep.d1;
    rep.alpha0_formula = qlap::alpha0_from_d(rep.dm, cfg.params);
    rep.alpha0_bisect = qlap::alpha0_bisect(cfg.params, grid, cfg.minimize);

    write_text(dir / "threshold_report.json", qlap::to_json(rep).dump(2) + "\n");
    const double gap = std::fabs(rep.alpha0_bisect - rep.alpha0_formula) / rep.alpha0_formula;
    std::cout << "d(1) = " << qlap::format_double(rep.d1)
              << ", alpha0(formula) = " << qlap::format_double(rep.alpha0_formula)
              << ", alpha0(bisect) = " << qlap::format_double(rep.alpha0_bisect)
              << ", relative gap = " << qlap::format_double(gap) << "\n";
    return kExitOk;
}

int cmd_shoot(RunConfig& cfg, const CLI::App& app) {
    cfg.params.validate();
    const fs::path dir = prepare_out_dir(cfg, app);
    const auto res = qlap::shoot(cfg.shoot, cfg.params);

    std::ofstream csv(dir / "trajectory.csv");
    qlap::write_trajectory_csv(res, csv);
    json j = qlap::to_json(res);
    j["params"] = params_json(cfg.params);
    write_text(dir / "shoot_result.json", j.dump(2) + "\n");

    std::cout << "classification = " << qlap::to_string(res.classification)
              << ", event_r = " << qlap::format_double(res.event_r) << "\n";
    return kExitOk;
}

int cmd_zero_mass(RunConfig& cfg, const CLI::App& app) {
    cfg.params.validate();
    const fs::path dir = prepare_out_dir(cfg, app);
    const auto cert =
        qlap::liouville_certificate(cfg.params.N, cfg.params.p, cfg.params.q);

    json j;
    j["params"] = params_json(cfg.params);
    j["liouville"] = qlap::to_string(cert.outcome);
    try {
        const auto res = qlap::find_ground_state(cfg.params, 0.0);
        j["found"] = true;
        j["result"] = qlap::to_json(res);
        std::ofstream csv(dir / "trajectory.csv");
        qlap::write_trajectory_csv(res, csv);
        write_text(dir / "zero_mass.json", j.dump(2) + "\n");
        std::cout << "decaying solution found: u0 = " << qlap::format_double(res.u0)
                  << ", decay slope = " << qlap::format_double(res.decay_slope) << "\n";
        return kExitOk;
    } catch (const std::runtime_error& e) {
        j["found"] = false;
        j["detail"] = e.what();
        write_text(dir / "zero_mass.json", j.dump(2) + "\n");
        std::cout << "no decaying solution: " << e.what() << "\n"
                  << "liouville: " << qlap::to_string(cert.outcome) << "\n";
        // absence is the certified outcome, not a failure, when a Liouville
        // argument rules solutions out
        return cert.outcome == qlap::LiouvilleOutcome::NotCertified ? kExitNumerical
                                                                    : kExitOk;
    }
}

int cmd_scan(RunConfig& cfg, const CLI::App& app, const std::string& vary, double from,
             double to, int steps, bool log_spacing) {
    if (steps < 2)
        throw std::invalid_argument("scan needs at least 2 steps");
    if (vary != "m" && vary != "alpha" && vary != "p" && vary != "q")
        throw std::invalid_argument("scan --vary must be one of m, alpha, p, q");
    cfg.params.validate();
    const auto grid = cfg.make_grid_from_config();
    const fs::path dir = prepare_out_dir(cfg, app);

    std::vector<double> values(steps);
    for (int i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / (steps - 1);
        values[i] = log_spacing ? from * std::pow(to / from, t) : from + (to - from) * t;
    }

    struct Row {
        double value = 0;
        bool ok = false;
        std::string status;
        double energy = 0, lambda = 0, K = 0, mass = 0;
        bool converged = false, vanishing = false;
    };
    std::vector<Row> rows(steps);

    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QLAP_THREADS"))
        threads = std::max(1, std::atoi(env));
    threads = std::max(1, std::min(threads, steps));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < steps; i = next.fetch_add(1)) {
            Row& row = rows[i];
            row.value = values[i];
            try {
                qlap::ProblemParams p = cfg.params;
                if (vary == "m")
                    p.m = values[i];
                else if (vary == "alpha")
                    p.alpha = values[i];
                else if (vary == "p")
                    p.p = values[i];
                else
                    p.q = values[i];
                const auto res = qlap::global_minimize(p, grid, cfg.minimize);
                row.ok = true;
                row.status = "ok";
                row.energy = res.energy;
                row.lambda = res.lambda;
                row.K = res.K;
                row.mass = res.mass;
                row.converged = res.converged;
                row.vanishing = res.vanishing;
            } catch (const std::exception& e) {
                row.ok = false;
                row.status = std::string("error: ") + e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    std::ofstream csv(dir / "scan.csv");
    csv << "index," << vary << ",energy,lambda,K,mass,converged,vanishing,status\n";
    for (int i = 0; i < steps; ++i) {
        const Row& r = rows[i];
        csv << i << "," << qlap::format_double(r.value) << ","
            << qlap::format_double(r.energy) << "," << qlap::format_double(r.lambda) << ","
            << qlap::format_double(r.K) << "," << qlap::format_double(r.mass) << ","
            << (r.converged ? 1 : 0) << "," << (r.vanishing ? 1 : 0) << "," << r.status
            << "\n";
    }
    std::cout << "scan written: " << (dir / "scan.csv").string() << "\n";
    return kExitOk;
}

int cmd_verify(bool quick) {
    const auto results = qlap::run_verification(quick);
    int failures = 0;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
        if (!r.detail.empty())
            std::cout << " - " << r.detail;
        std::cout << "\n";
        if (!r.pass)
            ++failures;
    }
    std::cout << results.size() - failures << "/" << results.size() << " checks passed\n";
    return failures == 0 ? kExitOk : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qlap: normalized solutions of the (2,q)-Laplacian, radial solver and "
                 "verification toolkit"};
    app.option_defaults()->always_capture_default(true);
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI file (flags override)");

    RunConfig cfg;
    int exit_code = kExitOk;
    std::function<int()> action;

    auto* regime = app.add_subcommand("regime", "exponent table, regime, Liouville certificate");
    add_param_options(regime, cfg, false);
    regime->callback([&] { action = [&] { return cmd_regime(cfg); }; });

    auto* minimize = app.add_subcommand("minimize", "constrained minimization on the mass sphere");
    add_param_options(minimize, cfg, true);
    add_grid_options(minimize, cfg);
    add_minimize_options(minimize, cfg);
    add_output_options(minimize, cfg);
    bool local_flag = false;
    double rho_arg = 0.0;
    minimize->add_flag("--local", local_flag, "restrict to K(u) > rho/2");
    minimize->add_option("--rho", rho_arg, "K-floor for the local problem (0 = estimate)");
    minimize->callback(
        [&] { action = [&] { return cmd_minimize(cfg, app, local_flag, rho_arg); }; });

    auto* alpha0 = app.add_subcommand("alpha0", "threshold strength: closed form vs bisection");
    add_param_options(alpha0, cfg, true);
    add_grid_options(alpha0, cfg);
    add_minimize_options(alpha0, cfg);
    add_output_options(alpha0, cfg);
    alpha0->callback([&] { action = [&] { return cmd_alpha0(cfg, app); }; });

    auto* shootc = app.add_subcommand("shoot", "integrate one radial trajectory");
    add_param_options(shootc, cfg, false);
    add_output_options(shootc, cfg);
    shootc->add_option("--lambda", cfg.shoot.lambda, "multiplier in the equation");
    shootc->add_option("--u0", cfg.shoot.u0, "initial amplitude u(0)")->required();
    shootc->add_option("--rmax-ode", cfg.shoot.r_max, "integration horizon");
    shootc->add_option("--h0", cfg.shoot.h0, "initial step");
    shootc->add_option("--tol-step", cfg.shoot.tol_step, "local error tolerance");
    shootc->callback([&] { action = [&] { return cmd_shoot(cfg, app); }; });

    auto* zm = app.add_subcommand("zero-mass", "search for a decaying lambda = 0 profile");
    add_param_options(zm, cfg, false);
    add_output_options(zm, cfg);
    zm->callback([&] { action = [&] { return cmd_zero_mass(cfg, app); }; });

    auto* scan = app.add_subcommand("scan", "sweep one parameter, one minimization per row");
    add_param_options(scan, cfg, true);
    add_grid_options(scan, cfg);
    add_minimize_options(scan, cfg);
    add_output_options(scan, cfg);
    std::string vary;
    double from = 0, to = 0;
    int steps = 0;
    bool log_spacing = false;
    scan->add_option("--vary", vary, "parameter to sweep: m | alpha | p | q")->required();
    scan->add_option("--from", from, "first value")->required();
    scan->add_option("--to", to, "last value")->required();
    scan->add_option("--steps", steps, "row count")->required();
    scan->add_flag("--log", log_spacing, "log-spaced values");
    scan->callback([&] {
        action = [&] { return cmd_scan(cfg, app, vary, from, to, steps, log_spacing); };
    });

    auto* verify = app.add_subcommand("verify", "run the cross-module invariant suite");
    bool quick = false;
    verify->add_flag("--quick", quick, "trimmed sample counts (< 1 minute)");
    verify->callback([&] { action = [&] { return cmd_verify(quick); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        exit_code = action ? action() : kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return exit_code;
}
