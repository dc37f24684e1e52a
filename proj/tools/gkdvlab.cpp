// gkdvlab: scenario runner and verification gate for the quintic gKdV
// blow-up laboratory. Subcommands: constants | profiles | laws | tail |
// evolve | decompose | blowup | verify-all.
//
// Exit codes: 0 pass, 1 crash, 2 check failure, 3 regime exit,
// 4 numerical blow-up detected.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gkdv/calculus.hpp"
#include "gkdv/evolution.hpp"
#include "gkdv/field_io.hpp"
#include "gkdv/ground_state.hpp"
#include "gkdv/laws.hpp"
#include "gkdv/linop.hpp"
#include "gkdv/manifest.hpp"
#include "gkdv/modulation.hpp"
#include "gkdv/qb_profiles.hpp"
#include "gkdv/tail.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gkdv;

namespace {

fs::path out_path(const std::string& dir) {
    fs::path p(dir);
    if (p.is_relative()) {
        if (const char* root = std::getenv("GKDV_OUT_ROOT")) p = fs::path(root) / p;
    }
    fs::create_directories(p);
    return p;
}

json constants_json() {
    const SolitonConstants c = soliton_constants(default_profile_grid());
    return json{{"intQ", c.intQ},           {"intQ2", c.intQ2},
                {"intQ6", c.intQ6},         {"intQy2", c.intQy2},
                {"normLambdaQ2", c.normLambdaQ2}, {"energyQ", c.energyQ}};
}

// ---------------------------------------------------------------- verify-all
struct CheckTable {
    bool as_json = false;
    json entries = json::array();
    bool all_ok = true;

    void add(const std::string& name, double value, double tol, bool ok_if_below = true) {
        const bool ok = ok_if_below ? std::abs(value) < tol : value > tol;
        all_ok = all_ok && ok;
        entries.push_back({{"check", name}, {"value", value}, {"tolerance", tol}, {"pass", ok}});
        if (!as_json)
            std::cout << (ok ? "[ ok ] " : "[FAIL] ") << name << "  value=" << value
                      << "  tol=" << tol << '\n';
    }
};

int cmd_verify_all(bool as_json, const std::string& fault) {
    CheckTable t;
    t.as_json = as_json;
    const Grid1D g = default_profile_grid();
    Field Q = eval_Q(g);
    if (fault == "q-scale") Q *= 1.01;
    const SolitonConstants c = soliton_constants(g);

    // ground-state identities
    t.add("energy-of-ground-state |E(Q)|/intQy2", energy(Q) / c.intQy2, 1e-8);
    t.add("mass-closed-form intQ2 - sqrt(3)pi/2",
          c.intQ2 - std::sqrt(3.0) * std::numbers::pi / 2.0, 1e-8);
    t.add("pohozaev intQ6/(3 intQy2) - 1", c.intQ6 / (3.0 * c.intQy2) - 1.0, 1e-6);
    t.add("gagliardo-nirenberg gn_ratio(Q) - 1", gn_ratio(eval_Q(g)) - 1.0, 1e-6);
    {
        const Field LQ = apply_Lambda(eval_Q(g));
        t.add("scaling-orthogonality (Q,LambdaQ)", inner_product(eval_Q(g), LQ), 1e-8);
        Field yLQ(g);
        for (std::size_t i = 0; i < g.count(); ++i) yLQ[i] = g.node(i) * LQ[i];
        t.add("translation-pairing (Q',yLambdaQ)-normLambdaQ2",
              inner_product(eval_Q_deriv(g, 1), yLQ) - c.normLambdaQ2, 1e-8);
    }

    // linearized-operator identities
    {
        const Linop op(g);
        const Field Qp = eval_Q_deriv(g, 1);
        t.add("kernel |L Q'| / |Q'|", norm_L2(op.apply(Qp)) / norm_L2(Qp), 1e-7);
        Field Q3(g);
        for (std::size_t i = 0; i < g.count(); ++i) Q3[i] = std::pow(op.Q()[i], 3);
        Field r = op.apply(Q3);
        for (std::size_t i = 0; i < g.count(); ++i) r[i] += 8.0 * Q3[i];
        t.add("eigenvalue |L Q^3 + 8Q^3|/|Q^3|", norm_L2(r) / norm_L2(Q3), 1e-7);
        const Field LQ = apply_Lambda(op.Q());
        Field r2 = op.apply(LQ);
        for (std::size_t i = 0; i < g.count(); ++i) r2[i] += 2.0 * op.Q()[i];
        t.add("scaling-relation |L LambdaQ + 2Q|/|Q|", norm_L2(r2) / norm_L2(op.Q()), 1e-7);
    }

    // profile constants
    {
        const ProfileSet& ps = shared_profile_set();
        t.add("profile-R (Q,R) + (3/4) intQ", ps.QR + 0.75 * ps.intQ, 1e-6 * ps.intQ);
        t.add("profile-P (P,Q) - intQ^2/16", ps.PQ - ps.intQ * ps.intQ / 16.0,
              1e-6 * ps.intQ * ps.intQ);
        t.add("profile-P (P,Q')", ps.PQprime, 1e-6 * ps.intQ * ps.intQ);
        const double Pleft = interp_value(ps.P, -55.0);
        t.add("profile-P left limit P(-55) - intQ/2", Pleft - 0.5 * ps.intQ, 1e-6);
        t.add("profile-P right limit P(55)", interp_value(ps.P, 55.0), 1e-6);
    }

    // localized-profile scalings
    {
        const QbWorkspace qb(shared_profile_set());
        std::vector<double> bs{3e-3, 6e-3, 1.2e-2, 3e-2}, m_err, e_err, psiQ, psiLQ;
        const Field Qt = eval_Q(qb.grid());
        const double intQ2 = inner_product(Qt, Qt);
        const double PQ = shared_profile_set().PQ;
        for (double b : bs) {
            const LocalizedProfile lp = qb.make_Qb(b);
            m_err.push_back(std::abs(mass(lp.Qb) - intQ2 - 2.0 * b * PQ));
            e_err.push_back(std::abs(energy(lp.Qb) + b * PQ));
            const Field psi = qb.make_PsiB(b);
            psiQ.push_back(std::abs(inner_product(psi, Qt)));
            Field LQt(qb.grid());
            for (std::size_t i = 0; i < qb.grid().count(); ++i) {
                const double y = qb.grid().node(i);
                LQt[i] = 0.5 * Q_value(y) + y * Q_deriv1(y);
            }
            psiLQ.push_back(std::abs(inner_product(psi, LQt)));
        }
        t.add("Qb-mass-expansion slope", loglog_slope(bs, m_err), 1.15, false);
        t.add("Qb-energy-expansion slope", loglog_slope(bs, e_err), 1.85, false);
        t.add("PsiB-(Psi,Q) slope", loglog_slope(bs, psiQ), 2.8, false);
        t.add("PsiB-(Psi,LambdaQ) slope", loglog_slope(bs, psiLQ), 1.85, false);
        t.add("PsiB-at-zero residual", qb.make_PsiB(0.0).max_abs(), 1e-7);
    }

    // law algebra
    {
        const double intQ = soliton_constants(g).intQ;
        for (double theta : {1.75, 2.0, 3.0}) {
            const double beta = 2.0 * (theta - 1.0) / (2.0 * theta - 1.0);
            const double nu = beta / (3.0 * beta - 1.0);
            const LawParams p = params_from_nu(nu, intQ);
            t.add("laws-roundtrip theta=" + std::to_string(theta), p.theta - theta, 1e-12);
            const ModulationState st = closed_form(7.0, p);
            const GH gh = g_h(st, p);
            t.add("laws-g-vanishes theta=" + std::to_string(theta),
                  gh.g / (st.b / (st.lambda * st.lambda)), 1e-10);
            t.add("laws-h-vanishes theta=" + std::to_string(theta),
                  gh.h / std::sqrt(st.lambda), 1e-10);
        }
        const LawParams p = params_from_nu(2.0 / 3.0, intQ);
        const auto traj = integrate_laws(closed_form(10.0, p), 100.0, p, 1e-12, 101);
        double dev = 0.0;
        for (const auto& st : traj)
            dev = std::max(dev, std::abs(st.lambda - std::pow(st.s, -p.beta)) /
                                    std::pow(st.s, -p.beta));
        t.add("laws-rk-vs-closed-form max rel dev", dev, 1e-6);
        const TimeMap tm = time_map(traj, p);
        const double exact_T = std::pow(10.0, 1.0 - 3.0 * p.beta) / (3.0 * p.beta - 1.0);
        t.add("laws-time-map T deviation", (tm.T_estimate - exact_T) / exact_T, 1e-6);
    }

    if (as_json) std::cout << json{{"checks", t.entries}, {"pass", t.all_ok}}.dump(2) << '\n';
    return t.all_ok ? 0 : 2;
}

// ---------------------------------------------------------------- profiles
int cmd_profiles(const std::string& dir, double b, const std::string& format) {
    const fs::path out = out_path(dir);
    const ProfileSet& ps = shared_profile_set();
    auto dump = [&](const std::string& name, const Field& f) {
        if (format == "json") {
            std::ofstream os(out / (name + ".json"));
            os << field_to_json(f) << '\n';
        } else {
            save_field_csv((out / (name + ".csv")).string(), f);
        }
    };
    dump("Q", ps.Q);
    dump("R", ps.R);
    dump("P", ps.P);

    json tbl = constants_json();
    tbl["QR"] = ps.QR;
    tbl["PQ"] = ps.PQ;
    tbl["PQprime"] = ps.PQprime;

    if (b != 0.0) {
        const QbWorkspace qb(ps);
        const LocalizedProfile lp = qb.make_Qb(b);
        dump("Qb", lp.Qb);
        dump("PsiB", qb.make_PsiB(b));
        const Field Qt = eval_Q(qb.grid());
        tbl["b"] = b;
        tbl["mass_expansion_error"] =
            std::abs(mass(lp.Qb) - inner_product(Qt, Qt) - 2.0 * b * ps.PQ);
        tbl["energy_expansion_error"] = std::abs(energy(lp.Qb) + b * ps.PQ);
    }
    write_json_file((out / "constants.json").string(), tbl);
    std::cout << "profiles written to " << out << '\n';
    return 0;
}

// ---------------------------------------------------------------- laws
int cmd_laws(double nu, double s0, double s_end, const std::string& dir) {
    const fs::path out = out_path(dir);
    const double intQ = soliton_constants(default_profile_grid()).intQ;
    LawParams p = params_from_nu(nu, intQ);
    p.s0 = s0;
    const auto traj = integrate_laws(closed_form(s0, p), s_end, p, 1e-12, 401);
    const TimeMap tm = time_map(traj, p);

    std::ofstream csv(out / "laws.csv");
    csv << "s,t,lambda,sigma,b,g,h\n";
    csv.precision(17);
    std::vector<double> remaining, lam;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const GH gh = g_h(traj[i], p);
        csv << traj[i].s << ',' << tm.t[i] << ',' << traj[i].lambda << ',' << traj[i].sigma << ','
            << traj[i].b << ',' << gh.g << ',' << gh.h << '\n';
        if (tm.T_estimate - tm.t[i] > 0.0) {
            remaining.push_back(tm.T_estimate - tm.t[i]);
            lam.push_back(traj[i].lambda);
        }
    }
    RunManifest man{"laws", json{{"nu", nu}, {"s0", s0}, {"s_end", s_end}}};
    json summary = man.to_json();
    summary["beta"] = p.beta;
    summary["theta"] = p.theta;
    summary["c0"] = p.c0;
    summary["k"] = p.k;
    summary["rho"] = p.rho;
    summary["T"] = tm.T_estimate;
    summary["T_partial"] = tm.T_partial;
    // fitted d log lambda / d log (T - t); equals nu on the exact family
    summary["nu_check"] = loglog_slope(remaining, lam);
    write_json_file((out / "summary.json").string(), summary);
    std::cout << "laws written to " << out << '\n';
    return 0;
}

// ---------------------------------------------------------------- tail
int cmd_tail(double theta, double x0, double t_end, double c0_opt, const std::string& dir,
             std::size_t n, double left, double right) {
    const fs::path out = out_path(dir);
    const double intQ = soliton_constants(default_profile_grid()).intQ;
    const double c0 = c0_opt != 0.0
                          ? c0_opt
                          : -0.5 * intQ * (theta - 1.0) * std::pow(2.0 * theta - 1.0, theta - 1.0);
    const TailSpec spec{c0, theta, x0};
    const Grid1D box = Grid1D::periodic(left, right, n);
    const Field f0_raw = build_f0(box, spec);
    const double taper_frac = 0.1;
    const Field f0 = taper_right(f0_raw, taper_frac);

    EvolutionConfig cfg{box};
    cfg.snapshot_dt = t_end;
    const auto start = std::chrono::steady_clock::now();
    Trajectory traj = evolve(f0, t_end, cfg);
    const Field& ft = traj.snapshots.back();
    const Field ft_probe = step(ft, cfg.max_dt(), cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const double cap = box.right() - taper_frac * box.length();
    const auto rep = check_tail_persistence(ft, f0_raw, t_end, spec, cap, &ft_probe, cfg.max_dt());

    save_field_csv((out / "f0.csv").string(), f0_raw);
    save_field_csv((out / "ft.csv").string(), ft);
    RunManifest man{"tail", json{{"theta", theta}, {"x0", x0}, {"c0", c0}, {"t", t_end},
                                 {"n", n}, {"left", left}, {"right", right}}};
    json j = man.to_json();
    j["region_left"] = rep.region_left;
    j["region_right"] = rep.region_right;
    j["supW0"] = rep.supW0;
    j["supW1"] = rep.supW1;
    j["sup_dt_weighted"] = rep.sup_dt;
    j["mass_drift_max"] = traj.mass_drift.back();
    j["wall_time_s"] = wall;
    const TailEnvelope env = f0_envelope(box, spec);
    j["envelope_C0"] = env.C0;
    j["envelope_C1"] = env.C1;
    j["envelope_C2"] = env.C2;
    write_json_file((out / "report.json").string(), j);
    std::cout << "tail report written to " << out << '\n';
    return 0;
}

// ---------------------------------------------------------------- evolve
Field initial_from_recipe(const json& init, const Grid1D& box) {
    const std::string recipe = init.at("recipe").get<std::string>();
    if (recipe == "zero") return Field(box);
    if (recipe == "gaussian") {
        const double a = init.value("amplitude", 1e-3);
        const double wdt = init.value("width", 1.0);
        const double x0 = init.value("center", 0.0);
        return make_field(box, [&](double x) {
            return a * std::exp(-(x - x0) * (x - x0) / (wdt * wdt));
        });
    }
    if (recipe == "soliton") {
        const double lambda0 = init.value("lambda0", 1.0);
        const double sigma0 = init.value("sigma0", 0.0);
        return make_field(box, [&](double x) {
            return Q_value((x - sigma0) / lambda0) / std::sqrt(lambda0);
        });
    }
    if (recipe == "tail") {
        const TailSpec spec{init.at("c0").get<double>(), init.at("theta").get<double>(),
                            init.at("x0").get<double>()};
        return taper_right(build_f0(box, spec), init.value("taper_frac", 0.1));
    }
    if (recipe == "csv") return load_field_csv(init.at("path").get<std::string>());
    throw std::invalid_argument("unknown initial-data recipe: " + recipe);
}

int cmd_evolve(const std::string& config_path) {
    std::ifstream is(config_path);
    if (!is) throw std::runtime_error("cannot open config: " + config_path);
    const json cfgj = json::parse(is);

    const auto& boxj = cfgj.at("box");
    const Grid1D box = Grid1D::periodic(boxj.at("left").get<double>(),
                                        boxj.at("right").get<double>(),
                                        boxj.at("n").get<std::size_t>());
    EvolutionConfig cfg{box};
    cfg.dt = cfgj.value("dt", 0.0);
    cfg.cfl_c = cfgj.value("cfl_c", 1.0);
    cfg.dealias_frac = cfgj.value("dealias_frac", 2.0 / 3.0);
    cfg.snapshot_dt = cfgj.value("snapshot_dt", 0.0);
    const double t_end = cfgj.at("t_end").get<double>();
    const fs::path out = out_path(cfgj.value("out_dir", "run"));

    const Field u0 = initial_from_recipe(cfgj.at("initial"), box);

    const auto start = std::chrono::steady_clock::now();
    const Trajectory traj = evolve(u0, t_end, cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json snaps = json::array();
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%06zu.csv", i);
        save_field_csv((out / name).string(), traj.snapshots[i]);
        snaps.push_back(name);
    }
    double mdrift = 0.0, edrift = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        mdrift = std::max(mdrift, std::abs(traj.mass_drift[i]));
        edrift = std::max(edrift, std::abs(traj.energy_drift[i]));
    }
    RunManifest man{"evolve", cfgj};
    json j = man.to_json();
    j["times"] = traj.times;
    j["snapshots"] = snaps;
    j["mass_drift_max"] = mdrift;
    j["energy_drift_max"] = edrift;
    j["wall_time_s"] = wall;
    write_json_file((out / "manifest.json").string(), j);
    std::cout << "evolution written to " << out << '\n';
    return 0;
}

// ---------------------------------------------------------------- track/report plumbing
void write_track_outputs(const TrackSeries& ts, const LawParams& p, const fs::path& out,
                         json extra) {
    std::ofstream csv(out / "modulation.csv");
    csv << "s,t,lambda,sigma,b,g,h,NB,F,H,res_lambda,res_sigma,newton_iters\n";
    csv.precision(17);
    for (std::size_t i = 0; i < ts.s.size(); ++i)
        csv << ts.s[i] << ',' << ts.t[i] << ',' << ts.lambda[i] << ',' << ts.sigma[i] << ','
            << ts.b[i] << ',' << ts.g[i] << ',' << ts.h[i] << ',' << ts.NB[i] << ',' << ts.F[i]
            << ',' << ts.H[i] << ',' << ts.res_lambda[i] << ',' << ts.res_sigma[i] << ','
            << ts.newton_iterations[i] << '\n';

    json rep = std::move(extra);
    rep["budget_violation_fraction"] = ts.budget_violation_fraction;
    rep["budget_fit_C"] = ts.budget_fit_C;
    rep["truncated"] = ts.truncated;
    if (ts.truncated) rep["truncation_reason"] = ts.truncation_reason;
    // soft corridor: b(s) s / beta within +-30% over the window
    if (!ts.b.empty()) {
        double worst = 0.0;
        for (std::size_t i = 0; i < ts.b.size(); ++i)
            worst = std::max(worst, std::abs(ts.b[i] * ts.s[i] / p.beta - 1.0));
        rep["bs_corridor_max_rel_dev"] = worst;
    }
    write_json_file((out / "report.json").string(), rep);
}

// ---------------------------------------------------------------- decompose
int cmd_decompose(const std::string& manifest_path, double nu, double s0,
                  const std::string& dir) {
    std::ifstream is(manifest_path);
    if (!is) throw std::runtime_error("cannot open manifest: " + manifest_path);
    const json man = json::parse(is);
    const fs::path base = fs::path(manifest_path).parent_path();
    const fs::path out = out_path(dir);

    Trajectory traj, f_traj;
    traj.times = man.at("times").get<std::vector<double>>();
    f_traj.times = traj.times;
    for (const auto& name : man.at("snapshots")) {
        traj.snapshots.push_back(load_field_csv((base / name.get<std::string>()).string()));
        f_traj.snapshots.push_back(Field(traj.snapshots.back().grid()));
    }
    if (man.contains("f_snapshots")) {
        f_traj.snapshots.clear();
        for (const auto& name : man.at("f_snapshots"))
            f_traj.snapshots.push_back(load_field_csv((base / name.get<std::string>()).string()));
    }

    const double intQ = soliton_constants(default_profile_grid()).intQ;
    LawParams p = params_from_nu(nu, intQ);
    p.s0 = s0;
    const QbWorkspace qb(shared_profile_set());
    const Decomposer dec(qb, default_profile_grid());
    const WeightFamily w = make_weight_family(default_profile_grid(), p.B, p.k);

    const TrackSeries ts = track(traj, f_traj, p, dec, w);
    RunManifest rman{"decompose", json{{"manifest", manifest_path}, {"nu", nu}, {"s0", s0}}};
    write_track_outputs(ts, p, out, rman.to_json());
    std::cout << "decomposition written to " << out << '\n';
    return ts.truncated ? 3 : 0;
}

// ---------------------------------------------------------------- blowup
int cmd_blowup(double nu, double s0, double x0, double lambda_drop, std::size_t n,
               double box_left, double box_right, const std::string& dir) {
    const fs::path out = out_path(dir);
    const double intQ = soliton_constants(default_profile_grid()).intQ;
    LawParams p = params_from_nu(nu, intQ);
    p.s0 = s0;
    p.x0 = x0;

    const ModulationState init = closed_form(s0, p);
    const double sigma0 = init.sigma;
    const double b0 = init.b;
    const double lambda0 = lambda0_midpoint(p, sigma0);

    // window from the closed-form clock, with margin
    const double s_target = s0 * std::pow(lambda_drop, 1.0 / p.beta);
    const double t_end = 1.15 * (std::pow(s0, 1.0 - 3.0 * p.beta) -
                                 std::pow(s_target, 1.0 - 3.0 * p.beta)) /
                         (3.0 * p.beta - 1.0);

    const Grid1D box = Grid1D::periodic(box_left, box_right, n);
    const TailSpec spec{p.c0, p.theta, x0};
    const Field f0 = taper_right(build_f0(box, spec), 0.1);

    const QbWorkspace qb(shared_profile_set());
    const Field eps0(default_profile_grid());
    const Field U0 = build_U0(p, lambda0, sigma0, b0, eps0, f0, qb);

    EvolutionConfig cfg{box};
    cfg.snapshot_dt = t_end / 200.0;
    const auto start = std::chrono::steady_clock::now();
    Trajectory traj, f_traj;
    try {
        traj = evolve(U0, t_end, cfg);
        f_traj = evolve(f0, t_end, cfg);
    } catch (const BlowupDetected& e) {
        std::cerr << "numerical blow-up detected at t = " << e.last_valid_time() << '\n';
        return 4;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const Decomposer dec(qb, default_profile_grid());
    const WeightFamily w = make_weight_family(default_profile_grid(), p.B, p.k);
    const TrackSeries ts = track(traj, f_traj, p, dec, w);

    json rep;
    rep["wall_time_s"] = wall;
    rep["lambda0"] = lambda0;
    rep["sigma0"] = sigma0;
    rep["b0"] = b0;
    rep["t_end"] = t_end;
    if (ts.s.size() >= 3) {
        std::vector<double> ls, ll;
        for (std::size_t i = 0; i < ts.s.size(); ++i) {
            ls.push_back(std::log(ts.s[i]));
            ll.push_back(std::log(ts.lambda[i]));
        }
        const double slope = linear_slope(ls, ll);
        rep["dloglambda_dlogs"] = slope;
        rep["target_minus_beta"] = -p.beta;
        rep["lambda_drop_achieved"] = ts.lambda.front() / ts.lambda.back();

        // rate fit against T - t
        std::vector<double> gradnorm;
        for (const auto& snap : traj.snapshots)
            gradnorm.push_back(norm_L2(differentiate(snap, 1)));
        std::vector<ModulationState> ms;
        for (std::size_t i = 0; i < ts.s.size(); ++i)
            ms.push_back(ModulationState{ts.s[i], ts.t[i], ts.lambda[i], ts.sigma[i], ts.b[i]});
        const TimeMap tm = time_map(ms, p);
        std::vector<double> lt, lg;
        for (std::size_t i = 0; i < ts.s.size(); ++i) {
            const double rem = tm.T_estimate - tm.t[i];
            if (rem > 0.0 && gradnorm[i] > 0.0) {
                lt.push_back(std::log(rem));
                lg.push_back(std::log(gradnorm[i]));
            }
        }
        rep["T_estimate"] = tm.T_estimate + ts.t.front();
        rep["dloggrad_dlogTminust"] = linear_slope(lt, lg);
        rep["target_minus_nu"] = -p.nu;
        double g_dev = 0.0;
        const double g_budget =
            std::abs(ts.g.front()) * 3.0 + std::pow(s0, 2.0 * p.beta - 1.0 - 4.0 * p.rho);
        for (double gv : ts.g) g_dev = std::max(g_dev, std::abs(gv));
        rep["g_max"] = g_dev;
        rep["g_budget"] = g_budget;
        double res_ratio = 0.0;
        for (std::size_t i = 1; i + 1 < ts.s.size(); ++i)
            res_ratio = std::max(res_ratio, ts.res_lambda[i] /
                                                (ts.NB[i] + std::pow(ts.s[i], -2.0)));
        rep["modulation_residual_over_budget_max"] = res_ratio;
    }
    write_track_outputs(ts, p, out, std::move(rep));
    std::cout << "blow-up experiment written to " << out << '\n';
    return ts.truncated ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for quintic gKdV soliton blow-up"};
    app.require_subcommand(1);

    auto* c_const = app.add_subcommand("constants", "print soliton constants as JSON");

    std::string dir = "out";
    double b = 0.0;
    std::string format = "csv";
    auto* c_prof = app.add_subcommand("profiles", "emit Q, R, P and the constants table");
    c_prof->add_option("--out", dir);
    c_prof->add_option("--b", b, "also emit Q_b and Psi_b for this drift value");
    c_prof->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

    double nu = 2.0 / 3.0, s0 = 10.0, s_end = 100.0;
    auto* c_laws = app.add_subcommand("laws", "closed-form and integrated modulation laws");
    c_laws->add_option("--nu", nu)->required();
    c_laws->add_option("--s0", s0);
    c_laws->add_option("--s-end", s_end);
    c_laws->add_option("--out", dir);

    double theta = 2.0, x0 = 100.0, t_tail = 5.0, c0 = 0.0;
    std::size_t n_tail = 1u << 15;
    double tail_left = -200.0, tail_right = 1600.0;
    auto* c_tail = app.add_subcommand("tail", "build f0, evolve it, check persistence");
    c_tail->add_option("--theta", theta);
    c_tail->add_option("--x0", x0);
    c_tail->add_option("--t", t_tail);
    c_tail->add_option("--c0", c0, "override the law-consistent default");
    c_tail->add_option("--n", n_tail);
    c_tail->add_option("--left", tail_left);
    c_tail->add_option("--right", tail_right);
    c_tail->add_option("--out", dir);

    std::string config;
    auto* c_evolve = app.add_subcommand("evolve", "run the PDE from a JSON config");
    c_evolve->add_option("--config", config)->required()->check(CLI::ExistingFile);

    std::string manifest;
    double dec_nu = 2.0 / 3.0, dec_s0 = 50.0;
    auto* c_dec = app.add_subcommand("decompose", "track modulation parameters of a run");
    c_dec->add_option("--run", manifest)->required()->check(CLI::ExistingFile);
    c_dec->add_option("--nu", dec_nu);
    c_dec->add_option("--s0", dec_s0);
    c_dec->add_option("--out", dir);

    double bl_nu = 2.0 / 3.0, bl_s0 = 50.0, bl_x0 = 20.0, drop = 1.5;
    std::size_t bl_n = 1u << 14;
    double bl_left = -30.0, bl_right = 90.0;
    auto* c_blow = app.add_subcommand("blowup", "full blow-up window experiment");
    c_blow->add_option("--nu", bl_nu);
    c_blow->add_option("--s0", bl_s0);
    c_blow->add_option("--x0", bl_x0);
    c_blow->add_option("--lambda-drop", drop);
    c_blow->add_option("--n", bl_n);
    c_blow->add_option("--left", bl_left);
    c_blow->add_option("--right", bl_right);
    c_blow->add_option("--out", dir);

    bool as_json = false;
    std::string fault;
    auto* c_ver = app.add_subcommand("verify-all", "run the identity suite");
    c_ver->add_flag("--json", as_json, "machine-readable report");
    c_ver->add_option("--inject-fault", fault, "testing hook (q-scale)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_const->parsed()) {
            std::cout << constants_json().dump(2) << '\n';
            return 0;
        }
        if (c_prof->parsed()) return cmd_profiles(dir, b, format);
        if (c_laws->parsed()) return cmd_laws(nu, s0, s_end, dir);
        if (c_tail->parsed())
            return cmd_tail(theta, x0, t_tail, c0, dir, n_tail, tail_left, tail_right);
        if (c_evolve->parsed()) return cmd_evolve(config);
        if (c_dec->parsed()) return cmd_decompose(manifest, dec_nu, dec_s0, dir);
        if (c_blow->parsed())
            return cmd_blowup(bl_nu, bl_s0, bl_x0, drop, bl_n, bl_left, bl_right, dir);
        if (c_ver->parsed()) return cmd_verify_all(as_json, fault);
    } catch (const BlowupDetected& e) {
        std::cerr << "numerical blow-up detected at t = " << e.last_valid_time() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
