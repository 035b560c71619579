// Command-line front end: every capability behind one dispatcher with JSON on
// stdout (CSV only via --out) and diagnostics on stderr.
//
// Exit codes: 0 success; 1 when --check finds no violation (f >= 0);
// 2 usage errors; 3 domain errors.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "macroent/json_io.hpp"
#include "macroent/mcsim.hpp"
#include "macroent/optimizer.hpp"
#include "macroent/povm.hpp"
#include "macroent/quantum.hpp"
#include "macroent/robustness.hpp"
#include "macroent/witness.hpp"

namespace {

using namespace macroent;

PairScenario resolve_scenario(const std::string& name) {
    if (name == "rme") return rme_state();
    if (name == "ime") return ime_state();
    return load_scenario_file(name);
}

NoiseSpec::Kind noise_kind(const std::string& name) {
    if (name == "depolarize") return NoiseSpec::Kind::depolarize;
    if (name == "loss") return NoiseSpec::Kind::loss;
    return NoiseSpec::Kind::povm;
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t flag_value) {
    if (opt->count() > 0) return flag_value;
    if (const char* env = std::getenv("MACROENT_SEED"))
        return std::strtoull(env, nullptr, 10);
    return flag_value;
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

int usage_error(const std::string& message) {
    std::cerr << "usage error: " << message << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"macroscopic entanglement witness toolkit"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads,
                   "cap on worker concurrency (accepted on every subcommand)");

    // witness
    auto* wit = app.add_subcommand("witness", "evaluate a witness form on a scenario");
    std::string w_scenario = "rme", w_mode = "iid", w_noise;
    double w_q = 0.5, w_level = 0.0;
    bool w_check = false;
    wit->add_option("--scenario", w_scenario, "rme | ime | scenario JSON file");
    wit->add_option("--mode", w_mode, "iid | avg | q")
        ->check(CLI::IsMember({"iid", "avg", "q"}));
    wit->add_option("--q", w_q, "bipartition probability for --mode q");
    wit->add_option("--noise", w_noise, "depolarize | loss | povm")
        ->check(CLI::IsMember({"depolarize", "loss", "povm"}));
    wit->add_option("--level", w_level, "noise level");
    wit->add_flag("--check", w_check, "exit 1 when f >= 0 (no violation)");

    // sweep
    auto* swp = app.add_subcommand("sweep", "tabulate f over a parameter grid");
    std::string s_scenario = "ime", s_param = "q", s_out, s_mode = "iid";
    int s_steps = 101;
    swp->add_option("--scenario", s_scenario, "rme | ime | scenario JSON file");
    swp->add_option("--param", s_param, "q | lambda | p | epsilon")
        ->check(CLI::IsMember({"q", "lambda", "p", "epsilon"}));
    swp->add_option("--steps", s_steps, "grid points including endpoints");
    swp->add_option("--mode", s_mode, "iid | avg witness form for noise sweeps")
        ->check(CLI::IsMember({"iid", "avg"}));
    swp->add_option("--out", s_out, "write the table as CSV to this path");

    // threshold
    auto* thr = app.add_subcommand("threshold", "locate the witness zero crossing");
    std::string t_scenario = "rme", t_noise = "depolarize", t_mode = "iid";
    double t_tol = 0.0;
    bool t_check = false;
    thr->add_option("--scenario", t_scenario, "rme | ime | scenario JSON file");
    thr->add_option("--noise", t_noise, "depolarize | loss | povm")
        ->check(CLI::IsMember({"depolarize", "loss", "povm"}));
    thr->add_option("--mode", t_mode, "iid | avg")->check(CLI::IsMember({"iid", "avg"}));
    thr->add_option("--tol", t_tol, "bisection tolerance (0 = per-kind default)");
    thr->add_flag("--check", t_check, "exit 1 when the noiseless f >= 0");

    // optimize
    auto* opt = app.add_subcommand("optimize", "multistart search for maximal violation");
    std::string o_target = "rme", o_mode = "spin-plane", o_fix_state;
    int o_dim = 0, o_starts = 64;
    std::uint64_t o_seed = 0;
    opt->add_option("--target", o_target, "rme | ime")->check(CLI::IsMember({"rme", "ime"}));
    opt->add_option("--dim", o_dim, "single-particle dimension (rme: 2; ime: 2 or 3)");
    opt->add_option("--starts", o_starts, "number of random starts");
    auto* o_seed_opt = opt->add_option("--seed", o_seed, "RNG seed (or MACROENT_SEED)");
    opt->add_option("--mode", o_mode, "spin-plane | general (rme only)")
        ->check(CLI::IsMember({"spin-plane", "general"}));
    opt->add_option("--fix-state", o_fix_state, "phiplus: pin the maximally entangled state")
        ->check(CLI::IsMember({"phiplus"}));

    // simulate
    auto* sim = app.add_subcommand("simulate", "finite-N Monte Carlo witness estimate");
    std::string m_scenario = "rme", m_bipartition = "split";
    int m_pairs = 64, m_shots = 1024;
    double m_loss = 0.0, m_depol = 0.0;
    std::uint64_t m_seed = 0;
    sim->add_option("--scenario", m_scenario, "rme | ime | scenario JSON file");
    sim->add_option("--pairs", m_pairs, "entangled pairs per shot (N)");
    sim->add_option("--shots", m_shots, "runs per measurement setting");
    auto* m_seed_opt = sim->add_option("--seed", m_seed, "RNG seed (or MACROENT_SEED)");
    sim->add_option("--loss", m_loss, "per-particle loss probability");
    sim->add_option("--depolarize", m_depol, "per-particle depolarization strength");
    sim->add_option("--bipartition", m_bipartition, "split | fixed:Q | random");

    // validate
    auto* val = app.add_subcommand("validate", "check a scenario file's invariants");
    std::string v_scenario;
    val->add_option("--scenario", v_scenario, "scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (wit->parsed()) {
            const PairScenario s = resolve_scenario(w_scenario);
            WitnessReport r;
            if (w_mode == "q") {
                if (!w_noise.empty()) return usage_error("--mode q does not combine with --noise");
                r = f_q(s, w_q);
            } else if (w_noise.empty()) {
                r = w_mode == "iid" ? f_iid(s) : f_avg(s);
            } else if (w_noise == "povm") {
                r = w_mode == "iid" ? f_iid_povm_worstcase(s, w_level)
                                    : f_avg_povm_worstcase(s, w_level);
            } else {
                const NoiseSpec noise{noise_kind(w_noise), w_level};
                r = w_mode == "iid" ? f_iid_noisy(s, noise) : f_avg_noisy(s, noise);
            }
            print_json(to_json(r));
            return (w_check && r.f >= 0.0) ? 1 : 0;
        }

        if (swp->parsed()) {
            const PairScenario s = resolve_scenario(s_scenario);
            SweepTable table;
            if (s_param == "q") {
                table = sweep_q(s, s_steps);
            } else {
                if (s_steps < 2) return usage_error("--steps must be at least 2");
                const NoiseSpec::Kind kind = s_param == "lambda" ? NoiseSpec::Kind::depolarize
                                             : s_param == "p"    ? NoiseSpec::Kind::loss
                                                                 : NoiseSpec::Kind::povm;
                const double hi = s_param == "epsilon" ? 0.2 : 1.0;
                std::vector<double> grid;
                for (int i = 0; i < s_steps; ++i)
                    grid.push_back(hi * i / (s_steps - 1));
                const WitnessForm form =
                    s_mode == "iid" ? WitnessForm::iid : WitnessForm::averaged;
                table = sweep_noise(s, kind, grid, form);
            }
            if (!s_out.empty()) write_csv_file(table, s_out);
            print_json(to_json(table));
            return 0;
        }

        if (thr->parsed()) {
            const PairScenario s = resolve_scenario(t_scenario);
            const WitnessForm form = t_mode == "iid" ? WitnessForm::iid : WitnessForm::averaged;
            if (t_check) {
                const double f0 = form == WitnessForm::iid ? f_iid(s).f : f_avg(s).f;
                if (f0 >= 0.0) {
                    std::cerr << "no violation at zero noise (f = " << f0 << ")\n";
                    return 1;
                }
            }
            const ThresholdResult r = noise_threshold(s, noise_kind(t_noise), form, t_tol);
            print_json(to_json(r));
            return 0;
        }

        if (opt->parsed()) {
            const std::uint64_t seed = resolve_seed(o_seed_opt, o_seed);
            OptResult r;
            if (o_target == "rme") {
                if (o_dim != 0 && o_dim != 2) return usage_error("rme search is dim 2");
                const SearchMode mode =
                    o_mode == "general" ? SearchMode::general : SearchMode::spin_plane;
                r = optimize_rme(o_starts, seed, mode, o_fix_state == "phiplus");
            } else {
                if (!o_fix_state.empty()) return usage_error("--fix-state applies to rme only");
                if (o_mode != "spin-plane") return usage_error("ime search is spin-plane only");
                r = optimize_ime(o_dim == 0 ? 3 : o_dim, o_starts, seed);
            }
            print_json(to_json(r));
            return 0;
        }

        if (sim->parsed()) {
            const PairScenario s = resolve_scenario(m_scenario);
            RunConfig cfg;
            cfg.pairs = m_pairs;
            cfg.shots = m_shots;
            cfg.loss_p = m_loss;
            cfg.depolarize_lambda = m_depol;
            cfg.seed = resolve_seed(m_seed_opt, m_seed);
            if (m_bipartition == "split") {
                cfg.bipartition = RunConfig::Bipartition::fixed_split;
            } else if (m_bipartition == "random") {
                cfg.bipartition = RunConfig::Bipartition::random_q;
            } else if (m_bipartition.rfind("fixed:", 0) == 0) {
                cfg.bipartition = RunConfig::Bipartition::fixed_q;
                try {
                    cfg.q = std::stod(m_bipartition.substr(6));
                } catch (const std::exception&) {
                    return usage_error("--bipartition fixed:Q needs a numeric Q");
                }
            } else {
                return usage_error("--bipartition must be split, fixed:Q or random");
            }
            const McEstimate e = cfg.bipartition == RunConfig::Bipartition::fixed_split
                                     ? estimate_f_iid(s, cfg)
                                     : estimate_f_bipartition(s, cfg);
            print_json(to_json(e));
            return 0;
        }

        if (val->parsed()) {
            try {
                const PairScenario s = load_scenario_file(v_scenario);
                print_json({{"valid", true}, {"dim", s.dim}});
                return 0;
            } catch (const std::exception& e) {
                print_json({{"valid", false}, {"error", e.what()}});
                return 3;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
