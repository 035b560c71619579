// Product-level acceptance gate. Each numbered check runs with its stated
// tolerance and runtime budget and prints exactly one [PASS]/[FAIL] line;
// the exit status is the number of failed checks.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "macroent/linalg.hpp"
#include "macroent/mcsim.hpp"
#include "macroent/optimizer.hpp"
#include "macroent/quantum.hpp"
#include "macroent/robustness.hpp"
#include "macroent/rng.hpp"
#include "macroent/witness.hpp"
#include "oracles.hpp"

using namespace macroent;

namespace {

int g_failures = 0;

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

void report(const std::string& label, bool ok, double elapsed, double budget,
            const std::string& detail) {
    const bool in_time = elapsed < budget;
    if (!(ok && in_time)) ++g_failures;
    std::printf("[%s] %s (%.1f s, budget %.0f s)%s%s\n", ok && in_time ? "PASS" : "FAIL",
                label.c_str(), elapsed, budget, detail.empty() ? "" : ": ", detail.c_str());
    std::fflush(stdout);
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

const double kQubitOptimum = 4.0 * (1.0 - std::sqrt(2.0));

}  // namespace

int main() {
    // 1. multistart search recovers the maximal qubit-pair violation
    {
        Timer t;
        const OptResult r = optimize_rme(64, 20261, SearchMode::spin_plane);
        const std::vector<double> sc = schmidt_coefficients(dominant_ket(r.scenario.sigma, 2));
        const bool value_ok = std::abs(r.best_f - kQubitOptimum) <= 1e-6;
        const bool schmidt_ok = sc.size() == 2 && std::abs(sc[0] - std::cos(M_PI / 8)) <= 1e-4 &&
                                std::abs(sc[1] - std::sin(M_PI / 8)) <= 1e-4;
        report("1. qubit pair maximal violation", value_ok && schmidt_ok, t.seconds(), 30,
               "best_f = " + num(r.best_f) + ", schmidt = {" + num(sc[0]) + ", " + num(sc[1]) +
                   "}");
    }

    // 2. bisection reproduces both closed-form qubit noise thresholds
    {
        Timer t;
        const double lam_star = (3.0 - std::sqrt(1.0 + 4.0 * std::sqrt(2.0))) / 2.0;
        const double p_star = 2.0 - std::sqrt(2.0);
        const ThresholdResult lam =
            noise_threshold(rme_state(), NoiseSpec::Kind::depolarize, WitnessForm::iid);
        const ThresholdResult p =
            noise_threshold(rme_state(), NoiseSpec::Kind::loss, WitnessForm::iid);
        const bool ok = std::abs(lam.critical_value - lam_star) <= 1e-9 &&
                        std::abs(p.critical_value - p_star) <= 1e-9;
        report("2. closed-form qubit noise thresholds", ok, t.seconds(), 1,
               "lambda = " + num(lam.critical_value) + ", p = " + num(p.critical_value));
    }

    // 3. worst-case measurement perturbation threshold for the qubit pair
    {
        Timer t;
        const double eps_star = (std::sqrt(2.0) - 1.0) / (3.0 * std::sqrt(2.0));
        const ThresholdResult r =
            noise_threshold(rme_state(), NoiseSpec::Kind::povm, WitnessForm::iid);
        const bool ok = std::abs(r.critical_value - eps_star) <= 1e-3;
        report("3. adversarial measurement threshold (qubit)", ok, t.seconds(), 120,
               "epsilon = " + num(r.critical_value) + ", target " + num(eps_star));
    }

    // 4. canonical qutrit value and the qutrit search optimum
    PairScenario best_ime = ime_state();
    {
        Timer t;
        const double canonical = f_avg(ime_state()).f;
        const OptResult r = optimize_ime(3, 256, 20263);
        best_ime = r.scenario;
        const bool ok = canonical >= -0.22 && canonical <= -0.20 && r.best_f <= -0.20;
        report("4. canonical qutrit averaged witness and search", ok, t.seconds(), 300,
               "f_avg = " + num(canonical) + ", search best = " + num(r.best_f));
    }

    // 5. robustness thresholds of the optimized qutrit configuration
    {
        Timer t;
        const ThresholdResult lam =
            noise_threshold(best_ime, NoiseSpec::Kind::depolarize, WitnessForm::averaged);
        const ThresholdResult p =
            noise_threshold(best_ime, NoiseSpec::Kind::loss, WitnessForm::averaged);
        const ThresholdResult eps =
            noise_threshold(best_ime, NoiseSpec::Kind::povm, WitnessForm::averaged);
        const bool ok = lam.critical_value >= 0.055 && lam.critical_value <= 0.065 &&
                        p.critical_value >= 0.235 && p.critical_value <= 0.245 &&
                        eps.critical_value >= 0.015 && eps.critical_value <= 0.025;
        report("5. qutrit robustness thresholds", ok, t.seconds(), 300,
               "lambda = " + num(lam.critical_value) + ", p = " + num(p.critical_value) +
                   ", epsilon = " + num(eps.critical_value));
    }

    // 6. bipartition-probability sweep: negative support and integral
    {
        Timer t;
        const PairScenario s = ime_state();
        const SweepTable table = sweep_q(s, 101);
        double covered = 0.0;
        for (const auto& iv : table.negative_intervals) covered += iv[1] - iv[0];
        const double h = 1.0 / 100.0;
        double integral = 0.5 * h * (table.values.front() + table.values.back());
        for (std::size_t i = 1; i + 1 < table.values.size(); ++i) integral += h * table.values[i];
        const double avg = f_avg(s).f;
        const bool ok = covered >= 0.90 && std::abs(integral - avg) <= 1e-3;
        report("6. bipartition-probability sweep", ok, t.seconds(), 1,
               "negative fraction = " + num(covered) + ", trapezoid - exact = " +
                   num(integral - avg));
    }

    // 7. negative search results: both searches should find no violation
    {
        Timer t;
        const OptResult qubit_avg = optimize_ime(2, 256, 20267);
        report("7a. qubit averaged-witness search stays nonnegative",
               qubit_avg.best_f >= -1e-6, t.seconds(), 300,
               "search best = " + num(qubit_avg.best_f));
    }
    {
        Timer t;
        const OptResult pinned = optimize_rme(256, 20269, SearchMode::general, true);
        report("7b. fixed maximally entangled state search stays nonnegative",
               pinned.best_f >= -1e-6, t.seconds(), 300,
               "search best = " + num(pinned.best_f));
    }

    // 8. independent oracle equivalences
    {
        Timer t;
        SplitMix64 rng = substream(42, 8);
        double worst_embed = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const int n = trial % 4 + 1;
            const PairScenario s = oracle::random_scenario(2, rng);
            const PairScenario big = oracle::collective_embedding(s, n);
            const WitnessReport lifted =
                f_general(big.sigma, big.a1, big.a2, big.b1, big.b2, {big.dim, big.dim});
            worst_embed = std::max(worst_embed, std::abs(lifted.f - f_iid(s).f));
        }

        double worst_multi = 0.0;
        const PairScenario random3 = oracle::random_scenario(3, rng);
        for (const PairScenario& s : {rme_state(), ime_state(), random3})
            for (double q : {0.2, 0.5, 0.8})
                worst_multi = std::max(
                    worst_multi,
                    std::abs(oracle::multinomial_bipartition(s, 3, q).f - f_q(s, q).f));

        double worst_loss = 0.0;
        const PairScenario random2 = oracle::random_scenario(2, rng);
        for (const PairScenario& s : {rme_state(), random2})
            for (int pairs = 1; pairs <= 4; ++pairs)
                for (double p : {0.0, 0.1, 0.3, 0.7, 1.0})
                    worst_loss = std::max(
                        worst_loss, std::abs(exact_loss_oracle(s, pairs, p).f -
                                             f_iid_noisy(s, {NoiseSpec::Kind::loss, p}).f));

        const bool ok = worst_embed <= 1e-10 && worst_multi <= 1e-10 && worst_loss <= 1e-12;
        report("8. independent oracle equivalences", ok, t.seconds(), 60,
               "embedding gap " + num(worst_embed) + ", assignment-enumeration gap " +
                   num(worst_multi) + ", loss-enumeration gap " + num(worst_loss));
    }

    // 9. separable states never register a violation
    {
        Timer t;
        SplitMix64 rng = substream(42, 9);
        double lowest = 0.0;
        for (int trial = 0; trial < 10000; ++trial) {
            const int d = trial % 2 ? 3 : 2;
            const CMatrix sep = oracle::random_separable(d, rng);
            const WitnessReport r = f_general(
                sep, oracle::random_observable(d, rng), oracle::random_observable(d, rng),
                oracle::random_observable(d, rng), oracle::random_observable(d, rng), {d, d});
            lowest = std::min(lowest, r.f);
        }
        report("9. separable-state soundness", lowest >= -1e-9, t.seconds(), 60,
               "lowest f over 10000 separable draws = " + num(lowest));
    }

    // 10. Monte Carlo estimates land on the exact values
    {
        Timer t;
        RunConfig iid_cfg;
        iid_cfg.pairs = 512;
        iid_cfg.shots = 4096;
        iid_cfg.seed = 271828;
        const McEstimate iid_est = estimate_f_iid(rme_state(), iid_cfg);
        const double iid_gap = std::abs(iid_est.f_hat - kQubitOptimum);

        RunConfig avg_cfg;
        avg_cfg.pairs = 256;
        avg_cfg.shots = 8192;
        avg_cfg.seed = 314159;
        avg_cfg.bipartition = RunConfig::Bipartition::random_q;
        const McEstimate avg_est = estimate_f_bipartition(ime_state(), avg_cfg);
        const double avg_gap = std::abs(avg_est.f_hat - f_avg(ime_state()).f);

        const bool ok =
            iid_gap <= 4.0 * iid_est.std_error && avg_gap <= 4.0 * avg_est.std_error;
        report("10. Monte Carlo convergence", ok, t.seconds(), 180,
               "fixed-split gap = " + num(iid_gap) + " (4se = " + num(4 * iid_est.std_error) +
                   "), random-bipartition gap = " + num(avg_gap) + " (4se = " +
                   num(4 * avg_est.std_error) + ")");
    }

    // 11. collective commutator norm scales as n^(1-2a)
    {
        Timer t;
        Observable sx = spin_plane_observable(2, 0.0);
        Observable sy = spin_plane_observable(2, M_PI / 2);
        double worst = 0.0;
        for (int n : {1, 2, 10, 100})
            for (double alpha : {0.0, 0.5, 1.0}) {
                const double want = 2.0 * std::pow(double(n), 1.0 - 2.0 * alpha);
                const double got = collective_commutator_norm(sx, sy, n, alpha);
                worst = std::max(worst, std::abs(got - want) / want);
            }
        report("11. collective commutator scaling", worst <= 1e-12, t.seconds(), 1,
               "worst relative gap = " + num(worst));
    }

    std::printf("%d of 12 checks failed\n", g_failures);
    return g_failures;
}
