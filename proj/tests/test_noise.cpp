#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "macroent/mcsim.hpp"
#include "macroent/quantum.hpp"
#include "macroent/rng.hpp"
#include "macroent/witness.hpp"
#include "oracles.hpp"

using namespace macroent;

namespace {
// closed-form crossings for the canonical qubit scenario
const double kLambdaStar = (3.0 - std::sqrt(1.0 + 4.0 * std::sqrt(2.0))) / 2.0;
const double kLossStar = 2.0 - std::sqrt(2.0);
}  // namespace

TEST_CASE("noise spec validation") {
    CHECK_NOTHROW((NoiseSpec{NoiseSpec::Kind::depolarize, 0.5}.validate()));
    CHECK_THROWS((NoiseSpec{NoiseSpec::Kind::depolarize, 1.2}.validate()));
    CHECK_THROWS((NoiseSpec{NoiseSpec::Kind::loss, -0.1}.validate()));
    CHECK_THROWS((NoiseSpec{NoiseSpec::Kind::povm, -0.01}.validate()));
    CHECK_NOTHROW((NoiseSpec{NoiseSpec::Kind::povm, 0.1}.validate()));
}

TEST_CASE("level zero reduces to the noiseless forms") {
    SplitMix64 rng = substream(44, 1);
    for (int trial = 0; trial < 10; ++trial) {
        const PairScenario s = oracle::random_scenario(trial % 2 ? 3 : 2, rng);
        for (NoiseSpec::Kind kind : {NoiseSpec::Kind::depolarize, NoiseSpec::Kind::loss}) {
            CHECK(std::abs(f_iid_noisy(s, {kind, 0.0}).f - f_iid(s).f) < 1e-12);
            CHECK(std::abs(f_avg_noisy(s, {kind, 0.0}).f - f_avg(s).f) < 1e-12);
        }
    }
}

TEST_CASE("depolarized witness equals the witness of the depolarized state") {
    SplitMix64 rng = substream(44, 2);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = trial % 2 ? 3 : 2;
        const PairScenario s = oracle::random_scenario(d, rng);
        for (double lambda : {0.1, 0.5, 0.9}) {
            PairScenario mixed = s;
            mixed.sigma = depolarize_pair(s.sigma, DepolarizingChannel{d, lambda});
            CHECK(std::abs(f_iid_noisy(s, {NoiseSpec::Kind::depolarize, lambda}).f -
                           f_iid(mixed).f) < 1e-12);
            CHECK(std::abs(f_avg_noisy(s, {NoiseSpec::Kind::depolarize, lambda}).f -
                           f_avg(mixed).f) < 1e-12);
        }
    }
}

TEST_CASE("full depolarization leaves a separable state") {
    SplitMix64 rng = substream(44, 3);
    for (int trial = 0; trial < 5; ++trial) {
        const PairScenario s = oracle::random_scenario(trial % 2 ? 3 : 2, rng);
        CHECK(f_iid_noisy(s, {NoiseSpec::Kind::depolarize, 1.0}).f >= -1e-12);
        CHECK(f_avg_noisy(s, {NoiseSpec::Kind::depolarize, 1.0}).f >= -1e-12);
    }
}

TEST_CASE("qubit depolarization crossing") {
    const PairScenario s = rme_state();
    CHECK(std::abs(f_iid_noisy(s, {NoiseSpec::Kind::depolarize, kLambdaStar}).f) < 1e-12);
    CHECK(f_iid_noisy(s, {NoiseSpec::Kind::depolarize, kLambdaStar - 1e-3}).f < 0.0);
    CHECK(f_iid_noisy(s, {NoiseSpec::Kind::depolarize, kLambdaStar + 1e-3}).f > 0.0);
    CHECK(kLambdaStar == doctest::Approx(0.21).epsilon(0.01));
}

TEST_CASE("qubit loss crossing") {
    const PairScenario s = rme_state();
    CHECK(std::abs(f_iid_noisy(s, {NoiseSpec::Kind::loss, kLossStar}).f) < 1e-12);
    CHECK(f_iid_noisy(s, {NoiseSpec::Kind::loss, kLossStar - 1e-3}).f < 0.0);
    CHECK(f_iid_noisy(s, {NoiseSpec::Kind::loss, kLossStar + 1e-3}).f > 0.0);

    // total loss kills every term
    CHECK(f_iid_noisy(s, {NoiseSpec::Kind::loss, 1.0}).f == 0.0);
    CHECK(f_avg_noisy(s, {NoiseSpec::Kind::loss, 1.0}).f == 0.0);
}

TEST_CASE("loss-pattern enumeration matches the closed form") {
    SplitMix64 rng = substream(44, 4);
    const PairScenario random2 = oracle::random_scenario(2, rng);
    for (const PairScenario& s : {rme_state(), random2})
        for (int pairs : {2, 3})
            for (double p : {0.1, 0.3}) {
                const WitnessReport enumerated = exact_loss_oracle(s, pairs, p);
                const WitnessReport closed = f_iid_noisy(s, {NoiseSpec::Kind::loss, p});
                CHECK(std::abs(enumerated.f - closed.f) < 1e-12);
                for (const auto& [name, value] : closed.terms)
                    CHECK(std::abs(enumerated.terms.at(name) - value) < 1e-12);
            }
}

TEST_CASE("report regimes carry the noise level") {
    const PairScenario s = rme_state();
    const WitnessReport depol = f_iid_noisy(s, {NoiseSpec::Kind::depolarize, 0.25});
    CHECK(depol.level == 0.25);
    CHECK(depol.regime != "noiseless");
    const WitnessReport lossy = f_avg_noisy(s, {NoiseSpec::Kind::loss, 0.4});
    CHECK(lossy.level == 0.4);
    CHECK(std::abs(lossy.f - lossy.reconstruct()) < 1e-12);
}

TEST_CASE("povm noise kind is rejected by the closed-form paths") {
    const PairScenario s = rme_state();
    CHECK_THROWS(f_iid_noisy(s, {NoiseSpec::Kind::povm, 0.05}));
    CHECK_THROWS(f_avg_noisy(s, {NoiseSpec::Kind::povm, 0.05}));
}
