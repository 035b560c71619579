#include "macroent/robustness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace macroent {

void SweepTable::validate() const {
    if (grid.size() != values.size())
        throw std::invalid_argument("sweep grid and values differ in length");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("sweep grid must be strictly increasing");
}

ThresholdResult find_threshold(const std::function<double(double)>& witness, double lo, double hi,
                               double tol, const std::string& parameter_name) {
    if (!(lo < hi)) throw std::invalid_argument("bracket must satisfy lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    double flo = witness(lo), fhi = witness(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi))
        throw std::runtime_error("non-finite witness value at bracket endpoint");
    if (flo == 0.0) return {parameter_name, lo, {lo, hi}, 0, 0.0};
    if (fhi == 0.0) return {parameter_name, hi, {lo, hi}, 0, 0.0};
    if ((flo < 0.0) == (fhi < 0.0))
        throw std::invalid_argument("witness does not change sign across the bracket");
    const bool neg_lo = flo < 0.0;
    for (int iters = 1; iters <= 200; ++iters) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = witness(mid);
        if (!std::isfinite(fmid))
            throw std::runtime_error("non-finite witness value during bisection");
        if (hi - lo < tol && std::abs(fmid) <= tol)
            return {parameter_name, mid, {lo, hi}, iters, std::abs(fmid)};
        if (fmid == 0.0) return {parameter_name, mid, {lo, hi}, iters, 0.0};
        if ((fmid < 0.0) == neg_lo)
            lo = mid;
        else
            hi = mid;
    }
    throw std::runtime_error("bisection failed to reach the requested tolerance");
}

namespace {

std::function<double(double)> noisy_witness(const PairScenario& s, NoiseSpec::Kind kind,
                                            WitnessForm form) {
    if (kind == NoiseSpec::Kind::povm) {
        return [&s, form](double eps) {
            return form == WitnessForm::iid ? f_iid_povm_worstcase(s, eps).f
                                            : f_avg_povm_worstcase(s, eps).f;
        };
    }
    return [&s, kind, form](double level) {
        const NoiseSpec noise{kind, level};
        return form == WitnessForm::iid ? f_iid_noisy(s, noise).f : f_avg_noisy(s, noise).f;
    };
}

const char* parameter_name(NoiseSpec::Kind kind) {
    switch (kind) {
        case NoiseSpec::Kind::depolarize: return "lambda";
        case NoiseSpec::Kind::loss: return "p";
        case NoiseSpec::Kind::povm: return "epsilon";
        default: throw std::invalid_argument("noise kind has no threshold parameter");
    }
}

}  // namespace

ThresholdResult noise_threshold(const PairScenario& s, NoiseSpec::Kind kind, WitnessForm form,
                                double tol) {
    const char* name = parameter_name(kind);
    const bool adversary = kind == NoiseSpec::Kind::povm;
    if (tol <= 0.0) tol = adversary ? 1e-4 : 1e-10;
    const double domain_hi = adversary ? 0.2 : 1.0;
    const auto witness = noisy_witness(s, kind, form);

    // coarse pre-sweep to seed the bisection bracket
    constexpr int kPre = 11;
    double prev_level = 0.0, prev_f = witness(0.0);
    for (int i = 1; i < kPre; ++i) {
        const double level = domain_hi * i / (kPre - 1);
        const double f = witness(level);
        if (!std::isfinite(prev_f) || !std::isfinite(f))
            throw std::runtime_error("non-finite witness value during pre-sweep");
        if (prev_f == 0.0) return {name, prev_level, {prev_level, level}, 0, 0.0};
        if ((prev_f < 0.0) != (f < 0.0))
            return find_threshold(witness, prev_level, level, tol, name);
        prev_level = level;
        prev_f = f;
    }
    throw std::domain_error("witness does not change sign over the noise domain");
}

namespace {

std::vector<std::array<double, 2>> negative_runs(const std::vector<double>& grid,
                                                 const std::vector<double>& values) {
    std::vector<std::array<double, 2>> runs;
    std::size_t i = 0;
    while (i < values.size()) {
        if (values[i] < 0.0) {
            std::size_t j = i;
            while (j + 1 < values.size() && values[j + 1] < 0.0) ++j;
            runs.push_back({grid[i], grid[j]});
            i = j + 1;
        } else {
            ++i;
        }
    }
    return runs;
}

}  // namespace

SweepTable sweep_q(const PairScenario& s, int steps) {
    if (steps < 2) throw std::invalid_argument("sweep needs at least two grid points");
    SweepTable t;
    t.parameter = "q";
    t.grid.reserve(steps);
    t.values.reserve(steps);
    for (int i = 0; i < steps; ++i) {
        const double q = static_cast<double>(i) / (steps - 1);
        t.grid.push_back(q);
        t.values.push_back(f_q(s, q).f);
    }
    t.negative_intervals = negative_runs(t.grid, t.values);
    t.validate();
    return t;
}

SweepTable sweep_noise(const PairScenario& s, NoiseSpec::Kind kind,
                       const std::vector<double>& grid, WitnessForm form) {
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    const double domain_hi = kind == NoiseSpec::Kind::povm ? 0.2 : 1.0;
    for (double g : grid)
        if (!(g >= 0.0 && g <= domain_hi))
            throw std::invalid_argument("sweep grid point outside the noise domain");
    const auto witness = noisy_witness(s, kind, form);
    SweepTable t;
    t.parameter = parameter_name(kind);
    t.grid = grid;
    for (double g : grid) t.values.push_back(witness(g));
    t.negative_intervals = negative_runs(t.grid, t.values);
    t.validate();
    return t;
}

void write_csv(const SweepTable& t, std::ostream& os) {
    t.validate();
    os << "param,f\n";
    char buf[64];
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t.grid[i], t.values[i]);
        os << buf;
    }
}

void write_csv_file(const SweepTable& t, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(t, os);
    if (!os.good()) throw std::runtime_error("failed writing " + path);
}

}  // namespace macroent
