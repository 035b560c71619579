#include "macroent/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace macroent {

using nlohmann::json;

json to_json(const WitnessReport& r) {
    json j;
    j["f"] = r.f;
    j["terms"] = r.terms;
    j["regime"] = r.regime;
    j["level"] = r.level;
    j["q"] = r.q.has_value() ? json(*r.q) : json(nullptr);
    return j;
}

json to_json(const ThresholdResult& r) {
    return {{"parameter", r.parameter},
            {"critical_value", r.critical_value},
            {"bracket", {r.bracket[0], r.bracket[1]}},
            {"iterations", r.iterations},
            {"residual", r.residual}};
}

json to_json(const SweepTable& t) {
    json intervals = json::array();
    for (const auto& iv : t.negative_intervals) intervals.push_back({iv[0], iv[1]});
    return {{"parameter", t.parameter},
            {"grid", t.grid},
            {"values", t.values},
            {"negative_intervals", intervals}};
}

namespace {

const char* bipartition_name(RunConfig::Bipartition b) {
    switch (b) {
        case RunConfig::Bipartition::fixed_split: return "fixed_split";
        case RunConfig::Bipartition::fixed_q: return "fixed_q";
        case RunConfig::Bipartition::random_q: return "random_q";
    }
    return "fixed_split";
}

}  // namespace

json to_json(const McEstimate& e) {
    json terms;
    for (const auto& [name, pair] : e.terms) terms[name] = {pair.first, pair.second};
    return {{"f_hat", e.f_hat},
            {"stderr", e.std_error},
            {"terms", terms},
            {"config",
             {{"pairs", e.config.pairs},
              {"shots", e.config.shots},
              {"loss_p", e.config.loss_p},
              {"depolarize_lambda", e.config.depolarize_lambda},
              {"bipartition", bipartition_name(e.config.bipartition)},
              {"q", e.config.q},
              {"seed", e.config.seed}}}};
}

json to_json(const OptResult& r) {
    return {{"best_f", r.best_f},
            {"scenario", scenario_to_json(r.scenario)},
            {"starts", r.starts},
            {"seed", r.seed},
            {"per_start_bests", r.per_start_bests}};
}

namespace {

json complex_list(const CVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
    return out;
}

json matrix_list(const CMatrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) out.push_back({m(i, k).real(), m(i, k).imag()});
    return out;
}

CMatrix matrix_from_list(const json& j, int d, const char* what) {
    if (!j.is_array() || static_cast<int>(j.size()) != d * d)
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(d * d) +
                                    " complex entries");
    CMatrix m(d, d);
    for (int i = 0; i < d * d; ++i) {
        const json& e = j[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw std::invalid_argument(std::string(what) + ": entries must be [re, im] pairs");
        m(i / d, i % d) = Complex(e[0].get<double>(), e[1].get<double>());
    }
    return m;
}

}  // namespace

json scenario_to_json(const PairScenario& s) {
    s.validate();
    const Ket ket = dominant_ket(s.sigma, s.dim * s.dim);
    return {{"dim", s.dim},
            {"state", complex_list(ket.amplitudes)},
            {"observables",
             {{"A1", matrix_list(s.a1.matrix)},
              {"A2", matrix_list(s.a2.matrix)},
              {"B1", matrix_list(s.b1.matrix)},
              {"B2", matrix_list(s.b2.matrix)}}}};
}

PairScenario scenario_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("state") || !j.contains("observables"))
        throw std::invalid_argument("scenario JSON needs dim, state and observables");
    if (!j["dim"].is_number_integer()) throw std::invalid_argument("dim must be an integer");
    const int d = j["dim"].get<int>();
    if (d < 2) throw std::invalid_argument("dim must be at least 2");

    const json& st = j["state"];
    if (!st.is_array() || static_cast<int>(st.size()) != d * d)
        throw std::invalid_argument("state: expected a flattened ket with dim^2 entries");
    Ket ket;
    ket.dim = d * d;
    ket.amplitudes = CVector(d * d);
    for (int i = 0; i < d * d; ++i) {
        const json& e = st[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw std::invalid_argument("state entries must be [re, im] pairs");
        ket.amplitudes[i] = Complex(e[0].get<double>(), e[1].get<double>());
    }
    ket.validate();

    const json& obs = j["observables"];
    PairScenario s;
    s.dim = d;
    s.sigma = ket.density();
    const std::pair<const char*, Observable*> slots[4] = {
        {"A1", &s.a1}, {"A2", &s.a2}, {"B1", &s.b1}, {"B2", &s.b2}};
    for (const auto& [name, target] : slots) {
        if (!obs.contains(name))
            throw std::invalid_argument(std::string("observables missing ") + name);
        target->matrix = matrix_from_list(obs[name], d, name);
        target->norm_bound = 1.0;
        target->validate();
    }
    s.validate();
    return s;
}

PairScenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("scenario file is not valid JSON: " + std::string(e.what()));
    }
    return scenario_from_json(j);
}

void save_scenario_file(const PairScenario& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << scenario_to_json(s).dump(2) << "\n";
}

}  // namespace macroent
