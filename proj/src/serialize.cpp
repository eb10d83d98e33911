#include "gb2d/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace gb2d {

json complex_to_json(const cxd& z) { return json::array({z.real(), z.imag()}); }

cxd complex_from_json(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw std::runtime_error("parse error at '" + key + "': expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const CMat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index jx = 0; jx < m.cols(); ++jx) row.push_back(complex_to_json(m(i, jx)));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMat matrix_from_json(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) throw std::runtime_error("parse error at '" + key + "': expected non-empty matrix");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw std::runtime_error("parse error at '" + key + "': expected non-empty rows");
    CMat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw std::runtime_error("parse error at '" + key + "': ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                complex_from_json(j[i][c], key);
    }
    return m;
}

json vector_to_json(const CVec& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
    return arr;
}

CVec vector_from_json(const json& j, const std::string& key) {
    if (!j.is_array()) throw std::runtime_error("parse error at '" + key + "': expected array");
    CVec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], key);
    return v;
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["n_samples"] = s.n_samples;
    json users = json::array();
    for (int k = 0; k < s.user_count(); ++k) {
        json u;
        u["codebook"] = matrix_to_json(s.codebooks[k].entries);
        json paths = json::array();
        for (const auto& p : s.channels[k].paths) {
            json pj;
            pj["tau"] = p.tau;
            pj["g"] = complex_to_json(p.amplitude);
            paths.push_back(std::move(pj));
        }
        u["paths"] = std::move(paths);
        u["message"] = vector_to_json(s.messages[k].coords);
        u["positivity"] = s.messages[k].positivity_convention;
        users.push_back(std::move(u));
    }
    j["users"] = std::move(users);
    json sensing;
    sensing["identity"] = s.sensing.identity;
    if (!s.sensing.identity) sensing["entries"] = matrix_to_json(s.sensing.entries);
    j["sensing"] = std::move(sensing);
    j["seed"] = s.seed;
    return j;
}

static const json& require(const json& j, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) throw std::runtime_error("parse error: missing key '" + key + "'");
    return *it;
}

Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.n_samples = require(j, "n_samples").get<int>();
    const json& users = require(j, "users");
    if (!users.is_array() || users.empty())
        throw std::runtime_error("parse error at 'users': expected non-empty array");
    int idx = 0;
    for (const auto& u : users) {
        Codebook cb;
        cb.user_index = idx++;
        cb.entries = matrix_from_json(require(u, "codebook"), "codebook");
        s.codebooks.push_back(std::move(cb));
        ChannelSpec ch;
        for (const auto& pj : require(u, "paths")) {
            PathSpec p;
            p.tau = require(pj, "tau").get<double>();
            p.amplitude = complex_from_json(require(pj, "g"), "g");
            ch.paths.push_back(p);
        }
        s.channels.push_back(std::move(ch));
        Message msg;
        msg.coords = vector_from_json(require(u, "message"), "message");
        msg.positivity_convention = require(u, "positivity").get<bool>();
        s.messages.push_back(std::move(msg));
    }
    const json& sensing = require(j, "sensing");
    if (require(sensing, "identity").get<bool>()) {
        s.sensing = SensingMatrix::make_identity(s.n_samples);
    } else {
        s.sensing.entries = matrix_from_json(require(sensing, "entries"), "sensing.entries");
        s.sensing.identity = false;
    }
    s.seed = require(j, "seed").get<std::uint64_t>();
    return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << scenario_to_json(s).dump(2) << '\n';
    if (!f) throw std::runtime_error("write failure on '" + path + "'");
}

std::pair<Scenario, ValidationReport> load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("parse error in '" + path + "': " + e.what());
    }
    Scenario s = scenario_from_json(j);
    return {s, validate_scenario(s)};
}

json gen_config_to_json(const GenConfig& cfg) {
    json j;
    j["n_samples"] = cfg.n_samples;
    j["user_count"] = cfg.user_count;
    j["path_counts"] = cfg.path_counts;
    j["message_sizes"] = cfg.message_sizes;
    j["sensing_mode"] = cfg.sensing_mode == SensingMode::Identity ? "identity" : "uniform_subsample";
    j["m_measurements"] = cfg.m_measurements;
    j["amplitude_dist"] = cfg.amplitude_dist == AmplitudeDist::ComplexGaussian
                              ? "complex_gaussian"
                              : "unit_modulus_random_phase";
    j["message_mode"] = cfg.message_mode == MessageMode::UnitSphereComplex
                            ? "unit_sphere_complex"
                            : "unit_sphere_positive";
    j["min_separation"] = cfg.min_separation;
    j["cross_user_separation"] = cfg.cross_user_separation;
    j["seed"] = cfg.seed;
    return j;
}

GenConfig gen_config_from_json(const json& j) {
    GenConfig cfg;
    cfg.n_samples = require(j, "n_samples").get<int>();
    cfg.user_count = require(j, "user_count").get<int>();
    cfg.path_counts = require(j, "path_counts").get<std::vector<int>>();
    cfg.message_sizes = require(j, "message_sizes").get<std::vector<int>>();
    const std::string sm = require(j, "sensing_mode").get<std::string>();
    if (sm == "identity")
        cfg.sensing_mode = SensingMode::Identity;
    else if (sm == "uniform_subsample")
        cfg.sensing_mode = SensingMode::UniformSubsample;
    else
        throw std::runtime_error("parse error at 'sensing_mode': unknown value '" + sm + "'");
    if (j.contains("m_measurements")) cfg.m_measurements = j["m_measurements"].get<int>();
    const std::string ad = require(j, "amplitude_dist").get<std::string>();
    if (ad == "complex_gaussian")
        cfg.amplitude_dist = AmplitudeDist::ComplexGaussian;
    else if (ad == "unit_modulus_random_phase")
        cfg.amplitude_dist = AmplitudeDist::UnitModulusRandomPhase;
    else
        throw std::runtime_error("parse error at 'amplitude_dist': unknown value '" + ad + "'");
    const std::string mm = require(j, "message_mode").get<std::string>();
    if (mm == "unit_sphere_complex")
        cfg.message_mode = MessageMode::UnitSphereComplex;
    else if (mm == "unit_sphere_positive")
        cfg.message_mode = MessageMode::UnitSpherePositive;
    else
        throw std::runtime_error("parse error at 'message_mode': unknown value '" + mm + "'");
    if (j.contains("min_separation")) cfg.min_separation = j["min_separation"].get<double>();
    if (j.contains("cross_user_separation"))
        cfg.cross_user_separation = j["cross_user_separation"].get<bool>();
    cfg.seed = require(j, "seed").get<std::uint64_t>();
    return cfg;
}

}  // namespace gb2d
