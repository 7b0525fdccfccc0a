#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bernstein.hpp"
#include "density.hpp"
#include "model.hpp"

namespace ougrad {

namespace detail {

[[noreturn]] inline void config_fail(const std::string& what) {
    throw std::domain_error("config: " + what);
}

}  // namespace detail

/// FNV-1a over the compact serialization. Parsed objects re-serialize with
/// sorted keys and no whitespace, so the hash is canonical across formatting.
inline std::uint64_t config_hash(const nlohmann::json& j) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : j.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Bernstein spec: {"kind": "power", "beta": 0.75}, {"kind": "log"},
/// {"kind": "log_power", "eps": 1.0},
/// {"kind": "scaled_sum", "terms": [{"weight": w, "S": {...}}, ...]},
/// {"kind": "composite_power", "base": {...}, "delta": 1.5}.
inline BernsteinFunction bernstein_from_json(const nlohmann::json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "power") return BernsteinFunction::power(j.at("beta").get<double>());
        if (kind == "log") return BernsteinFunction::log_kind();
        if (kind == "log_power") return BernsteinFunction::log_power(j.at("eps").get<double>());
        if (kind == "scaled_sum") {
            std::vector<std::pair<double, BernsteinFunction>> terms;
            for (const auto& t : j.at("terms"))
                terms.emplace_back(t.at("weight").get<double>(), bernstein_from_json(t.at("S")));
            return BernsteinFunction::scaled_sum(std::move(terms));
        }
        if (kind == "composite_power")
            return bernstein_power(bernstein_from_json(j.at("base")), j.at("delta").get<double>());
        detail::config_fail("unknown bernstein kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        detail::config_fail(std::string("bernstein spec: ") + e.what());
    }
}

/// {"S": {...}, "r0": 1.0}; r0 omitted or "inf" means no floor.
inline LowerBoundSpec lower_bound_from_json(const nlohmann::json& j) {
    try {
        LowerBoundSpec spec{bernstein_from_json(j.at("S"))};
        if (j.contains("r0") && !(j.at("r0").is_string() && j.at("r0").get<std::string>() == "inf")) {
            spec.r0 = j.at("r0").get<double>();
            if (!(spec.r0 > 0.0)) detail::config_fail("lower_bound: r0 must be positive");
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        detail::config_fail(std::string("lower_bound: ") + e.what());
    }
}

namespace detail {

inline Vec vec_from_json(const nlohmann::json& j, int d, const char* name) {
    if (!j.is_array() || static_cast<int>(j.size()) != d)
        config_fail(std::string(name) + " must be an array of length dim");
    Vec v(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

// row-major: either a flat array of dim^2 numbers or an array of dim rows
inline Mat mat_from_json(const nlohmann::json& j, int d, const char* name) {
    Mat m = Mat::zero(d, d);
    if (!j.is_array()) config_fail(std::string(name) + " must be an array");
    if (static_cast<int>(j.size()) == d && j.at(0).is_array()) {
        for (int i = 0; i < d; ++i) {
            const auto& row = j.at(static_cast<std::size_t>(i));
            if (static_cast<int>(row.size()) != d) config_fail(std::string(name) + " row length mismatch");
            for (int k = 0; k < d; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
        }
        return m;
    }
    if (static_cast<int>(j.size()) != d * d)
        config_fail(std::string(name) + " must hold dim^2 entries, row-major");
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) m(i, k) = j.at(static_cast<std::size_t>(i * d + k)).get<double>();
    return m;
}

}  // namespace detail

/// Model config:
///   {"dim": d, "A": [...], "b": [...], "Q": [...],
///    "jumps": [{"kind": "gaussian", "sigma2": 1.0, "mass": 1.0, "floor": true},
///              {"kind": "stable", "alpha": 1.5, "scale": 1.0},
///              {"kind": "table", "radius": [...], "profile": [...], "floor": false},
///              {"kind": "floor_cp"}],
///    "lower_bound": {"S": {...}, "r0": 1.0}}
/// A, b, Q, jumps, lower_bound are optional (default zero / absent); the
/// floor_cp jump kind materializes the compound-Poisson floor from lower_bound.
inline LevyModel model_from_json(const nlohmann::json& j, const QuadratureConfig& quad = {}) {
    try {
        const int d = j.at("dim").get<int>();
        if (d < 1 || d > 16) detail::config_fail("dim must be in [1, 16]");
        const Mat A = j.contains("A") ? detail::mat_from_json(j.at("A"), d, "A") : Mat::zero(d, d);
        const Vec b = j.contains("b") ? detail::vec_from_json(j.at("b"), d, "b")
                                      : Vec(static_cast<std::size_t>(d), 0.0);
        const Mat Q = j.contains("Q") ? detail::mat_from_json(j.at("Q"), d, "Q") : Mat::zero(d, d);
        std::optional<LowerBoundSpec> lb;
        if (j.contains("lower_bound")) lb = lower_bound_from_json(j.at("lower_bound"));
        std::vector<JumpComponent> jumps;
        if (j.contains("jumps")) {
            for (const auto& jj : j.at("jumps")) {
                const std::string kind = jj.at("kind").get<std::string>();
                if (kind == "gaussian") {
                    jumps.push_back(JumpComponent::finite_density(
                        JumpDensity::gaussian(d, jj.at("sigma2").get<double>(),
                                              jj.value("mass", 1.0)),
                        jj.value("floor", false)));
                } else if (kind == "stable") {
                    jumps.push_back(JumpComponent::stable_isotropic(jj.at("alpha").get<double>(),
                                                                    jj.value("scale", 1.0)));
                } else if (kind == "table") {
                    jumps.push_back(JumpComponent::finite_density(
                        JumpDensity::radial_table(d, jj.at("radius").get<std::vector<double>>(),
                                                  jj.at("profile").get<std::vector<double>>()),
                        jj.value("floor", false)));
                } else if (kind == "floor_cp") {
                    if (!lb || !lb->has_floor())
                        detail::config_fail("floor_cp jump needs lower_bound with finite r0");
                    jumps.push_back(JumpComponent::floor_cp(*lb, d, quad));
                } else {
                    detail::config_fail("unknown jump kind '" + kind + "'");
                }
            }
        }
        return LevyModel(A, b, Q, std::move(jumps), std::move(lb));
    } catch (const nlohmann::json::exception& e) {
        detail::config_fail(std::string("model: ") + e.what());
    }
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) detail::config_fail("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        detail::config_fail("'" + path + "': " + e.what());
    }
}

struct LoadedModel {
    LevyModel model;
    std::uint64_t hash = 0;
    nlohmann::json raw;
};

inline LoadedModel load_model(const std::string& path, const QuadratureConfig& quad = {}) {
    nlohmann::json j = load_json_file(path);
    return {model_from_json(j, quad), config_hash(j), std::move(j)};
}

struct LoadedBernstein {
    BernsteinFunction S;
    std::uint64_t hash = 0;
    nlohmann::json raw;
};

/// Accepts either a bare Bernstein spec or an object with an "S" key.
inline LoadedBernstein load_bernstein(const std::string& path) {
    nlohmann::json j = load_json_file(path);
    const nlohmann::json& spec = j.contains("S") ? j.at("S") : j;
    return {bernstein_from_json(spec), config_hash(j), std::move(j)};
}

}  // namespace ougrad
