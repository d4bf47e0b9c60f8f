#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fts/errors.hpp"
#include "fts/simulate.hpp"

// JSON model descriptions for the simulator. The schema is documented in docs/config.md.
namespace fts::config {

using nlohmann::json;

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("config field '") + key + "': " + e.what());
    }
}

inline void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + " must be an object");
}

inline sim::Profile parse_profile(const json& j, const std::string& where) {
    if (j.is_number()) return sim::Profile::constant(j.get<double>());
    require_object(j, where);
    const auto kind = get_or<std::string>(j, "kind", "constant");
    sim::Profile p;
    if (kind == "constant") {
        p.kind = sim::Profile::Kind::constant;
    } else if (kind == "harmonic_cosine") {
        p.kind = sim::Profile::Kind::harmonic_cosine;
    } else if (kind == "raised_cosine") {
        p.kind = sim::Profile::Kind::raised_cosine;
    } else {
        throw ParseError(where + ": unknown profile kind '" + kind + "'");
    }
    p.level = get_or(j, "level", 0.0);
    p.amplitude = get_or(j, "amplitude", 0.0);
    p.offset = get_or(j, "offset", 0.0);
    p.cos_weight = get_or(j, "cos_weight", 0.0);
    p.sin_weight = get_or(j, "sin_weight", 0.0);
    p.cycles = get_or(j, "cycles", 1.0);
    p.period = get_or<std::size_t>(j, "period", 0);
    return p;
}

inline Eigen::MatrixXd parse_operator_variances(const json& j, std::size_t dim, const std::string& where) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "exp_sum") return sim::exp_sum_variances(dim);
        if (name == "inverse_power") return sim::inverse_power_variances(dim);
        if (name == "zero") return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        throw ParseError(where + ": unknown variance family '" + name + "'");
    }
    if (!j.is_array() || j.size() != dim) throw ParseError(where + ": expected a family name or " +
                                                           std::to_string(dim) + " rows");
    Eigen::MatrixXd v(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || row.size() != dim) {
            throw ParseError(where + ": row " + std::to_string(r + 1) + " must have " + std::to_string(dim) + " entries");
        }
        for (std::size_t c = 0; c < dim; ++c) {
            if (!row[c].is_number()) throw ParseError(where + ": non-numeric entry");
            v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
        }
    }
    return v;
}

inline std::vector<double> parse_innovations(const json& j, std::size_t dim, const std::string& where) {
    if (j.is_array()) {
        std::vector<double> v;
        for (const auto& x : j) {
            if (!x.is_number()) throw ParseError(where + ": non-numeric variance");
            v.push_back(x.get<double>());
        }
        return v;
    }
    require_object(j, where);
    const auto kind = get_or<std::string>(j, "kind", "exp_ramp");
    if (kind != "exp_ramp") throw ParseError(where + ": unknown innovation family '" + kind + "'");
    return sim::exp_ramp_variances(dim, get_or(j, "scale", 1.0), get_or(j, "rate", 0.1));
}

inline sim::Regime parse_regime(const json& j, std::size_t dim, const std::string& where) {
    require_object(j, where);
    sim::Regime r;
    if (j.contains("lags")) {
        if (!j["lags"].is_array()) throw ParseError(where + ".lags must be an array");
        std::size_t i = 0;
        for (const auto& lag : j["lags"]) {
            const auto label = where + ".lags[" + std::to_string(i++) + "]";
            require_object(lag, label);
            if (!lag.contains("variances") || !lag.contains("norm")) {
                throw ParseError(label + " needs 'variances' and 'norm'");
            }
            r.lags.push_back({parse_operator_variances(lag["variances"], dim, label + ".variances"),
                              parse_profile(lag["norm"], label + ".norm")});
        }
    }
    r.innovation_variances = j.contains("innovation_variances")
                                 ? parse_innovations(j["innovation_variances"], dim, where + ".innovation_variances")
                                 : sim::exp_ramp_variances(dim);
    if (j.contains("innovation_scale")) r.innovation_scale = parse_profile(j["innovation_scale"], where + ".innovation_scale");
    return r;
}

}  // namespace detail

/// Builds a TvFarSpec from either {"preset": ..., "options": {...}} or a custom model description.
[[nodiscard]] inline sim::TvFarSpec parse_model(const json& j) {
    detail::require_object(j, "model config");
    try {
        if (j.contains("preset")) {
            sim::PresetOptions o;
            if (j.contains("options")) {
                const auto& opt = j["options"];
                detail::require_object(opt, "options");
                o.basis_dimension = detail::get_or(opt, "basis_dimension", o.basis_dimension);
                o.grid_size = detail::get_or(opt, "grid_size", o.grid_size);
                o.burn_in = detail::get_or(opt, "burn_in", o.burn_in);
                o.model4_period = detail::get_or(opt, "model4_period", o.model4_period);
                o.decreasing_innovations = detail::get_or(opt, "decreasing_innovations", o.decreasing_innovations);
                if (opt.contains("operator_norm")) {
                    o.operator_norm = sim::parse_operator_norm(opt["operator_norm"].get<std::string>());
                }
            }
            return sim::preset(j["preset"].get<std::string>(), o);
        }
        sim::TvFarSpec spec;
        spec.name = detail::get_or<std::string>(j, "name", "custom");
        spec.basis_dimension = detail::get_or(j, "basis_dimension", spec.basis_dimension);
        spec.grid_size = detail::get_or(j, "grid_size", spec.grid_size);
        spec.burn_in = detail::get_or(j, "burn_in", spec.burn_in);
        if (j.contains("operator_norm")) spec.operator_norm = sim::parse_operator_norm(j["operator_norm"].get<std::string>());
        if (!j.contains("regime")) throw ParseError("custom model needs a 'regime' table");
        spec.regime = detail::parse_regime(j["regime"], spec.basis_dimension, "regime");
        if (j.contains("break")) {
            const auto& b = j["break"];
            detail::require_object(b, "break");
            if (!b.contains("fraction") || !b.contains("regime")) throw ParseError("break needs 'fraction' and 'regime'");
            spec.break_fraction = b["fraction"].get<double>();
            spec.after_break = detail::parse_regime(b["regime"], spec.basis_dimension, "break.regime");
        }
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model config: ") + e.what());
    }
}

[[nodiscard]] inline sim::TvFarSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("config '" + path + "': " + e.what());
    }
    return parse_model(j);
}

}  // namespace fts::config
