/**
 * @file scenario_file.hpp
 * @brief Experiment scenarios, injected-truth documents and configuration lists.
 *
 *   model: demo3_model.yaml            # relative paths resolve against this file
 *   truth:                             # inline, or a path to a truth document
 *     parameters: {l1: 3.0, dq1: 1.0}  # deviations from nominal, mm / deg
 *     compliance: {chi21: 0.287}       # model compliance units
 *     base: {position_mm: [...], rotation_vector_mrad: [...]}
 *     tool_mm: [[...], [...], [...]]
 *   noise_sigma_mm: 0.01
 *   configurations: {random: 3, seed: 1}   # or {file: list.csv} or {list_deg: [[...]]}
 *   trials: 1000
 *   seed: 1
 *   load: {mass_kg: 250, point_mm: [300, 0, -200], paired: true}
 *   orientation_weight_mm_per_rad: 100     # optional
 *   identification: {max_iter: 50, tol: 1e-9}
 */
#pragma once

#include "ppcal/experiments.hpp"
#include "ppcal/io/measurement_file.hpp"
#include "ppcal/io/model_file.hpp"
#include "ppcal/io/yaml_support.hpp"

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

namespace ppcal::io {

/// Joint configurations in degrees: a header `q1_deg,...,qN_deg` then one row per configuration.
inline std::vector<VectorX> parse_configurations_text(const std::string& source, int joints) {
    std::vector<VectorX> out;
    std::istringstream in(source);
    std::string raw;
    int line = 0;
    bool header = false;
    while (std::getline(in, raw)) {
        ++line;
        const auto content = detail::trim(raw);
        if (content.empty() || content.front() == '#') continue;
        const auto fields = detail::split_fields(content);
        if (!header) {
            if (static_cast<int>(fields.size()) != joints)
                throw ParseError("expected " + std::to_string(joints) + " joint columns", line, 1);
            for (int j = 0; j < joints; ++j)
                if (fields[static_cast<std::size_t>(j)] != "q" + std::to_string(j + 1) + "_deg")
                    throw ParseError("expected column 'q" + std::to_string(j + 1) + "_deg'", line, j + 1);
            header = true;
            continue;
        }
        if (static_cast<int>(fields.size()) != joints)
            throw ParseError("expected " + std::to_string(joints) + " fields, found " + std::to_string(fields.size()),
                             line, 1);
        VectorX q(joints);
        for (int j = 0; j < joints; ++j)
            q[j] = detail::parse_cell(fields[static_cast<std::size_t>(j)], line, j + 1,
                                      "q" + std::to_string(j + 1) + "_deg") *
                   kDegree;
        out.push_back(q);
    }
    if (!header) throw ParseError("missing header row", line == 0 ? 1 : line, 1);
    return out;
}

namespace detail {

inline std::string resolve_path(const std::string& path, const std::string& base_dir) {
    const std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

inline std::string directory_of(const std::string& path) {
    return std::filesystem::path(path).parent_path().string();
}

inline InjectedTruth parse_truth_node(const YAML::Node& n, const SerialManipulator& model) {
    using namespace yaml;
    check_keys(n, {"parameters", "compliance", "base", "tool_mm"}, "truth");
    InjectedTruth t = ExperimentScenario::nominal_truth(model);
    if (n["parameters"]) {
        require_map(n["parameters"], "truth parameters");
        for (auto it = n["parameters"].begin(); it != n["parameters"].end(); ++it) {
            const auto label = it->first.as<std::string>();
            const auto k = model.parameter_index(label);
            if (k < 0) throw error_at(it->first, "unknown parameter '" + label + "'");
            const double v = number(it->second, label);
            t.delta[k] = model.parameters[static_cast<std::size_t>(k)].unit == ParameterUnit::angle ? v * kDegree : v;
        }
    }
    if (n["compliance"]) {
        require_map(n["compliance"], "truth compliance");
        for (auto it = n["compliance"].begin(); it != n["compliance"].end(); ++it) {
            const auto label = it->first.as<std::string>();
            const auto k = model.compliance.index_of(label);
            if (k < 0) throw error_at(it->first, "unknown compliance coefficient '" + label + "'");
            t.chi[k] = number(it->second, label);
        }
    }
    if (n["base"]) {
        const YAML::Node b = n["base"];
        check_keys(b, {"position_mm", "rotation_vector_mrad"}, "truth base");
        const Vector3 p = b["position_mm"] ? vector3(numbers<3>(b["position_mm"], "position_mm")) : Vector3::Zero();
        const Vector3 r = b["rotation_vector_mrad"]
                              ? vector3(numbers<3>(b["rotation_vector_mrad"], "rotation_vector_mrad"))
                              : Vector3::Zero();
        t.base = RigidTransform::from_vector(p, r * 1e-3);
    }
    if (n["tool_mm"]) {
        if (!n["tool_mm"].IsSequence()) throw error_at(n["tool_mm"], "tool_mm must be a list");
        t.tool.clear();
        for (const auto& m : n["tool_mm"]) t.tool.push_back(vector3(numbers<3>(m, "tool point")));
    }
    return t;
}

}  // namespace detail

inline InjectedTruth parse_truth_text(const std::string& source, const SerialManipulator& model) {
    const YAML::Node root = yaml::load(source);
    if (!root || root.IsNull()) return ExperimentScenario::nominal_truth(model);
    return detail::parse_truth_node(root, model);
}

inline InjectedTruth load_truth(const std::string& path, const SerialManipulator& model) {
    return parse_truth_text(read_text_file(path), model);
}

/// `base_dir` anchors relative paths inside the document.
inline ExperimentScenario parse_scenario_text(const std::string& source, const std::string& base_dir) {
    using namespace yaml;
    const YAML::Node root = load(source);
    if (!root || root.IsNull()) throw ParseError("scenario document is empty", 1, 1);
    check_keys(root,
               {"model", "truth", "noise_sigma_mm", "configurations", "trials", "seed", "load",
                "orientation_weight_mm_per_rad", "identification"},
               "scenario");
    ExperimentScenario sc;
    const YAML::Node model = required(root, "model", "scenario");
    sc.model = load_model(detail::resolve_path(text(model, "model"), base_dir));
    sc.truth = ExperimentScenario::nominal_truth(sc.model);
    if (const YAML::Node t = root["truth"]) {
        if (t.IsScalar())
            sc.truth = load_truth(detail::resolve_path(t.Scalar(), base_dir), sc.model);
        else
            sc.truth = detail::parse_truth_node(t, sc.model);
    }
    if (root["noise_sigma_mm"]) {
        sc.sigma = number(root["noise_sigma_mm"], "noise_sigma_mm");
        if (sc.sigma < 0.0) throw error_at(root["noise_sigma_mm"], "noise_sigma_mm must be non-negative");
    }
    if (const YAML::Node c = root["configurations"]) {
        check_keys(c, {"random", "seed", "file", "list_deg"}, "configurations");
        const int kinds = (c["random"] ? 1 : 0) + (c["file"] ? 1 : 0) + (c["list_deg"] ? 1 : 0);
        if (kinds != 1) throw error_at(c, "configurations needs exactly one of random, file, list_deg");
        if (c["random"]) {
            sc.random_configurations = static_cast<int>(integer(c["random"], "random"));
            if (sc.random_configurations < 1) throw error_at(c["random"], "random must be positive");
            if (c["seed"]) sc.configuration_seed = static_cast<std::uint64_t>(integer(c["seed"], "seed"));
        } else if (c["seed"]) {
            throw error_at(c["seed"], "seed applies to random configurations only");
        } else if (c["file"]) {
            const auto path = detail::resolve_path(text(c["file"], "file"), base_dir);
            sc.configurations = parse_configurations_text(read_text_file(path), sc.model.joint_count);
        } else {
            const YAML::Node l = c["list_deg"];
            if (!l.IsSequence() || l.size() == 0) throw error_at(l, "list_deg must be a non-empty list");
            for (const auto& row : l) {
                if (!row.IsSequence() || static_cast<int>(row.size()) != sc.model.joint_count)
                    throw error_at(row, "configuration needs " + std::to_string(sc.model.joint_count) + " angles");
                VectorX q(sc.model.joint_count);
                for (int j = 0; j < sc.model.joint_count; ++j) q[j] = number(row[j], "joint angle") * kDegree;
                sc.configurations.push_back(q);
            }
        }
    }
    if (root["trials"]) {
        sc.trials = static_cast<int>(integer(root["trials"], "trials"));
        if (sc.trials < 1) throw error_at(root["trials"], "trials must be at least 1");
    }
    if (root["seed"]) sc.seed = static_cast<std::uint64_t>(integer(root["seed"], "seed"));
    if (const YAML::Node l = root["load"]) {
        check_keys(l, {"mass_kg", "point_mm", "paired"}, "load");
        GravityLoad g;
        g.mass_kg = number(required(l, "mass_kg", "load"), "mass_kg");
        if (l["point_mm"]) g.point = vector3(numbers<3>(l["point_mm"], "point_mm"));
        if (l["paired"]) g.paired = boolean(l["paired"], "paired");
        sc.load = g;
    }
    if (root["orientation_weight_mm_per_rad"]) {
        sc.orientation_weight = number(root["orientation_weight_mm_per_rad"], "orientation_weight_mm_per_rad");
        if (!(sc.orientation_weight > 0.0))
            throw error_at(root["orientation_weight_mm_per_rad"], "orientation weight must be positive");
    }
    if (const YAML::Node id = root["identification"]) {
        check_keys(id, {"max_iter", "tol"}, "identification");
        if (id["max_iter"]) sc.options.max_iter = static_cast<int>(integer(id["max_iter"], "max_iter"));
        if (id["tol"]) sc.options.tol = number(id["tol"], "tol");
    }
    sc.validate();
    return sc;
}

inline ExperimentScenario load_scenario(const std::string& path) {
    return parse_scenario_text(read_text_file(path), detail::directory_of(path));
}

}  // namespace ppcal::io
