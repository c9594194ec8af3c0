/**
 * @file model_file.hpp
 * @brief YAML robot model documents.
 *
 * The document keeps values in file units (mm, deg, mrad) so that text and
 * document convert into each other without loss; conversion to the internal
 * radian representation happens in to_manipulator().
 *
 *   name: demo3
 *   joints: 3
 *   estimate_base_tool: false
 *   parameters:
 *     - {label: "l1", unit: "mm", nominal: 1000, identify: true}
 *   chain:
 *     - {type: "joint", joint: 1, axis: [0, 0, 1], parameter: "dq1"}
 *     - {type: "translate", axis: [0, 0, 1], parameter: "l1"}
 *   joint_ranges_deg:
 *     - [-180, 180]
 *   markers_mm:
 *     - [279.2, -16.4, -91.9]
 *   base: {position_mm: [0, 0, 0], rotation_vector_mrad: [0, 0, 0]}
 *   compliance:
 *     unit_scale: 1e-9
 *     unit_label: "1e-9 rad/(N*mm)"
 *     coefficients:
 *       - {label: "chi21", joint: 2, segment_deg: [-25, 5]}
 */
#pragma once

#include "ppcal/compliance.hpp"
#include "ppcal/errors.hpp"
#include "ppcal/io/yaml_support.hpp"
#include "ppcal/manipulator.hpp"
#include "ppcal/models.hpp"

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ppcal::io {

struct ModelFile {
    struct ParameterEntry {
        std::string label;
        std::string unit;  ///< "mm" or "deg"
        double nominal = 0.0;
        bool identify = true;
        bool operator==(const ParameterEntry&) const = default;
    };
    struct ChainEntry {
        std::string type;  ///< "joint", "translate" or "rotate"
        std::array<double, 3> axis{0.0, 0.0, 1.0};
        std::string parameter;  ///< empty for none
        double value = 0.0;     ///< constant part, mm or deg
        int joint = 0;          ///< 1-based, joints only
        bool operator==(const ChainEntry&) const = default;
    };
    struct CoefficientEntry {
        std::string label;
        int joint = 0;  ///< 1-based
        std::optional<std::array<double, 2>> segment_deg;
        bool operator==(const CoefficientEntry&) const = default;
    };

    std::string name;
    int joints = 0;
    bool estimate_base_tool = true;
    std::vector<ParameterEntry> parameters;
    std::vector<ChainEntry> chain;
    std::vector<std::array<double, 2>> joint_ranges_deg;
    std::vector<std::array<double, 3>> markers_mm;
    std::array<double, 3> base_position_mm{0.0, 0.0, 0.0};
    std::array<double, 3> base_rotation_mrad{0.0, 0.0, 0.0};
    double compliance_unit_scale = 1.0;
    std::string compliance_unit_label = "rad/(N*mm)";
    std::vector<CoefficientEntry> coefficients;

    bool operator==(const ModelFile&) const = default;
};

inline ModelFile parse_model_text(const std::string& source) {
    using namespace yaml;
    const YAML::Node root = load(source);
    if (!root || root.IsNull()) throw ParseError("model document is empty", 1, 1);
    check_keys(root,
               {"name", "joints", "estimate_base_tool", "parameters", "chain", "joint_ranges_deg", "markers_mm",
                "base", "compliance"},
               "model");
    ModelFile f;
    f.name = root["name"] ? text(root["name"], "name") : "";
    f.joints = static_cast<int>(integer(required(root, "joints", "model"), "joints"));
    if (f.joints < 1) throw error_at(root["joints"], "joints must be positive");
    if (root["estimate_base_tool"]) f.estimate_base_tool = boolean(root["estimate_base_tool"], "estimate_base_tool");

    std::map<std::string, std::string> units;
    const YAML::Node params = required(root, "parameters", "model");
    if (!params.IsSequence()) throw error_at(params, "parameters must be a list");
    for (const auto& p : params) {
        check_keys(p, {"label", "unit", "nominal", "identify"}, "parameter");
        ModelFile::ParameterEntry e;
        e.label = text(required(p, "label", "parameter"), "label");
        e.unit = text(required(p, "unit", "parameter"), "unit");
        if (e.unit != "mm" && e.unit != "deg") throw error_at(p["unit"], "parameter unit must be mm or deg");
        e.nominal = number(required(p, "nominal", "parameter"), "nominal");
        if (p["identify"]) e.identify = boolean(p["identify"], "identify");
        if (units.count(e.label)) throw error_at(p["label"], "duplicate parameter '" + e.label + "'");
        units[e.label] = e.unit;
        f.parameters.push_back(e);
    }

    const YAML::Node chain = required(root, "chain", "model");
    if (!chain.IsSequence()) throw error_at(chain, "chain must be a list");
    for (const auto& c : chain) {
        check_keys(c, {"type", "axis", "parameter", "value", "joint"}, "chain element");
        ModelFile::ChainEntry e;
        e.type = text(required(c, "type", "chain element"), "type");
        if (e.type != "joint" && e.type != "translate" && e.type != "rotate")
            throw error_at(c["type"], "chain element type must be joint, translate or rotate");
        e.axis = numbers<3>(required(c, "axis", "chain element"), "axis");
        if (std::abs(vector3(e.axis).norm() - 1.0) > 1e-12) throw error_at(c["axis"], "axis must be a unit vector");
        if (c["parameter"]) {
            e.parameter = text(c["parameter"], "parameter");
            const auto u = units.find(e.parameter);
            if (u == units.end()) throw error_at(c["parameter"], "unknown parameter '" + e.parameter + "'");
            if ((e.type == "translate") != (u->second == "mm"))
                throw error_at(c["parameter"], "parameter '" + e.parameter + "' has the wrong unit for " + e.type);
        }
        if (c["value"]) e.value = number(c["value"], "value");
        if (e.type == "joint") {
            e.joint = static_cast<int>(integer(required(c, "joint", "chain element"), "joint"));
            if (e.joint < 1 || e.joint > f.joints) throw error_at(c["joint"], "joint index out of range");
        } else if (c["joint"]) {
            throw error_at(c["joint"], "only joint elements take a joint index");
        }
        f.chain.push_back(e);
    }

    if (root["joint_ranges_deg"]) {
        const YAML::Node r = root["joint_ranges_deg"];
        if (!r.IsSequence() || static_cast<int>(r.size()) != f.joints)
            throw error_at(r, "joint_ranges_deg needs one [lower, upper] pair per joint");
        for (const auto& x : r) f.joint_ranges_deg.push_back(numbers<2>(x, "joint range"));
    }

    const YAML::Node markers = required(root, "markers_mm", "model");
    if (!markers.IsSequence()) throw error_at(markers, "markers_mm must be a list");
    for (const auto& m : markers) f.markers_mm.push_back(numbers<3>(m, "marker"));

    if (root["base"]) {
        const YAML::Node b = root["base"];
        check_keys(b, {"position_mm", "rotation_vector_mrad"}, "base");
        if (b["position_mm"]) f.base_position_mm = numbers<3>(b["position_mm"], "position_mm");
        if (b["rotation_vector_mrad"]) f.base_rotation_mrad = numbers<3>(b["rotation_vector_mrad"], "rotation");
    }

    if (root["compliance"]) {
        const YAML::Node c = root["compliance"];
        check_keys(c, {"unit_scale", "unit_label", "coefficients"}, "compliance");
        if (c["unit_scale"]) f.compliance_unit_scale = number(c["unit_scale"], "unit_scale");
        if (c["unit_label"]) f.compliance_unit_label = text(c["unit_label"], "unit_label");
        if (c["coefficients"]) {
            if (!c["coefficients"].IsSequence()) throw error_at(c["coefficients"], "coefficients must be a list");
            for (const auto& k : c["coefficients"]) {
                check_keys(k, {"label", "joint", "segment_deg"}, "compliance coefficient");
                ModelFile::CoefficientEntry e;
                e.label = text(required(k, "label", "compliance coefficient"), "label");
                e.joint = static_cast<int>(integer(required(k, "joint", "compliance coefficient"), "joint"));
                if (e.joint < 1 || e.joint > f.joints) throw error_at(k["joint"], "joint index out of range");
                if (k["segment_deg"]) e.segment_deg = numbers<2>(k["segment_deg"], "segment_deg");
                f.coefficients.push_back(e);
            }
        }
    }
    return f;
}

inline std::string serialize_model(const ModelFile& f) {
    using yaml::flow;
    std::ostringstream out;
    out << "name: " << quoted(f.name) << "\n";
    out << "joints: " << f.joints << "\n";
    out << "estimate_base_tool: " << (f.estimate_base_tool ? "true" : "false") << "\n";
    out << "parameters:\n";
    for (const auto& p : f.parameters)
        out << "  - {label: " << quoted(p.label) << ", unit: " << quoted(p.unit)
            << ", nominal: " << number_text(p.nominal) << ", identify: " << (p.identify ? "true" : "false") << "}\n";
    out << "chain:\n";
    for (const auto& c : f.chain) {
        out << "  - {type: " << quoted(c.type);
        if (c.type == "joint") out << ", joint: " << c.joint;
        out << ", axis: " << flow(c.axis);
        if (!c.parameter.empty()) out << ", parameter: " << quoted(c.parameter);
        if (c.parameter.empty() || c.value != 0.0) out << ", value: " << number_text(c.value);
        out << "}\n";
    }
    if (!f.joint_ranges_deg.empty()) {
        out << "joint_ranges_deg:\n";
        for (const auto& r : f.joint_ranges_deg) out << "  - " << flow(r) << "\n";
    }
    out << "markers_mm:\n";
    for (const auto& m : f.markers_mm) out << "  - " << flow(m) << "\n";
    out << "base: {position_mm: " << flow(f.base_position_mm)
        << ", rotation_vector_mrad: " << flow(f.base_rotation_mrad) << "}\n";
    out << "compliance:\n";
    out << "  unit_scale: " << number_text(f.compliance_unit_scale) << "\n";
    out << "  unit_label: " << quoted(f.compliance_unit_label) << "\n";
    out << "  coefficients:" << (f.coefficients.empty() ? " []\n" : "\n");
    for (const auto& k : f.coefficients) {
        out << "    - {label: " << quoted(k.label) << ", joint: " << k.joint;
        if (k.segment_deg) out << ", segment_deg: " << flow(*k.segment_deg);
        out << "}\n";
    }
    return out.str();
}

inline SerialManipulator to_manipulator(const ModelFile& f) {
    SerialManipulator m;
    m.name = f.name;
    m.joint_count = f.joints;
    m.estimate_base_tool = f.estimate_base_tool;
    std::map<std::string, int> index;
    for (const auto& p : f.parameters) {
        const bool angle = p.unit == "deg";
        index[p.label] = static_cast<int>(m.parameters.size());
        m.parameters.push_back({p.label, angle ? ParameterUnit::angle : ParameterUnit::length,
                                angle ? p.nominal * kDegree : p.nominal, p.identify});
    }
    for (const auto& c : f.chain) {
        ChainElement e;
        e.kind = c.type == "joint" ? ElementKind::joint
                 : c.type == "rotate" ? ElementKind::rotation
                                      : ElementKind::translation;
        e.axis = yaml::vector3(c.axis);
        e.parameter = c.parameter.empty() ? -1 : index.at(c.parameter);
        e.constant = e.kind == ElementKind::translation ? c.value : c.value * kDegree;
        e.joint = c.joint - 1;
        m.chain.push_back(e);
    }
    for (const auto& r : f.joint_ranges_deg) m.joint_ranges.push_back({r[0] * kDegree, r[1] * kDegree});
    for (const auto& p : f.markers_mm) m.markers.push_back(yaml::vector3(p));
    m.base = RigidTransform::from_vector(yaml::vector3(f.base_position_mm), yaml::vector3(f.base_rotation_mrad) * 1e-3);
    m.compliance.unit_scale = f.compliance_unit_scale;
    m.compliance.unit_label = f.compliance_unit_label;
    for (const auto& k : f.coefficients) {
        ComplianceCoefficient c{k.label, k.joint - 1, std::nullopt};
        if (k.segment_deg) c.segment = AngleInterval{(*k.segment_deg)[0] * kDegree, (*k.segment_deg)[1] * kDegree};
        m.compliance.coefficients.push_back(c);
    }
    m.validate();
    return m;
}

inline ModelFile to_model_file(const SerialManipulator& m) {
    ModelFile f;
    f.name = m.name;
    f.joints = m.joint_count;
    f.estimate_base_tool = m.estimate_base_tool;
    for (const auto& p : m.parameters) {
        const bool angle = p.unit == ParameterUnit::angle;
        f.parameters.push_back({p.label, angle ? "deg" : "mm", angle ? p.nominal / kDegree : p.nominal, p.identify});
    }
    for (const auto& e : m.chain) {
        ModelFile::ChainEntry c;
        c.type = e.kind == ElementKind::joint ? "joint" : e.kind == ElementKind::rotation ? "rotate" : "translate";
        c.axis = {e.axis.x(), e.axis.y(), e.axis.z()};
        c.parameter = e.parameter >= 0 ? m.parameters[e.parameter].label : "";
        c.value = e.kind == ElementKind::translation ? e.constant : e.constant / kDegree;
        c.joint = e.kind == ElementKind::joint ? e.joint + 1 : 0;
        f.chain.push_back(c);
    }
    for (const auto& r : m.joint_ranges) f.joint_ranges_deg.push_back({r.lower / kDegree, r.upper / kDegree});
    for (const auto& p : m.markers) f.markers_mm.push_back({p.x(), p.y(), p.z()});
    const Vector3 rv = rotation_vector(m.base.rotation) * 1e3;
    f.base_position_mm = {m.base.translation.x(), m.base.translation.y(), m.base.translation.z()};
    f.base_rotation_mrad = {rv.x(), rv.y(), rv.z()};
    f.compliance_unit_scale = m.compliance.unit_scale;
    f.compliance_unit_label = m.compliance.unit_label;
    for (const auto& c : m.compliance.coefficients) {
        ModelFile::CoefficientEntry k{c.label, c.joint + 1, std::nullopt};
        if (c.segment) k.segment_deg = std::array<double, 2>{c.segment->lower / kDegree, c.segment->upper / kDegree};
        f.coefficients.push_back(k);
    }
    return f;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("write to '" + path + "' failed");
}

inline SerialManipulator load_model(const std::string& path) {
    return to_manipulator(parse_model_text(read_text_file(path)));
}

}  // namespace ppcal::io
