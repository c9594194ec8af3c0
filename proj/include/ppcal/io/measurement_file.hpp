/**
 * @file measurement_file.hpp
 * @brief Comma-separated tracker measurements, one row per (configuration, marker).
 *
 *   config_id,q1_deg,...,qN_deg,Fx_N,Fy_N,Fz_N,Tx_Nmm,Ty_Nmm,Tz_Nmm,marker_id,x_mm,y_mm,z_mm,load_phase
 *
 * Lines starting with '#' and blank lines are ignored. Loaded and unloaded
 * measurements of one configuration share a config_id and differ in load_phase.
 */
#pragma once

#include "ppcal/errors.hpp"
#include "ppcal/io/yaml_support.hpp"
#include "ppcal/measurement.hpp"
#include "ppcal/models.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ppcal::io {

struct MeasurementRow {
    std::string config_id;
    std::vector<double> q_deg;
    std::array<double, 6> wrench{};  ///< Fx, Fy, Fz [N], Tx, Ty, Tz [N*mm]
    std::string marker_id;
    std::array<double, 3> position_mm{};
    LoadPhase phase = LoadPhase::pre;

    bool operator==(const MeasurementRow&) const = default;
};

struct MeasurementTable {
    int joints = 0;
    std::vector<MeasurementRow> rows;

    bool operator==(const MeasurementTable&) const = default;
};

inline std::vector<std::string> measurement_header(int joints) {
    std::vector<std::string> h{"config_id"};
    for (int j = 1; j <= joints; ++j) h.push_back("q" + std::to_string(j) + "_deg");
    for (const char* c : {"Fx_N", "Fy_N", "Fz_N", "Tx_Nmm", "Ty_Nmm", "Tz_Nmm", "marker_id", "x_mm", "y_mm", "z_mm",
                          "load_phase"})
        h.emplace_back(c);
    return h;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

inline double parse_cell(std::string_view cell, int line, int column, const std::string& name) {
    double v = 0.0;
    const char* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (cell.empty() || ec != std::errc() || ptr != end)
        throw ParseError("column '" + name + "': not a number: '" + std::string(cell) + "'", line, column);
    if (!std::isfinite(v)) throw ParseError("column '" + name + "': value must be finite", line, column);
    return v;
}

}  // namespace detail

/// Parses a measurement file. Errors carry the file line and the 1-based column index.
inline MeasurementTable parse_measurement_text(const std::string& source) {
    MeasurementTable table;
    std::istringstream in(source);
    std::string raw;
    int line = 0;
    std::vector<std::string> header;
    while (std::getline(in, raw)) {
        ++line;
        const auto content = detail::trim(raw);
        if (content.empty() || content.front() == '#') continue;
        const auto fields = detail::split_fields(content);
        if (header.empty()) {
            const int joints = static_cast<int>(fields.size()) - 12;
            if (joints < 1) throw ParseError("header has too few columns", line, 1);
            header = measurement_header(joints);
            for (std::size_t k = 0; k < fields.size(); ++k)
                if (fields[k] != header[k])
                    throw ParseError("expected column '" + header[k] + "', found '" + std::string(fields[k]) + "'",
                                     line, static_cast<int>(k + 1));
            table.joints = joints;
            continue;
        }
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line, static_cast<int>(std::min(fields.size(), header.size()) + 1));
        MeasurementRow row;
        std::size_t k = 0;
        auto cell = [&]() {
            const auto c = static_cast<int>(k + 1);
            const double v = detail::parse_cell(fields[k], line, c, header[k]);
            ++k;
            return v;
        };
        row.config_id = std::string(fields[k++]);
        if (row.config_id.empty()) throw ParseError("empty config_id", line, 1);
        for (int j = 0; j < table.joints; ++j) row.q_deg.push_back(cell());
        for (auto& w : row.wrench) w = cell();
        row.marker_id = std::string(fields[k++]);
        if (row.marker_id.empty()) throw ParseError("empty marker_id", line, static_cast<int>(k));
        for (auto& p : row.position_mm) p = cell();
        const auto phase = fields[k];
        if (phase == "pre")
            row.phase = LoadPhase::pre;
        else if (phase == "post")
            row.phase = LoadPhase::post;
        else
            throw ParseError("load_phase must be pre or post, found '" + std::string(phase) + "'", line,
                             static_cast<int>(k + 1));
        table.rows.push_back(std::move(row));
    }
    if (header.empty()) throw ParseError("missing header row", line == 0 ? 1 : line, 1);
    return table;
}

inline std::string serialize_measurements(const MeasurementTable& table) {
    std::string out;
    const auto header = measurement_header(table.joints);
    for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
    out += '\n';
    for (const auto& r : table.rows) {
        if (static_cast<int>(r.q_deg.size()) != table.joints)
            throw DimensionError("row '" + r.config_id + "' has the wrong number of joint values");
        out += r.config_id;
        for (double q : r.q_deg) out += "," + number_text(q);
        for (double w : r.wrench) out += "," + number_text(w);
        out += "," + r.marker_id;
        for (double p : r.position_mm) out += "," + number_text(p);
        out += r.phase == LoadPhase::pre ? ",pre\n" : ",post\n";
    }
    return out;
}

/// Groups rows into records keyed by (config_id, load_phase), in order of first appearance.
/// Every record must carry the same marker ids; points are ordered as in the first record.
inline MeasurementSet to_measurement_set(const MeasurementTable& table) {
    struct Group {
        const MeasurementRow* first = nullptr;
        std::map<std::string, Vector3> points;
        std::vector<std::string> order;
    };
    std::vector<Group> groups;
    std::map<std::pair<std::string, LoadPhase>, std::size_t> index;
    for (const auto& r : table.rows) {
        const auto key = std::make_pair(r.config_id, r.phase);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, groups.size()).first;
            groups.push_back({&r, {}, {}});
        }
        Group& g = groups[it->second];
        if (r.q_deg != g.first->q_deg || r.wrench != g.first->wrench)
            throw Error("configuration '" + r.config_id + "' has inconsistent joint or load values");
        if (!g.points.emplace(r.marker_id, yaml::vector3(r.position_mm)).second)
            throw Error("marker '" + r.marker_id + "' repeated in configuration '" + r.config_id + "'");
        g.order.push_back(r.marker_id);
    }

    MeasurementSet set;
    if (groups.empty()) return set;
    const auto& ids = groups.front().order;
    for (const auto& g : groups) {
        if (g.points.size() != ids.size())
            throw Error("configuration '" + g.first->config_id + "' has a different marker set");
        MeasurementRecord rec;
        rec.config_id = g.first->config_id;
        rec.phase = g.first->phase;
        rec.q.resize(table.joints);
        for (int j = 0; j < table.joints; ++j) rec.q[j] = g.first->q_deg[static_cast<std::size_t>(j)] * kDegree;
        for (int c = 0; c < 6; ++c) rec.load[c] = g.first->wrench[static_cast<std::size_t>(c)];
        for (const auto& id : ids) {
            const auto p = g.points.find(id);
            if (p == g.points.end())
                throw Error("configuration '" + g.first->config_id + "' lacks marker '" + id + "'");
            rec.markers.push_back(p->second);
        }
        set.records.push_back(std::move(rec));
    }
    return set;
}

inline MeasurementTable to_measurement_table(const MeasurementSet& set, int joints) {
    MeasurementTable table;
    table.joints = joints;
    for (const auto& rec : set.records) {
        if (rec.q.size() != joints) throw DimensionError("record '" + rec.config_id + "' has the wrong joint count");
        for (std::size_t j = 0; j < rec.markers.size(); ++j) {
            MeasurementRow row;
            row.config_id = rec.config_id;
            for (int k = 0; k < joints; ++k) row.q_deg.push_back(rec.q[k] / kDegree);
            for (int c = 0; c < 6; ++c) row.wrench[static_cast<std::size_t>(c)] = rec.load[c];
            row.marker_id = "m" + std::to_string(j + 1);
            row.position_mm = {rec.markers[j].x(), rec.markers[j].y(), rec.markers[j].z()};
            row.phase = rec.phase;
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

}  // namespace ppcal::io
