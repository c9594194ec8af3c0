/**
 * @file experiments.hpp
 * @brief Synthetic calibration data and Monte-Carlo accuracy studies.
 */
#pragma once

#include "ppcal/elastostatics.hpp"
#include "ppcal/errors.hpp"
#include "ppcal/identification.hpp"
#include "ppcal/kinematics.hpp"
#include "ppcal/manipulator.hpp"
#include "ppcal/measurement.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ppcal {

inline constexpr double kGravity = 9.81;  // m/s^2

/// Values used to generate data: the "real" robot the estimators should recover.
struct InjectedTruth {
    VectorX delta;               ///< Pi - Pi_0 over every chain parameter
    VectorX chi;                 ///< compliance coefficients (model units)
    RigidTransform base;
    std::vector<Vector3> tool;   ///< flange frame, mm
};

/// A mass hanging from a point fixed to the flange; the wrench is referred to the flange origin.
struct GravityLoad {
    double mass_kg = 0.0;
    Vector3 point = Vector3::Zero();  ///< flange frame, mm
    bool paired = true;               ///< measure every configuration unloaded and loaded
};

struct ExperimentScenario {
    SerialManipulator model;
    InjectedTruth truth;
    double sigma = 0.0;                       ///< mm, per coordinate
    std::vector<VectorX> configurations;      ///< rad; drawn at random when empty
    int random_configurations = 3;
    std::uint64_t configuration_seed = 1;
    int trials = 1;
    std::uint64_t seed = 1;
    std::optional<GravityLoad> load;
    double orientation_weight = 0.0;          ///< mm/rad for the full-pose estimator; <= 0 selects the default
    IdentifyOptions options;

    /// Truth equal to the nominal model.
    static InjectedTruth nominal_truth(const SerialManipulator& m) {
        return {VectorX::Zero(static_cast<Eigen::Index>(m.parameter_count())),
                VectorX::Zero(static_cast<Eigen::Index>(m.compliance.size())), m.base, m.markers};
    }

    double weight() const { return orientation_weight > 0.0 ? orientation_weight : default_orientation_weight(model); }

    void validate() const {
        model.validate();
        if (!(sigma >= 0.0)) throw Error("noise sigma must be non-negative");
        if (trials < 1) throw Error("trial count must be at least 1");
        if (truth.delta.size() != static_cast<Eigen::Index>(model.parameter_count()))
            throw DimensionError("injected parameter deviations do not match the model");
        if (truth.chi.size() != static_cast<Eigen::Index>(model.compliance.size()))
            throw DimensionError("injected compliance does not match the model");
        require_marker_triad(truth.tool);
        if (configurations.empty() && random_configurations < 1) throw Error("no measurement configurations");
        for (const auto& q : configurations)
            if (q.size() != model.joint_count) throw DimensionError("configuration size differs from joint count");
    }
};

/// Stateless 64-bit mixer used to derive independent per-trial seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform draws within each joint's declared range.
inline std::vector<VectorX> random_configurations(const SerialManipulator& model, int count, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<VectorX> out;
    for (int i = 0; i < count; ++i) {
        VectorX q(model.joint_count);
        for (int j = 0; j < model.joint_count; ++j) {
            const JointRange r = model.joint_ranges.empty() ? JointRange{} : model.joint_ranges[j];
            q[j] = r.lower + (r.upper - r.lower) * unit(rng);
        }
        out.push_back(q);
    }
    return out;
}

inline std::vector<VectorX> resolve_configurations(const ExperimentScenario& sc) {
    if (!sc.configurations.empty()) return sc.configurations;
    return random_configurations(sc.model, sc.random_configurations, sc.configuration_seed);
}

/// Gravity wrench of `load` in the measurement frame, about the flange origin (N, N*mm).
inline Vector6 gravity_wrench(const GravityLoad& load, const RigidTransform& flange) {
    const Vector3 force(0.0, 0.0, -load.mass_kg * kGravity);
    Vector6 w;
    w.head<3>() = force;
    w.tail<3>() = (flange.rotation * load.point).cross(force);
    return w;
}

/// Exact (noise-free) reference points of the injected robot.
inline std::vector<Vector3> exact_points(const SerialManipulator& model, const InjectedTruth& truth,
                                         const VectorX& q, const Vector6& load) {
    const VectorX pi = model.nominal() + truth.delta;
    ManipulatorState st{q, VectorX(), load};
    if (!model.compliance.empty() && load.squaredNorm() > 0.0)
        st.theta = compute_deflections(model, st, pi, truth.base, truth.chi);
    return forward_kinematics(model, st, pi, truth.base, truth.tool).markers;
}

namespace detail {

inline std::string config_label(std::size_t i) {
    const auto digits = std::to_string(i + 1);
    return digits.size() < 2 ? "c0" + digits : "c" + digits;
}

}  // namespace detail

/// Exact forward model of the injected truth plus i.i.d. N(0, sigma^2) on every coordinate.
inline MeasurementSet simulate_measurements(const ExperimentScenario& sc, std::uint64_t trial_seed) {
    const auto configs = resolve_configurations(sc);
    const VectorX pi = sc.model.nominal() + sc.truth.delta;
    std::mt19937_64 rng(trial_seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    MeasurementSet set;
    auto add = [&](const std::string& id, LoadPhase phase, const VectorX& q, const Vector6& load) {
        MeasurementRecord rec{id, phase, q, load, exact_points(sc.model, sc.truth, q, load)};
        if (sc.sigma > 0.0)
            for (auto& p : rec.markers)
                for (int c = 0; c < 3; ++c) p[c] += sc.sigma * noise(rng);
        set.records.push_back(std::move(rec));
    };
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto id = detail::config_label(i);
        if (!sc.load) {
            add(id, LoadPhase::pre, configs[i], Vector6::Zero());
            continue;
        }
        const ManipulatorState rigid{configs[i], VectorX(), Vector6::Zero()};
        const RigidTransform flange = forward_kinematics(sc.model, rigid, pi, sc.truth.base, {}).flange;
        const Vector6 wrench = gravity_wrench(*sc.load, flange);
        if (sc.load->paired) add(id, LoadPhase::pre, configs[i], Vector6::Zero());
        add(id, LoadPhase::post, configs[i], wrench);
    }
    return set;
}

inline std::uint64_t trial_seed(const ExperimentScenario& sc, int trial) {
    return mix_seed(sc.seed ^ mix_seed(static_cast<std::uint64_t>(trial)));
}

struct ParameterStatistics {
    std::string label;
    bool angle = false;        ///< rad (otherwise mm or compliance units)
    double truth = 0.0;
    double mean = 0.0;
    double stddev = 0.0;       ///< sample standard deviation (n - 1)
};

struct TrialStatistics {
    std::vector<ParameterStatistics> parameters;
    int trials = 0;            ///< successful trials
    int failed = 0;
};

/// Order-independent accumulation of estimates around the truth (sums and sums of squares).
class StatisticsAccumulator {
public:
    StatisticsAccumulator(std::vector<std::string> labels, std::vector<bool> angle, VectorX truth)
        : labels_(std::move(labels)), angle_(std::move(angle)), truth_(std::move(truth)),
          sum_(VectorX::Zero(truth_.size())), sum_sq_(VectorX::Zero(truth_.size())) {}

    void add(const VectorX& estimate) {
        const VectorX d = estimate - truth_;
        sum_ += d;
        sum_sq_ += d.cwiseProduct(d);
        ++count_;
    }

    void fail() { ++failed_; }

    TrialStatistics result() const {
        TrialStatistics out;
        out.trials = count_;
        out.failed = failed_;
        for (Eigen::Index k = 0; k < truth_.size(); ++k) {
            ParameterStatistics p;
            p.label = labels_[static_cast<std::size_t>(k)];
            p.angle = angle_[static_cast<std::size_t>(k)];
            p.truth = truth_[k];
            const double n = count_;
            const double mean_d = count_ ? sum_[k] / n : 0.0;
            p.mean = truth_[k] + mean_d;
            p.stddev = count_ > 1 ? std::sqrt(std::max(0.0, (sum_sq_[k] - n * mean_d * mean_d) / (n - 1.0))) : 0.0;
            out.parameters.push_back(p);
        }
        return out;
    }

private:
    std::vector<std::string> labels_;
    std::vector<bool> angle_;
    VectorX truth_;
    VectorX sum_;
    VectorX sum_sq_;
    int count_ = 0;
    int failed_ = 0;
};

namespace detail {

inline StatisticsAccumulator make_accumulator(const SerialManipulator& model, const InjectedTruth& truth) {
    std::vector<std::string> labels;
    std::vector<bool> angle;
    const auto ids = model.identified();
    VectorX t(static_cast<Eigen::Index>(ids.size() + model.compliance.size()));
    Eigen::Index k = 0;
    for (int id : ids) {
        labels.push_back(model.parameters[id].label);
        angle.push_back(model.parameters[id].unit == ParameterUnit::angle);
        t[k++] = truth.delta[id];
    }
    for (std::size_t c = 0; c < model.compliance.size(); ++c) {
        labels.push_back(model.compliance.coefficients[c].label);
        angle.push_back(false);
        t[k++] = truth.chi[static_cast<Eigen::Index>(c)];
    }
    return {labels, angle, t};
}

/// More than 1 % failed trials invalidates the statistics.
inline void check_failures(const TrialStatistics& s, int trials, const char* what) {
    if (s.failed * 100 > trials)
        throw Error(std::string(what) + ": " + std::to_string(s.failed) + " of " + std::to_string(trials) +
                    " trials failed");
}

}  // namespace detail

struct ComparisonResult {
    TrialStatistics fullpose;   ///< conventional estimator
    TrialStatistics partial;    ///< reference-point estimator
    double weight = 0.0;        ///< orientation weight used by the full-pose estimator, mm/rad
    std::vector<VectorX> configurations;

    /// std(full-pose) / std(partial) per parameter; empty when not meaningful.
    std::vector<std::optional<double>> improvement;
};

/// Both estimators on identical noisy data for every trial.
inline ComparisonResult run_comparison(const ExperimentScenario& sc) {
    sc.validate();
    ComparisonResult out;
    out.weight = sc.weight();
    out.configurations = resolve_configurations(sc);
    auto acc_full = detail::make_accumulator(sc.model, sc.truth);
    auto acc_part = detail::make_accumulator(sc.model, sc.truth);
    const std::optional<BaseToolEstimate> known = BaseToolEstimate{sc.truth.base, sc.truth.tool};
    for (int t = 0; t < sc.trials; ++t) {
        const MeasurementSet data = simulate_measurements(sc, trial_seed(sc, t));
        try {
            const auto r = identify_iterative(sc.model, data, sc.options);
            if (!r.converged) throw Error("not converged");
            acc_part.add(r.parameters.unknowns());
        } catch (const Error&) {
            acc_part.fail();
        }
        try {
            const auto r = identify_fullpose(sc.model, data, out.weight, sc.options,
                                             sc.model.estimate_base_tool ? std::nullopt : known);
            if (!r.converged) throw Error("not converged");
            acc_full.add(r.parameters.unknowns());
        } catch (const Error&) {
            acc_full.fail();
        }
    }
    out.fullpose = acc_full.result();
    out.partial = acc_part.result();
    detail::check_failures(out.partial, sc.trials, "partial-pose identification");
    detail::check_failures(out.fullpose, sc.trials, "full-pose identification");

    const bool meaningful = sc.sigma > 0.0 && out.partial.trials > 1 && out.fullpose.trials > 1;
    for (std::size_t k = 0; k < out.partial.parameters.size(); ++k) {
        const double a1 = out.fullpose.parameters[k].stddev;
        const double a2 = out.partial.parameters[k].stddev;
        if (meaningful && a2 > 0.0)
            out.improvement.emplace_back(a1 / a2);
        else
            out.improvement.emplace_back(std::nullopt);
    }
    return out;
}

struct ElastostaticResult {
    IdentificationResult first;   ///< identification of trial 0
    TrialStatistics statistics;   ///< over all trials
};

/// Partial-pose identification of compliance (and whatever else the model flags) on loaded/unloaded pairs.
inline ElastostaticResult elastostatic_experiment(const ExperimentScenario& sc) {
    sc.validate();
    if (!sc.load) throw Error("elastostatic experiment requires a load");
    ElastostaticResult out;
    auto acc = detail::make_accumulator(sc.model, sc.truth);
    for (int t = 0; t < sc.trials; ++t) {
        const MeasurementSet data = simulate_measurements(sc, trial_seed(sc, t));
        try {
            auto r = identify_iterative(sc.model, data, sc.options);
            if (!r.converged) throw Error("not converged");
            acc.add(r.parameters.unknowns());
            if (t == 0) out.first = std::move(r);
        } catch (const Error&) {
            if (t == 0) throw;
            acc.fail();
        }
    }
    out.statistics = acc.result();
    detail::check_failures(out.statistics, sc.trials, "elastostatic identification");
    return out;
}

}  // namespace ppcal
