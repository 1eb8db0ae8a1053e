#include <cmath>
#include <filesystem>
#include <optional>

#include <gtest/gtest.h>

#include "vibrafin/calibration.hpp"
#include "vibrafin/config.hpp"

using namespace vibrafin;
using namespace vibrafin::calib;

namespace {

ReferenceDataset resonance_dataset() {
    ReferenceDataset ds;
    ds.name = "resonance";
    ds.citation = "test";
    ds.records.push_back({"L10", quantity::kFirstFrequency, {{"rod_length_m", 10e-3}}, 138.0, "Hz", 0.05, "test"});
    return ds;
}

ReferenceDataset speed_dataset(double target) {
    ReferenceDataset ds;
    ds.name = "speed";
    ds.citation = "test";
    ds.records.push_back({"caudal",
                          quantity::kSteadySpeed,
                          {{"fin_left", 0.0}, {"fin_right", 0.0}, {"fin_caudal", 1.0}},
                          target,
                          "m/s",
                          0.15,
                          "test"});
    return ds;
}

// the default body has M_v > M_u, so its straight course is only neutral when started exactly symmetric
ModelBundle short_runs() {
    ModelBundle b;
    b.locomotion.duration_s = 20.0;
    b.locomotion.dt_s = 5e-3;
    b.locomotion.disturbance_yaw_rate_rad_s = 0.0;
    return b;
}

ModelBundle seed_bundle() {
    const std::filesystem::path root = std::filesystem::path(VIBRAFIN_DATA_DIR).parent_path();
    auto b = io::load_config(root / "configs" / "calibration_start.json").bundle;
    b.locomotion.duration_s = 20.0;
    b.locomotion.dt_s = 5e-3;
    return b;
}

DatasetRecord bound_record(const std::string& label, const char* quantity, const loco::FinSet& fins,
                           std::optional<double> lower, std::optional<double> upper) {
    DatasetRecord r;
    r.label = label;
    r.quantity = quantity;
    r.inputs = {{"fin_left", fins[0]}, {"fin_right", fins[1]}, {"fin_caudal", fins[2]}};
    r.source = "test";
    r.lower = lower;
    r.upper = upper;
    return r;
}

}  // namespace

TEST(Evaluate, DriveFrequencyRecordsAreExact) {
    ReferenceDataset ds;
    ds.name = "vf";
    ds.citation = "test";
    ds.records.push_back({"3V", quantity::kDriveFrequency, {{"voltage_v", 3.0}}, 138.0, "Hz", 0.001, ""});
    ds.records.push_back({"4V", quantity::kDriveFrequency, {{"voltage_v", 4.0}}, 144.0, "Hz", 0.001, ""});
    const auto ev = evaluate({ds}, ModelBundle{});
    ASSERT_EQ(ev.errors.size(), 2u);
    EXPECT_NEAR(ev.errors[0].relative_error, 0.0, 1e-14);
    EXPECT_NEAR(ev.objective, 0.0, 1e-26);
}

TEST(Evaluate, ObjectiveAddsToleranceExcess) {
    // default first frequency 136.9377 Hz against 138: e = -0.0076978
    auto ds = resonance_dataset();
    const auto ev = evaluate({ds}, ModelBundle{});
    const double e = (136.93772090661 - 138.0) / 138.0;
    EXPECT_NEAR(ev.errors[0].relative_error, e, 1e-12);
    EXPECT_NEAR(ev.objective, e * e, 1e-14);
    ds.records[0].tolerance = 0.001;
    CalibrationOptions o;
    o.tolerance_weight = 10.0;
    EXPECT_NEAR(evaluate({ds}, ModelBundle{}, o).objective, e * e + 10.0 * (std::abs(e) - 0.001) * (std::abs(e) - 0.001),
                1e-14);
}

TEST(Evaluate, OrderingRecordHinge) {
    ReferenceDataset ds;
    ds.name = "ordering";
    ds.citation = "test";
    ds.records.push_back({"o",
                          quantity::kThrustOrdering,
                          {{"voltage_v", 3.0}, {"good_fin_length_m", 12e-3}, {"bad_fin_length_m", 6e-3}},
                          0.0,
                          "",
                          0.0,
                          "test"});
    const ModelBundle b;
    const double good = thrust_at(b, 3.0, 12e-3), bad = thrust_at(b, 3.0, 6e-3);
    CalibrationOptions o;
    o.ordering_margin = 0.25;
    const auto ev = evaluate({ds}, b, o);
    const double h = std::max(0.0, (1.25 * bad - good) / good);
    EXPECT_NEAR(ev.objective, h * h, 1e-14);
    EXPECT_DOUBLE_EQ(ev.errors[0].predicted, good);
    EXPECT_DOUBLE_EQ(ev.errors[0].target, bad);
    EXPECT_NEAR(ev.errors[0].relative_error, std::max(0.0, (bad - good) / good), 1e-15);
}

TEST(Evaluate, LocomotionRecordsShareRuns) {
    auto ds = speed_dataset(0.08);
    ds.records.push_back(ds.records[0]);
    ds.records[1].label = "caudal_again";
    const auto ev = evaluate({ds}, short_runs());
    EXPECT_DOUBLE_EQ(ev.errors[0].predicted, ev.errors[1].predicted);
    EXPECT_NEAR(ev.errors[0].predicted, std::sqrt(2.0 * 0.004 / (1000.0 * 1.1e-3)), 1e-4);
}

TEST(Fit, RecoversJointStiffness) {
    // series(3EI/L^3, kappa H W) = m (2 pi 138)^2 gives kappa = 8.73654508e7 Pa/m
    const auto res = fit_model_coefficients({resonance_dataset()},
                                            {free_parameter("rigid.joint_stiffness_per_area_pa_m")}, ModelBundle{});
    EXPECT_NEAR(res.fit.parameters[0] / 8.736545077536e7, 1.0, 1e-6);
    EXPECT_NEAR(res.bundle.rigid.joint_stiffness_per_area_pa_m, res.fit.parameters[0], 0.0);
    EXPECT_LT(std::abs(res.fit.record_errors[0].relative_error), 1e-6);
    for (std::size_t i = 1; i < res.fit.best_history.size(); ++i)
        EXPECT_LE(res.fit.best_history[i], res.fit.best_history[i - 1]);
}

TEST(Fit, RecoversCaudalThrustFromSyntheticSpeed) {
    auto truth = short_runs();
    truth.body.fin(loco::FinRole::Caudal).thrust_magnitude_n = 5.2e-3;
    const double speed = run_standard({false, false, true}, truth).steady_speed_m_s;
    const auto res = fit_model_coefficients({speed_dataset(speed)}, {free_parameter("body.fin_thrust_caudal_n")},
                                            short_runs());
    EXPECT_NEAR(res.fit.parameters[0], 5.2e-3, 1e-7);
}

TEST(Fit, EmptyFreeListEvaluatesOnce) {
    const auto res = fit_model_coefficients({resonance_dataset()}, {}, ModelBundle{});
    EXPECT_EQ(res.fit.evaluations, 1);
    EXPECT_TRUE(res.fit.parameters.empty());
    EXPECT_EQ(res.fit.record_errors.size(), 1u);
}

TEST(Fit, ParametersStayInBounds) {
    FreeParameter p = free_parameter("rigid.joint_stiffness_per_area_pa_m");
    p.lower = 1e7;
    p.upper = 5e7;
    const auto res = fit_model_coefficients({resonance_dataset()}, {p}, ModelBundle{});
    EXPECT_LE(res.fit.parameters[0], 5e7 * (1 + 1e-12));
    EXPECT_GE(res.fit.parameters[0], 1e7);
}

TEST(Fit, UnresolvableDatasetsFailFast) {
    auto ds = resonance_dataset();
    ds.records[0].quantity = "mystery";
    EXPECT_THROW(fit_model_coefficients({ds}, {}, ModelBundle{}), ConfigurationError);
    ds = resonance_dataset();
    ds.records[0].inputs.clear();
    EXPECT_THROW(fit_model_coefficients({ds}, {}, ModelBundle{}), ConfigurationError);
    ds = resonance_dataset();
    ds.citation.clear();
    ds.records[0].source.clear();
    EXPECT_THROW(fit_model_coefficients({ds}, {}, ModelBundle{}), ValidationError);
    EXPECT_THROW(free_parameter("no.such.parameter"), ConfigurationError);
    FreeParameter bad{"rigid.joint_stiffness_per_area_pa_m", 5.0, 5.0};
    EXPECT_THROW(fit_model_coefficients({resonance_dataset()}, {bad}, ModelBundle{}), ConfigurationError);
}

TEST(UnitMap, LinearAndLogRoundTrip) {
    const calib::detail::UnitMap lin{2.0, 4.0, false};
    EXPECT_DOUBLE_EQ(lin.to_unit(3.0), 0.5);
    EXPECT_DOUBLE_EQ(lin.from_unit(0.25), 2.5);
    EXPECT_DOUBLE_EQ(lin.from_unit(1.7), 4.0);
    const calib::detail::UnitMap lg{1e6, 1e10, true};
    EXPECT_NEAR(lg.to_unit(1e8), 0.5, 1e-12);
    EXPECT_NEAR(lg.from_unit(0.25), 1e7, 1e-3);
    EXPECT_DOUBLE_EQ(lg.to_unit(1.0), 0.0);
}

TEST(Tie, StreamingMatchesCaudalThrust) {
    ModelBundle b;
    tie_streaming_to_caudal(b, 3.0, 12e-3);
    EXPECT_NEAR(thrust_at(b, 3.0, 12e-3), b.body.fin(loco::FinRole::Caudal).thrust_magnitude_n, 1e-15);
}

TEST(Stages, CoverDisjointParameters) {
    std::set<std::string> seen;
    for (const auto& s : default_stages())
        for (const auto& p : s.free) EXPECT_TRUE(seen.insert(p.name).second) << p.name;
    EXPECT_EQ(default_stages().size(), 3u);
}

TEST(Datasets, BundledFilesResolve) {
    const auto all = io::load_datasets(std::string(VIBRAFIN_DATA_DIR) + "/datasets");
    ASSERT_EQ(all.size(), 5u);
    for (const auto& ds : all) EXPECT_NO_THROW(calib::detail::check_resolvable(ds)) << ds.name;
    for (const auto& s : default_stages()) EXPECT_NO_THROW(select(all, s.datasets));
    EXPECT_THROW(select(all, {"nope"}), ConfigurationError);
}

TEST(Bounds, SatisfiedLimitsAddNothing) {
    ReferenceDataset ds{"plausible", "test", {}};
    ds.records.push_back(bound_record("caudal.surge", quantity::kSurgeFraction, {false, false, true}, 0.5, {}));
    ds.records.push_back(bound_record("all.yaw", quantity::kYawRate, {true, true, true}, {}, 0.15));
    const auto ev = evaluate({ds}, seed_bundle());
    ASSERT_EQ(ev.errors.size(), 2u);
    EXPECT_NEAR(ev.errors[0].predicted, 1.0, 1e-6);
    EXPECT_EQ(ev.errors[0].relative_error, 0.0);
    EXPECT_EQ(ev.errors[0].tolerance, 0.0);
    EXPECT_LT(ev.errors[1].predicted, 0.15);
    EXPECT_EQ(ev.errors[1].relative_error, 0.0);
    EXPECT_EQ(ev.objective, 0.0);
}

TEST(Bounds, ViolationIsRelativeToTheLimit) {
    ReferenceDataset ds{"plausible", "test", {}};
    ds.records.push_back(bound_record("left.yaw", quantity::kYawRate, {true, false, false}, 0.0, 0.1));
    ds.records.push_back(bound_record("left.surge", quantity::kSurgeFraction, {true, false, false}, 0.999, {}));
    const auto ev = evaluate({ds}, seed_bundle());
    const auto& yaw = ev.errors[0];
    ASSERT_GT(yaw.predicted, 0.1);
    EXPECT_EQ(yaw.target, 0.1);
    EXPECT_NEAR(yaw.relative_error, (yaw.predicted - 0.1) / 0.1, 1e-12);
    const auto& surge = ev.errors[1];
    ASSERT_LT(surge.predicted, 0.999);
    EXPECT_NEAR(surge.relative_error, (surge.predicted - 0.999) / 0.999, 1e-12);
    const double w = CalibrationOptions{}.tolerance_weight;
    EXPECT_NEAR(ev.objective, w * (yaw.relative_error * yaw.relative_error + surge.relative_error * surge.relative_error),
                1e-12 * ev.objective);
}

TEST(Bounds, BadLimitsAreRejected) {
    ReferenceDataset ds{"plausible", "test", {}};
    ds.records.push_back(bound_record("x", quantity::kYawRate, {true, false, false}, 0.3, 0.1));
    EXPECT_THROW(ds.validate(), ValidationError);
    ReferenceDataset ord{"ordering", "test", {}};
    DatasetRecord r;
    r.label = "o";
    r.quantity = quantity::kThrustOrdering;
    r.inputs = {{"voltage_v", 3.0}, {"good_fin_length_m", 0.012}, {"bad_fin_length_m", 0.006}};
    r.upper = 1.0;
    ord.records.push_back(r);
    EXPECT_THROW(calib::detail::check_resolvable(ord), ConfigurationError);
}

TEST(Disturbance, ExposesUnstableStraightCourse) {
    // M_v > M_u in the default body: a small yaw kick grows into a turn
    auto b = short_runs();
    const loco::FinSet caudal{false, false, true};
    const auto quiet = run_standard(caudal, b);
    EXPECT_EQ(quiet.steady_yaw_rate_rad_s, 0.0);
    b.locomotion.disturbance_yaw_rate_rad_s = 0.01;
    const auto kicked = run_standard(caudal, b);
    EXPECT_GT(std::abs(kicked.steady_yaw_rate_rad_s), 0.01);
    EXPECT_LT(kicked.steady_surge_m_s / kicked.steady_speed_m_s, 0.99);
    // the seed body has M_u > M_v and returns to a straight course
    const auto seed = run_standard(caudal, seed_bundle());
    EXPECT_LT(std::abs(seed.steady_yaw_rate_rad_s), 1e-3);
    EXPECT_TRUE(std::isinf(seed.turning_radius_m));
}
