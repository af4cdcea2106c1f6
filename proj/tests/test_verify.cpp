#include <gtest/gtest.h>

#include <random>

#include "ghzloc/verify.hpp"

using namespace ghzloc;

TEST(SettingsBatch, RandomIsDeterministicAndUnit) {
    const auto a = SettingsBatch::random(25, 3), b = SettingsBatch::random(25, 3);
    ASSERT_EQ(a.settings.size(), 25u);
    for (std::size_t i = 0; i < a.settings.size(); ++i) {
        EXPECT_EQ(a.settings[i].x, b.settings[i].x);
        EXPECT_EQ(a.settings[i].z, b.settings[i].z);
        EXPECT_TRUE(is_unit(a.settings[i].y));
    }
    EXPECT_THROW(SettingsBatch::random(0, 1), std::invalid_argument);
}

TEST(SettingsBatch, PauliAxes) {
    const auto b = SettingsBatch::pauli_axes();
    EXPECT_EQ(b.settings.size(), 27u);
}

TEST(SettingsBatch, FromJson) {
    const auto j = nlohmann::json::parse(R"([[[0,0,1],[1,0,0],[0,1,0]], [[1,0,0],[0,0,-1]]])");
    const auto b = SettingsBatch::from_json(j);
    ASSERT_EQ(b.settings.size(), 2u);
    EXPECT_EQ(b.settings[1].y, (Vec3{0, 0, -1}));
    EXPECT_EQ(b.settings[1].z, kZAxis);
    EXPECT_THROW(SettingsBatch::from_json(nlohmann::json::parse("[[[0,0,2],[1,0,0]]]")), std::invalid_argument);
    EXPECT_THROW(SettingsBatch::from_json(nlohmann::json::parse("{}")), std::invalid_argument);
}

TEST(RunVerification, Lhs2qPasses) {
    const auto r = run_verification(ModelKind::Lhs2q, {}, SettingsBatch::random(100, 7), {});
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.maxDeviation, 1e-6);
    EXPECT_EQ(r.batchSize, 100u);
}

TEST(RunVerification, SteeringModelsPass) {
    for (auto m : {ModelKind::Lhv2q, ModelKind::Bilocal, ModelKind::SymmetrizedBilocal}) {
        const auto r = run_verification(m, {1.5, 0.5, 1.0}, SettingsBatch::random(30, 5), {});
        EXPECT_TRUE(r.pass) << r.to_text();
        EXPECT_LE(r.maxSimplexResidual, 1e-10);
    }
}

TEST(RunVerification, OffBoundaryFailsWithResidual) {
    const auto r = run_verification(ModelKind::Bilocal, {1.0, 0.5, 0.9}, SettingsBatch::random(10, 7), {});
    EXPECT_FALSE(r.pass);
    EXPECT_NEAR(r.parameterResidual, -0.1 * 2.0 * kPi, 1e-8);
    EXPECT_GT(r.maxDeviation, 1e-3);
}

TEST(RunVerification, FullyLocalPauliAxes) {
    const auto r = run_verification(ModelKind::FullyLocal, {1.0, 0.5, 1.0}, SettingsBatch::pauli_axes(), {});
    EXPECT_TRUE(r.pass) << r.to_text();
    EXPECT_EQ(r.pptSamples + r.filterSamples, 27u);
    EXPECT_EQ(r.pptPasses, r.pptSamples);
    EXPECT_EQ(r.filterPasses, r.filterSamples);
}

TEST(RunVerification, FullyLocalVariants) {
    for (auto m : {ModelKind::SymmetrizedFullyLocal, ModelKind::FullyLocalRaw}) {
        const auto r = run_verification(m, {1.0, 0.8, 1.0}, SettingsBatch::random(10, 2), {});
        EXPECT_TRUE(r.pass) << r.to_text();
    }
    const auto bad = run_verification(ModelKind::FullyLocal, {1.0, 0.8, 0.95}, SettingsBatch::random(5, 2), {});
    EXPECT_FALSE(bad.pass);
    EXPECT_GT(std::abs(bad.parameterResidual), 1e-5);
}

TEST(RunVerification, MonteCarloTolerance) {
    QuadratureOptions mc;
    mc.mcSamples = 40'000;
    const auto r = run_verification(ModelKind::Lhv2q, {}, SettingsBatch::random(5, 9), mc);
    EXPECT_NEAR(r.tolerance, 3.0 / 200.0, 1e-15);
    EXPECT_TRUE(r.pass) << r.to_text();
}

TEST(RunVerification, DeterministicReports) {
    const auto batch = SettingsBatch::random(8, 4);
    const auto a = run_verification(ModelKind::FullyLocal, {}, batch, {});
    const auto b = run_verification(ModelKind::FullyLocal, {}, batch, {});
    EXPECT_EQ(a.to_json(false), b.to_json(false));
}

TEST(RunVerification, JsonSchema) {
    const auto r = run_verification(ModelKind::Lhv2q, {}, SettingsBatch::random(3, 1), {});
    const auto j = r.to_json();
    for (const char* key : {"model", "params", "grid", "deviations", "pass", "worst_setting"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_TRUE(j["deviations"].contains("max"));
    EXPECT_TRUE(j["deviations"].contains("mean"));
    EXPECT_EQ(j["model"], "lhv2q");
}

TEST(RunVerification, DoublingOrderDoesNotHurt) {
    const auto batch = SettingsBatch::random(10, 12);
    QuadratureOptions lo, hi;
    lo.order = 100;
    hi.order = 200;
    const auto a = run_verification(ModelKind::FullyLocal, {}, batch, lo);
    const auto b = run_verification(ModelKind::FullyLocal, {}, batch, hi);
    EXPECT_LE(b.maxDeviation, std::max(1.1 * a.maxDeviation, 1e-13));
}

TEST(ParseModel, Names) {
    EXPECT_EQ(parse_model("symmetrized-bilocal"), ModelKind::SymmetrizedBilocal);
    EXPECT_THROW(parse_model("nonsense"), std::invalid_argument);
}

TEST(BellValue, Mermin) {
    EXPECT_NEAR(bell_value(ghz_plus_projector()), 4.0, 1e-14);
    EXPECT_NEAR(bell_value(Mat8::identity() * 0.125), 0.0, 1e-15);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double q = kSqrt3 / 4.0 * std::abs(u(rng));
        const double p = triangle_half_width(q) * u(rng);
        EXPECT_NEAR(bell_value(three_qubit_density({p, q})), 8.0 * p, 1e-13);
    }
}

TEST(BellValue, FullyLocalCurveRespectsLocalBound) {
    for (int i = 1; i <= 100; ++i) {
        const auto pt = fully_local_curve(i / 100.0, 80);
        EXPECT_LE(bell_value(three_qubit_density(pt)), 2.0);
    }
}
