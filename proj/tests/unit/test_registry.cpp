#include <gtest/gtest.h>

#include <memory>

#include "pulselab/campaigns.hpp"
#include "pulselab/error.hpp"
#include "pulselab/registry.hpp"

using namespace pulselab;

namespace {

std::shared_ptr<const LaserSystem> calibrated(const LaserSystemSpec& spec, std::uint64_t seed) {
    LaserSystem s = make_laser_system(spec);
    calibrate_tl(s, calibration_ga_config(s), seed);
    return std::make_shared<const LaserSystem>(std::move(s));
}

}  // namespace

TEST(Registry, FamilyOrderAndIonLabels) {
    // Compound, halogen ion, methyl halide ion, in family order.
    const std::vector<std::array<const char*, 3>> table{
        {"CH2Cl2", "Cl", "CH2Cl"},   {"CHCl3", "Cl", "CHCl2"},  {"CHCl2Br", "Cl", "CHCl2"},
        {"CHClBr2", "Cl", "CHBrCl"}, {"CHBr3", "Br", "CHBr2"},  {"CH2Br2", "Br", "CH2Br"},
        {"CH2BrCl", "Cl", "CH2Cl"},  {"CH2ICl", "Cl", "CH2Cl"}, {"CH2IBr", "Br", "CH2Br"},
    };
    const auto reg = default_registry();
    ASSERT_EQ(reg.entries().size(), table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& e = reg.entries()[i];
        EXPECT_EQ(e.name, table[i][0]);
        EXPECT_EQ(e.family_index, static_cast<int>(i + 1));
        EXPECT_EQ(e.s1_label, table[i][1]);
        EXPECT_EQ(e.s2_label, table[i][2]);
    }
    EXPECT_FALSE(reg.contains("CH2I2"));
}

TEST(Registry, IonMassesAreNominalIsotopeSums) {
    // 12C, 1H, 35Cl, 79Br, 127I.
    auto mass = [](int c, int h, int cl, int br, int i) { return 12 * c + h + 35 * cl + 79 * br + 127 * i; };
    const auto reg = default_registry();
    EXPECT_EQ(reg.find("CH2BrCl").parent_mass, mass(1, 2, 1, 1, 0));
    EXPECT_EQ(reg.find("CH2BrCl").s2_mass, mass(1, 2, 1, 0, 0));
    EXPECT_EQ(reg.find("CHClBr2").s2_mass, mass(1, 1, 1, 1, 0));
    EXPECT_EQ(reg.find("CH2IBr").parent_mass, mass(1, 2, 0, 1, 1));
    EXPECT_EQ(reg.find("CHBr3").s1_mass, 79);
    for (const auto& e : reg.entries()) EXPECT_GT(e.parent_mass, e.s2_mass);
}

TEST(Registry, LookupAndUniqueness) {
    const auto reg = default_registry();
    EXPECT_EQ(reg.find("CHBr3").family_index, 5);
    try {
        reg.find("CH2I2");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::missing_compound);
    }
    auto entries = reg.entries();
    entries[1].family_index = entries[0].family_index;
    EXPECT_THROW(Registry{entries}, Error);
    entries = reg.entries();
    entries[1].name = entries[0].name;
    EXPECT_THROW(Registry{entries}, Error);
}

TEST(Registry, SortsByFamilyIndex) {
    auto entries = default_registry().entries();
    std::reverse(entries.begin(), entries.end());
    const Registry reg(entries);
    for (std::size_t i = 0; i < reg.entries().size(); ++i)
        EXPECT_EQ(reg.entries()[i].family_index, static_cast<int>(i + 1));
}

TEST(Registry, TransformLimitedYieldGrowsAlongTheFamilyOnSystemOne) {
    const auto one = calibrated(system_one_spec(), 1);
    double prev = 0.0;
    const Registry family = default_registry();
    for (const auto& s : family.entries()) {
        const double j = Assay(one, s).j_tl();
        EXPECT_GT(j, prev) << s.name;
        prev = j;
    }
}

TEST(Registry, BromochloromethaneTransformLimitedYieldOnSystemTwo) {
    const auto two = calibrated(system_two_spec(), 2);
    EXPECT_NEAR(Assay(two, default_registry().find("CH2BrCl")).j_tl(), 0.15, 0.15 * 0.3);
}

TEST(Registry, TransformLimitedPulseFavorsTheMethylHalideIonEverywhere) {
    const auto one = calibrated(system_one_spec(), 1);
    const auto two = calibrated(system_two_spec(), 2);
    const Registry family = default_registry();
    for (const auto& s : family.entries()) {
        EXPECT_LT(Assay(one, s).j_tl(), 1.0) << s.name;
        EXPECT_LT(Assay(two, s).j_tl(), 1.0) << s.name;
    }
}
