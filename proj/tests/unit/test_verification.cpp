#include <gtest/gtest.h>

#include <algorithm>

#include "antago/verification.hpp"

using namespace antago;

namespace {

std::string failures(const VerificationReport& r)
{
    std::string out;
    for (const auto& c : r.checks) {
        if (!c.passed) out += c.name + " (" + std::to_string(c.value) + ")\n";
    }
    return out;
}

}  // namespace

TEST(Verification, MatchingSuitePasses)
{
    const auto r = verify_matching(7);
    EXPECT_TRUE(r.passed()) << failures(r);
    EXPECT_EQ(r.checks.size(), 5u);
}

TEST(Verification, GradientSuitePasses)
{
    const auto r = verify_gradients(11);
    EXPECT_TRUE(r.passed()) << failures(r);
}

TEST(Verification, GainSuitePasses)
{
    const auto r = verify_gains();
    EXPECT_TRUE(r.passed()) << failures(r);
}

TEST(Verification, ObserverDecaySuitePasses)
{
    const auto r = verify_observer_decay(3);
    EXPECT_TRUE(r.passed()) << failures(r);
}

TEST(Verification, LyapunovSuiteSeparatesConstantAndStateDependentForces)
{
    const auto r = verify_lyapunov(5);
    for (const auto& c : r.checks) {
        // Psi descent only follows for a constant force; the F3 spring load is neither
        // constant nor friction-like and is reported rather than asserted.
        if (c.name.find("F3") != std::string::npos) continue;
        EXPECT_TRUE(c.passed) << c.name << " " << c.value;
    }
    EXPECT_TRUE(std::any_of(r.checks.begin(), r.checks.end(),
                            [](const OracleCheck& c) { return c.name.find("F3") != std::string::npos; }));
}

TEST(Verification, SameSeedSameReport)
{
    const auto a = verify_matching(42, 20);
    const auto b = verify_matching(42, 20);
    ASSERT_EQ(a.checks.size(), b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) EXPECT_EQ(a.checks[i].value, b.checks[i].value);
}

TEST(Verification, DispatchAndFormatting)
{
    const auto suites = verification_suites();
    EXPECT_NE(std::find(suites.begin(), suites.end(), "gains"), suites.end());
    const auto r = run_verification("gains", 1);
    const std::string text = format_report(r);
    EXPECT_NE(text.find("[ok]"), std::string::npos);
    EXPECT_NE(text.find("PASSED"), std::string::npos);
    EXPECT_THROW((void)run_verification("nonsense", 1), std::invalid_argument);
}

TEST(Verification, RelativeDifference)
{
    EXPECT_EQ(relative_difference(1.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(relative_difference(1.0, 2.0), 0.5);
    EXPECT_DOUBLE_EQ(relative_difference(0.0, 1e-12, 1e-6), 1e-6);
}
