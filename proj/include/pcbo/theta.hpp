#ifndef PCBO_THETA_HPP
#define PCBO_THETA_HPP

#include <array>
#include <cmath>
#include <string>
#include <string_view>

namespace pcbo {

/// The four conditional-independence tests. Order fixes the one-hot
/// encoding and the serialized names "zf", "t", "mi", "mi-sh".
enum class TestKind { FisherZ = 0, StudentT = 1, MutualInfoChi2 = 2, MutualInfoShrink = 3 };

inline constexpr std::array<TestKind, 4> kAllTests = {TestKind::FisherZ, TestKind::StudentT, TestKind::MutualInfoChi2,
                                                      TestKind::MutualInfoShrink};

std::string_view to_string(TestKind t);
/// Throws InvalidInput for anything other than the four stable names.
TestKind parse_test_kind(std::string_view name);

inline constexpr double kMinLog10Alpha = -5.0;
inline constexpr double kMaxLog10Alpha = -1.0;

/// Hyperparameter point (alpha, test). The significance level is stored as
/// log10(alpha) so grid points survive encode/decode round trips exactly.
struct Theta {
    double log10_alpha = -2.0;
    TestKind test = TestKind::FisherZ;

    static Theta from_alpha(double alpha, TestKind test);
    double alpha() const { return std::pow(10.0, log10_alpha); }
    /// Throws InvalidInput unless 1e-5 <= alpha <= 1e-1.
    void validate() const;

    friend bool operator==(const Theta&, const Theta&) = default;
};

}  // namespace pcbo

#endif  // PCBO_THETA_HPP
