#include "cpg/mdp_io.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <random>

#include "cpg/errors.hpp"
#include "test_support.hpp"

namespace cpg {
namespace {

constexpr const char* kSplit2 = R"(mdp 1
gamma 0.5
horizon 2
states 3
absorbing 2
actions 0 2
actions 1 1
actions 2 1
start 0 1
trans 0 0 2 1
trans 0 1 1 1
trans 1 0 2 1
trans 2 0 2 1
reward 0 0 1
reward 0 1 0
reward 1 0 2
)";

std::string replace_line(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse_mdp(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "expected a parse error";
  return 9999;
}

TEST(ParseMdp, Split2Fields) {
  const auto mdp = parse_mdp(kSplit2);
  EXPECT_EQ(mdp.num_states(), 3u);
  EXPECT_EQ(mdp.layout().actions_per_state(), (std::vector<std::size_t>{2, 1, 1}));
  EXPECT_EQ(mdp.gamma(), 0.5);
  EXPECT_EQ(mdp.horizon(), 2);
  EXPECT_EQ(mdp.absorbing(), 2u);
  EXPECT_EQ(mdp.start()[0], 1.0);
  EXPECT_EQ(mdp.transition(0, 1)[1], 1.0);
  EXPECT_EQ(mdp.reward(1, 0), 2.0);
  EXPECT_EQ(mdp, testing::fixture("split2"));
}

TEST(ParseMdp, OmittedRewardDefaultsToZero) {
  const auto mdp = parse_mdp(replace_line(kSplit2, "reward 0 1 0\n", ""));
  EXPECT_EQ(mdp, parse_mdp(kSplit2));
  EXPECT_EQ(mdp.reward(0, 1), 0.0);
}

TEST(ParseMdp, CommentsAndBlankLines) {
  const auto mdp = parse_mdp("# leading comment\n\n" + replace_line(kSplit2, "gamma 0.5", "gamma   0.5   # discount"));
  EXPECT_EQ(mdp, parse_mdp(kSplit2));
}

TEST(ParseMdp, GammaOutOfRange) {
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "gamma 0.5", "gamma 1.5")), 2u);
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "gamma 0.5", "gamma -0.1")), 2u);
}

TEST(ParseMdp, SyntaxErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "trans 0 1 1 1", "trans 0 1 1 one")), 11u);
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "trans 0 1 1 1", "trans 0 1 1")), 11u);
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "horizon 2", "horizon 2.5")), 3u);
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "start 0 1", "start 0 nan")), 9u);
}

TEST(ParseMdp, DuplicateTransition) {
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "trans 1 0 2 1\n", "trans 1 0 2 0.5\ntrans 1 0 2 0.5\n")), 13u);
}

TEST(ParseMdp, UnknownDirective) {
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "horizon 2", "horizon 2\ndiscount 0.9")), 4u);
}

TEST(ParseMdp, IndicesOutOfRange) {
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "trans 0 1 1 1", "trans 0 2 1 1")), 11u);
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "trans 0 1 1 1", "trans 0 1 3 1")), 11u);
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "reward 1 0 2", "reward 4 0 2")), 16u);
}

TEST(ParseMdp, MissingMandatoryPieces) {
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "gamma 0.5\n", "")), 0u);
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "horizon 2\n", "")), 0u);
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "actions 1 1\n", "")), 0u);
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "trans 1 0 2 1\n", "")), 0u);
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "mdp 1\n", "")), 1u);
  EXPECT_EQ(parse_error_line(replace_line(kSplit2, "mdp 1", "mdp 2")), 1u);
  EXPECT_THROW(parse_mdp(""), ParseError);
}

TEST(ParseMdp, MissingFileIsReported) {
  EXPECT_THROW(load_mdp("/nonexistent/model.mdp"), Error);
}

TEST(SerializeMdp, RoundTripIsBitExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> noise(-1e3, 1e3);
  for (int trial = 0; trial < 200; ++trial) {
    auto mdp = testing::random_valid_mdp(rng);
    // Values with long decimal expansions and extreme exponents.
    mdp.reward(mdp.absorbing() == 0 ? 1 : 0, 0) = noise(rng) * 1e-300;
    mdp.set_gamma(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    const auto text = serialize_mdp(mdp);
    const auto back = parse_mdp(text);
    ASSERT_EQ(back, mdp) << text;
    ASSERT_EQ(serialize_mdp(back), text);
  }
}

TEST(SerializeMdp, NegativeZeroSurvives) {
  auto mdp = testing::fixture("chain3");
  mdp.reward(0, 0) = -0.0;
  const auto back = parse_mdp(serialize_mdp(mdp));
  EXPECT_TRUE(std::signbit(back.reward(0, 0)));
}

TEST(Theta, ParseDefaultsAndErrors) {
  const auto mdp = testing::fixture("split2b");
  const auto theta = parse_theta("# comment\ntheta 1 1 -0.25\ntheta 0 0 2\n", mdp.layout());
  EXPECT_EQ(theta(0, 0), 2.0);
  EXPECT_EQ(theta(0, 1), 0.0);
  EXPECT_EQ(theta(1, 1), -0.25);
  EXPECT_THROW(parse_theta("theta 1 2 1\n", mdp.layout()), ParseError);
  EXPECT_THROW(parse_theta("theta 0 0 1\ntheta 0 0 2\n", mdp.layout()), ParseError);
  EXPECT_THROW(parse_theta("weight 0 0 1\n", mdp.layout()), ParseError);
}

TEST(Theta, RoundTrip) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mdp = testing::random_valid_mdp(rng);
    const auto theta = testing::random_theta(rng, mdp, 10.0);
    EXPECT_EQ(parse_theta(serialize_theta(theta), mdp.layout()), theta);
  }
}

}  // namespace
}  // namespace cpg
