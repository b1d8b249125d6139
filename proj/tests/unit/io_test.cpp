#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "generators.hpp"
#include "tcrobust/errors.hpp"
#include "tcrobust/io.hpp"

namespace tcr {
namespace {

using testing::Rng;

const char* kBinomial = R"({
  "horizon": 1.0,
  "scenarios": {"labels": ["up", "down"], "probabilities": [0.5, 0.5]},
  "events": [{"time": 1.0, "pre": [["up", "down"]], "post": [["up"], ["down"]]}],
  "models": {
    "base": {
      "up":   {"initial": 1.0, "events": [{"time": 1.0, "left_jump": 1.0}]},
      "down": {"initial": 1.0, "events": [{"time": 1.0, "left_jump": -0.5}]}
    }
  },
  "lambda": 0.1
})";

Json binomial_doc() { return Json::parse(kBinomial); }

std::string field_of(const Json& doc) {
  try {
    parse_market_spec(doc);
  } catch (const SpecError& e) {
    return e.field();
  }
  return "<accepted>";
}

void expect_same_family(const ModelFamily& a, const ModelFamily& b) {
  ASSERT_EQ(a.num_models(), b.num_models());
  EXPECT_EQ(a.lambda(), b.lambda());
  EXPECT_EQ(a.lambda_prime(), b.lambda_prime());
  const auto& ta = a.tree();
  const auto& tb = b.tree();
  EXPECT_EQ(ta.labels(), tb.labels());
  EXPECT_EQ(ta.probabilities(), tb.probabilities());
  EXPECT_EQ(ta.horizon(), tb.horizon());
  EXPECT_EQ(ta.root(), tb.root());
  ASSERT_EQ(ta.num_events(), tb.num_events());
  for (std::size_t k = 0; k < ta.num_events(); ++k) {
    EXPECT_EQ(ta.events()[k].time, tb.events()[k].time);
    EXPECT_EQ(ta.events()[k].pre, tb.events()[k].pre);
    EXPECT_EQ(ta.events()[k].post, tb.events()[k].post);
  }
  for (std::size_t th = 0; th < a.num_models(); ++th) {
    EXPECT_EQ(a.models()[th].label, b.models()[th].label);
    for (std::size_t w = 0; w < ta.num_scenarios(); ++w) {
      const auto& p = a.price(th, w);
      const auto& q = b.price(th, w);
      EXPECT_EQ(p.initial_value(), q.initial_value());
      EXPECT_EQ(p.slopes(), q.slopes());
      ASSERT_EQ(p.events().size(), q.events().size());
      for (std::size_t i = 0; i < p.events().size(); ++i) {
        EXPECT_EQ(p.events()[i].time, q.events()[i].time);
        EXPECT_EQ(p.events()[i].left_jump, q.events()[i].left_jump);
        EXPECT_EQ(p.events()[i].right_jump, q.events()[i].right_jump);
      }
    }
  }
}

TEST(MarketSpec, ParsesBinomial) {
  const auto fam = parse_market_spec(binomial_doc());
  EXPECT_EQ(fam.num_models(), 1u);
  EXPECT_EQ(fam.lambda(), 0.1);
  EXPECT_FALSE(fam.lambda_prime());
  EXPECT_EQ(fam.tree().num_events(), 1u);
  EXPECT_EQ(fam.price(0, 0).terminal_value(), 2.0);
  EXPECT_EQ(fam.price(0, 1).terminal_value(), 0.5);
  EXPECT_EQ(fam.price(0, 1).left_limit_at(1.0), 1.0);
}

TEST(MarketSpec, RandomRoundTrip) {
  Rng rng(77);
  for (int i = 0; i < 40; ++i) {
    const auto tree = testing::random_tree(rng, {.max_events = 3, .max_scenarios = 5,
                                                 .pre_information = true, .split_root = true});
    const auto fam = testing::random_family(rng, tree, 0.2, 0.1,
                                            {.num_models = 2, .slopes = true});
    const auto doc = market_spec_to_json(fam);
    const auto back = parse_market_spec(Json::parse(doc.dump()));
    expect_same_family(fam, back);
    EXPECT_EQ(market_spec_to_json(back).dump(), doc.dump());
  }
}

TEST(MarketSpec, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "tcrobust_io_test.json").string();
  write_text_file(path, kBinomial);
  const auto fam = load_market_spec(path);
  std::remove(path.c_str());
  EXPECT_EQ(fam.tree().labels(), (std::vector<std::string>{"up", "down"}));
  try {
    load_market_spec(path);
    FAIL() << "missing file accepted";
  } catch (const SpecError& e) {
    EXPECT_EQ(e.field(), path);
  }
}

TEST(MarketSpec, FieldPaths) {
  auto doc = binomial_doc();
  doc["scenarios"]["probabilities"] = {0.5, 0.4};
  EXPECT_EQ(field_of(doc), "scenarios.probabilities");

  doc = binomial_doc();
  doc["scenarios"]["probabilities"] = {1.0, 0.0};
  EXPECT_EQ(field_of(doc), "scenarios.probabilities[1]");

  doc = binomial_doc();
  doc.erase("horizon");
  EXPECT_EQ(field_of(doc), "horizon");

  doc = binomial_doc();
  doc["lambda"] = 1.5;
  EXPECT_EQ(field_of(doc), "lambda");

  doc = binomial_doc();
  doc["lambda_prime"] = 0.2;
  EXPECT_EQ(field_of(doc), "lambda_prime");

  doc = binomial_doc();
  doc["events"][0]["post"] = {{"up"}, {"sideways"}};
  EXPECT_EQ(field_of(doc), "events[0].post[1][0]");

  doc = binomial_doc();
  doc["events"][0]["post"] = {{"up"}};
  EXPECT_EQ(field_of(doc), "events[0].post");

  doc = binomial_doc();
  doc["events"][0]["time"] = 2.0;
  EXPECT_EQ(field_of(doc), "events[0].time");

  doc = binomial_doc();
  doc["models"]["base"]["down"].erase("initial");
  EXPECT_EQ(field_of(doc), "models.base.down.initial");

  doc = binomial_doc();
  doc["models"]["base"]["down"]["events"][0]["left_jump"] = "big";
  EXPECT_EQ(field_of(doc), "models.base.down.events[0].left_jump");

  doc = binomial_doc();
  doc["models"]["base"]["extra"] = doc["models"]["base"]["up"];
  EXPECT_EQ(field_of(doc), "models.base.extra");

  doc = binomial_doc();
  doc["scenarios"]["labels"] = {"up", "up"};
  EXPECT_EQ(field_of(doc), "scenarios.labels[1]");

  // Nonpositive price is a model-level contract problem.
  doc = binomial_doc();
  doc["models"]["base"]["down"]["events"][0]["left_jump"] = -1.0;
  EXPECT_EQ(field_of(doc), "models");

  // Price that reveals the split before the event is not adapted.
  doc = binomial_doc();
  doc["models"]["base"]["up"]["slopes"] = {0.5, 0.0};
  EXPECT_EQ(field_of(doc), "models");

  EXPECT_EQ(field_of(Json::array()), "<root>");
}

TEST(MarketSpec, MessageCarriesField) {
  auto doc = binomial_doc();
  doc["scenarios"]["probabilities"] = {0.5, 0.4};
  try {
    parse_market_spec(doc);
    FAIL();
  } catch (const SpecError& e) {
    EXPECT_NE(std::string(e.what()).find("scenarios.probabilities"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("0.9"), std::string::npos);
  }
}

TEST(StrategyJson, RoundTrip) {
  Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    const auto fam = testing::random_family(rng, testing::random_tree(rng), 0.1, std::nullopt);
    const auto s = testing::random_admissible_strategy(rng, fam, 1.5);
    const auto doc = strategy_to_json(s, fam.tree());
    const auto back = strategy_from_json(Json::parse(doc.dump()), fam.tree());
    EXPECT_EQ(back.x(), s.x());
    EXPECT_EQ(back.buy(), s.buy());
    EXPECT_EQ(back.sell(), s.sell());
  }
}

TEST(StrategyJson, Rejections) {
  const auto fam = parse_market_spec(binomial_doc());
  const Strategy none(std::make_shared<const StrategyLayout>(fam.tree()), 1.0);
  const auto good = strategy_to_json(none, fam.tree());
  auto field = [&](const Json& d) {
    try {
      strategy_from_json(d, fam.tree());
    } catch (const SpecError& e) {
      return e.field();
    }
    return std::string("<accepted>");
  };
  EXPECT_EQ(field(good), "<accepted>");
  auto d = good;
  d["slots"][0]["buy"] = -1.0;
  EXPECT_EQ(field(d), "strategy.slots[0]");
  d = good;
  d["slots"].erase(0);
  EXPECT_EQ(field(d), "strategy.slots");
  d = good;
  d["slots"][0]["kind"] = "Rate";
  EXPECT_EQ(field(d), "strategy.slots[0]");
  d = good;
  d["x"] = 0.0;
  EXPECT_EQ(field(d), "strategy.x");
}

TEST(CertificateJson, RoundTripStillVerifies) {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const auto fam = testing::random_cps_family(rng, {}, 0.2, 0.1);
    const auto cps = find_cps(fam, 0, 0.1);
    ASSERT_TRUE(cps);
    const auto doc = cps_to_json(*cps, fam);
    const auto back = cps_from_json(Json::parse(doc.dump()), fam);
    EXPECT_EQ(back.theta, cps->theta);
    EXPECT_EQ(back.lambda, cps->lambda);
    EXPECT_EQ(back.z0, cps->z0);
    EXPECT_EQ(back.z1, cps->z1);
    EXPECT_TRUE(verify_cps(back, fam, 0, 0.1));
  }
}

TEST(CertificateJson, Rejections) {
  const auto fam = parse_market_spec(binomial_doc());
  const auto cps = find_cps(fam, 0, 0.1);
  ASSERT_TRUE(cps);
  auto d = cps_to_json(*cps, fam);
  d["model"] = "other";
  EXPECT_THROW(cps_from_json(d, fam), SpecError);
  d = cps_to_json(*cps, fam);
  d["layers"].erase(1);
  EXPECT_THROW(cps_from_json(d, fam), SpecError);
  d = cps_to_json(*cps, fam);
  d["layers"][1]["cells"][0]["scenarios"] = {"down"};
  EXPECT_THROW(cps_from_json(d, fam), SpecError);
}

TEST(ClaimJson, ParsesAndRejects) {
  const auto fam = parse_market_spec(binomial_doc());
  const auto& tree = fam.tree();
  EXPECT_EQ(claim_from_json(Json::parse(R"({"claim": {"down": 0, "up": 1}})"), tree),
            (std::vector<double>{1.0, 0.0}));
  auto field = [&](const char* text) {
    try {
      claim_from_json(Json::parse(text), tree);
    } catch (const SpecError& e) {
      return e.field();
    }
    return std::string("<accepted>");
  };
  EXPECT_EQ(field(R"({"claim": {"up": 1}})"), "claim.down");
  EXPECT_EQ(field(R"({"claim": {"up": 1, "down": -2}})"), "claim.down");
  EXPECT_EQ(field(R"({"claim": {"up": 1, "down": 0, "flat": 3}})"), "claim.flat");
  EXPECT_EQ(field(R"({"payoff": {}})"), "claim");
}

}  // namespace
}  // namespace tcr
