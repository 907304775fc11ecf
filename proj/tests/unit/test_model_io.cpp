#include <random>

#include <gtest/gtest.h>
#include <json.hpp>

#include "simcal/calibrators.hpp"
#include "simcal/error.hpp"
#include "simcal/model_io.hpp"
#include "unit/support.hpp"

using namespace simcal;

TEST(ModelIo, RoundTripIsExact) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto pairs = testing_support::random_pairs(rng, 250);
  for (Method method : {Method::linear, Method::isotonic, Method::sigmoid, Method::poly2, Method::poly3,
                        Method::poly4, Method::beta}) {
    const auto m = fit(method, pairs);
    const auto back = deserialize(serialize(m));
    EXPECT_EQ(back.method(), m.method());
    EXPECT_EQ(back.params(), m.params());
    EXPECT_EQ(back.breakpoints(), m.breakpoints());
    EXPECT_EQ(back.values(), m.values());
    EXPECT_EQ(back.train_meta().dataset_digest, m.train_meta().dataset_digest);
    EXPECT_EQ(back.train_meta().diagnostics.flags, m.train_meta().diagnostics.flags);
    for (int t = 0; t < 10000; ++t) {
      const double x = u(rng);
      ASSERT_EQ(back.apply(x), m.apply(x));
    }
  }
}

TEST(ModelIo, TamperedModelsRejected) {
  auto doc = nlohmann::json::parse(serialize(CalibrationModel::isotonic({0.1, 0.5, 0.9}, {0.2, 0.4, 0.8})));
  auto decreasing = doc;
  decreasing["values"] = {0.2, 0.9, 0.8};
  EXPECT_THROW(deserialize(decreasing.dump()), ValidationError);
  auto empty = doc;
  empty["breakpoints"] = nlohmann::json::array();
  empty["values"] = nlohmann::json::array();
  EXPECT_THROW(deserialize(empty.dump()), ValidationError);
  auto schema = doc;
  schema["schema"] = "something-else";
  EXPECT_THROW(deserialize(schema.dump()), ValidationError);
  auto method = doc;
  method["method"] = "spline";
  EXPECT_THROW(deserialize(method.dump()), ValidationError);
  EXPECT_THROW(deserialize("{not json"), ValidationError);

  auto beta = nlohmann::json::parse(serialize(CalibrationModel::beta(2.0, 3.0)));
  beta["params"][1] = -1.0;
  EXPECT_THROW(deserialize(beta.dump()), ValidationError);
}

TEST(ModelIo, DocumentFields) {
  const auto doc = nlohmann::json::parse(serialize(CalibrationModel::linear(0.9, 0.05)));
  EXPECT_EQ(doc["schema"], kModelSchema);
  EXPECT_EQ(doc["method"], "linear");
  EXPECT_EQ(doc["clamp"], nlohmann::json::array({0.0, 1.0}));
  EXPECT_TRUE(doc.contains("train_meta"));
}
