#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "anova/datasets.hpp"
#include "anova/error.hpp"

using namespace anova;

namespace {

// Written out from the benchmark definitions, independently of the library.
double f1_ref(const std::vector<double>& x) {
  return 10.0 * std::sin(std::numbers::pi * x[0] * x[1]) +
         20.0 * std::pow(x[2] - 0.5, 2) + 10.0 * x[3] + 5.0 * x[4];
}

double f2_ref(const std::vector<double>& x) {
  const double pi = std::numbers::pi;
  const double a = 100.0 * x[0];
  const double b = (520.0 * pi * x[1] + 40.0 * pi) * x[2] -
                   1.0 / ((520.0 * pi * x[1] + 40.0 * pi) * (10.0 * x[3] + 1.0));
  return std::sqrt(a * a + b * b);
}

double f3_ref(const std::vector<double>& x) {
  const double pi = std::numbers::pi;
  const double s2 = 520.0 * pi * x[1] + 40.0 * pi;
  const double num = s2 * x[2] - 1.0 / (s2 * (10.0 * x[3] + 1.0));
  return std::atan(num / (100.0 * x[0]));
}

Dataset small_dataset(std::size_t m) {
  Dataset ds;
  ds.nodes = Matrix(m, 2);
  for (std::size_t r = 0; r < m; ++r) {
    ds.nodes(r, 0) = static_cast<double>(r);
    ds.nodes(r, 1) = 2.0 * static_cast<double>(r);
    ds.values.push_back(static_cast<double>(r) * 10.0);
  }
  ds.columns = {"a", "b"};
  ds.target_name = "y";
  return ds;
}

}  // namespace

TEST(Friedman, Examples) {
  std::vector<double> x(10, 0.5);
  EXPECT_NEAR(friedman_eval(FriedmanSpec::standard(1), x),
              10.0 * std::sin(std::numbers::pi / 4.0) + 5.0 + 2.5, 1e-12);
  EXPECT_NEAR(friedman_eval(FriedmanSpec::standard(2), std::vector<double>(4, 0.0)),
              1.0 / (40.0 * std::numbers::pi), 1e-15);
}

TEST(Friedman, F1IgnoresTrailingVariables) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(10);
  for (double& v : x) v = u(rng);
  const double base = friedman_eval(FriedmanSpec::standard(1), x);
  for (std::size_t i = 5; i < 10; ++i) x[i] = u(rng);
  EXPECT_EQ(friedman_eval(FriedmanSpec::standard(1), x), base);
}

TEST(Friedman, MatchesIndependentFormulas) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x10(10);
    for (double& v : x10) v = u(rng);
    std::vector<double> x4(x10.begin(), x10.begin() + 4);
    EXPECT_NEAR(friedman_eval(FriedmanSpec::standard(1), x10), f1_ref(x10), 1e-12);
    const double f2 = f2_ref(x4);
    EXPECT_NEAR(friedman_eval(FriedmanSpec::standard(2), x4), f2,
                1e-12 * std::max(1.0, f2));
    EXPECT_NEAR(friedman_eval(FriedmanSpec::standard(3), x4), f3_ref(x4), 1e-12);
  }
}

TEST(Friedman, F3LimitAtZero) {
  const FriedmanSpec s = FriedmanSpec::standard(3);
  EXPECT_NEAR(friedman_eval(s, std::vector<double>{0.0, 0.5, 0.5, 0.5}),
              std::numbers::pi / 2.0, 1e-15);
  EXPECT_NEAR(friedman_eval(s, std::vector<double>{0.0, 0.0, 0.0, 0.0}),
              -std::numbers::pi / 2.0, 1e-15);
}

TEST(Friedman, DimensionMismatch) {
  EXPECT_THROW(friedman_eval(FriedmanSpec::standard(2), std::vector<double>(3, 0.1)),
               Error);
}

TEST(Friedman, NoiseFreeSampleMatchesEval) {
  FriedmanSpec s = FriedmanSpec::standard(1);
  s.noise_sd = 0.0;
  const Dataset ds = friedman_sample(s, 50, 9);
  for (std::size_t m = 0; m < ds.size(); ++m) {
    EXPECT_EQ(ds.values[m], friedman_eval(s, ds.nodes.row(m)));
    for (double v : ds.nodes.row(m)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(Friedman, NoiseStatistics) {
  const Dataset ds = friedman_sample(FriedmanSpec::standard(1), 200, 4);
  double mean = 0.0;
  for (std::size_t m = 0; m < ds.size(); ++m) mean += ds.values[m] - ds.clean_values[m];
  mean /= 200.0;
  double var = 0.0;
  for (std::size_t m = 0; m < ds.size(); ++m) {
    const double e = ds.values[m] - ds.clean_values[m] - mean;
    var += e * e;
  }
  const double sd = std::sqrt(var / 199.0);
  EXPECT_LE(std::abs(mean), 0.25);
  EXPECT_GE(sd, 0.8);
  EXPECT_LE(sd, 1.2);
}

TEST(Friedman, SameSeedSameData) {
  const Dataset a = friedman_sample(FriedmanSpec::standard(2), 30, 77);
  const Dataset b = friedman_sample(FriedmanSpec::standard(2), 30, 77);
  EXPECT_EQ(a.nodes, b.nodes);
  EXPECT_EQ(a.values, b.values);
  const Dataset c = friedman_sample(FriedmanSpec::standard(2), 30, 78);
  EXPECT_NE(a.values, c.values);
}

TEST(RandomStream, PortableSequence) {
  // pinned so that a change of generator or seeding is noticed
  RandomStream a(42, 3, RandomStream::Purpose::Split);
  RandomStream b(42, 3, RandomStream::Purpose::Split);
  RandomStream c(42, 4, RandomStream::Purpose::Split);
  const double first = a.uniform();
  EXPECT_EQ(first, b.uniform());
  EXPECT_NE(first, c.uniform());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(a.below(7), 7u);
  }
}

TEST(Csv, ReadsFeaturesAndTarget) {
  std::istringstream in("a,b,y\n1,2,3\n4,5,6\n7,8,9\n");
  const Dataset ds = read_csv(in, std::string("y"));
  EXPECT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.dimension(), 2u);
  EXPECT_EQ(ds.values, (std::vector<double>{3, 6, 9}));
  EXPECT_EQ(ds.nodes(1, 1), 5.0);
  EXPECT_EQ(ds.columns, (std::vector<std::string>{"a", "b"}));
}

TEST(Csv, TargetByPosition) {
  std::istringstream in("y,a,b\n3,1,2\n6,4,5\n");
  const Dataset ds = read_csv(in, std::size_t{0});
  EXPECT_EQ(ds.target_name, "y");
  EXPECT_EQ(ds.values, (std::vector<double>{3, 6}));
  EXPECT_EQ(ds.nodes(1, 0), 4.0);
}

TEST(Csv, FeaturesOnly) {
  std::istringstream in("a,b\n1,2\n");
  const Dataset ds = read_csv(in, NoTarget{});
  EXPECT_EQ(ds.dimension(), 2u);
  EXPECT_TRUE(ds.values.empty());
}

TEST(Csv, NanNamesRowAndColumn) {
  std::istringstream in("a,b,y\n1,2,3\n4,NaN,6\n");
  try {
    read_csv(in, std::string("y"));
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_EQ(e.code(), ErrorCode::Parse);
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'b'"), std::string::npos) << msg;
  }
}

TEST(Csv, Errors) {
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty, std::string("y")), Error);
  std::istringstream missing("a,b\n1,2\n");
  EXPECT_THROW(read_csv(missing, std::string("y")), Error);
  std::istringstream text("a,y\nfoo,2\n");
  EXPECT_THROW(read_csv(text, std::string("y")), Error);
  std::istringstream ragged("a,y\n1,2,3\n");
  EXPECT_THROW(read_csv(ragged, std::string("y")), Error);
  std::istringstream header_only("a,y\n");
  EXPECT_THROW(read_csv(header_only, std::string("y")), Error);
  EXPECT_THROW(load_csv("/nonexistent/file.csv", std::string("y")), Error);
}

TEST(Normalize, Examples) {
  Dataset train;
  train.nodes = Matrix(2, 1);
  train.nodes(0, 0) = 2.0;
  train.nodes(1, 0) = 4.0;
  train.values = {0.0, 0.0};
  Dataset probe = train;
  probe.nodes(0, 0) = 3.0;
  probe.nodes(1, 0) = 5.0;
  const Dataset out = normalize(probe, &train);
  EXPECT_EQ(out.nodes(0, 0), 0.5);
  EXPECT_EQ(out.nodes(1, 0), 1.0);
}

TEST(Normalize, UnitDataUnchanged) {
  Dataset ds;
  ds.nodes = Matrix(3, 1);
  ds.nodes(0, 0) = 0.0;
  ds.nodes(1, 0) = 0.37;
  ds.nodes(2, 0) = 1.0;
  ds.values = {1, 2, 3};
  const Dataset out = normalize(ds);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_NEAR(out.nodes(m, 0), ds.nodes(m, 0), 1e-15);
  }
}

TEST(Normalize, ConstantColumnIsHalf) {
  Dataset ds = small_dataset(4);
  for (std::size_t m = 0; m < 4; ++m) ds.nodes(m, 1) = 3.0;
  const Dataset out = normalize(ds);
  for (std::size_t m = 0; m < 4; ++m) EXPECT_EQ(out.nodes(m, 1), 0.5);
}

TEST(Normalize, IdempotentWithSameReference) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(3.0, 10.0);
  Dataset train;
  Dataset test;
  train.nodes = Matrix(20, 3);
  test.nodes = Matrix(20, 3);
  for (std::size_t m = 0; m < 20; ++m) {
    for (std::size_t j = 0; j < 3; ++j) {
      train.nodes(m, j) = g(rng);
      test.nodes(m, j) = g(rng);
    }
    train.values.push_back(g(rng));
    test.values.push_back(g(rng));
  }
  const Dataset train_n = normalize(train);
  const Dataset once = normalize(test, &train);
  const Dataset twice = normalize(once, &train_n);
  for (std::size_t m = 0; m < 20; ++m) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_GE(once.nodes(m, j), 0.0);
      EXPECT_LE(once.nodes(m, j), 1.0);
      EXPECT_NEAR(twice.nodes(m, j), once.nodes(m, j), 1e-15);
    }
  }
}

TEST(Normalize, TargetRoundTrip) {
  Dataset ds = small_dataset(5);
  const Dataset out = normalize(ds, nullptr, true);
  ASSERT_TRUE(out.normalization->target);
  EXPECT_EQ(out.values.front(), 0.0);
  EXPECT_EQ(out.values.back(), 1.0);
  const auto back = denormalize_targets(out.values, *out.normalization);
  for (std::size_t m = 0; m < 5; ++m) EXPECT_NEAR(back[m], ds.values[m], 1e-12);
}

TEST(ProjectColumns, KeepsSelected) {
  const Dataset ds = small_dataset(3);
  const Dataset p = project_columns(ds, {1});
  EXPECT_EQ(p.dimension(), 1u);
  EXPECT_EQ(p.nodes(2, 0), 4.0);
  EXPECT_EQ(p.columns, (std::vector<std::string>{"b"}));
  EXPECT_THROW(project_columns(ds, {}), Error);
}

TEST(Split, SizesAndPartition) {
  const Dataset ds = small_dataset(10);
  SplitPlan plan;
  plan.mode = SplitPlan::Fraction{0.7};
  plan.repetitions = 3;
  plan.seed = 8;
  const auto [train, test] = split(ds, plan, 0);
  EXPECT_EQ(train.size(), 7u);
  EXPECT_EQ(test.size(), 3u);
  std::multiset<double> all;
  for (double v : train.values) all.insert(v);
  for (double v : test.values) all.insert(v);
  EXPECT_EQ(all, std::multiset<double>(ds.values.begin(), ds.values.end()));
}

TEST(Split, Deterministic) {
  const Dataset ds = small_dataset(40);
  SplitPlan plan;
  plan.repetitions = 2;
  plan.seed = 3;
  EXPECT_EQ(split(ds, plan, 1).first.values, split(ds, plan, 1).first.values);
}

TEST(Split, RepetitionsDiffer) {
  const Dataset ds = small_dataset(30);
  SplitPlan plan;
  plan.repetitions = 20;
  plan.seed = 11;
  std::set<std::vector<double>> seen;
  for (std::size_t r = 0; r < plan.repetitions; ++r) {
    auto values = split(ds, plan, r).first.values;
    std::sort(values.begin(), values.end());
    EXPECT_TRUE(seen.insert(values).second) << "repetition " << r;
  }
}

TEST(Split, Errors) {
  const Dataset ds = small_dataset(3);
  SplitPlan plan;
  plan.mode = SplitPlan::Fraction{0.1};
  EXPECT_THROW(split(ds, plan, 0), Error);
  plan.mode = SplitPlan::Fraction{1.0};
  EXPECT_THROW(plan.validate(), Error);
  plan.mode = SplitPlan::Fraction{0.5};
  plan.repetitions = 0;
  EXPECT_THROW(plan.validate(), Error);
  plan.repetitions = 2;
  EXPECT_THROW(split(ds, plan, 2), Error);
}

TEST(Evaluate, MedianOfOne) {
  const EvaluationSummary s = summarize("mse", {4.5}, {});
  EXPECT_EQ(s.median, 4.5);
  EXPECT_EQ(s.q1, 4.5);
  EXPECT_EQ(s.q3, 4.5);
}

TEST(Evaluate, MedianOfThree) {
  const EvaluationSummary s = summarize("mse", {1.0, 9.0, 2.0}, {});
  EXPECT_EQ(s.median, 2.0);
  EXPECT_EQ(s.q1, 1.5);
  EXPECT_EQ(s.q3, 5.5);
  EXPECT_EQ(s.repetitions, 3u);
}

TEST(Evaluate, RecordsFailuresAndContinues) {
  const Dataset ds = small_dataset(20);
  SplitPlan plan;
  plan.repetitions = 5;
  const EvaluationSummary s = median_evaluate(
      [](const Dataset&, const Dataset&, std::size_t rep) -> double {
        if (rep == 2) throw Error(ErrorCode::NonFinite, "boom");
        return static_cast<double>(rep);
      },
      ds, plan, "mse");
  EXPECT_EQ(s.failures, 1u);
  EXPECT_EQ(s.repetitions, 5u);
  EXPECT_EQ(s.values, (std::vector<double>{0, 1, 3, 4}));
  EXPECT_EQ(s.median, 2.0);
  ASSERT_EQ(s.failure_messages.size(), 1u);
}

TEST(Evaluate, AllFailedIsAnError) {
  const Dataset ds = small_dataset(20);
  SplitPlan plan;
  plan.repetitions = 3;
  try {
    median_evaluate([](const Dataset&, const Dataset&, std::size_t) -> double {
      throw Error(ErrorCode::NonFinite, "boom");
    }, ds, plan, "mse");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AllRepetitionsFailed);
  }
}

TEST(Evaluate, GeneratedPairsAreIndependentPerRepetition) {
  SplitPlan plan;
  plan.mode = SplitPlan::Generated{50, 80};
  plan.repetitions = 2;
  plan.seed = 1;
  const FriedmanSpec spec = FriedmanSpec::standard(3);
  const auto a = generate_pair(spec, plan, 0);
  const auto b = generate_pair(spec, plan, 1);
  EXPECT_EQ(a.first.size(), 50u);
  EXPECT_EQ(a.second.size(), 80u);
  EXPECT_NE(a.first.values, b.first.values);
  EXPECT_NE(a.first.values, a.second.values);
  EXPECT_EQ(generate_pair(spec, plan, 1).second.values, b.second.values);
}
