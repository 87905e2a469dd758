#include <gtest/gtest.h>

#include <random>

#include "anova/error.hpp"
#include "anova/io.hpp"
#include "oracles.hpp"

using namespace anova;

TEST(Io, TermSetIsOneBased) {
  const TermSet u(3, {{0}, {1, 2}});
  EXPECT_EQ(io::to_json(u).dump(), "[[],[1],[2,3]]");
  EXPECT_EQ(io::term_set_from_json(io::json::parse("[[2,3],[1],[]]"), 3), u);
  EXPECT_THROW(io::term_set_from_json(io::json::parse("[[0]]"), 3), Error);
  EXPECT_THROW(io::term_set_from_json(io::json::parse("[[4]]"), 3), Error);
}

TEST(Io, BandwidthsByOrder) {
  const BandwidthProfile bw({{1, 6}, {2, 4}});
  EXPECT_EQ(io::to_json(bw).dump(), R"({"1":6,"2":4})");
  EXPECT_EQ(io::bandwidths_from_json(io::to_json(bw)), bw);
  EXPECT_THROW(io::bandwidths_from_json(io::json::parse(R"({"x":2})")), Error);
}

TEST(Io, ModelRoundTripReal) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const TermSet u = superposition_terms(3, 2);
  const BandwidthProfile bw({{1, 4}, {2, 2}});
  std::vector<Complex> c(index_union_size(u, bw));
  for (auto& v : c) v = g(rng);
  io::ModelFile file{Model(BasisKind::Cosine, u, bw, c, 0.5), std::nullopt, {}, {}};
  Normalization n;
  n.min = {0, 1, 2};
  n.max = {1, 2, 4};
  n.target = std::make_pair(-1.0, 3.0);
  file.normalization = n;
  file.columns = {"a", "b", "c"};
  file.target_name = "y";

  const io::json j = io::to_json(file);
  EXPECT_TRUE(j.at("coefficients")[1].is_number());
  const io::ModelFile back = io::model_file_from_json(io::json::parse(j.dump()));
  EXPECT_EQ(back.model.coefficients(), file.model.coefficients());
  EXPECT_EQ(back.model.terms(), u);
  EXPECT_EQ(back.model.bandwidths(), bw);
  EXPECT_EQ(back.model.lambda(), 0.5);
  EXPECT_EQ(back.columns, file.columns);
  EXPECT_EQ(back.normalization->max, n.max);
  EXPECT_EQ(back.normalization->target, n.target);
  EXPECT_EQ(io::to_json(back).dump(), j.dump());
}

TEST(Io, ModelRoundTripComplex) {
  const TermSet u = superposition_terms(2, 1);
  const BandwidthProfile bw({{1, 4}});
  std::vector<Complex> c(7);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = Complex(0.1 * i, -0.2 * i);
  const io::ModelFile file{Model(BasisKind::Exponential, u, bw, c, 0.0),
                           std::nullopt, {}, {}};
  const io::json j = io::to_json(file);
  EXPECT_TRUE(j.at("coefficients")[3].is_array());
  EXPECT_EQ(io::model_file_from_json(j).model.coefficients(), c);
}

TEST(Io, MalformedModelIsParseError) {
  try {
    io::model_file_from_json(io::json::parse(R"({"basis":"cos"})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
  }
}

TEST(Io, ReportRoundTrip) {
  SensitivityReport r;
  r.variance = 2.5;
  r.gsi = {{{0}, 0.75}, {{0, 1}, 0.25}};
  r.ranking = {0.6, 0.4};
  const io::json j = io::to_json(r);
  EXPECT_EQ(j.at("gsi")[1].at("term").dump(), "[1,2]");
  const SensitivityReport back = io::report_from_json(j);
  EXPECT_EQ(back.variance, r.variance);
  EXPECT_EQ(back.ranking, r.ranking);
  ASSERT_EQ(back.gsi.size(), 2u);
  EXPECT_EQ(back.gsi[1].term, (Term{0, 1}));
}

TEST(Io, SummaryFields) {
  const EvaluationSummary s = summarize("rmse", {1.0, 2.0, 3.0}, {"x"});
  const io::json j = io::to_json(s);
  for (const char* key : {"metric", "median", "q1", "q3", "repetitions", "failures"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.at("failures"), 1);
  EXPECT_EQ(j.at("repetitions"), 4);
}

TEST(Io, TableAndSvg) {
  SensitivityReport r;
  r.variance = 1.0;
  r.gsi = {{{0}, 0.2}, {{1}, 0.8}};
  r.ranking = {0.2, 0.8};
  const std::string table = io::format_report_table(r);
  EXPECT_LT(table.find("{2}"), table.find("{1}"));
  const std::string svg = io::ranking_svg(r.ranking, 0.02);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(io::gsi_svg(r).find("{2}"), std::string::npos);
}
