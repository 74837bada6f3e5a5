#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sentgrid/eval.hpp"
#include "test_util.hpp"

using namespace sentgrid;
using namespace sentgrid::eval;

namespace {

constexpr auto P = SentimentLabel::Positive;
constexpr auto N = SentimentLabel::Neutral;
constexpr auto G = SentimentLabel::Negative;

Prediction pred(SentimentLabel gold, std::optional<SentimentLabel> predicted) {
  return Prediction{gold, predicted};
}

// 10 documents, 2 parse failures, known by hand:
//   gold P: predicted P, P, N          gold N: predicted N, G, fail
//   gold G: predicted G, P, fail, G
const std::vector<Prediction> kHand = {
    pred(P, P), pred(P, P), pred(P, N), pred(N, N),  pred(N, G),
    pred(N, {}), pred(G, G), pred(G, P), pred(G, {}), pred(G, G),
};

}  // namespace

TEST_CASE("confusion matrix counts cells and failures per gold class") {
  const ConfusionMatrix m = confusion(kHand, FailurePolicy::CountAsWrong);
  CHECK(m.cells[0][0] == 2);  // gold P -> P
  CHECK(m.cells[0][1] == 1);  // gold P -> N
  CHECK(m.cells[1][1] == 1);
  CHECK(m.cells[1][2] == 1);
  CHECK(m.cells[2][2] == 2);
  CHECK(m.cells[2][0] == 1);
  CHECK(m.failures_by_gold[0] == 0);
  CHECK(m.failures_by_gold[1] == 1);
  CHECK(m.failures_by_gold[2] == 1);
  CHECK(m.total_scored() == 8);
  CHECK(m.n_parse_failures() == 2);
  CHECK(m.n_docs() == 10);
}

TEST_CASE("count_as_wrong keeps failures in recall and accuracy denominators") {
  const ConfusionMatrix m = confusion(kHand, FailurePolicy::CountAsWrong);
  CHECK(m.row_total(1) == 3);  // two scored + one failure
  CHECK(m.row_total(2) == 4);
  // precision P = 2/3, recall P = 2/3
  const ClassMetrics p = per_class_metrics(m, P);
  CHECK(p.precision == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(p.recall == doctest::Approx(2.0 / 3).epsilon(1e-12));
  // recall G = 2/4 despite 2/3 scored correctly
  const ClassMetrics g = per_class_metrics(m, G);
  CHECK(g.recall == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(accuracy(m) == doctest::Approx(5.0 / 10).epsilon(1e-12));
}

TEST_CASE("exclude drops failures from every denominator") {
  const ConfusionMatrix m = confusion(kHand, FailurePolicy::Exclude);
  CHECK(m.n_parse_failures() == 2);
  CHECK(m.row_total(1) == 2);
  CHECK(m.row_total(2) == 3);
  CHECK(m.n_docs() == 10);
  CHECK(accuracy(m) == doctest::Approx(5.0 / 8).epsilon(1e-12));
}

TEST_CASE("fallback_neutral scores failures as predicted Neutral") {
  const ConfusionMatrix m = confusion(kHand, FailurePolicy::FallbackNeutral);
  CHECK(m.cells[1][1] == 2);  // the gold-N failure became a correct Neutral
  CHECK(m.cells[2][1] == 1);  // the gold-G failure became a wrong Neutral
  CHECK(m.total_scored() == 10);
  CHECK(m.n_parse_failures() == 2);  // raw count still reported
  CHECK(accuracy(m) == doctest::Approx(6.0 / 10).epsilon(1e-12));
}

TEST_CASE("every zero-over-zero ratio is defined as zero") {
  SUBCASE("empty input") {
    const ConfusionMatrix m = confusion({}, FailurePolicy::CountAsWrong);
    for (auto label : kAllLabels) {
      const ClassMetrics c = per_class_metrics(m, label);
      CHECK(c.precision == 0);
      CHECK(c.recall == 0);
      CHECK(c.f1 == 0);
    }
    CHECK(macro_f1(m) == 0);
    CHECK(accuracy(m) == 0);
  }
  SUBCASE("all failures under exclude") {
    const ConfusionMatrix m = confusion({pred(P, {}), pred(N, {})}, FailurePolicy::Exclude);
    CHECK(accuracy(m) == 0);
    CHECK(macro_f1(m) == 0);
  }
  SUBCASE("class never predicted and never gold") {
    const ConfusionMatrix m = confusion({pred(P, P)}, FailurePolicy::CountAsWrong);
    const ClassMetrics g = per_class_metrics(m, G);
    CHECK(g.precision == 0);
    CHECK(g.recall == 0);
    CHECK(g.f1 == 0);
  }
}

TEST_CASE("metrics agree with an independent per-prediction oracle") {
  std::mt19937_64 rng(20260815);
  std::uniform_int_distribution<int> n_docs(0, 60);
  std::uniform_int_distribution<int> label(0, 2);
  std::uniform_real_distribution<double> unit(0, 1);
  const FailurePolicy policies[] = {FailurePolicy::CountAsWrong, FailurePolicy::Exclude,
                                    FailurePolicy::FallbackNeutral};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Prediction> pairs;
    const int n = n_docs(rng);
    for (int i = 0; i < n; ++i) {
      Prediction p;
      p.gold = kAllLabels[label(rng)];
      if (unit(rng) >= 0.15) p.predicted = kAllLabels[label(rng)];
      pairs.push_back(p);
    }
    for (FailurePolicy policy : policies) {
      const ConfusionMatrix m = confusion(pairs, policy);
      const oracle::Metrics want = oracle::score(pairs, policy);
      CAPTURE(trial);
      CAPTURE(static_cast<int>(policy));
      for (int c = 0; c < 3; ++c) {
        const ClassMetrics got = per_class_metrics(m, kAllLabels[c]);
        CHECK(std::abs(got.precision - want.precision[c]) < 1e-9);
        CHECK(std::abs(got.recall - want.recall[c]) < 1e-9);
        CHECK(std::abs(got.f1 - want.f1[c]) < 1e-9);
      }
      CHECK(std::abs(macro_f1(m) - want.macro_f1) < 1e-9);
      CHECK(std::abs(accuracy(m) - want.accuracy) < 1e-9);
      CHECK(macro_f1(m) >= 0);
      CHECK(macro_f1(m) <= 1);
      CHECK(accuracy(m) >= 0);
      CHECK(accuracy(m) <= 1);
    }
  }
}

TEST_CASE("format_percent renders a fraction as a two-decimal percentage") {
  CHECK(format_percent(0.5494) == "54.94");
  CHECK(format_percent(0.0) == "0.00");
  CHECK(format_percent(1.0) == "100.00");
  CHECK(format_percent(0.123456) == "12.35");
  CHECK(format_percent(0.1) == "10.00");
}

TEST_CASE("make_report carries the cell identity and derived numbers") {
  const ConfusionMatrix m = confusion(kHand, FailurePolicy::CountAsWrong);
  const EvalReport r = make_report(m, "zero_shot_std", "mock-a", "wpan", 11);
  CHECK(r.strategy == "zero_shot_std");
  CHECK(r.backend_id == "mock-a");
  CHECK(r.dataset == "wpan");
  CHECK(r.run_seed == 11);
  CHECK(r.n_runs == 1);
  CHECK(r.n_docs == 10);
  CHECK(r.n_parse_failures == 2);
  CHECK(r.macro_f1 == doctest::Approx(macro_f1(m)).epsilon(1e-12));
  CHECK(r.accuracy == doctest::Approx(accuracy(m)).epsilon(1e-12));
  CHECK(r.per_class[0].f1 == doctest::Approx(per_class_metrics(m, P).f1).epsilon(1e-12));
}

TEST_CASE("average_runs means the metrics and sums the failure counts") {
  EvalReport a;
  a.strategy = "s";
  a.backend_id = "b";
  a.dataset = "d";
  a.run_seed = 1;
  a.n_docs = 10;
  a.n_parse_failures = 1;
  a.macro_f1 = 0.40;
  a.accuracy = 0.50;
  a.per_class[0].f1 = 0.2;
  EvalReport b = a;
  b.run_seed = 2;
  b.n_parse_failures = 3;
  b.macro_f1 = 0.60;
  b.accuracy = 0.70;
  b.per_class[0].f1 = 0.4;

  const EvalReport mean = average_runs({a, b});
  CHECK(mean.n_runs == 2);
  CHECK(mean.n_docs == 10);
  CHECK(mean.n_parse_failures == 4);
  CHECK(mean.macro_f1 == doctest::Approx(0.50).epsilon(1e-12));
  CHECK(mean.accuracy == doctest::Approx(0.60).epsilon(1e-12));
  CHECK(mean.per_class[0].f1 == doctest::Approx(0.3).epsilon(1e-12));

  SUBCASE("averaging a single run is the identity on metrics") {
    const EvalReport one = average_runs({a});
    CHECK(one.n_runs == 1);
    CHECK(one.macro_f1 == doctest::Approx(a.macro_f1));
  }
  SUBCASE("reports from different cells are rejected") {
    EvalReport other = b;
    other.backend_id = "different";
    CHECK_THROWS_AS((void)average_runs({a, other}), std::invalid_argument);
    EvalReport resized = b;
    resized.n_docs = 11;
    CHECK_THROWS_AS((void)average_runs({a, resized}), std::invalid_argument);
    CHECK_THROWS_AS((void)average_runs({}), std::invalid_argument);
  }
}

TEST_CASE("table column names round-trip") {
  const TableColumn all[] = {TableColumn::ZeroShotStd,      TableColumn::ZeroShotTwoStage,
                             TableColumn::ZeroShotSC,       TableColumn::FewShotStd,
                             TableColumn::FewShotCot,       TableColumn::FewShotSC};
  for (TableColumn c : all) {
    const auto back = parse_table_column(to_string(c));
    REQUIRE(back.has_value());
    CHECK(*back == c);
  }
  CHECK_FALSE(parse_table_column("one_shot").has_value());
  CHECK(to_string(TableColumn::ZeroShotTwoStage) == "zero_shot_two_stage");
  CHECK(to_string(TableColumn::FewShotCot) == "few_shot_cot");
}

TEST_CASE("render_table lays out model rows, reference rows, and gaps") {
  TableRow model;
  model.name = "mock-a";
  model.macro_f1 = {0.5494, 0.6123, std::nullopt, 0.497, 0.505, 0.52};
  TableRow ref;
  ref.name = "tuned-classifier";
  ref.reference = true;
  ref.macro_f1[0] = 0.687;

  const RenderedTable t = render_table("persent-test-std", {model, ref});

  CHECK(t.text.find("Macro-F1 (%)") != std::string::npos);
  CHECK(t.text.find("persent-test-std") != std::string::npos);
  CHECK(t.text.find("54.94") != std::string::npos);
  CHECK(t.text.find("61.23") != std::string::npos);
  CHECK(t.text.find("68.70") != std::string::npos);
  CHECK(t.text.find("—") != std::string::npos);  // missing cell
  CHECK(t.text.find("tuned-classifier (reference)") != std::string::npos);

  // TSV: header + 2 rows; missing cells stay empty.
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < t.tsv.size()) {
    const auto nl = t.tsv.find('\n', start);
    lines.push_back(t.tsv.substr(start, nl - start));
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        "dataset\tmodel\treference\tzero_shot_std\tzero_shot_two_stage\tzero_shot_sc\t"
        "few_shot_std\tfew_shot_cot\tfew_shot_sc");
  CHECK(lines[1].find("54.94") != std::string::npos);
  CHECK(lines[1].find("\t\t") != std::string::npos);  // the empty zero_shot_sc cell
  CHECK(lines[2].find("68.70") != std::string::npos);

  std::string diff;
  const bool golden_ok = testutil::matches_golden(t.text + "\n" + t.tsv,
                                                  "tests/golden/table_basic.txt", &diff);
  INFO(diff);
  CHECK(golden_ok);
}
