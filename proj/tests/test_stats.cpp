#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "soak/stats.hpp"

using namespace soak;

namespace {

// Independent oracle for the t CDF: adaptive Simpson quadrature over the
// density. Shares no code with the implementation under test.
double t_pdf(double x, int df) {
    const double v = static_cast<double>(df);
    const double pi = std::acos(-1.0);
    const double ln = std::lgamma((v + 1.0) / 2.0) - std::lgamma(v / 2.0) -
                      0.5 * std::log(v * pi) - 0.5 * (v + 1.0) * std::log1p(x * x / v);
    return std::exp(ln);
}

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(int df, double a, double b, double fa, double fm, double fb,
                        double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = t_pdf(lm, df);
    const double frm = t_pdf(rm, df);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(df, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
           adaptive_simpson(df, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

double t_cdf_oracle(double x, int df) {
    if (x == 0.0) return 0.5;
    if (x < 0.0) return 1.0 - t_cdf_oracle(-x, df);
    const double fa = t_pdf(0.0, df);
    const double fb = t_pdf(x, df);
    const double fm = t_pdf(x / 2.0, df);
    const double whole = simpson(fa, fm, fb, 0.0, x);
    return 0.5 + adaptive_simpson(df, 0.0, x, fa, fm, fb, whole, 1e-14, 50);
}

EvalRecord rec(const std::string& subset, int fold, TrainPolicy policy, double err) {
    EvalRecord r;
    r.dataset = "toy";
    r.learner = "featureless";
    r.subset = subset;
    r.fold = fold;
    r.policy = policy;
    r.test_error = err;
    return r;
}

}  // namespace

TEST_CASE("error_rate") {
    const std::vector<int> pred = {0, 1, 2, 1};
    const std::vector<int> truth = {0, 2, 2, 0};
    CHECK(error_rate(pred, truth) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(error_rate(truth, truth) == 0.0);
    CHECK_THROWS_AS(error_rate(pred, std::vector<int>{0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(error_rate(std::vector<int>{}, std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("regularized incomplete beta basics") {
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    // I_x(a,b) + I_{1-x}(b,a) = 1
    for (const double x : {0.05, 0.3, 0.5, 0.77, 0.99}) {
        const double s =
            regularized_incomplete_beta(2.5, 4.0, x) + regularized_incomplete_beta(4.0, 2.5, 1.0 - x);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    // I_x(1,1) = x (uniform)
    CHECK(regularized_incomplete_beta(1.0, 1.0, 0.42) == doctest::Approx(0.42).epsilon(1e-12));
    CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("t CDF matches quadrature oracle on a wide grid") {
    const double xs[] = {-40.0, -8.0, -3.0, -1.5, -0.7, -0.2, 0.2, 0.7, 1.5, 3.0, 8.0, 40.0};
    for (const int df : {1, 2, 5, 9, 30}) {
        for (const double x : xs) {
            const double got = student_t_cdf(x, df);
            const double want = t_cdf_oracle(x, df);
            CAPTURE(df);
            CAPTURE(x);
            CHECK(std::fabs(got - want) <= 1e-10);
        }
    }
}

TEST_CASE("t CDF closed forms and limits") {
    const double pi = std::acos(-1.0);
    // df=1 is Cauchy: F(x) = 1/2 + atan(x)/pi
    CHECK(student_t_cdf(1.0, 1) == doctest::Approx(0.75).epsilon(1e-12));
    for (const double x : {-5.0, -0.3, 0.9, 12.0}) {
        CHECK(student_t_cdf(x, 1) ==
              doctest::Approx(0.5 + std::atan(x) / pi).epsilon(1e-12));
    }
    // df=2: F(x) = 1/2 + x / (2 sqrt(2 + x^2))
    for (const double x : {-4.0, 0.5, 2.5}) {
        CHECK(student_t_cdf(x, 2) ==
              doctest::Approx(0.5 + x / (2.0 * std::sqrt(2.0 + x * x))).epsilon(1e-12));
    }
    CHECK(student_t_cdf(0.0, 9) == 0.5);
    CHECK(student_t_cdf(1e6, 9) >= 1.0 - 1e-12);
    CHECK(student_t_cdf(-1e6, 9) <= 1e-12);
    CHECK_THROWS_AS(student_t_cdf(0.5, 0), std::invalid_argument);
}

TEST_CASE("t CDF monotone in x and symmetric") {
    for (const int df : {1, 4, 9}) {
        double prev = 0.0;
        for (double x = -30.0; x <= 30.0; x += 0.5) {
            const double f = student_t_cdf(x, df);
            CHECK(f >= prev);
            prev = f;
            CHECK(std::fabs(student_t_cdf(-x, df) - (1.0 - f)) <= 1e-12);
        }
    }
}

TEST_CASE("paired t-test conventions") {
    CHECK_THROWS_AS(paired_ttest(std::vector<double>{1.0}), std::invalid_argument);

    SUBCASE("all differences zero") {
        const std::vector<double> d(5, 0.0);
        const TTestResult r = paired_ttest(d);
        CHECK(r.degenerate);
        CHECK(r.t_stat == 0.0);
        CHECK(r.p_value == 1.0);
        CHECK(r.mean_diff == 0.0);
    }
    SUBCASE("constant nonzero differences") {
        const std::vector<double> d(4, 2.5);
        const TTestResult r = paired_ttest(d);
        CHECK(r.degenerate);
        CHECK(std::isinf(r.t_stat));
        CHECK(r.t_stat > 0.0);
        CHECK(r.p_value == 0.0);
        CHECK(r.mean_diff == doctest::Approx(2.5));
        const std::vector<double> neg(4, -2.5);
        CHECK(paired_ttest(neg).t_stat < 0.0);
    }
    SUBCASE("constructed sample hits the df=9 critical point") {
        // Ten diffs as five (m+a, m-a) pairs: mean m, sum of squares 10 a^2,
        // so t = 3 m / a. With m = 2.262157/sqrt(10) and a = sqrt(9/10) the
        // statistic is exactly 2.262157, the two-sided 5% point for df = 9.
        const double m = 2.262157 / std::sqrt(10.0);
        const double a = std::sqrt(9.0 / 10.0);
        std::vector<double> d;
        for (int i = 0; i < 5; ++i) {
            d.push_back(m + a);
            d.push_back(m - a);
        }
        const TTestResult r = paired_ttest(d);
        CHECK_FALSE(r.degenerate);
        CHECK(r.t_stat == doctest::Approx(2.262157).epsilon(1e-9));
        CHECK(std::fabs(r.p_value - 0.05) <= 1e-4);
    }
    SUBCASE("matches hand computation against the quadrature oracle") {
        const std::vector<double> d = {1.2, -0.4, 3.3, 0.9, 2.1, -1.0};
        double mean = 0.0;
        for (const double v : d) mean += v;
        mean /= static_cast<double>(d.size());
        double ss = 0.0;
        for (const double v : d) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / (d.size() - 1.0));
        const double t = mean / (sd / std::sqrt(static_cast<double>(d.size())));
        const double p = 2.0 * (1.0 - t_cdf_oracle(std::fabs(t), static_cast<int>(d.size()) - 1));

        const TTestResult r = paired_ttest(d);
        CHECK(r.t_stat == doctest::Approx(t).epsilon(1e-12));
        CHECK(r.p_value == doctest::Approx(p).epsilon(1e-9));
        CHECK(r.mean_diff == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("soak_compare pairs folds per subset") {
    std::vector<EvalRecord> records;
    // subset a: Other is 10/20/30 pp worse; All matches Same exactly.
    records.push_back(rec("a", 1, TrainPolicy::Same, 0.10));
    records.push_back(rec("a", 2, TrainPolicy::Same, 0.10));
    records.push_back(rec("a", 3, TrainPolicy::Same, 0.10));
    records.push_back(rec("a", 1, TrainPolicy::Other, 0.20));
    records.push_back(rec("a", 2, TrainPolicy::Other, 0.30));
    records.push_back(rec("a", 3, TrainPolicy::Other, 0.40));
    records.push_back(rec("a", 1, TrainPolicy::All, 0.10));
    records.push_back(rec("a", 2, TrainPolicy::All, 0.10));
    records.push_back(rec("a", 3, TrainPolicy::All, 0.10));
    // subset b: Other is uniformly 5 pp better.
    records.push_back(rec("b", 1, TrainPolicy::Same, 0.30));
    records.push_back(rec("b", 2, TrainPolicy::Same, 0.25));
    records.push_back(rec("b", 1, TrainPolicy::Other, 0.25));
    records.push_back(rec("b", 2, TrainPolicy::Other, 0.20));

    const CompareResult out = soak_compare(records);
    REQUIRE(out.comparisons.size() == 3);  // a/other, a/all, b/other
    CHECK(out.notices.empty());

    const SubsetComparison& a_other = out.comparisons[0];
    CHECK(a_other.subset == "a");
    CHECK(a_other.kind == ComparisonKind::OtherVsSame);
    CHECK(a_other.k_used == 3);
    CHECK(a_other.mean_diff == doctest::Approx(20.0).epsilon(1e-12));
    // diffs {10,20,30}: sd 10, t = 20/(10/sqrt(3)) = 2 sqrt(3)
    CHECK(a_other.t_stat == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(a_other.p_value ==
          doctest::Approx(2.0 * (1.0 - t_cdf_oracle(2.0 * std::sqrt(3.0), 2))).epsilon(1e-9));

    const SubsetComparison& a_all = out.comparisons[1];
    CHECK(a_all.kind == ComparisonKind::AllVsSame);
    CHECK(a_all.mean_diff == 0.0);
    CHECK(a_all.p_value == 1.0);  // sd = 0, mean = 0

    const SubsetComparison& b_other = out.comparisons[2];
    CHECK(b_other.subset == "b");
    CHECK(b_other.mean_diff == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(b_other.p_value == 0.0);  // sd = 0, mean != 0
    CHECK(b_other.k_used == 2);

    SUBCASE("record order does not matter") {
        std::vector<EvalRecord> shuffled = records;
        std::mt19937 gen(3);
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        const CompareResult again = soak_compare(shuffled);
        REQUIRE(again.comparisons.size() == out.comparisons.size());
        for (std::size_t i = 0; i < out.comparisons.size(); ++i) {
            CHECK(again.comparisons[i].subset == out.comparisons[i].subset);
            CHECK(again.comparisons[i].kind == out.comparisons[i].kind);
            CHECK(again.comparisons[i].mean_diff == out.comparisons[i].mean_diff);
            CHECK(again.comparisons[i].p_value == out.comparisons[i].p_value);
        }
    }
}

TEST_CASE("soak_compare edge handling") {
    SUBCASE("empty input") {
        const CompareResult out = soak_compare({});
        CHECK(out.comparisons.empty());
        CHECK(out.notices.empty());
    }
    SUBCASE("mixed dataset rejected") {
        std::vector<EvalRecord> records = {rec("a", 1, TrainPolicy::Same, 0.1)};
        records.push_back(rec("a", 2, TrainPolicy::Same, 0.1));
        records.back().dataset = "other_data";
        CHECK_THROWS_AS(soak_compare(records), std::invalid_argument);
    }
    SUBCASE("Same-only records produce nothing (single-subset run)") {
        std::vector<EvalRecord> records;
        for (int f = 1; f <= 3; ++f) records.push_back(rec("only", f, TrainPolicy::Same, 0.2));
        const CompareResult out = soak_compare(records);
        CHECK(out.comparisons.empty());
        CHECK(out.notices.empty());
    }
    SUBCASE("treatment without Same is noticed") {
        std::vector<EvalRecord> records;
        for (int f = 1; f <= 3; ++f) records.push_back(rec("a", f, TrainPolicy::Other, 0.2));
        const CompareResult out = soak_compare(records);
        CHECK(out.comparisons.empty());
        REQUIRE(out.notices.size() == 1);
        CHECK(out.notices[0].find("no Same records") != std::string::npos);
    }
    SUBCASE("one paired fold is not enough") {
        std::vector<EvalRecord> records = {rec("a", 1, TrainPolicy::Same, 0.1),
                                           rec("a", 1, TrainPolicy::Other, 0.2),
                                           rec("a", 2, TrainPolicy::Other, 0.2)};
        const CompareResult out = soak_compare(records);
        CHECK(out.comparisons.empty());
        REQUIRE(out.notices.size() == 1);
        CHECK(out.notices[0].find("only 1 paired fold(s)") != std::string::npos);
    }
    SUBCASE("unpaired folds are dropped, paired folds kept") {
        std::vector<EvalRecord> records;
        for (int f = 1; f <= 4; ++f) records.push_back(rec("a", f, TrainPolicy::Same, 0.1));
        records.push_back(rec("a", 2, TrainPolicy::Other, 0.2));
        records.push_back(rec("a", 4, TrainPolicy::Other, 0.3));
        const CompareResult out = soak_compare(records);
        REQUIRE(out.comparisons.size() == 1);
        CHECK(out.comparisons[0].k_used == 2);
        CHECK(out.comparisons[0].mean_diff == doctest::Approx(15.0).epsilon(1e-12));
    }
}

TEST_CASE("log10_clamped") {
    CHECK(log10_clamped(1.0) == 0.0);
    CHECK(log10_clamped(0.05) == doctest::Approx(std::log10(0.05)).epsilon(1e-15));
    CHECK(log10_clamped(0.0) == doctest::Approx(-300.0).epsilon(1e-12));
    CHECK(log10_clamped(1e-310) == doctest::Approx(-300.0).epsilon(1e-12));
}

TEST_CASE("summarize_dataset categories") {
    const auto comp = [](const std::string& subset, double diff, double p) {
        SubsetComparison c;
        c.dataset = "d";
        c.learner = "l";
        c.subset = subset;
        c.kind = ComparisonKind::OtherVsSame;
        c.mean_diff = diff;
        c.p_value = p;
        return c;
    };

    SUBCASE("all non-positive diffs -> similar") {
        const DatasetSummary s = summarize_dataset({comp("a", -2.0, 0.3), comp("b", -1.5, 0.6)});
        CHECK(s.category == "similar");
        CHECK(s.min_diff == -2.0);
        CHECK(s.max_diff == -1.5);
        CHECK(s.min_log10p == doctest::Approx(std::log10(0.3)));
        CHECK(s.max_log10p == doctest::Approx(std::log10(0.6)));
    }
    SUBCASE("all non-negative diffs -> different") {
        const DatasetSummary s =
            summarize_dataset({comp("a", 23.5, 1e-8), comp("b", 33.9, 1e-12)});
        CHECK(s.category == "different");
        CHECK(s.min_diff == 23.5);
        CHECK(s.max_diff == 33.9);
    }
    SUBCASE("zero max stays similar") {
        const DatasetSummary s = summarize_dataset({comp("a", 0.0, 1.0), comp("b", -1.0, 0.5)});
        CHECK(s.category == "similar");
    }
    SUBCASE("mixed signs resolved by the mean") {
        CHECK(summarize_dataset({comp("a", -5.0, 0.1), comp("b", 1.0, 0.1)}).category ==
              "similar");
        CHECK(summarize_dataset({comp("a", -1.0, 0.1), comp("b", 5.0, 0.1)}).category ==
              "different");
    }
    SUBCASE("guards") {
        CHECK_THROWS_AS(summarize_dataset({}), std::invalid_argument);
        auto a = comp("a", 1.0, 0.5);
        auto b = comp("b", 2.0, 0.5);
        b.kind = ComparisonKind::AllVsSame;
        CHECK_THROWS_AS(summarize_dataset({a, b}), std::invalid_argument);
    }
}

TEST_CASE("error stat table") {
    std::vector<EvalRecord> records;
    records.push_back(rec("a", 1, TrainPolicy::Same, 0.10));
    records.push_back(rec("a", 2, TrainPolicy::Same, 0.20));
    records.push_back(rec("a", 3, TrainPolicy::Same, 0.30));
    records.push_back(rec("a", 1, TrainPolicy::Other, 0.50));
    records.push_back(rec("b", 1, TrainPolicy::Same, 0.40));

    const auto table = error_stat_table(records);
    REQUIRE(table.size() == 3);

    const ErrorStats& a_same = table[0];
    CHECK(a_same.subset == "a");
    CHECK(a_same.policy == TrainPolicy::Same);
    CHECK(a_same.folds == 3);
    CHECK(a_same.mean_error == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(a_same.sd_error == doctest::Approx(0.1).epsilon(1e-12));

    const ErrorStats& a_other = table[1];
    CHECK(a_other.policy == TrainPolicy::Other);
    CHECK(a_other.folds == 1);
    CHECK(a_other.sd_error == 0.0);

    CHECK(table[2].subset == "b");
}
