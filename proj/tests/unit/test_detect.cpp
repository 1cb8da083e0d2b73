#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "qgad/detect/score.hpp"
#include "qgad/prng.hpp"

using namespace qgad;
using namespace qgad::detect;
using data::TimePoint;
using data::TimeWindow;

namespace {

TimeWindow window_with_target(TimePoint target, bool label = false, long t = 0) {
    TimeWindow w;
    w.points = {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    w.target = target;
    w.target_label = label;
    w.t = t;
    return w;
}

} // namespace

TEST_CASE("loss weights split confidence by training losses") {
    const auto w = loss_weights(0.2, 0.3);
    CHECK(w.w_g == doctest::Approx(0.6));
    CHECK(w.w_d == doctest::Approx(0.4));

    const auto even = loss_weights(0.7, 0.7);
    CHECK(even.w_g == doctest::Approx(0.5));
    CHECK(even.w_d == doctest::Approx(0.5));

    const auto degenerate = loss_weights(0.0, 0.0);
    CHECK(degenerate.w_g == 0.5);
    CHECK(degenerate.w_d == 0.5);

    CHECK_THROWS_AS(loss_weights(-0.1, 0.5), DetectError);
}

TEST_CASE("score_point arithmetic on a worked example") {
    // mse 0.1 via prediction error, d = 0.8, L_G = 0.2, L_D = 0.3
    const GeneratorFn gen = [](const TimeWindow& w) {
        return TimePoint{w.target.a - std::sqrt(0.1), w.target.b - std::sqrt(0.1)};
    };
    const DiscriminatorFn disc = [](const TimeWindow&, const TimePoint&) { return 0.8; };

    const auto sc = score_point(gen, disc, 0.2, 0.3, window_with_target({0.5, 0.5}));
    CHECK(sc.mse == doctest::Approx(0.1));
    CHECK(sc.w_g == doctest::Approx(0.6));
    CHECK(sc.w_d == doctest::Approx(0.4));
    CHECK(sc.s == doctest::Approx(0.14));
}

TEST_CASE("perfect prediction with d = 1 scores zero in every mode") {
    const GeneratorFn gen = [](const TimeWindow& w) { return w.target; };
    const DiscriminatorFn disc = [](const TimeWindow&, const TimePoint&) { return 1.0; };
    for (auto mode : {ScoreMode::Combined, ScoreMode::GenOnly, ScoreMode::DiscOnly}) {
        const auto sc = score_point(gen, disc, 0.2, 0.3, window_with_target({0.1, -0.4}), mode);
        CHECK(sc.s == doctest::Approx(0.0));
    }
}

TEST_CASE("score component invariants on random draws") {
    Prng rng(1000);
    for (int i = 0; i < 2000; ++i) {
        const double mse = rng.uniform(0.0, 2.0);
        const double d = rng.uniform(0.0, 1.0);
        const double lg = rng.uniform(1e-6, 3.0);
        const double ld = rng.uniform(1e-6, 3.0);
        const auto w = loss_weights(lg, ld);

        CHECK(w.w_g >= 0.0);
        CHECK(w.w_d >= 0.0);
        CHECK(w.w_g + w.w_d == doctest::Approx(1.0).epsilon(1e-12));

        const auto sc = make_score(mse, d, w, ScoreMode::Combined);
        CHECK(sc.s == doctest::Approx(w.w_g * mse + w.w_d * (1.0 - d)).epsilon(1e-12));

        // monotonicity in mse and in d
        const auto sc_hi = make_score(mse + 0.1, d, w, ScoreMode::Combined);
        CHECK(sc_hi.s >= sc.s);
        const auto sc_d = make_score(mse, std::min(d + 0.1, 1.0), w, ScoreMode::Combined);
        CHECK(sc_d.s <= sc.s);

        // reduction identities
        const auto gen_only = make_score(mse, d, loss_weights(0.0, ld), ScoreMode::Combined);
        CHECK(gen_only.s == doctest::Approx(mse).epsilon(1e-12));
        const auto disc_only = make_score(mse, d, loss_weights(lg, 0.0), ScoreMode::Combined);
        CHECK(disc_only.s == doctest::Approx(1.0 - d).epsilon(1e-12));
    }
}

TEST_CASE("nearest-rank threshold semantics") {
    SUBCASE("0..9999 at 99.99 gives 9998 with exactly one exceedance") {
        std::vector<double> scores(10000);
        for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = static_cast<double>(i);
        const auto t = compute_threshold(scores, 99.99);
        CHECK(t.value == 9998.0);
        long above = 0;
        for (double s : scores) above += s > t.value ? 1 : 0;
        CHECK(above == 1);
    }
    SUBCASE("single value") {
        const auto t = compute_threshold({3.25}, 99.99);
        CHECK(t.value == 3.25);
        CHECK(t.source_size == 1);
    }
    SUBCASE("percentile 100 is the maximum") {
        const auto t = compute_threshold({5.0, 1.0, 9.0, 2.0}, 100.0);
        CHECK(t.value == 9.0);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(compute_threshold({}, 99.99), DetectError);
        CHECK_THROWS_AS(compute_threshold({1.0}, 0.0), DetectError);
        CHECK_THROWS_AS(compute_threshold({1.0}, 100.5), DetectError);
        CHECK_THROWS_AS(compute_threshold({std::nan("")}, 99.0), DetectError);
    }
}

TEST_CASE("threshold exceedance fraction is bounded on random multisets") {
    Prng rng(2000);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 500));
        std::vector<double> scores(n);
        for (double& s : scores) s = rng.uniform(0.0, 1.0);
        const double p = rng.uniform(50.0, 100.0);
        const auto t = compute_threshold(scores, p);
        long above = 0;
        for (double s : scores) above += s > t.value ? 1 : 0;
        const double frac = static_cast<double>(above) / static_cast<double>(n);
        CHECK(frac <= 1.0 - p / 100.0 + 1.0 / static_cast<double>(n) + 1e-12);
    }
}

TEST_CASE("classification is strict") {
    Threshold t;
    t.value = 0.5;
    std::vector<ScoreComponents> pts(3);
    pts[0].s = 0.5;        // equal: normal
    pts[1].s = 0.5 + 1e-9; // above: anomaly
    pts[2].s = 0.1;
    const auto flags = classify(pts, t);
    CHECK_FALSE(flags[0]);
    CHECK(flags[1]);
    CHECK_FALSE(flags[2]);
}

TEST_CASE("metrics closed forms") {
    SUBCASE("TP=97 FN=3 FP=1 TN=899") {
        std::vector<bool> flags, labels;
        auto push = [&](int n, bool f, bool l) {
            for (int i = 0; i < n; ++i) {
                flags.push_back(f);
                labels.push_back(l);
            }
        };
        push(97, true, true);
        push(3, false, true);
        push(1, true, false);
        push(899, false, false);
        const auto r = metrics(flags, labels);
        CHECK(r.recall == doctest::Approx(0.97));
        CHECK(r.precision == doctest::Approx(97.0 / 98.0));
        CHECK(r.accuracy == doctest::Approx(0.996));
        CHECK(r.f1 ==
              doctest::Approx(2.0 * r.precision * r.recall / (r.precision + r.recall))
                  .epsilon(1e-12));
        CHECK(r.tp + r.fp + r.tn + r.fn == 1000);
    }
    SUBCASE("all correct") {
        const auto r = metrics({true, false, true}, {true, false, true});
        CHECK(r.accuracy == 1.0);
        CHECK(r.f1 == 1.0);
    }
    SUBCASE("degenerate empty-positive cases") {
        const auto r = metrics({false, false}, {false, false});
        CHECK(r.precision == 0.0);
        CHECK(r.recall == 0.0);
        CHECK(r.f1 == 0.0);
        CHECK(r.accuracy == 1.0);
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(metrics({true}, {true, false}), DetectError);
    }
}

TEST_CASE("score_series classifies against the stored threshold") {
    // generator echoes the target except at the planted anomaly, where the
    // prediction error spikes
    const GeneratorFn gen = [](const TimeWindow& w) {
        return TimePoint{w.target.a - (w.target_label ? 1.0 : 0.01), w.target.b};
    };
    const DiscriminatorFn disc = [](const TimeWindow&, const TimePoint& cand) {
        return cand.a > 0.9 ? 0.2 : 0.9;
    };

    std::vector<TimeWindow> benign;
    for (int i = 0; i < 50; ++i) benign.push_back(window_with_target({0.1, 0.0}, false, i));
    const auto thresholds = compute_mode_thresholds(gen, disc, 0.2, 0.3, benign);

    std::vector<TimeWindow> test = benign;
    test.push_back(window_with_target({0.95, 0.0}, true, 50));

    const auto res = score_series(gen, disc, 0.2, 0.3, test, thresholds.combined,
                                  ScoreMode::Combined);
    CHECK(res.report.tp == 1);
    CHECK(res.report.fn == 0);
    CHECK(res.report.recall == 1.0);
    CHECK(res.points.size() == 51);
    CHECK(res.points.back().flag);

    // benign-only series against its own threshold: at most ceil(n/10000) flags
    const auto benign_res = score_series(gen, disc, 0.2, 0.3, benign, thresholds.combined,
                                         ScoreMode::Combined);
    long flagged = 0;
    for (const auto& p : benign_res.points) flagged += p.flag ? 1 : 0;
    CHECK(flagged <= 1);

    CHECK_THROWS_AS(score_series(gen, disc, 0.2, 0.3, {}, thresholds.combined,
                                 ScoreMode::Combined),
                    DetectError);
}

TEST_CASE("mode consistency: degenerate losses reduce the combined mode") {
    const GeneratorFn gen = [](const TimeWindow& w) {
        return TimePoint{w.target.a - 0.3, w.target.b};
    };
    const DiscriminatorFn disc = [](const TimeWindow&, const TimePoint&) { return 0.7; };
    const auto w = window_with_target({0.0, 0.0});

    const auto combined_lg0 = score_point(gen, disc, 0.0, 0.5, w, ScoreMode::Combined);
    const auto gen_only = score_point(gen, disc, 0.2, 0.3, w, ScoreMode::GenOnly);
    CHECK(combined_lg0.s == doctest::Approx(gen_only.s).epsilon(1e-15));

    const auto combined_ld0 = score_point(gen, disc, 0.5, 0.0, w, ScoreMode::Combined);
    const auto disc_only = score_point(gen, disc, 0.2, 0.3, w, ScoreMode::DiscOnly);
    CHECK(combined_ld0.s == doctest::Approx(disc_only.s).epsilon(1e-15));
}

TEST_CASE("scores CSV carries full precision and the label column") {
    std::vector<ScoreComponents> pts(2);
    pts[0] = {0, 0.1, 0.9, 0.6, 0.4, 0.1, false};
    pts[1] = {1, 1.0 / 3.0, 0.5, 0.6, 0.4, 0.4, true};
    Threshold t;
    t.value = 0.25;
    const auto path = (std::filesystem::temp_directory_path() / "qgad_scores.csv").string();
    write_scores_csv(path, pts, {false, true}, t, "config {}");

    const auto table = data::read_csv(path);
    REQUIRE(table.header.size() == 9);
    CHECK(table.header[0] == "t");
    CHECK(table.header[8] == "label");
    REQUIRE(table.rows.size() == 2);
    double parsed = 0.0;
    CHECK(data::parse_double(table.rows[1][1], parsed));
    CHECK(parsed == 1.0 / 3.0); // exact round-trip
    CHECK(table.rows[1][7] == "1");
    CHECK(table.rows[1][8] == "1");
    CHECK(table.comments.size() == 1);
}
