#include <doctest.h>

#include <algorithm>

#include "bmc/masking.hpp"
#include "bmc/rng.hpp"
#include "oracles.hpp"

using namespace bmc;

namespace {

MaskingString make_string(const MaskingParams& params, std::vector<std::uint32_t> picks) {
    return MaskingString{params, std::move(picks)};
}

MaskingString random_string(const MaskingParams& params, Rng& rng) {
    MaskingString s{params, {}};
    s.picks.resize(params.weight);
    for (auto& p : s.picks)
        p = static_cast<std::uint32_t>(rng.uniform_below(params.segment_bits()));
    return s;
}

// All pairwise inner products equal anchors: strings agree on `anchors`
// leading segments (pick 0) and are pairwise distinct elsewhere.
CandidateSet equal_overlap_set(std::uint32_t anchors, std::uint32_t k, std::uint32_t w,
                               double delta, std::size_t size) {
    CandidateSet set(MaskingParams{k, w, delta}, size);
    for (std::size_t i = 0; i < size; ++i)
        for (std::uint32_t j = 0; j < w; ++j)
            set.set_pick(i, j, j < anchors ? 0 : static_cast<std::uint32_t>(i));
    return set;
}

} // namespace

TEST_CASE("params validation") {
    CHECK_THROWS_AS(validate(MaskingParams{0, 3, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(validate(MaskingParams{2, 0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(validate(MaskingParams{2, 3, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(MaskingParams{2, 3, 1.5}), std::invalid_argument);
    CHECK_NOTHROW(validate(MaskingParams{2, 3, 1.0}));
    CHECK(MaskingParams{2, 3, 0.5}.segment_bits() == 8);
    CHECK(MaskingParams{2, 3, 0.5}.total_slots() == 24);
}

TEST_CASE("inner product matches the expected examples") {
    const MaskingParams params{1, 3, 0.5};
    const auto a = make_string(params, {0, 1, 2});
    CHECK(inner_product(a, a) == 3); // identity: every segment matches

    const auto disjoint = make_string(params, {1, 2, 3});
    CHECK(inner_product(a, disjoint) == 0);

    const auto b = make_string(params, {0, 3, 2});
    CHECK(inner_product(a, b) == 2);
    CHECK(oracle::inner_product_bits(a, b) == 2);
}

TEST_CASE("inner product equals the bit-level oracle") {
    Rng rng(11);
    for (int round = 0; round < 500; ++round) {
        const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng.uniform_below(4));
        const std::uint32_t max_w = static_cast<std::uint32_t>(64 / (4 * k));
        const std::uint32_t w = 1 + static_cast<std::uint32_t>(rng.uniform_below(max_w));
        const MaskingParams params{k, w, 0.25};
        const auto a = random_string(params, rng);
        const auto b = random_string(params, rng);
        const auto ip = inner_product(a, b);
        CHECK(ip == oracle::inner_product_bits(a, b));
        CHECK(ip == inner_product(b, a));
        CHECK(ip <= w);
        CHECK((ip == w) == (a.picks == b.picks));
    }
}

TEST_CASE("inner product rejects mismatched parameters") {
    const auto a = make_string(MaskingParams{1, 2, 0.5}, {0, 1});
    const auto b = make_string(MaskingParams{2, 2, 0.5}, {0, 1});
    CHECK_THROWS_AS(inner_product(a, b), std::invalid_argument);
}

TEST_CASE("compatibility threshold") {
    const MaskingParams params{1, 4, 0.5};
    const auto lambda = make_string(params, {0, 0, 0, 0});

    CHECK(is_compatible(lambda, {}));                       // empty sum
    std::vector<MaskingString> self{lambda};
    CHECK_FALSE(is_compatible(lambda, self));               // sum = w > w/2

    std::vector<MaskingString> t{make_string(params, {0, 0, 1, 1})};
    CHECK(compatibility_sum(lambda, t) == 2);
    CHECK(is_compatible(lambda, t));                        // 2 <= 4/2

    t.push_back(make_string(params, {0, 1, 1, 1}));
    CHECK(compatibility_sum(lambda, t) == 3);
    CHECK_FALSE(is_compatible(lambda, t));                  // 3 > 2
}

TEST_CASE("compatibility splits over unions") {
    Rng rng(13);
    const MaskingParams params{2, 6, 0.25};
    for (int round = 0; round < 200; ++round) {
        const auto lambda = random_string(params, rng);
        std::vector<MaskingString> t1, t2, both;
        for (int i = 0; i < 3; ++i) {
            t1.push_back(random_string(params, rng));
            t2.push_back(random_string(params, rng));
        }
        both = t1;
        both.insert(both.end(), t2.begin(), t2.end());
        if (is_compatible(lambda, both)) {
            CHECK(is_compatible(lambda, t1));
            CHECK(is_compatible(lambda, t2));
        }
    }
}

TEST_CASE("construction is seeded and in range") {
    const MaskingParams params{3, 5, 0.5};
    const auto a = construct_candidate_set(params, 40, 99);
    const auto b = construct_candidate_set(params, 40, 99);
    const auto c = construct_candidate_set(params, 40, 100);

    CHECK(a.size() == 40);
    CHECK_FALSE(a.verified());
    bool equal_ab = true, diff_ac = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::uint32_t j = 0; j < params.weight; ++j) {
            REQUIRE(a.pick(i, j) < params.segment_bits());
            equal_ab &= a.pick(i, j) == b.pick(i, j);
            diff_ac |= a.pick(i, j) != c.pick(i, j);
        }
    CHECK(equal_ab);
    CHECK(diff_ac);

    CHECK(construct_candidate_set(params, 1, 5).size() == 1);
    CHECK_THROWS_AS(construct_candidate_set(params, 0, 5), std::invalid_argument);
}

TEST_CASE("candidate set storage width") {
    // 4k fits 16 bits
    CandidateSet narrow(MaskingParams{100, 4, 0.5}, 3);
    CHECK(narrow.narrow());
    CHECK(narrow.memory_bytes() == 3 * 4 * 2);
    narrow.set_pick(2, 3, 399);
    CHECK(narrow.pick(2, 3) == 399);
    CHECK_THROWS_AS(narrow.set_pick(0, 0, 400), std::invalid_argument);

    CandidateSet wide(MaskingParams{20000, 2, 0.5}, 2);
    CHECK_FALSE(wide.narrow());
    wide.set_pick(1, 1, 79999);
    CHECK(wide.pick(1, 1) == 79999);
}

TEST_CASE("theoretical weight pins the closed form") {
    CHECK(theoretical_weight(100, 0.01) == 2673);
    CHECK(theoretical_weight(100, 0.02) == 2236);
    CHECK_THROWS_AS(theoretical_weight(100, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(theoretical_weight(100, 1.0), std::invalid_argument);

    // decreasing delta increases both log factors
    std::uint32_t previous = 0;
    for (double delta : {0.02, 0.01, 0.005, 0.001}) {
        const std::uint32_t w = theoretical_weight(50, delta);
        CHECK(w > previous);
        previous = w;
    }

    CHECK_FALSE(theoretical_weight_preconditions_hold(20, 0.02)); // k < 6 ln(2k/d^2)
    CHECK(theoretical_weight_preconditions_hold(80, 0.02));
    CHECK_FALSE(theoretical_weight_preconditions_hold(80, 0.05)); // delta too large
}

TEST_CASE("extension scales inner products") {
    const MaskingParams params{2, 4, 0.5};
    auto set = construct_candidate_set(params, 6, 3);
    set.set_verified(true);

    const auto same = extend_lcs(set, 1);
    CHECK(same.params() == params);
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::uint32_t j = 0; j < params.weight; ++j)
            CHECK(same.pick(i, j) == set.pick(i, j));

    for (std::uint32_t c : {2u, 3u}) {
        const auto extended = extend_lcs(set, c);
        CHECK(extended.verified());
        CHECK(extended.params().weight == params.weight * c);
        for (std::size_t i = 0; i < set.size(); ++i)
            for (std::size_t j = 0; j < set.size(); ++j) {
                const auto base = inner_product(set.string_at(i), set.string_at(j));
                const auto scaled =
                    inner_product(extended.string_at(i), extended.string_at(j));
                CHECK(scaled == c * base);
            }
    }

    // a compatible pair stays compatible after extension
    const auto lambda = set.string_at(0);
    std::vector<MaskingString> t{set.string_at(1), set.string_at(2)};
    if (is_compatible(lambda, t)) {
        const auto extended = extend_lcs(set, 3);
        std::vector<MaskingString> t3{extended.string_at(1), extended.string_at(2)};
        CHECK(is_compatible(extended.string_at(0), t3));
    }
    CHECK_THROWS_AS(extend_lcs(set, 0), std::invalid_argument);
}

TEST_CASE("promising check accepts an equal-overlap set") {
    // every pair overlaps in exactly the two anchor segments: mu = w/4k, no
    // deviation, all three inequalities hold with room
    auto set = equal_overlap_set(2, 1, 8, 0.5, 4);
    const auto diag = check_promising(set);
    CHECK(diag.promising);
    CHECK(diag.failures.empty());
    CHECK(set.verified());
    for (const auto& stats : diag.per_string) {
        CHECK(stats.mean == doctest::Approx(2.0));
        CHECK(stats.max_deviation == doctest::Approx(0.0));
    }
}

TEST_CASE("promising check flags duplicates through equation 2") {
    auto set = equal_overlap_set(2, 1, 8, 0.5, 4);
    for (std::uint32_t j = 0; j < 8; ++j) set.set_pick(1, j, set.pick(0, j));

    const auto diag = check_promising(set);
    CHECK_FALSE(diag.promising);
    CHECK_FALSE(set.verified());
    auto has = [&](std::size_t index, int equation) {
        return std::any_of(diag.failures.begin(), diag.failures.end(), [&](const auto& f) {
            return f.index == index && f.equation == equation;
        });
    };
    CHECK(has(0, 2));
    CHECK(has(1, 2)); // both members of the duplicate pair are named
    CHECK_FALSE(has(2, 2));
    CHECK_FALSE(has(3, 2));
}

TEST_CASE("promising check needs two strings and is thread-stable") {
    auto tiny = equal_overlap_set(2, 1, 8, 0.5, 1);
    CHECK_THROWS_AS(check_promising(tiny), std::invalid_argument);

    const auto set = construct_candidate_set(MaskingParams{2, 16, 0.5}, 50, 21);
    auto a = set;
    auto b = set;
    const auto d1 = check_promising(a, 1);
    const auto d3 = check_promising(b, 3);
    CHECK(d1.promising == d3.promising);
    REQUIRE(d1.failures.size() == d3.failures.size());
    for (std::size_t i = 0; i < d1.failures.size(); ++i) {
        CHECK(d1.failures[i].index == d3.failures[i].index);
        CHECK(d1.failures[i].equation == d3.failures[i].equation);
    }
    for (std::size_t i = 0; i < set.size(); ++i)
        CHECK(d1.per_string[i].mean == d3.per_string[i].mean);
}

TEST_CASE("monte carlo check on a degenerate repeated set") {
    // one string repeated: any draw of m >= 2 violates condition (2)
    CandidateSet set(MaskingParams{4, 6, 0.5}, 10);
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::uint32_t j = 0; j < 6; ++j) set.set_pick(i, j, 3);

    const auto r2 = monte_carlo_lcs_check(set, 2, 500, 17);
    CHECK(r2.cond2_violations == 500);
    CHECK(r2.violation_rate == 1.0);

    const auto r1 = monte_carlo_lcs_check(set, 1, 500, 17);
    CHECK(r1.cond2_violations == 0); // empty multiset is always compatible
}

TEST_CASE("monte carlo check validates inputs and threads") {
    const auto set = construct_candidate_set(MaskingParams{3, 8, 0.5}, 30, 5);
    CHECK_THROWS_AS(monte_carlo_lcs_check(set, 0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_lcs_check(set, 4, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_lcs_check(set, 2, 0, 1), std::invalid_argument);

    const auto serial = monte_carlo_lcs_check(set, 3, 2000, 77, 1);
    const auto threaded = monte_carlo_lcs_check(set, 3, 2000, 77, 3);
    CHECK(serial.violations == threaded.violations);
    CHECK(serial.cond1_violations == threaded.cond1_violations);
    CHECK(serial.cond2_violations == threaded.cond2_violations);
    CHECK(serial.wilson_low == threaded.wilson_low);
}

TEST_CASE("wilson interval basics") {
    double low = 0, high = 0;
    wilson_interval(0, 100, low, high);
    CHECK(low == 0.0);
    CHECK(high > 0.0);
    wilson_interval(50, 100, low, high);
    CHECK(low > 0.3);
    CHECK(high < 0.7);
    wilson_interval(0, 0, low, high);
    CHECK(low == 0.0);
    CHECK(high == 1.0);
}
