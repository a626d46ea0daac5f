#include <catch_amalgamated.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include "perfstop/kernels.hpp"
#include "perfstop/rng.hpp"

using namespace perfstop;
using namespace perfstop::kernels;

namespace {

std::vector<double> random_values(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = 1.0 + 1000.0 * rng.unit() * rng.unit();
    return v;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

// Sizes around the vector widths, plus some larger ones.
const std::vector<std::size_t> kSizes{1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 100, 257, 1000, 4099};

}  // namespace

TEST_CASE("scalar reference kernels against naive loops") {
    const auto& t = scalar::table;
    const auto v = random_values(1, 37);

    const auto mm = t.minmax(v);
    CHECK(mm.min == *std::min_element(v.begin(), v.end()));
    CHECK(mm.max == *std::max_element(v.begin(), v.end()));

    const double naive = std::accumulate(v.begin(), v.end(), 0.0);
    CHECK(t.sum(v) == Catch::Approx(naive).epsilon(1e-14));

    const double mean = naive / v.size();
    double sq = 0, cross = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        sq += (v[i] - mean) * (v[i] - mean);
        if (i + 1 < v.size()) cross += (v[i] - mean) * (v[i + 1] - mean);
    }
    const auto m = t.lag1_moments(v, mean);
    CHECK(m.sum_sq == Catch::Approx(sq).epsilon(1e-12));
    CHECK(m.sum_cross == Catch::Approx(cross).epsilon(1e-12));

    const std::size_t outside = std::count_if(v.begin(), v.end(), [](double x) { return x < 50 || x > 400; });
    CHECK(t.count_outside(v, 50, 400) == outside);

    std::vector<std::uint32_t> counts(10, 0);
    t.histogram(v, 1.0, 10.0 / 1000.0, counts);
    std::vector<std::uint32_t> expect(10, 0);
    for (double x : v) expect[std::min<std::size_t>(9, static_cast<std::size_t>((x - 1.0) * (10.0 / 1000.0)))]++;
    CHECK(counts == expect);
}

TEST_CASE("histogram skips values below the grid and clamps the top edge") {
    std::vector<double> v{0.5, 1.0, 1.5, 2.0, 3.0, 99.0};
    std::vector<std::uint32_t> counts(2, 0);
    scalar::table.histogram(v, 1.0, 1.0, counts);
    CHECK(counts == std::vector<std::uint32_t>{2, 3});
}

TEST_CASE("select_rank edge cases") {
    const std::vector<std::uint32_t> c{0, 3, 0, 0, 2, 1};
    for (const auto backend : available_backends()) {
        const auto& t = *table_for(backend);
        CHECK(t.select_rank(c, 1) == 1);
        CHECK(t.select_rank(c, 3) == 1);
        CHECK(t.select_rank(c, 4) == 4);
        CHECK(t.select_rank(c, 6) == 5);
        CHECK(t.select_rank(c, 7) == c.size());
        CHECK(t.select_rank(std::span<const std::uint32_t>{}, 1) == 0);
    }
}

TEST_CASE("every backend matches the scalar reference bit for bit") {
    const auto& ref = scalar::table;
    for (const auto backend : available_backends()) {
        const auto* t = table_for(backend);
        REQUIRE(t != nullptr);
        INFO("backend " << backend_name(backend));
        for (std::size_t n : kSizes) {
            // Offset by one element so the SIMD loads are unaligned too.
            const auto storage = random_values(n * 7 + 3, n + 1);
            const std::span<const double> v(storage.data() + 1, n);
            INFO("n = " << n);

            const auto a = ref.minmax(v), b = t->minmax(v);
            CHECK(same_bits(a.min, b.min));
            CHECK(same_bits(a.max, b.max));
            CHECK(same_bits(ref.sum(v), t->sum(v)));

            const double mean = ref.sum(v) / static_cast<double>(n);
            const auto ma = ref.lag1_moments(v, mean), mb = t->lag1_moments(v, mean);
            CHECK(same_bits(ma.sum_sq, mb.sum_sq));
            CHECK(same_bits(ma.sum_cross, mb.sum_cross));

            CHECK(ref.count_outside(v, 100.0, 300.0) == t->count_outside(v, 100.0, 300.0));
            // Boundary values themselves are inside.
            CHECK(ref.count_outside(v, a.min, a.max) == 0);
            CHECK(t->count_outside(v, a.min, a.max) == 0);

            for (std::size_t bins : {1u, 10u, 37u, 100u}) {
                std::vector<std::uint32_t> ca(bins, 0), cb(bins, 0);
                const double scale = static_cast<double>(bins) / (a.max - a.min + 1e-9);
                ref.histogram(v, a.min + 5.0, scale, ca);
                t->histogram(v, a.min + 5.0, scale, cb);
                CHECK(ca == cb);

                const std::uint64_t total = std::accumulate(ca.begin(), ca.end(), std::uint64_t{0});
                for (std::uint64_t rank = 1; rank <= total + 1; rank += 1 + total / 13) {
                    CHECK(ref.select_rank(ca, rank) == t->select_rank(ca, rank));
                }
            }
        }
    }
}

TEST_CASE("select_rank on long count vectors with large totals") {
    Rng rng(9);
    std::vector<std::uint32_t> c(1013);
    for (auto& x : c) x = static_cast<std::uint32_t>(rng.below(5) == 0 ? rng.below(100000) : 0);
    const std::uint64_t total = std::accumulate(c.begin(), c.end(), std::uint64_t{0});
    for (const auto backend : available_backends()) {
        const auto& t = *table_for(backend);
        std::uint64_t cum = 0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (c[j] == 0) continue;
            CHECK(t.select_rank(c, cum + 1) == j);
            cum += c[j];
            CHECK(t.select_rank(c, cum) == j);
        }
        CHECK(t.select_rank(c, total + 1) == c.size());
    }
}

TEST_CASE("the active table is one of the available backends") {
    const auto backends = available_backends();
    CHECK(std::find(backends.begin(), backends.end(), active().backend) != backends.end());
    CHECK(backends.front() == Backend::Scalar);
}
