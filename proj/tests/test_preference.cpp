#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dars/errors.hpp"
#include "dars/preference.hpp"
#include "dars/rng.hpp"
#include "oracles.hpp"

using namespace dars;

namespace {

PreferenceMatrix from_rows(const std::vector<std::vector<int>>& rows) {
    PreferenceMatrix m;
    m.users = static_cast<int>(rows.size());
    m.requirements = static_cast<int>(rows[0].size());
    m.entries = Matrix<std::uint8_t>(m.users, m.requirements);
    for (int u = 0; u < m.users; ++u)
        for (int i = 0; i < m.requirements; ++i)
            m.entries(u, i) = static_cast<std::uint8_t>(rows[u][i]);
    return m;
}

PreferenceMatrix random_prefs(int users, int requirements, SplitMix64& rng) {
    PreferenceMatrix m;
    m.users = users;
    m.requirements = requirements;
    m.entries = Matrix<std::uint8_t>(users, requirements);
    for (int u = 0; u < users; ++u)
        for (int i = 0; i < requirements; ++i)
            m.entries(u, i) = rng.next_double() < 0.5 ? 0 : 1;
    return m;
}

}  // namespace

TEST_CASE("load_preferences parses a rectangular 0/1 table") {
    std::istringstream in("1,0\n1,0\n0,1\n0,1\n");
    const PreferenceMatrix m = load_preferences(in);
    CHECK(m.users == 4);
    CHECK(m.requirements == 2);
    CHECK(m.entries(0, 0) == 1);
    CHECK(m.entries(2, 1) == 1);
}

TEST_CASE("load_preferences honors the header flag") {
    std::istringstream in("r1,r2\n1,1\n0,0\n");
    const PreferenceMatrix m = load_preferences(in, true);
    CHECK(m.users == 2);
    CHECK(m.requirements == 2);
}

TEST_CASE("load_preferences rejects bad input") {
    SUBCASE("empty file") {
        std::istringstream in("");
        CHECK_THROWS_AS(load_preferences(in), ParseError);
    }
    SUBCASE("non-binary cell named by row and column") {
        std::istringstream in("1,0\n0,2\n");
        try {
            load_preferences(in);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            const std::string what = e.what();
            CHECK(what.find("row 2") != std::string::npos);
            CHECK(what.find("column 2") != std::string::npos);
        }
    }
    SUBCASE("ragged rows") {
        std::istringstream in("1,0\n1\n");
        CHECK_THROWS_AS(load_preferences(in), ParseError);
    }
}

TEST_CASE("eells_measure on perfect co-occurrence and independence") {
    SUBCASE("perfect co-occurrence gives 1") {
        const auto m = from_rows({{1, 1}, {1, 1}, {0, 0}, {0, 0}});
        const auto eta = eells_measure(m);
        CHECK(eta.defined(0, 1));
        CHECK(eta.values(0, 1) == doctest::Approx(1.0));
    }
    SUBCASE("independence gives 0") {
        const auto m = from_rows({{1, 1}, {1, 0}, {0, 1}, {0, 0}});
        const auto eta = eells_measure(m);
        CHECK(eta.defined(0, 1));
        CHECK(eta.values(0, 1) == doctest::Approx(0.0));
    }
}

TEST_CASE("eells_measure marks undefined conditionals absent") {
    // everyone prefers r2, so p(r1 | not r2) has an empty base
    const auto m = from_rows({{1, 1}, {0, 1}, {1, 1}});
    const auto eta = eells_measure(m);
    CHECK_FALSE(eta.defined(0, 1));
    CHECK(eta.defined(1, 0));
}

TEST_CASE("eells_measure matches the frequency-counting oracle on random matrices") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const auto m = random_prefs(5 + static_cast<int>(rng.next_below(8)), 10, rng);
        const auto eta = eells_measure(m);
        const auto expected = oracles::count_eells(m);
        for (int i = 0; i < m.requirements; ++i) {
            for (int j = 0; j < m.requirements; ++j) {
                REQUIRE(static_cast<bool>(eta.defined(i, j)) == expected[i][j].defined);
                if (expected[i][j].defined)
                    REQUIRE(eta.values(i, j) == doctest::Approx(expected[i][j].value).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("eells_measure is invariant under user-row permutation") {
    SplitMix64 rng(7);
    const auto m = random_prefs(12, 6, rng);
    PreferenceMatrix shuffled = m;
    std::vector<int> perm(m.users);
    for (int u = 0; u < m.users; ++u) perm[u] = u;
    rng.shuffle(perm);
    for (int u = 0; u < m.users; ++u)
        for (int i = 0; i < m.requirements; ++i)
            shuffled.entries(u, i) = m.entries(perm[u], i);
    const auto a = eells_measure(m);
    const auto b = eells_measure(shuffled);
    CHECK(a.values == b.values);
    CHECK(a.defined == b.defined);
}

TEST_CASE("flipping a column negates that column of the measure") {
    SplitMix64 rng(99);
    const auto m = random_prefs(16, 5, rng);
    for (int j = 0; j < m.requirements; ++j) {
        PreferenceMatrix flipped = m;
        for (int u = 0; u < m.users; ++u) flipped.entries(u, j) = 1 - flipped.entries(u, j);
        const auto a = eells_measure(m);
        const auto b = eells_measure(flipped);
        for (int i = 0; i < m.requirements; ++i) {
            if (i == j) continue;
            if (a.defined(i, j) && b.defined(i, j))
                CHECK(b.values(i, j) == doctest::Approx(-a.values(i, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("significance_filter matches the odds-ratio oracle") {
    SUBCASE("clear association is significant") {
        std::vector<std::vector<int>> rows;
        for (int i = 0; i < 20; ++i) rows.push_back({1, 1});
        for (int i = 0; i < 20; ++i) rows.push_back({0, 0});
        const auto m = from_rows(rows);
        const auto eta = eells_measure(m);
        const auto mask = significance_filter(m, eta, 0.95);
        CHECK(mask(0, 1) == 1);
        CHECK(oracles::or_significant(20, 0, 0, 20));
    }
    SUBCASE("independence is not significant") {
        const auto m = from_rows({{1, 1}, {1, 0}, {0, 1}, {0, 0}});
        const auto eta = eells_measure(m);
        const auto mask = significance_filter(m, eta, 0.95);
        CHECK(mask(0, 1) == 0);
    }
    SUBCASE("two users are never enough") {
        const auto m = from_rows({{1, 1}, {0, 0}});
        const auto eta = eells_measure(m);
        const auto mask = significance_filter(m, eta, 0.95);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(mask(i, j) == 0);
        CHECK_FALSE(oracles::or_significant(1, 0, 0, 1));
    }
}

TEST_CASE("significance_filter agrees with the oracle on random matrices") {
    SplitMix64 rng(31337);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_prefs(25, 6, rng);
        const auto eta = eells_measure(m);
        const auto mask = significance_filter(m, eta, 0.95);
        for (int i = 0; i < m.requirements; ++i) {
            for (int j = 0; j < m.requirements; ++j) {
                if (i == j || !eta.defined(i, j)) {
                    CHECK(mask(i, j) == 0);
                    continue;
                }
                int n11 = 0, n10 = 0, n01 = 0, n00 = 0;
                for (int u = 0; u < m.users; ++u) {
                    const bool pi = m.entries(u, i) != 0;
                    const bool pj = m.entries(u, j) != 0;
                    if (pi && pj)
                        ++n11;
                    else if (pi)
                        ++n10;
                    else if (pj)
                        ++n01;
                    else
                        ++n00;
                }
                CHECK(static_cast<bool>(mask(i, j)) == oracles::or_significant(n11, n10, n01, n00));
            }
        }
    }
}

TEST_CASE("normal_quantile hits the standard two-sided 95% point") {
    CHECK(normal_quantile(0.975) == doctest::Approx(oracles::kZ975).epsilon(1e-8));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
}

TEST_CASE("to_dependencies applies the sign rule") {
    EellsMatrix eta;
    eta.n = 3;
    eta.values = Matrix<double>(3, 3, 0.0);
    eta.defined = Matrix<std::uint8_t>(3, 3, 1);
    eta.values(0, 1) = 0.7;
    eta.values(0, 2) = -0.4;
    eta.values(1, 2) = 0.0;
    const auto deps = to_dependencies(eta, std::nullopt);
    auto find = [&](int from, int to) {
        for (const auto& d : deps)
            if (d.from == from && d.to == to) return d;
        FAIL("missing pair");
        return DependencyEstimate{};
    };
    CHECK(find(0, 1).quality == Quality::Positive);
    CHECK(find(0, 1).strength == doctest::Approx(0.7));
    CHECK(find(0, 2).quality == Quality::Negative);
    CHECK(find(0, 2).strength == doctest::Approx(0.4));
    CHECK(find(1, 2).quality == Quality::Nonspecified);
    CHECK(find(1, 2).strength == 0.0);
    for (const auto& d : deps) CHECK(d.from != d.to);
}

TEST_CASE("dependency estimates keep the nonspecified/zero equivalence") {
    SplitMix64 rng(5);
    const auto m = random_prefs(10, 7, rng);
    const auto eta = eells_measure(m);
    const auto mask = significance_filter(m, eta, 0.95);
    for (const auto& d : to_dependencies(eta, mask)) {
        CHECK((d.quality == Quality::Nonspecified) == (d.strength == 0.0));
        if (d.quality == Quality::Positive) CHECK(eta.values(d.from, d.to) > 0.0);
        if (d.quality == Quality::Negative) CHECK(eta.values(d.from, d.to) < 0.0);
    }
}

TEST_CASE("identity membership keeps strength equal to |eta|") {
    SplitMix64 rng(6);
    const auto m = random_prefs(14, 5, rng);
    const auto eta = eells_measure(m);
    for (const auto& d : to_dependencies(eta, std::nullopt)) {
        if (eta.defined(d.from, d.to) && d.quality != Quality::Nonspecified)
            CHECK(d.strength == doctest::Approx(std::fabs(eta.values(d.from, d.to))));
    }
}

TEST_CASE("piecewise membership clips weak and saturates strong scores") {
    const Membership f{0.2, 0.8};
    CHECK(f(0.0) == 0.0);
    CHECK(f(0.2) == 0.0);
    CHECK(f(0.5) == doctest::Approx(0.5));
    CHECK(f(0.8) == 1.0);
    CHECK(f(1.0) == 1.0);

    EellsMatrix eta;
    eta.n = 2;
    eta.values = Matrix<double>(2, 2, 0.0);
    eta.defined = Matrix<std::uint8_t>(2, 2, 1);
    eta.values(0, 1) = 0.1;  // below the cutoff
    const auto deps = to_dependencies(eta, std::nullopt, f);
    for (const auto& d : deps) {
        if (d.from == 0 && d.to == 1) {
            CHECK(d.strength == 0.0);
            CHECK(d.quality == Quality::Nonspecified);
        }
    }
}
