#include <catch2/catch_amalgamated.hpp>

#include "temo/refvec.hpp"
#include "temo/rng.hpp"

#include <numbers>

using namespace temo;

namespace {
// Binomial coefficient by Pascal's rule, the combinatorial reference.
std::size_t binom(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::vector<std::vector<std::size_t>> c(n + 1, std::vector<std::size_t>(n + 1, 0));
    for (std::size_t i = 0; i <= n; ++i) {
        c[i][0] = 1;
        for (std::size_t j = 1; j <= i; ++j)
            c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
    }
    return c[n][k];
}
} // namespace

TEST_CASE("simplex lattice counts and sums") {
    const Tensor2D l = simplex_lattice(3, 13);
    CHECK(l.rows == 105);
    for (std::size_t i = 0; i < l.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 3; ++j) s += l(i, j);
        CHECK(std::abs(s - 1.0) < 1e-12);
    }
    const Tensor2D two = simplex_lattice(2, 1);
    CHECK(two.rows == 2);
    CHECK(two(0, 0) == 1.0);
    CHECK(two(0, 1) == 0.0);
    CHECK(two(1, 0) == 0.0);
    CHECK(two(1, 1) == 1.0);
}

TEST_CASE("lattice size matches the combinatorial count") {
    for (std::size_t m = 2; m <= 5; ++m)
        for (std::size_t h = 1; h <= 20; ++h)
            CHECK(lattice_count(m, h) == binom(h + m - 1, m - 1));
    CHECK(simplex_lattice(4, 6).rows == binom(9, 3));
}

TEST_CASE("normalize_to_unit") {
    const Tensor2D n = normalize_to_unit(Tensor2D::from_rows({{3, 4}}));
    CHECK(n(0, 0) == Catch::Approx(0.6).epsilon(1e-15));
    CHECK(n(0, 1) == Catch::Approx(0.8).epsilon(1e-15));
    const Tensor2D unit = Tensor2D::from_rows({{1, 0}, {0, 1}});
    const Tensor2D renorm = normalize_to_unit(unit);
    for (std::size_t i = 0; i < unit.size(); ++i)
        CHECK(std::abs(renorm.data[i] - unit.data[i]) < 1e-15);
    const Tensor2D once = normalize_to_unit(Tensor2D::from_rows({{2, 5}, {1, 1}}));
    const Tensor2D twice = normalize_to_unit(once);
    for (std::size_t i = 0; i < once.size(); ++i)
        CHECK(std::abs(once.data[i] - twice.data[i]) < 1e-15);
    CHECK_THROWS_AS(normalize_to_unit(Tensor2D(1, 2, 0.0)), std::invalid_argument);
}

TEST_CASE("minimum neighbor angles") {
    const double pi = std::numbers::pi;
    const Tensor2D axes = Tensor2D::from_rows({{1, 0}, {0, 1}});
    const Tensor2D g = min_vector_angles(axes);
    CHECK(g.data[0] == Catch::Approx(pi / 2).epsilon(1e-14));
    CHECK(g.data[1] == Catch::Approx(pi / 2).epsilon(1e-14));

    const double inv = 1.0 / std::sqrt(2.0);
    const Tensor2D three = Tensor2D::from_rows({{1, 0}, {0, 1}, {inv, inv}});
    const Tensor2D g3 = min_vector_angles(three);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(g3.data[i] == Catch::Approx(pi / 4).epsilon(1e-12));

    // permuting rows permutes gamma identically
    const Tensor2D permuted = Tensor2D::from_rows({{0, 1}, {inv, inv}, {1, 0}});
    const Tensor2D gp = min_vector_angles(permuted);
    CHECK(gp.data[0] == g3.data[1]);
    CHECK(gp.data[1] == g3.data[2]);
    CHECK(gp.data[2] == g3.data[0]);

    CHECK_THROWS_AS(min_vector_angles(Tensor2D::from_rows({{1, 0}})), std::invalid_argument);
    CHECK_THROWS_AS(min_vector_angles(Tensor2D::from_rows({{1, 0}, {1, 0}})),
                    std::invalid_argument);
}

TEST_CASE("adaptation rescales by the objective range") {
    const RefVectorSet refs = make_ref_set(3, 4);
    const Tensor2D zmin(1, 3, 0.0);
    const Tensor2D ones(1, 3, 1.0);
    const Tensor2D same = adapt_vectors(refs.v0, refs.v, zmin, ones);
    for (std::size_t i = 0; i < same.size(); ++i)
        CHECK(std::abs(same.data[i] - refs.v0.data[i]) < 1e-12);

    // axis vectors stay axis-aligned under anisotropic ranges
    const Tensor2D axes = normalize_to_unit(simplex_lattice(2, 1));
    const Tensor2D range = Tensor2D::from_rows({{2, 1}});
    const Tensor2D adapted = adapt_vectors(axes, axes, Tensor2D(1, 2, 0.0), range);
    for (std::size_t i = 0; i < axes.size(); ++i)
        CHECK(std::abs(adapted.data[i] - axes.data[i]) < 1e-15);

    const double inv = 1.0 / std::sqrt(2.0);
    const Tensor2D diag = Tensor2D::from_rows({{inv, inv}, {1, 0}});
    const Tensor2D out = adapt_vectors(diag, diag, Tensor2D(1, 2, 0.0), range);
    const double norm = std::sqrt(5.0);
    CHECK(out(0, 0) == Catch::Approx(2.0 / norm).epsilon(1e-12));
    CHECK(out(0, 1) == Catch::Approx(1.0 / norm).epsilon(1e-12));

    // degenerate range skips adaptation
    const Tensor2D zmax_bad = Tensor2D::from_rows({{1.0, 0.0}});
    const Tensor2D skipped = adapt_vectors(diag, out, Tensor2D(1, 2, 0.0), zmax_bad);
    CHECK(skipped.data == out.data);
}
