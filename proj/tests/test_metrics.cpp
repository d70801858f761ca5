#include <catch2/catch_amalgamated.hpp>

#include "temo/metrics.hpp"
#include "temo/oracle.hpp"

using namespace temo;

TEST_CASE("igd") {
    RngStream g{71, 0};
    const Tensor2D f = uniform_tensor(g, 8, 3);
    CHECK(igd(f, f) == 0.0);
    CHECK(igd(Tensor2D(1, 2, 0.0), Tensor2D::from_rows({{3, 4}})) == 5.0);
    const Tensor2D ref = uniform_tensor(g, 11, 3);
    CHECK(std::abs(igd(f, ref) -
                   oracle::oracle_igd(oracle::to_matrix(f), oracle::to_matrix(ref))) < 1e-12);
    CHECK_THROWS_AS(igd(Tensor2D(), ref), std::invalid_argument);

    // permutation invariance: exact over solutions, within rounding over refs
    Tensor2D fperm(f.rows, f.cols);
    for (std::size_t i = 0; i < f.rows; ++i)
        for (std::size_t j = 0; j < f.cols; ++j) fperm(i, j) = f(f.rows - 1 - i, j);
    CHECK(igd(fperm, ref) == igd(f, ref));
    Tensor2D rperm(ref.rows, ref.cols);
    for (std::size_t i = 0; i < ref.rows; ++i)
        for (std::size_t j = 0; j < ref.cols; ++j) rperm(i, j) = ref(ref.rows - 1 - i, j);
    CHECK(std::abs(igd(f, rperm) - igd(f, ref)) < 1e-12);
}

TEST_CASE("hv exact two dimensional") {
    const Tensor2D ref = Tensor2D::from_rows({{1, 1}});
    CHECK(hv_exact_2d(Tensor2D::from_rows({{0.5, 0.5}}), ref) == 0.25);
    CHECK(hv_exact_2d(Tensor2D::from_rows({{0, 1}, {1, 0}}), ref) == 0.0);

    // monotone under insertions
    RngStream g{72, 0};
    Tensor2D pts = uniform_tensor(g, 12, 2);
    for (std::size_t k = 1; k <= 12; ++k) {
        Tensor2D head(k, 2);
        std::copy_n(pts.data.begin(), 2 * k, head.data.begin());
        Tensor2D prev(k > 1 ? k - 1 : 1, 2);
        std::copy_n(pts.data.begin(), 2 * (k > 1 ? k - 1 : 1), prev.data.begin());
        CHECK(hv_exact_2d(head, ref) >= hv_exact_2d(prev, ref) - 1e-15);
    }
}

TEST_CASE("hv monte carlo") {
    const Tensor2D ref = Tensor2D::from_rows({{1, 1}});
    // nothing dominates the reference -> empty estimate
    const HvEstimate empty = hv_mc(Tensor2D::from_rows({{2, 2}}), ref, 1000, 5);
    CHECK(empty.value == 0.0);

    RngStream g{73, 0};
    for (int k = 0; k < 5; ++k) {
        const Tensor2D f = uniform_tensor(g, 10, 2);
        const double exact = hv_exact_2d(f, ref);
        const HvEstimate est = hv_mc(f, ref, 100000, 1000 + k);
        CHECK(std::abs(est.value - exact) <= 3.0 * std::max(est.std_error, 1e-9));
    }

    // standard error shrinks like 1/sqrt(samples)
    const Tensor2D f = uniform_tensor(g, 10, 2);
    const HvEstimate e1 = hv_mc(f, ref, 50000, 99);
    const HvEstimate e2 = hv_mc(f, ref, 100000, 99);
    CHECK(std::abs(e2.std_error / e1.std_error - 1.0 / std::sqrt(2.0)) < 0.05);

    // deterministic given the seed
    const HvEstimate a = hv_mc(f, ref, 20000, 7);
    const HvEstimate b = hv_mc(f, ref, 20000, 7);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("expected utility") {
    const Tensor2D w = utility_weights(2, 4);
    CHECK(w.rows == 5);
    const Tensor2D single = Tensor2D::from_rows({{2, 4}});
    double mean = 0.0;
    for (std::size_t i = 0; i < w.rows; ++i) mean += 2 * w(i, 0) + 4 * w(i, 1);
    mean /= double(w.rows);
    CHECK(eu(single, w) == Catch::Approx(mean).epsilon(1e-14));

    // adding a solution worse in every weighted utility changes nothing
    const Tensor2D both = Tensor2D::from_rows({{2, 4}, {1, 3}});
    CHECK(eu(both, w) == eu(single, w));

    RngStream g{74, 0};
    const Tensor2D f = uniform_tensor(g, 9, 3);
    const Tensor2D w3 = utility_weights(3, 6);
    CHECK(std::abs(eu(f, w3) -
                   oracle::oracle_eu(oracle::to_matrix(f), oracle::to_matrix(w3))) < 1e-12);
    CHECK_THROWS_AS(eu(Tensor2D(), w3), std::invalid_argument);
}

TEST_CASE("utility weights are an exact lattice") {
    const Tensor2D w = utility_weights(2, 4);
    const double expect[5][2] = {{1, 0}, {0.75, 0.25}, {0.5, 0.5}, {0.25, 0.75}, {0, 1}};
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(w(i, j) == expect[i][j]);
    for (std::size_t h = 1; h <= 12; ++h) {
        const Tensor2D w3 = utility_weights(3, h);
        CHECK(w3.rows == lattice_count(3, h));
        for (std::size_t i = 0; i < w3.rows; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < 3; ++j) s += w3(i, j);
            CHECK(s == 1.0);
        }
    }
}

TEST_CASE("orientation round-trips through negation") {
    RngStream g{75, 0};
    const Tensor2D f = uniform_tensor(g, 10, 2);
    const Tensor2D ref = Tensor2D::from_rows({{1, 1}});
    // maximization view: G = -F with reference point -ref
    const Tensor2D gmax = negated(f);
    const Tensor2D ref_max = negated(ref);
    // hv over the maximization pair computed by negating back
    const double hv_max = hv_exact_2d(negated(gmax), negated(ref_max));
    CHECK(hv_max == hv_exact_2d(f, ref));
}
