#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "resobs/errors.hpp"
#include "resobs/random.hpp"
#include "resobs/topology.hpp"

using namespace resobs;

namespace {

WeightedMatrix random_dense(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) = rng.uniform(-1.0, 1.0);
        }
    }
    return WeightedMatrix::from_dense(m);
}

WeightedMatrix er_weighted(std::size_t n, double d, std::uint64_t seed) {
    return assign_weights(build_skeleton({TopologyKind::ErdosRenyi, n, d, 0.1}, seed), seed + 1000);
}

bool is_symmetric_01(const WeightedMatrix& w) {
    for (const auto& e : w.entries()) {
        if (e.value() != 1.0 || w.coeff(e.col(), e.row()) != 1.0 || e.row() == e.col()) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("topology names round-trip") {
    for (TopologyKind k : kAllTopologies) {
        CHECK(parse_topology_kind(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_topology_kind("lattice"), ParameterError);
}

TEST_CASE("Erdos-Renyi realized mean degree concentrates around D") {
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const WeightedMatrix s = build_skeleton({TopologyKind::ErdosRenyi, 400, 20.0, 0.1}, seed);
        const double d = mean_degree(s);
        inside += (d >= 18.0 && d <= 22.0) ? 1 : 0;
    }
    CHECK(inside >= 95);
}

TEST_CASE("Erdos-Renyi edge count follows the binomial model") {
    const std::size_t n = 400;
    const double d = 20.0;
    const double pairs = n * (n - 1) / 2.0;
    const double p = d / (n - 1);
    const int seeds = 60;
    double total = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
        const WeightedMatrix s = build_skeleton({TopologyKind::ErdosRenyi, n, d, 0.1}, 7000 + seed);
        CHECK(is_symmetric_01(s));
        total += static_cast<double>(undirected_edge_count(s));
    }
    const double mean = total / seeds;
    const double sd_of_mean = std::sqrt(pairs * p * (1 - p) / seeds);
    CHECK(std::abs(mean - n * d / 2.0) <= 3.0 * sd_of_mean);
}

TEST_CASE("small world without rewiring is the exact ring lattice") {
    const WeightedMatrix s = build_skeleton({TopologyKind::SmallWorld, 10, 4.0, 0.0}, 3);
    CHECK(s.nnz() == 40);
    for (std::size_t i = 0; i < 10; ++i) {
        std::size_t degree = 0;
        for (std::size_t j = 0; j < 10; ++j) {
            const std::size_t gap = std::min((i + 10 - j) % 10, (j + 10 - i) % 10);
            const double expected = (gap == 1 || gap == 2) ? 1.0 : 0.0;
            CHECK(s.coeff(i, j) == expected);
            degree += s.coeff(i, j) != 0.0;
        }
        CHECK(degree == 4);
    }
}

TEST_CASE("small world rewiring keeps the edge count and symmetry") {
    const WeightedMatrix s = build_skeleton({TopologyKind::SmallWorld, 400, 20.0, 0.1}, 11);
    CHECK(is_symmetric_01(s));
    CHECK(undirected_edge_count(s) == 400 * 10);
    const WeightedMatrix lattice = build_skeleton({TopologyKind::SmallWorld, 400, 20.0, 0.0}, 11);
    CHECK_FALSE(s == lattice);
}

TEST_CASE("Barabasi-Albert attaches round(D/2) edges per node") {
    const WeightedMatrix s = build_skeleton({TopologyKind::BarabasiAlbert, 400, 20.0, 0.1}, 5);
    CHECK(is_symmetric_01(s));
    // K_11 seed plus 389 nodes with 10 edges each.
    CHECK(undirected_edge_count(s) == 55 + 389 * 10);
    CHECK(mean_degree(s) == doctest::Approx(20.0).epsilon(0.02));
    // Scale-free: the largest hub is far above the mean degree.
    std::size_t max_degree = 0;
    for (std::size_t i = 0; i < 400; ++i) {
        std::size_t deg = 0;
        for (std::size_t j = 0; j < 400; ++j) {
            deg += s.coeff(i, j) != 0.0;
        }
        max_degree = std::max(max_degree, deg);
    }
    CHECK(max_degree > 40);

    CHECK_THROWS_AS(build_skeleton({TopologyKind::BarabasiAlbert, 10, 20.0, 0.1}, 1), ParameterError);
}

TEST_CASE("random matrix structure is dense") {
    CHECK(build_skeleton({TopologyKind::RandomMatrix, 5, 20.0, 0.1}, 0).nnz() == 25);
}

TEST_CASE("topology parameter invariants") {
    CHECK_THROWS_AS(build_skeleton({TopologyKind::ErdosRenyi, 1, 0.5, 0.1}, 0), ParameterError);
    CHECK_THROWS_AS(build_skeleton({TopologyKind::ErdosRenyi, 10, 10.0, 0.1}, 0), ParameterError);
    CHECK_THROWS_AS(build_skeleton({TopologyKind::ErdosRenyi, 10, 0.0, 0.1}, 0), ParameterError);
    CHECK_THROWS_AS(build_skeleton({TopologyKind::SmallWorld, 10, 3.0, 0.1}, 0), ParameterError);
    CHECK_THROWS_AS(build_skeleton({TopologyKind::SmallWorld, 10, 4.0, 1.5}, 0), ParameterError);
}

TEST_CASE("generators are seed-deterministic") {
    for (TopologyKind k : kAllTopologies) {
        const TopologySpec spec{k, 60, 6.0, 0.2};
        CHECK(build_skeleton(spec, 42) == build_skeleton(spec, 42));
        CHECK(assign_weights(build_skeleton(spec, 42), 9) == assign_weights(build_skeleton(spec, 42), 9));
    }
    CHECK_FALSE(build_skeleton({TopologyKind::ErdosRenyi, 60, 6.0, 0.1}, 1) ==
                build_skeleton({TopologyKind::ErdosRenyi, 60, 6.0, 0.1}, 2));
}

TEST_CASE("assign_weights draws independent uniform weights on the structure") {
    SUBCASE("zero skeleton") {
        const WeightedMatrix zero = WeightedMatrix::from_triplets(7, {});
        const WeightedMatrix w = assign_weights(zero, 1);
        CHECK(w.nnz() == 0);
        CHECK(w.n() == 7);
    }
    SUBCASE("support, pattern and mean") {
        const WeightedMatrix s = build_skeleton({TopologyKind::ErdosRenyi, 400, 20.0, 0.1}, 4);
        const WeightedMatrix w = assign_weights(s, 8);
        CHECK(w.nnz() == s.nnz());
        double sum = 0.0;
        std::size_t asymmetric = 0;
        for (const auto& e : w.entries()) {
            CHECK(s.coeff(e.row(), e.col()) == 1.0);
            REQUIRE(e.value() >= -1.0);
            REQUIRE(e.value() <= 1.0);
            sum += e.value();
            asymmetric += e.value() != w.coeff(e.col(), e.row());
        }
        CHECK(std::abs(sum / w.nnz()) <= 0.05);
        CHECK(asymmetric == w.nnz());
    }
    SUBCASE("non-binary skeleton is rejected") {
        const WeightedMatrix bad = WeightedMatrix::from_triplets(2, {{0, 1, 0.5}});
        CHECK_THROWS_AS(assign_weights(bad, 1), ParameterError);
    }
}

TEST_CASE("spectral radius of small closed-form matrices") {
    CHECK(spectral_radius(WeightedMatrix::from_dense(Eigen::MatrixXd::Identity(3, 3))) ==
          doctest::Approx(1.0).epsilon(1e-14));
    Eigen::MatrixXd swap(2, 2);
    swap << 0, 2, 2, 0;
    CHECK(spectral_radius(WeightedMatrix::from_dense(swap)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("spectral radius matches the dense oracle") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const WeightedMatrix w = random_dense(50, seed);
        const double want = oracle::spectral_radius(w.to_dense());
        CHECK(std::abs(spectral_radius(w) - want) <= 1e-8 * want);

        const SpectralEstimate iterative = block_power_radius(w);
        CHECK(iterative.converged);
        CHECK(std::abs(iterative.radius - want) <= 1e-8 * want);
    }
    for (TopologyKind k : kAllTopologies) {
        const WeightedMatrix w =
            assign_weights(build_skeleton({k, 300, 20.0, 0.1}, 17), 18);
        const SpectralEstimate est = estimate_spectral_radius(w);
        CHECK(est.converged);
        CHECK(est.method == SpectralMethod::BlockPower);
        const double want = oracle::spectral_radius(w.to_dense());
        CHECK(std::abs(est.radius - want) <= 1e-8 * want);
    }
}

TEST_CASE("spectral radius falls back to the dense solver when iteration stalls") {
    const WeightedMatrix w = er_weighted(200, 10.0, 3);
    SpectralOptions opts;
    opts.max_iterations = 2;
    const SpectralEstimate est = estimate_spectral_radius(w, opts);
    CHECK(est.method == SpectralMethod::Dense);
    CHECK(est.radius == doctest::Approx(oracle::spectral_radius(w.to_dense())).epsilon(1e-10));

    opts.allow_dense_fallback = false;
    CHECK_FALSE(estimate_spectral_radius(w, opts).converged);
    CHECK_THROWS_AS(spectral_radius(w, opts), NumericError);
}

TEST_CASE("spectral radius is homogeneous of degree one") {
    const WeightedMatrix w = er_weighted(200, 12.0, 21);
    const double base = spectral_radius(w);
    Rng rng(5);
    for (int i = 0; i < 5; ++i) {
        const double alpha = std::exp(rng.uniform(-3.0, 3.0));
        CHECK(std::abs(spectral_radius(w.scaled(alpha)) - alpha * base) <= 1e-9 * alpha * base);
    }
}

TEST_CASE("scale_to_radius") {
    SUBCASE("radius two halves every entry") {
        Eigen::MatrixXd m(2, 2);
        m << 0, 2, 2, 0;
        const WeightedMatrix w = WeightedMatrix::from_dense(m);
        const WeightedMatrix half = scale_to_radius(w, 1.0);
        for (const auto& e : w.entries()) {
            CHECK(half.coeff(e.row(), e.col()) == doctest::Approx(e.value() / 2).epsilon(1e-14));
        }
    }
    SUBCASE("rescaling to the current radius is the identity") {
        const WeightedMatrix w = er_weighted(120, 8.0, 2);
        const WeightedMatrix same = scale_to_radius(w, spectral_radius(w));
        const auto a = w.entries();
        const auto b = same.entries();
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(std::abs(a[i].value() - b[i].value()) <= 1e-12);
        }
    }
    SUBCASE("ER(400, 20) lands on 0.9 and keeps its zero pattern") {
        const WeightedMatrix w = er_weighted(400, 20.0, 6);
        const WeightedMatrix scaled = scale_to_radius(w, 0.9);
        CHECK(std::abs(spectral_radius(scaled) - 0.9) <= 0.9e-6);
        CHECK(std::abs(oracle::spectral_radius(scaled.to_dense()) - 0.9) <= 0.9e-6);
        const auto a = w.entries();
        const auto b = scaled.entries();
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].row() == b[i].row());
            CHECK(a[i].col() == b[i].col());
        }
    }
    SUBCASE("nilpotent and zero matrices cannot be rescaled") {
        Eigen::MatrixXd upper = Eigen::MatrixXd::Zero(10, 10);
        for (int i = 0; i + 1 < 10; ++i) {
            upper(i, i + 1) = 1.0;
        }
        CHECK_THROWS_AS(scale_to_radius(WeightedMatrix::from_dense(upper), 1.0), NumericError);
        CHECK_THROWS_AS(scale_to_radius(WeightedMatrix::from_triplets(100, {}), 1.0), NumericError);
        CHECK(block_power_radius(WeightedMatrix::from_triplets(100, {})).radius == 0.0);
    }
    SUBCASE("target must be positive") {
        CHECK_THROWS_AS(scale_to_radius(er_weighted(50, 5.0, 1), 0.0), ParameterError);
    }
}
