#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "resobs/errors.hpp"
#include "resobs/harness.hpp"
#include "resobs/random.hpp"
#include "resobs/reservoir.hpp"

using namespace resobs;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double lo = -1.0,
                              double hi = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = rng.uniform(lo, hi);
        }
    }
    return m;
}

// Observer with W = 0 and W_in = 0, so the update reduces to its bias term.
TrainedObserver blank_observer(std::size_t n, double alpha, double zeta) {
    ReservoirConfig cfg;
    cfg.n = n;
    cfg.topology = TopologyKind::RandomMatrix;
    cfg.alpha = alpha;
    cfg.zeta = zeta;
    TrainedObserver obs = init_observer(cfg, 1, 2);
    obs.w = WeightedMatrix::from_triplets(n, {});
    obs.w_in.setZero();
    return obs;
}

Trajectory scalar_input(const Eigen::VectorXd& x, double dt = 0.1) {
    return Trajectory(0.0, dt, {"x"}, Eigen::MatrixXd(x), 0);
}

const Trajectory& rossler_data() {
    static const Trajectory data =
        generate_trajectory(RosslerParams{}, {1.0, 1.0, 1.0}, 0.1, 500.0);
    return data;
}

} // namespace

TEST_CASE("init_observer at the default configuration") {
    const TrainedObserver obs = init_observer(ReservoirConfig{}, 1, 2);
    CHECK(obs.n() == 400);
    CHECK(obs.w_in.rows() == 400);
    CHECK(obs.w_in.cols() == 1);
    CHECK(obs.w_out.rows() == 2);
    CHECK(obs.w_out.cols() == 400);
    CHECK_FALSE(obs.trained);
    CHECK(obs.w_out.isZero(0.0));
    CHECK(obs.c.isZero(0.0));
    CHECK(std::abs(oracle::spectral_radius(obs.w.to_dense()) - 1.0) <= 1e-6);
    CHECK(obs.w_in.maxCoeff() <= 1.0);
    CHECK(obs.w_in.minCoeff() >= -1.0);
    CHECK(obs.channels == ChannelMap{});
    CHECK_FALSE(obs.warnings.empty());
}

TEST_CASE("init_observer smallest reservoir and determinism") {
    ReservoirConfig cfg;
    cfg.n = 2;
    cfg.topology = TopologyKind::RandomMatrix;
    cfg.rho = 0.5;
    const TrainedObserver a = init_observer(cfg, 1, 2);
    CHECK(a.w.nnz() == 4);
    CHECK(a.warnings.empty());

    cfg.n = 60;
    cfg.mean_degree = 6;
    cfg.topology = TopologyKind::SmallWorld;
    const TrainedObserver b1 = init_observer(cfg, 2, 3);
    const TrainedObserver b2 = init_observer(cfg, 2, 3);
    CHECK(b1.w == b2.w);
    CHECK(b1.w_in == b2.w_in);
    CHECK(b1.channels.inputs == std::vector<std::string>{"u0", "u1"});
    cfg.seed = 1;
    CHECK_FALSE(init_observer(cfg, 2, 3).w_in == b1.w_in);

    cfg.input_scale = 0.25;
    const TrainedObserver scaled = init_observer(cfg, 1, 1);
    CHECK(scaled.w_in.cwiseAbs().maxCoeff() <= 0.25);
}

TEST_CASE("init_observer propagates parameter errors") {
    ReservoirConfig cfg;
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(init_observer(cfg, 1, 2), ParameterError);
    cfg = {};
    cfg.n = 10;
    CHECK_THROWS_AS(init_observer(cfg, 1, 2), ParameterError);
    cfg = {};
    cfg.rho = -1.0;
    CHECK_THROWS_AS(init_observer(cfg, 1, 2), ParameterError);
}

TEST_CASE("update_state closed forms") {
    SUBCASE("small leakage barely moves the state") {
        TrainedObserver obs = init_observer(ReservoirConfig{.n = 30, .mean_degree = 4, .alpha = 1e-9}, 1, 2);
        Rng rng(1);
        const Eigen::VectorXd r = random_matrix(30, 1, rng);
        const Eigen::VectorXd next = update_state(obs, r, Eigen::VectorXd::Constant(1, 0.7));
        CHECK((next - r).cwiseAbs().maxCoeff() <= 1e-8);
    }
    SUBCASE("no weights and no bias gives zero") {
        const TrainedObserver obs = blank_observer(5, 1.0, 0.0);
        const Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(5, -0.9, 0.9);
        CHECK(update_state(obs, r, Eigen::VectorXd::Constant(1, 3.0)).isZero(0.0));
    }
    SUBCASE("bias only gives tanh(1)") {
        const TrainedObserver obs = blank_observer(5, 1.0, 1.0);
        const Eigen::VectorXd next = update_state(obs, Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(1));
        for (Eigen::Index i = 0; i < 5; ++i) {
            CHECK(next(i) == doctest::Approx(0.761594155955765).epsilon(1e-14));
        }
    }
    SUBCASE("dimension mismatch") {
        const TrainedObserver obs = blank_observer(5, 1.0, 1.0);
        CHECK_THROWS_AS(update_state(obs, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(1)),
                        ParameterError);
    }
}

TEST_CASE("update_state matches the scalar formula on small random instances") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        ReservoirConfig cfg;
        cfg.n = 2 + rng.below(7);
        cfg.topology = TopologyKind::RandomMatrix;
        cfg.alpha = rng.uniform(0.05, 1.0);
        cfg.zeta = rng.uniform(-2.0, 2.0);
        cfg.rho = rng.uniform(0.1, 1.5);
        cfg.seed = static_cast<std::uint64_t>(trial);
        const std::size_t k = 1 + rng.below(3);
        const TrainedObserver obs = init_observer(cfg, k, 2);
        const auto n = static_cast<Eigen::Index>(cfg.n);
        const Eigen::VectorXd r = random_matrix(n, 1, rng);
        const Eigen::VectorXd x = random_matrix(static_cast<Eigen::Index>(k), 1, rng, -5.0, 5.0);
        const Eigen::VectorXd want =
            oracle::leaky_update(obs.w.to_dense(), obs.w_in, r, x, cfg.alpha, cfg.zeta);
        REQUIRE((update_state(obs, r, x) - want).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("collect_states") {
    const TrainedObserver obs = init_observer(ReservoirConfig{.n = 40, .rho = 0.8, .mean_degree = 6}, 1, 2);
    const Eigen::VectorXd r0 = Eigen::VectorXd::Constant(40, 0.1);

    SUBCASE("empty slice") {
        const StateRollout out = collect_states(obs, scalar_input(Eigen::VectorXd(0)), r0);
        CHECK(out.states.rows() == 0);
        CHECK(out.final_state == r0);
    }
    SUBCASE("one step unrolls to a single update") {
        const StateRollout out = collect_states(obs, scalar_input(Eigen::VectorXd::Constant(1, 0.3)), r0);
        const Eigen::VectorXd want = update_state(obs, r0, Eigen::VectorXd::Constant(1, 0.3));
        CHECK(out.states.rows() == 1);
        CHECK(out.states.row(0).transpose() == want);
        CHECK(out.final_state == want);
    }
    SUBCASE("rows chain through update_state and advance agrees") {
        const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(25, -2.0, 2.0);
        const StateRollout out = collect_states(obs, scalar_input(x), r0);
        Eigen::VectorXd r = r0;
        for (Eigen::Index t = 0; t < x.size(); ++t) {
            r = update_state(obs, r, x.segment(t, 1));
            CHECK(out.states.row(t).transpose() == r);
        }
        CHECK(advance(obs, scalar_input(x), r0) == out.final_state);
    }
    SUBCASE("wrong channel count") {
        const Trajectory two(0.0, 0.1, {"x", "y"}, Eigen::MatrixXd::Zero(3, 2));
        CHECK_THROWS_AS(collect_states(obs, two, r0), ParameterError);
    }
}

TEST_CASE("training slice at defaults stays inside the tanh range") {
    const TrainedObserver obs = init_observer(ReservoirConfig{}, 1, 2);
    const Trajectory& data = rossler_data();
    const Trajectory x = data.select({"x"});
    const std::size_t a = x.first_index_at_or_after(100.0);
    const std::size_t b = x.first_index_at_or_after(260.0);
    const ReservoirState r = advance(obs, x.slice(0, a), Eigen::VectorXd::Zero(400));
    const StateRollout out = collect_states(obs, x.slice(a, b), r);
    CHECK(out.states.rows() == 1600);
    CHECK(out.states.cols() == 400);
    CHECK(out.states.cwiseAbs().maxCoeff() < 1.0);
}

TEST_CASE("train_readout closed forms") {
    Rng rng(3);
    const Eigen::MatrixXd s = random_matrix(200, 10, rng);

    SUBCASE("zero targets") {
        const Readout out = train_readout(s, Eigen::MatrixXd::Zero(200, 2), 1e-6);
        CHECK(out.w_out.isZero(0.0));
        CHECK(out.c.isZero(0.0));
        CHECK_FALSE(out.underdetermined);
    }
    SUBCASE("exact affine map is recovered without regularisation") {
        const Eigen::MatrixXd a = random_matrix(2, 10, rng, -3.0, 3.0);
        const Eigen::VectorXd b = random_matrix(2, 1, rng, -3.0, 3.0);
        Eigen::MatrixXd y = s * a.transpose();
        y.rowwise() += b.transpose();
        const Readout out = train_readout(s, y, 0.0);
        CHECK(oracle::relative_error(out.w_out, a) <= 1e-8);
        CHECK(oracle::relative_error(out.c, b) <= 1e-8);
    }
    SUBCASE("huge ridge shrinks weights and leaves the target mean") {
        const Eigen::MatrixXd y = random_matrix(200, 2, rng, 0.0, 5.0);
        const Readout out = train_readout(s, y, 1e12);
        CHECK(out.w_out.cwiseAbs().maxCoeff() <= 1e-8);
        const Eigen::VectorXd means = y.colwise().mean().transpose();
        CHECK(oracle::relative_error(out.c, means) <= 1e-8);
    }
    SUBCASE("singular system without ridge") {
        Eigen::MatrixXd dup = s;
        dup.col(3) = dup.col(2);
        CHECK_THROWS_AS(train_readout(dup, Eigen::MatrixXd::Ones(200, 2), 0.0), NumericError);
        CHECK_NOTHROW(train_readout(dup, Eigen::MatrixXd::Ones(200, 2), 1e-6));
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(train_readout(s, Eigen::MatrixXd::Zero(199, 2), 1e-6), ParameterError);
        CHECK_THROWS_AS(train_readout(s, Eigen::MatrixXd::Zero(200, 2), -1.0), ParameterError);
    }
    SUBCASE("fewer rows than unknowns is flagged") {
        CHECK(train_readout(s.topRows(5), Eigen::MatrixXd::Ones(5, 1), 1e-3).underdetermined);
    }
}

TEST_CASE("train_readout agrees with a brute-force normal-equation solve") {
    Rng rng(19);
    for (double beta : {0.0, 1e-6, 1e-2}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto n = static_cast<Eigen::Index>(1 + rng.below(20));
            const auto rows = n + 5 + static_cast<Eigen::Index>(rng.below(60));
            const auto l = static_cast<Eigen::Index>(1 + rng.below(3));
            const Eigen::MatrixXd s = random_matrix(rows, n, rng);
            const Eigen::MatrixXd y = random_matrix(rows, l, rng, -4.0, 4.0);
            const Readout out = train_readout(s, y, beta);
            const Eigen::MatrixXd want = oracle::ridge_bruteforce(s, y, beta);
            Eigen::MatrixXd got(n + 1, l);
            got.topRows(n) = out.w_out.transpose();
            got.row(n) = out.c.transpose();
            REQUIRE(oracle::relative_error(got, want) <= 1e-8);
        }
    }
}

TEST_CASE("predict") {
    ReservoirConfig cfg{.n = 50, .rho = 0.9, .mean_degree = 6};
    TrainedObserver obs = init_observer(cfg, 1, 2);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(30, -1.0, 1.0);
    const Trajectory input(5.0, 0.1, {"x"}, Eigen::MatrixXd(x), 7);
    const Eigen::VectorXd r0 = Eigen::VectorXd::Zero(50);

    CHECK_THROWS_AS(predict(obs, input, r0), ParameterError);

    set_readout(obs, Readout{Eigen::MatrixXd::Zero(2, 50), Eigen::VectorXd::Zero(2), false});
    const Trajectory zero = predict(obs, input, r0);
    CHECK(zero.samples().rows() == 30);
    CHECK(zero.samples().cols() == 2);
    CHECK(zero.samples().isZero(0.0));
    CHECK(zero.channels() == std::vector<std::string>{"y", "z"});
    CHECK(zero.time(0) == input.time(0));

    Rng rng(4);
    const Eigen::MatrixXd w = random_matrix(2, 50, rng);
    const Eigen::VectorXd c = random_matrix(2, 1, rng);
    set_readout(obs, Readout{w, c, false});
    const Trajectory once = predict(obs, input, r0);
    set_readout(obs, Readout{2.0 * w, 2.0 * c, false});
    const Trajectory twice = predict(obs, input, r0);
    CHECK(twice.samples() == 2.0 * once.samples());

    const StateRollout states = collect_states(obs, input, r0);
    CHECK(readout_outputs(obs, states.states) == twice.samples());

    CHECK_THROWS_AS(set_readout(obs, Readout{Eigen::MatrixXd::Zero(2, 49), Eigen::VectorXd::Zero(2), false}),
                    ParameterError);
}

TEST_CASE("in-sample error is below held-out error at defaults") {
    const ObserverRun run = fit_and_predict(ReservoirConfig{}, ChannelMap{}, rossler_data(), TimeWindows{});
    const Trajectory& data = rossler_data();
    const Trajectory x = data.select({"x"});
    const std::size_t a = x.first_index_at_or_after(100.0);
    const std::size_t b = x.first_index_at_or_after(260.0);
    const ReservoirState r = advance(run.observer, x.slice(0, a), Eigen::VectorXd::Zero(400));
    const Trajectory fitted = predict(run.observer, x.slice(a, b), r);
    const double in_sample = mse(fitted, data.select({"y", "z"}).slice(a, b));
    CHECK(in_sample < run.mse);
}

TEST_CASE("echo state contraction at rho 0.9") {
    const Trajectory x = rossler_data().select({"x"}).slice(0, 1000);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const TrainedObserver obs = init_observer(ReservoirConfig{.rho = 0.9, .seed = seed}, 1, 2);
        Rng rng(seed + 100);
        const Eigen::VectorXd ra = random_matrix(400, 1, rng);
        const Eigen::VectorXd rb = random_matrix(400, 1, rng);
        CHECK((advance(obs, x, ra) - advance(obs, x, rb)).norm() < 1e-6);
    }
}

TEST_CASE("train and predict are bit-reproducible") {
    const ReservoirConfig cfg{.n = 120, .mean_degree = 10, .seed = 5};
    const ObserverRun a = fit_and_predict(cfg, ChannelMap{}, rossler_data(), TimeWindows{});
    const ObserverRun b = fit_and_predict(cfg, ChannelMap{}, rossler_data(), TimeWindows{});
    CHECK(a.observer.w_out == b.observer.w_out);
    CHECK(a.predicted == b.predicted);
    CHECK(a.mse == b.mse);
}
