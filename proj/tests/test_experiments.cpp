#include <doctest.h>

#include <cmath>

#include "swipt/experiments.hpp"

using namespace swipt;

namespace {

BerConfig small_bask_config(Detector det) {
    BerConfig cfg;
    cfg.constellation = build_constellation(2, 0.5, 5.0 / 16.0);
    cfg.detector = det;
    cfg.symbol_period = 12.5e-6;
    cfg.block_length = 4;
    cfg.window = 4;
    cfg.eb_n0_grid_db = {2.0, 8.0};
    cfg.target_bits = 2000;
    cfg.seed = 11;
    return cfg;
}

} // namespace

TEST_CASE("load power helpers") {
    CHECK(instantaneous_load_power(0.5, 1e3) == doctest::Approx(2.5e-4));
    CHECK(instantaneous_load_power(-0.5, 1e3) == doctest::Approx(2.5e-4));
    CHECK(instantaneous_load_power(0.0, 1e3) == 0.0);
    CHECK_THROWS_AS(instantaneous_load_power(1.0, 0.0),
                    std::invalid_argument);
    CHECK(average_sequence_power({0.1, 0.3}, 1e3) ==
          doctest::Approx((0.01 + 0.09) / 2.0 / 1e3));
    CHECK_THROWS_AS(average_sequence_power({}, 1e3), std::invalid_argument);
}

TEST_CASE("detector names") {
    CHECK(std::string(detector_name(Detector::MlSteady)) == "ml_steady");
    CHECK(std::string(detector_name(Detector::MlBounded)) == "ml_bounded");
    CHECK(std::string(detector_name(Detector::Mlsd)) == "mlsd");
}

TEST_CASE("theoretical curve") {
    std::vector<double> grid = {0.0, 6.0};
    auto pe = theoretical_curve({0.171, 0.538}, grid, 5.0 / 16.0, 1);
    REQUIRE(pe.size() == 2);
    double s0 = noise_sigma(5.0 / 16.0, 1.0, 1);
    CHECK(pe[0] ==
          doctest::Approx(q_function((0.538 - 0.171) / (2 * s0)))
              .epsilon(1e-12));
    CHECK(pe[1] < pe[0]);
    CHECK_THROWS_AS(theoretical_curve({0.5}, grid, 1.0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(theoretical_curve({0.5, 0.4}, grid, 1.0, 1),
                    std::invalid_argument);
}

TEST_CASE("ber_curve basics") {
    TableCache cache;
    auto cfg = small_bask_config(Detector::MlSteady);
    auto res = ber_curve(cfg, cache);
    REQUIRE(res.size() == 2);
    for (const auto& r : res) {
        CHECK(r.bits_simulated >= cfg.target_bits);
        CHECK(r.bits_simulated % (cfg.block_length) == 0);
        CHECK(r.ber ==
              doctest::Approx(static_cast<double>(r.bit_errors) /
                              static_cast<double>(r.bits_simulated)));
        CHECK(r.ci95_halfwidth >= 0.0);
        CHECK(r.modulation == "2-ASK");
    }
    CHECK(res[1].ber <= res[0].ber); // higher Eb/N0, fewer errors

    SUBCASE("deterministic across runs and caches") {
        TableCache cache2;
        auto res2 = ber_curve(cfg, cache2);
        for (std::size_t i = 0; i < res.size(); ++i)
            CHECK(res2[i].bit_errors == res[i].bit_errors);
    }
    SUBCASE("seed changes the realization") {
        auto cfg2 = cfg;
        cfg2.seed = 12;
        auto res2 = ber_curve(cfg2, cache);
        bool any_diff = false;
        for (std::size_t i = 0; i < res.size(); ++i)
            any_diff |= res2[i].bit_errors != res[i].bit_errors;
        CHECK(any_diff);
    }
}

TEST_CASE("ber_curve detector variants agree on the noise stream") {
    TableCache cache;
    // Same seed => identical transmitted blocks and noise; detectors only
    // differ in their decision rule. At Ts = 12.5 us the BASK ranges are
    // disjoint, so bounded ML and MLSD should both work.
    auto steady = ber_curve(small_bask_config(Detector::MlSteady), cache);
    auto bounded = ber_curve(small_bask_config(Detector::MlBounded), cache);
    auto mlsd = ber_curve(small_bask_config(Detector::Mlsd), cache);
    REQUIRE(steady.size() == bounded.size());
    for (std::size_t i = 0; i < steady.size(); ++i) {
        CHECK(bounded[i].bits_simulated == steady[i].bits_simulated);
        // bounded references sit at the range boundaries; they cannot be
        // dramatically worse than the steady references here
        CHECK(std::abs(bounded[i].bit_errors - steady[i].bit_errors) <
              steady[i].bits_simulated / 10);
        CHECK(mlsd[i].ber <= bounded[i].ber + 0.05);
    }
}

TEST_CASE("ber_curve rejects invalid setups") {
    TableCache cache;
    auto cfg = small_bask_config(Detector::Mlsd);
    cfg.window = 3; // does not divide 4
    CHECK_THROWS_AS(ber_curve(cfg, cache), std::invalid_argument);

    // 4-ASK at the short period overlaps -> bounded ML must refuse
    auto cfg2 = small_bask_config(Detector::MlBounded);
    cfg2.constellation = build_constellation(4, 0.5, 5.0 / 16.0);
    cfg2.symbol_period = 6.25e-6;
    cfg2.block_length = 2;
    cfg2.window = 2;
    CHECK_THROWS_AS(ber_curve(cfg2, cache), std::runtime_error);
}

TEST_CASE("eh_sweep") {
    TableCache cache;
    CircuitParams p;
    auto c = build_constellation(2, 0.5, 5.0 / 16.0);
    std::vector<double> periods = {6.25e-6, 12.5e-6};
    auto res = eh_sweep(p, c, periods, 3, 200, 5, cache);
    REQUIRE(res.size() == 2);
    for (const auto& r : res) {
        CHECK(r.block_length == 3);
        CHECK(r.sequences_averaged == 200);
        CHECK(r.avg_sequence_power > 0.0);
        CHECK(r.std_error > 0.0);
        CHECK(r.std_error < r.avg_sequence_power);
    }
    SUBCASE("deterministic") {
        TableCache cache2;
        auto res2 = eh_sweep(p, c, periods, 3, 200, 5, cache2);
        for (std::size_t i = 0; i < res.size(); ++i)
            CHECK(res2[i].avg_sequence_power == res[i].avg_sequence_power);
    }
    SUBCASE("argument checks") {
        CHECK_THROWS_AS(eh_sweep(p, c, periods, 3, 0, 5, cache),
                        std::invalid_argument);
    }
}
