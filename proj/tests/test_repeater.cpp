#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <limits>

#include "qropt/repeater.hpp"
#include "qropt/rng.hpp"

using namespace qropt;

TEST_CASE("elementary_link_state") {
  CHECK((elementary_link_state(1.0) - bell_state(BellKind::kPsiPlus))
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  StateMatrix up_up = StateMatrix::Zero();
  up_up(0, 0) = 1.0;
  CHECK((elementary_link_state(0.0) - up_up).cwiseAbs().maxCoeff() < 1e-15);

  // fidelity equals the argument exactly; 0.9698 is the NL-row baseline
  CHECK(fidelity(elementary_link_state(0.9698), BellKind::kPsiPlus) ==
        doctest::Approx(0.9698).epsilon(1e-13));
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const double f = rng.uniform();
    const StateMatrix rho = elementary_link_state(f);
    CHECK(std::abs(fidelity(rho, BellKind::kPsiPlus) - f) < 1e-14);
    CHECK(is_valid_state(rho));
  }
  CHECK_THROWS_AS(elementary_link_state(1.2), std::invalid_argument);
}

TEST_CASE("compose_swap_quality") {
  CHECK(compose_swap_quality({}) == 1.0);
  const std::array<double, 1> one = {0.025};
  CHECK(compose_swap_quality(one) == doctest::Approx(0.975).epsilon(1e-14));
  const std::array<double, 3> three = {0.025, 0.03, 0.001};
  CHECK(compose_swap_quality(three) ==
        doctest::Approx(0.94480425).epsilon(1e-12));
  const std::array<double, 1> bad = {1.5};
  CHECK_THROWS_AS(compose_swap_quality(bad), std::invalid_argument);
}

TEST_CASE("induced_dephasing_t2") {
  // p1 = 0: the log term vanishes and T2 is the pure-T1 limit 2 T1
  CHECK(induced_dephasing_t2(100.0, 0.0, 1e-5) ==
        doctest::Approx(200.0).epsilon(1e-12));

  // very large T1: T2 -> -T_cycle / ln(1 - 2 p1)
  const double limit = -1e-5 / std::log1p(-2.0 * 0.01);
  CHECK(induced_dephasing_t2(1e12, 0.01, 1e-5) ==
        doctest::Approx(limit).epsilon(1e-6));

  CHECK(induced_dephasing_t2(36000.0, 0.01, 1e-5) ==
        doctest::Approx(4.949831611e-4).epsilon(1e-8));

  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const double t1 = std::exp(rng.uniform(-3.0, 10.0));
    const double p1 = 0.4999 * rng.uniform();
    const double tc = std::exp(rng.uniform(-12.0, 0.0));
    const double t2 = induced_dephasing_t2(t1, p1, tc);
    CHECK(t2 > 0.0);
    CHECK(t2 <= 2.0 * t1 * (1.0 + 1e-12));
  }
  CHECK_THROWS_AS(induced_dephasing_t2(1.0, 0.5, 1e-5), std::invalid_argument);
}

TEST_CASE("time gene transform") {
  CHECK(time_to_gene(0.0) == 0.0);
  CHECK_THROWS_AS(time_to_gene(-1.0), std::invalid_argument);
  CHECK(time_to_gene(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(time_to_gene(36000.0) ==
        doctest::Approx(0.9999722229938057).epsilon(1e-12));
  CHECK(time_to_gene(std::numeric_limits<double>::infinity()) == 1.0);
  CHECK_THROWS_AS(gene_to_time(1.0), std::domain_error);

  // oriented transform is increasing, the reciprocal variant decreasing
  CHECK(time_to_gene(10.0) > time_to_gene(1.0));
  CHECK(time_to_gene(10.0, TimeGeneConvention::kReciprocal) <
        time_to_gene(1.0, TimeGeneConvention::kReciprocal));
  CHECK(gene_to_time(time_to_gene(7.25, TimeGeneConvention::kReciprocal),
                     TimeGeneConvention::kReciprocal) ==
        doctest::Approx(7.25).epsilon(1e-9));
}

TEST_CASE("normalize/denormalize round trips") {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    NormalizedParams genes;
    genes.f_el = rng.uniform();
    genes.p_suc = 0.001 + 0.999 * rng.uniform();
    genes.s_q = rng.uniform();
    genes.t1 = 0.5 + 0.499999 * rng.uniform();
    genes.t2 = std::max(genes.t1 * rng.uniform(), 1e-6);
    const RepeaterParams params = denormalize(genes);
    const NormalizedParams back = normalize(params);
    CHECK(std::abs(back.f_el - genes.f_el) < 1e-12);
    CHECK(std::abs(back.p_suc - genes.p_suc) < 1e-12);
    CHECK(std::abs(back.s_q - genes.s_q) < 1e-12);
    CHECK(std::abs(back.t1 - genes.t1) < 1e-12);
    CHECK(std::abs(back.t2 - genes.t2) < 1e-12);
  }
  for (int i = 0; i < 200; ++i) {
    RepeaterParams params;
    params.f_el = rng.uniform();
    params.p_suc = 0.001 + 0.999 * rng.uniform();
    params.s_q = rng.uniform();
    params.t1_s = std::exp(rng.uniform(-3.0, 13.0));
    params.t2_s = params.t1_s * (0.001 + 1.998 * rng.uniform());
    const RepeaterParams back = denormalize(normalize(params));
    CHECK(std::abs(back.t1_s - params.t1_s) / params.t1_s < 1e-9);
    CHECK(std::abs(back.t2_s - params.t2_s) / params.t2_s < 1e-9);
  }
}

TEST_CASE("time gene is monotone") {
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const double a = std::exp(rng.uniform(-3.0, 10.0));
    const double b = a * (1.0 + rng.uniform());
    CHECK(time_to_gene(b) > time_to_gene(a));
  }
}

TEST_CASE("validation rejects unphysical parameter sets") {
  RepeaterParams params{0.9, 0.5, 0.9, 1.0, 2.5};
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params.t2_s = 2.0;
  CHECK_NOTHROW(params.validate());
  params.p_suc = 0.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  // infinite coherence times are the no-decoherence limit
  RepeaterParams ideal{1.0, 1.0, 1.0, std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity()};
  CHECK_NOTHROW(ideal.validate());
}
