#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qropt/quantum.hpp"
#include "qropt/rng.hpp"

using namespace qropt;

namespace {

// Ginibre-style random mixed state: G G^dag / tr, always a valid density
// matrix up to rounding.
StateMatrix random_state(Rng& rng) {
  StateMatrix g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  StateMatrix rho = g * g.adjoint();
  return rho / rho.trace();
}

double max_abs_diff(const StateMatrix& a, const StateMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("bell states have the expected matrix elements") {
  const StateMatrix psi_plus = bell_state(BellKind::kPsiPlus);
  // 1/2 at (01,01), (01,10), (10,01), (10,10), zero elsewhere
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const bool inner = (i == 1 || i == 2) && (j == 1 || j == 2);
      CHECK(std::abs(psi_plus(i, j) - (inner ? 0.5 : 0.0)) < 1e-15);
    }
  CHECK(std::abs(psi_plus.trace().real() - 1.0) < 1e-15);

  for (BellKind kind : {BellKind::kPsiPlus, BellKind::kPsiMinus,
                        BellKind::kPhiPlus, BellKind::kPhiMinus}) {
    CHECK(fidelity(bell_state(kind), kind) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(is_valid_state(bell_state(kind)));
  }

  // orthogonality with |00><00|
  StateMatrix up_up = StateMatrix::Zero();
  up_up(0, 0) = 1.0;
  CHECK(std::abs(fidelity(up_up, BellKind::kPsiPlus)) < 1e-15);
}

TEST_CASE("fidelity on werner states") {
  CHECK(fidelity(werner_state(1.0), BellKind::kPsiPlus) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(werner_state(0.0), BellKind::kPsiPlus) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(fidelity(werner_state(0.5), StateVector::Ones()),
                  std::invalid_argument);
  CHECK_THROWS_AS(werner_state(-0.4), std::invalid_argument);

  // x and f descriptions stay mutually consistent under f = (1 + 3x)/4
  for (double x : {-1.0 / 3.0, 0.0, 0.25, 0.8, 1.0}) {
    const double f = werner_fidelity_from_x(x);
    CHECK(std::abs(werner_x_from_fidelity(f) - x) < 1e-15);
    CHECK(std::abs(fidelity(werner_state(x), BellKind::kPsiPlus) - f) < 1e-15);
  }
}

TEST_CASE("depolarize_qubit scales the werner parameter") {
  CHECK(max_abs_diff(depolarize_qubit(werner_state(0.7), 0, 1.0),
                     werner_state(0.7)) == 0.0);  // s_q = 1 is the identity
  for (double x : {-1.0 / 3.0, 0.0, 0.3, 0.7, 1.0})
    for (double s : {0.0, 0.5, 0.9, 1.0})
      for (int which : {0, 1})
        CHECK(max_abs_diff(depolarize_qubit(werner_state(x), which, s),
                           werner_state(s * x)) < 1e-12);
  CHECK(fidelity(depolarize_qubit(bell_state(BellKind::kPsiPlus), 0, 0.0),
                 BellKind::kPsiPlus) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(depolarize_qubit(werner_state(0.5), 0, 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(depolarize_qubit(werner_state(0.5), 2, 0.5),
                  std::invalid_argument);
}

TEST_CASE("dephase_qubit") {
  Rng rng(42);
  const StateMatrix rho = random_state(rng);
  CHECK(max_abs_diff(dephase_qubit(rho, 0, 0.0), rho) == 0.0);

  // p = 1/2 on psi+ gives the even psi+/psi- mixture
  const StateMatrix dephased =
      dephase_qubit(bell_state(BellKind::kPsiPlus), 0, 0.5);
  const StateMatrix mixture = 0.5 * bell_state(BellKind::kPsiPlus) +
                              0.5 * bell_state(BellKind::kPsiMinus);
  CHECK(max_abs_diff(dephased, mixture) < 1e-12);
  CHECK(fidelity(dephased, BellKind::kPsiPlus) ==
        doctest::Approx(0.5).epsilon(1e-12));

  // diagonal untouched for any valid input
  for (int trial = 0; trial < 20; ++trial) {
    const StateMatrix in = random_state(rng);
    const StateMatrix out = dephase_qubit(in, trial % 2, 0.3);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(out(i, i) - in(i, i)) < 1e-12);
  }
  CHECK_THROWS_AS(dephase_qubit(rho, 0, 0.6), std::invalid_argument);
}

TEST_CASE("amplitude_damp_qubit") {
  Rng rng(7);
  const StateMatrix rho = random_state(rng);
  CHECK(max_abs_diff(amplitude_damp_qubit(rho, 1, 0.0), rho) == 0.0);

  StateMatrix one_one = StateMatrix::Zero();
  one_one(3, 3) = 1.0;  // |11><11|
  StateMatrix zero_one = StateMatrix::Zero();
  zero_one(1, 1) = 1.0;  // |01><01|
  CHECK(max_abs_diff(amplitude_damp_qubit(one_one, 0, 1.0), zero_one) < 1e-15);

  for (int trial = 0; trial < 50; ++trial) {
    const StateMatrix out =
        amplitude_damp_qubit(random_state(rng), trial % 2, rng.uniform());
    CHECK(std::abs(out.trace().real() - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(amplitude_damp_qubit(rho, 0, -0.1), std::invalid_argument);
}

TEST_CASE("decohere") {
  Rng rng(3);
  const StateMatrix rho = random_state(rng);
  CHECK(max_abs_diff(decohere(rho, 0, 0.0, 10.0, 5.0), rho) == 0.0);

  // T2 = 2 T1 is the pure-T1 limit: no extra dephasing beyond the damping
  const double t1 = 2.5;
  const StateMatrix pure_damping =
      amplitude_damp_qubit(rho, 1, -std::expm1(-1.0 / t1));
  CHECK(max_abs_diff(decohere(rho, 1, 1.0, t1, 2.0 * t1), pure_damping) <
        1e-12);
  CHECK(dephasing_probability(123.0, t1, 2.0 * t1) == 0.0);

  // frozen numeric case for the dephasing probability
  CHECK(dephasing_probability(0.0049, 36000.0, 0.0049) ==
        doctest::Approx(0.3160602668961585).epsilon(1e-9));

  CHECK_THROWS_AS(decohere(rho, 0, 1.0, 1.0, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(decohere(rho, 0, -1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("decohere composes as a semigroup") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const StateMatrix rho = random_state(rng);
    const double t1 = 0.5 + 4.0 * rng.uniform();
    const double t2 = t1 * (0.2 + 1.7 * rng.uniform());  // keeps t2 < 2 t1
    const double ta = 2.0 * rng.uniform();
    const double tb = 2.0 * rng.uniform();
    const int which = trial % 2;
    const StateMatrix two_steps =
        decohere(decohere(rho, which, ta, t1, t2), which, tb, t1, t2);
    const StateMatrix one_step = decohere(rho, which, ta + tb, t1, t2);
    CHECK(max_abs_diff(two_steps, one_step) < 1e-12);
  }
}

TEST_CASE("swap_bsm composes werner parameters multiplicatively") {
  // psi+ with psi+ stays psi+
  CHECK(max_abs_diff(swap_bsm(bell_state(BellKind::kPsiPlus),
                              bell_state(BellKind::kPsiPlus)),
                     bell_state(BellKind::kPsiPlus)) < 1e-12);

  for (double x1 : {-1.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0})
    for (double x2 : {-1.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0})
      CHECK(max_abs_diff(swap_bsm(werner_state(x1), werner_state(x2)),
                         werner_state(x1 * x2)) < 1e-12);
  CHECK(max_abs_diff(swap_bsm(werner_state(0.8), werner_state(0.5)),
                     werner_state(0.4)) < 1e-12);

  // swapping with the maximally mixed pair keeps only the left pair's
  // surviving-qubit marginal: rho x I/4 -> Tr_B(rho) (x) I/2. For any state
  // with a maximally mixed marginal (every Werner state) this is I/4.
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const StateMatrix rho = random_state(rng);
    const StateMatrix joined = swap_bsm(rho, werner_state(0.0));
    Eigen::Matrix2cd marginal = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 2; ++a)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b = 0; b < 2; ++b)
          marginal(a, a2) += rho(2 * a + b, 2 * a2 + b);
    StateMatrix expected;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        expected.block<2, 2>(2 * i, 2 * j) =
            marginal(i, j) * 0.5 * Eigen::Matrix2cd::Identity();
    CHECK(max_abs_diff(joined, expected) < 1e-12);
  }
  for (double x : {-1.0 / 3.0, 0.2, 0.8, 1.0})
    CHECK(max_abs_diff(swap_bsm(werner_state(x), werner_state(0.0)),
                       werner_state(0.0)) < 1e-12);

  CHECK_THROWS_AS(swap_bsm(StateMatrix::Zero(), werner_state(0.5)),
                  std::invalid_argument);
}

TEST_CASE("channels preserve density-matrix well-formedness") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    StateMatrix rho = random_state(rng);
    switch (trial % 5) {
      case 0: rho = depolarize_qubit(rho, trial % 2, rng.uniform()); break;
      case 1: rho = dephase_qubit(rho, trial % 2, 0.5 * rng.uniform()); break;
      case 2:
        rho = amplitude_damp_qubit(rho, trial % 2, rng.uniform());
        break;
      case 3: {
        const double t1 = 0.1 + rng.uniform();
        rho = decohere(rho, trial % 2, rng.uniform(), t1,
                       t1 * (0.1 + 1.8 * rng.uniform()));
        break;
      }
      default: rho = swap_bsm(rho, random_state(rng)); break;
    }
    CHECK(is_valid_state(rho, 1e-12, 1e-10));
  }
}
