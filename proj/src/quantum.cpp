#include "qropt/quantum.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace qropt {

namespace {

constexpr Complex kI{0.0, 1.0};

// Single-qubit Paulis lifted to the two-qubit space. which == 0 acts on the
// left (most significant) qubit, which == 1 on the right.
Eigen::Matrix2cd pauli2(int p) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (p) {
    case 0: m << 1, 0, 0, 1; break;          // I
    case 1: m << 0, 1, 1, 0; break;          // X
    case 2: m << 0, -kI, kI, 0; break;       // Y
    default: m << 1, 0, 0, -1; break;        // Z
  }
  return m;
}

StateMatrix lift(const Eigen::Matrix2cd& op, int which) {
  StateMatrix out;
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd& a = (which == 0) ? op : id;
  const Eigen::Matrix2cd& b = (which == 0) ? id : op;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

void check_qubit_index(int which) {
  if (which != 0 && which != 1)
    throw std::invalid_argument("qubit index must be 0 or 1");
}

Matrix16 kron4(const StateMatrix& a, const StateMatrix& b) {
  Matrix16 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

// Cheap sanity check used on the hot path; full PSD validation lives in
// require_valid_state.
void check_swap_input(const StateMatrix& rho, const char* side) {
  if (std::abs(rho.trace().real() - 1.0) > 1e-9 ||
      std::abs(rho.trace().imag()) > 1e-9 ||
      (rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument(std::string("swap_bsm: invalid ") + side +
                                " input state");
}

struct BsmTables {
  // Projectors I_A (x) |bell_k><bell_k|_BC (x) I_D, and the Pauli correction
  // on the surviving right qubit that maps outcome k back to psi+.
  std::array<Matrix16, 4> projector;
  std::array<StateMatrix, 4> correction;
};

const BsmTables& bsm_tables() {
  static const BsmTables tables = [] {
    BsmTables t;
    const std::array<BellKind, 4> outcomes = {
        BellKind::kPhiPlus, BellKind::kPhiMinus, BellKind::kPsiPlus,
        BellKind::kPsiMinus};
    // phi+ -> X, phi- -> Y, psi+ -> I, psi- -> Z
    const std::array<int, 4> pauli_fix = {1, 2, 0, 3};
    for (int k = 0; k < 4; ++k) {
      const StateVector beta = bell_vector(outcomes[k]);
      Matrix16& p = t.projector[k];
      p.setZero();
      // full-space index = 8a + 4b + 2c + d = 8a + 2*(2b + c) + d
      for (int a = 0; a < 2; ++a)
        for (int d = 0; d < 2; ++d)
          for (int bc = 0; bc < 4; ++bc)
            for (int bc2 = 0; bc2 < 4; ++bc2)
              p(8 * a + 2 * bc + d, 8 * a + 2 * bc2 + d) +=
                  beta(bc) * std::conj(beta(bc2));
      t.correction[k] = lift(pauli2(pauli_fix[k]), 1);
    }
    return t;
  }();
  return tables;
}

}  // namespace

StateVector bell_vector(BellKind kind) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  StateVector v = StateVector::Zero();
  switch (kind) {
    case BellKind::kPsiPlus:
      v(1) = inv_sqrt2;
      v(2) = inv_sqrt2;
      break;
    case BellKind::kPsiMinus:
      v(1) = inv_sqrt2;
      v(2) = -inv_sqrt2;
      break;
    case BellKind::kPhiPlus:
      v(0) = inv_sqrt2;
      v(3) = inv_sqrt2;
      break;
    case BellKind::kPhiMinus:
      v(0) = inv_sqrt2;
      v(3) = -inv_sqrt2;
      break;
  }
  return v;
}

StateMatrix bell_state(BellKind kind) {
  // built directly so the entries are exactly +-1/2
  int i = 0;
  int j = 3;
  double sign = 1.0;
  switch (kind) {
    case BellKind::kPsiPlus: i = 1; j = 2; break;
    case BellKind::kPsiMinus: i = 1; j = 2; sign = -1.0; break;
    case BellKind::kPhiPlus: break;
    case BellKind::kPhiMinus: sign = -1.0; break;
  }
  StateMatrix m = StateMatrix::Zero();
  m(i, i) = 0.5;
  m(j, j) = 0.5;
  m(i, j) = sign * 0.5;
  m(j, i) = sign * 0.5;
  return m;
}

StateMatrix werner_state(double x) {
  if (x < -1.0 / 3.0 - 1e-15 || x > 1.0 + 1e-15)
    throw std::invalid_argument("werner_state: x must be in [-1/3, 1]");
  return x * bell_state(BellKind::kPsiPlus) +
         (1.0 - x) * 0.25 * StateMatrix::Identity();
}

double werner_x_from_fidelity(double f) { return (4.0 * f - 1.0) / 3.0; }

double werner_fidelity_from_x(double x) { return (1.0 + 3.0 * x) / 4.0; }

double fidelity(const StateMatrix& state, const StateVector& target) {
  if (std::abs(target.squaredNorm() - 1.0) > 1e-9)
    throw std::invalid_argument("fidelity: target is not normalized");
  return (target.adjoint() * state * target)(0, 0).real();
}

double fidelity(const StateMatrix& state, BellKind target) {
  // trace against the exact +-1/2 projector; v* rho v through bell_vector
  // would lose an ulp to the 1/sqrt(2) rounding
  const StateMatrix projector = bell_state(target);
  Complex sum = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) sum += projector(i, j) * state(j, i);
  return sum.real();
}

StateMatrix depolarize_qubit(const StateMatrix& state, int which, double s_q) {
  check_qubit_index(which);
  if (!(s_q >= 0.0 && s_q <= 1.0))
    throw std::invalid_argument("depolarize_qubit: s_q must be in [0, 1]");
  if (s_q == 1.0) return state;
  StateMatrix pauli_sum = StateMatrix::Zero();
  for (int p = 1; p <= 3; ++p) {
    const StateMatrix op = lift(pauli2(p), which);
    pauli_sum += op * state * op.adjoint();
  }
  return ((1.0 + 3.0 * s_q) / 4.0) * state + ((1.0 - s_q) / 4.0) * pauli_sum;
}

StateMatrix dephase_qubit(const StateMatrix& state, int which, double p) {
  check_qubit_index(which);
  if (!(p >= 0.0 && p <= 0.5))
    throw std::invalid_argument("dephase_qubit: p must be in [0, 1/2]");
  if (p == 0.0) return state;
  const StateMatrix z = lift(pauli2(3), which);
  return (1.0 - p) * state + p * z * state * z.adjoint();
}

StateMatrix amplitude_damp_qubit(const StateMatrix& state, int which,
                                 double p_damp) {
  check_qubit_index(which);
  if (!(p_damp >= 0.0 && p_damp <= 1.0))
    throw std::invalid_argument(
        "amplitude_damp_qubit: p_damp must be in [0, 1]");
  if (p_damp == 0.0) return state;
  Eigen::Matrix2cd k0, k1;
  k0 << 1, 0, 0, std::sqrt(1.0 - p_damp);
  k1 << 0, std::sqrt(p_damp), 0, 0;
  const StateMatrix a0 = lift(k0, which);
  const StateMatrix a1 = lift(k1, which);
  return a0 * state * a0.adjoint() + a1 * state * a1.adjoint();
}

double dephasing_probability(double t_s, double t1_s, double t2_s) {
  const double rate = 1.0 / t2_s - 1.0 / (2.0 * t1_s);
  return -std::expm1(-t_s * rate) / 2.0;
}

StateMatrix decohere(const StateMatrix& state, int which, double t_s,
                     double t1_s, double t2_s) {
  check_qubit_index(which);
  if (!(t_s >= 0.0)) throw std::invalid_argument("decohere: t must be >= 0");
  if (!(t1_s > 0.0) || !(t2_s > 0.0))
    throw std::invalid_argument("decohere: T1 and T2 must be > 0");
  if (t2_s > 2.0 * t1_s)
    throw std::invalid_argument("decohere: T2 > 2 T1 is unphysical");
  const double p_damp = -std::expm1(-t_s / t1_s);
  const double p_deph = dephasing_probability(t_s, t1_s, t2_s);
  return dephase_qubit(amplitude_damp_qubit(state, which, p_damp), which,
                       p_deph);
}

StateMatrix swap_bsm(const StateMatrix& left, const StateMatrix& right) {
  check_swap_input(left, "left");
  check_swap_input(right, "right");
  // Qubit order (A, B, C, D): left pair = (A, B), right pair = (C, D),
  // measured pair = (B, C), output pair = (A, D).
  const Matrix16 full = kron4(left, right);
  const BsmTables& t = bsm_tables();
  StateMatrix out = StateMatrix::Zero();
  for (int k = 0; k < 4; ++k) {
    const Matrix16 projected = t.projector[k] * full * t.projector[k];
    StateMatrix reduced = StateMatrix::Zero();
    for (int a = 0; a < 2; ++a)
      for (int d = 0; d < 2; ++d)
        for (int a2 = 0; a2 < 2; ++a2)
          for (int d2 = 0; d2 < 2; ++d2) {
            Complex sum = 0.0;
            for (int bc = 0; bc < 4; ++bc)
              sum += projected(8 * a + 2 * bc + d, 8 * a2 + 2 * bc + d2);
            reduced(2 * a + d, 2 * a2 + d2) = sum;
          }
    out += t.correction[k] * reduced * t.correction[k].adjoint();
  }
  return out;
}

bool is_valid_state(const StateMatrix& state, double trace_tol,
                    double psd_tol) {
  if (std::abs(state.trace().real() - 1.0) > trace_tol) return false;
  if (std::abs(state.trace().imag()) > trace_tol) return false;
  if ((state - state.adjoint()).cwiseAbs().maxCoeff() > trace_tol)
    return false;
  Eigen::SelfAdjointEigenSolver<StateMatrix> solver(state,
                                                    Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -psd_tol;
}

void require_valid_state(const StateMatrix& state, double trace_tol,
                         double psd_tol) {
  if (!is_valid_state(state, trace_tol, psd_tol))
    throw std::invalid_argument("matrix is not a valid two-qubit state");
}

}  // namespace qropt
