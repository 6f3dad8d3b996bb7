#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qropt {

using Complex = std::complex<double>;

// Two-qubit density matrix, basis order |00>, |01>, |10>, |11>.
using StateMatrix = Eigen::Matrix4cd;
using StateVector = Eigen::Vector4cd;
using Matrix16 = Eigen::Matrix<Complex, 16, 16>;

inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

enum class BellKind { kPsiPlus, kPsiMinus, kPhiPlus, kPhiMinus };

StateVector bell_vector(BellKind kind);

// Projector onto the named Bell state.
StateMatrix bell_state(BellKind kind);

// x |psi+><psi+| + (1 - x) I/4, x in [-1/3, 1].
StateMatrix werner_state(double x);

// Werner parameter x and fidelity f = (1 + 3x)/4 are interchangeable
// descriptions of the same state.
double werner_x_from_fidelity(double f);
double werner_fidelity_from_x(double x);

// <target| state |target>. Target must be normalized.
double fidelity(const StateMatrix& state, const StateVector& target);
double fidelity(const StateMatrix& state, BellKind target);

// Phi(rho, s_q) = ((1+3s_q)/4) rho + ((1-s_q)/4)(X rho X + Y rho Y + Z rho Z)
// on the chosen qubit. Scales the Werner parameter by s_q.
StateMatrix depolarize_qubit(const StateMatrix& state, int which, double s_q);

// (1 - p) rho + p Z rho Z on the chosen qubit, p in [0, 1/2].
StateMatrix dephase_qubit(const StateMatrix& state, int which, double p);

// Two-Kraus amplitude damping toward |0> on the chosen qubit.
StateMatrix amplitude_damp_qubit(const StateMatrix& state, int which,
                                 double p_damp);

// p = (1 - exp(-t (1/T2 - 1/(2 T1)))) / 2
double dephasing_probability(double t_s, double t1_s, double t2_s);

// T1/T2 memory decay over t seconds: amplitude damping with 1 - exp(-t/T1)
// followed by dephasing with the probability above. Requires t2 <= 2 t1.
// Forms a semigroup: decohere(t1) then decohere(t2) == decohere(t1 + t2).
StateMatrix decohere(const StateMatrix& state, int which, double t_s,
                     double t1_s, double t2_s);

// Ideal Bell-state measurement gluing two pairs: the measured qubits are the
// right qubit of `left` and the left qubit of `right`. The four outcomes are
// averaged with their ideal Pauli corrections, so the result is a
// deterministic state on the two outer qubits. Werner(x1) with Werner(x2)
// composes to Werner(x1 * x2).
StateMatrix swap_bsm(const StateMatrix& left, const StateMatrix& right);

bool is_valid_state(const StateMatrix& state, double trace_tol = kTraceTol,
                    double psd_tol = kPsdTol);

// Throws std::invalid_argument when the matrix is not a density matrix.
void require_valid_state(const StateMatrix& state,
                         double trace_tol = kTraceTol,
                         double psd_tol = kPsdTol);

}  // namespace qropt
