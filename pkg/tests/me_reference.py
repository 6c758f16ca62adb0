"""Exact few-atom master-equation reference for the correlation tests.

Completely independent route: full density matrix in the 2^n atomic
Hilbert space, Lindblad evolution with the collective waveguide jump
operators kept (nothing truncated in drive order), photon statistics by
the quantum regression theorem.  Deliberately brute force; only meant
for n <= 3 where 4^n stays tiny.
"""

import numpy as np
from scipy.linalg import expm

SM = np.array([[0.0, 1.0], [0.0, 0.0]])  # |g><e|
PE = np.array([[0.0, 0.0], [0.0, 1.0]])  # |e><e|
I2 = np.eye(2)


def _site_op(op, j, n):
    out = np.array([[1.0]])
    for k in range(n):
        out = np.kron(out, op if k == j else I2)
    return out


def liouvillian_and_ops(m, delta, gamma_prime, theta, amp, gamma0=1.0):
    """(L, a_T, a_R, n_T_op) for the driven chain at field amplitude ``amp``."""
    m = np.asarray(m, dtype=float)
    n = m.size
    dim = 2 ** n
    sm = [_site_op(SM, j, n) for j in range(n)]
    pe = [_site_op(PE, j, n) for j in range(n)]
    w = np.exp(1j * theta * m)
    omega = amp * np.sqrt(gamma0 / 2.0)

    h = np.zeros((dim, dim), dtype=complex)
    for j in range(n):
        h += -delta * pe[j]
        h += -omega * (w[j] * sm[j].conj().T + np.conj(w[j]) * sm[j])
    for j in range(n):
        for k in range(n):
            if j != k:
                h += 0.5 * gamma0 * np.sin(theta * abs(m[j] - m[k])) \
                    * sm[j].conj().T @ sm[k]

    jumps = [np.sqrt(gamma_prime) * s for s in sm] if gamma_prime > 0 else []
    j_right = np.sqrt(gamma0 / 2.0) * sum(np.conj(w[j]) * sm[j] for j in range(n))
    j_left = np.sqrt(gamma0 / 2.0) * sum(w[j] * sm[j] for j in range(n))
    jumps += [j_right, j_left]

    eye = np.eye(dim)
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for jop in jumps:
        jd = jop.conj().T @ jop
        lv += np.kron(jop.conj(), jop)
        lv += -0.5 * np.kron(eye, jd) - 0.5 * np.kron(jd.T, eye)

    a_t = amp * eye + 1j * np.sqrt(gamma0 / 2.0) \
        * sum(np.conj(w[j]) * sm[j] for j in range(n))
    a_r = 1j * np.sqrt(gamma0 / 2.0) * sum(w[j] * sm[j] for j in range(n))
    return lv, a_t, a_r


def steady_state(lv):
    dim = int(round(np.sqrt(lv.shape[0])))
    a = lv.copy()
    trace_row = np.zeros(lv.shape[0], dtype=complex)
    trace_row[:: dim + 1] = 1.0
    a[0] = trace_row
    b = np.zeros(lv.shape[0], dtype=complex)
    b[0] = 1.0
    rho = np.linalg.solve(a, b).reshape(dim, dim, order="F")
    return 0.5 * (rho + rho.conj().T)


def g2_exact(m, delta, gamma_prime, theta, taus, amp=1e-4, port="transmitted"):
    """Regression-theorem g2 of the transmitted or reflected field."""
    lv, a_t, a_r = liouvillian_and_ops(m, delta, gamma_prime, theta, amp)
    a = a_t if port == "transmitted" else a_r
    rho = steady_state(lv)
    n_op = a.conj().T @ a
    intensity = float(np.real(np.trace(n_op @ rho)))
    rho_c = a @ rho @ a.conj().T
    vec = rho_c.reshape(-1, order="F")
    dim = rho.shape[0]
    out = np.empty(len(taus))
    for i, tau in enumerate(taus):
        evolved = (expm(lv * tau) @ vec).reshape(dim, dim, order="F")
        out[i] = float(np.real(np.trace(n_op @ evolved))) / intensity ** 2
    return out


def transmission_exact(m, delta, gamma_prime, theta, amp=1e-4):
    lv, a_t, _ = liouvillian_and_ops(m, delta, gamma_prime, theta, amp)
    rho = steady_state(lv)
    n_op = a_t.conj().T @ a_t
    return float(np.real(np.trace(n_op @ rho))) / amp ** 2
