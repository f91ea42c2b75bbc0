"""Pure numpy kernels; the compiled module mirrors these signatures."""
import numpy as np


def pfaffian(A):
    """Pfaffian of a complex skew-symmetric matrix by pivoted skew tridiagonalization."""
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("square matrix required")
    if n % 2:
        return 0j
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1:, k])))
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        piv = A[k, k + 1]
        if piv == 0:
            return 0j
        pf *= piv
        if k + 2 < n:
            tau = A[k, k + 2:] / piv
            col = A[k + 2:, k + 1].copy()
            A[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return pf


def batch_pfaffian(stack):
    stack = np.asarray(stack, dtype=complex)
    return np.array([pfaffian(m) for m in stack], dtype=complex)


def loop_phase(links):
    """Summed phases of closed link products: links has shape (faces, edges)."""
    links = np.asarray(links, dtype=complex)
    return np.angle(np.prod(links, axis=1))
