"""Many-body Fock-space construction for small fermionic baths.

Basis convention: a basis state is an integer s in [0, 2**n_modes); bit
j of s is the occupation of mode j, i.e. lattice site j+1 maps to bit j.
The reference ordering fills modes lowest bit first,

    |s> = ... c^dag_{j2} c^dag_{j1} |vac>,   j1 < j2 < ...,

so annihilating mode j picks up the Jordan-Wigner sign (-1)**(number of
occupied modes below j).  All operators built here are dense; these
matrices exist to cross-check the determinant machinery at small L, not
to scale.
"""

import numpy as np

from .errors import CapacityError


def _parity_below(states, mode):
    """Parity (0 or 1) of the occupation count strictly below `mode`."""
    masked = states & ((1 << mode) - 1)
    parity = np.zeros_like(masked)
    while np.any(masked):
        parity ^= masked & 1
        masked >>= 1
    return parity


def _occupation_count(states):
    count = np.zeros_like(states)
    s = states.copy()
    while np.any(s):
        count += s & 1
        s >>= 1
    return count


def fock_dimension(n_modes, cap=None):
    dim = 1 << int(n_modes)
    if cap is not None and dim > cap:
        raise CapacityError(
            "Fock dimension %d exceeds the cap %d (%d modes)" % (dim, cap, n_modes))
    return dim


def many_body_bilinear(h):
    """Second-quantised bilinear sum_jk h[j,k] c^dag_j c_k as a dense matrix.

    :param h: (n, n) single-particle matrix (Hermitian for a Hamiltonian,
        but any matrix is lifted faithfully)
    :return: (2**n, 2**n) dense array, complex iff h is
    """
    h = np.asarray(h)
    n = h.shape[0]
    dim = 1 << n
    states = np.arange(dim, dtype=np.int64)
    dtype = complex if np.iscomplexobj(h) else float
    out = np.zeros((dim, dim), dtype=dtype)

    diag = np.zeros(dim, dtype=dtype)
    for j in range(n):
        if h[j, j] != 0:
            diag += h[j, j] * ((states >> j) & 1)
    out[states, states] = diag

    for j in range(n):
        for k in range(n):
            if j == k or h[j, k] == 0:
                continue
            # <s'| c^dag_j c_k |s> needs mode k occupied and mode j empty
            mask = (((states >> k) & 1) == 1) & (((states >> j) & 1) == 0)
            src = states[mask]
            if src.size == 0:
                continue
            sign = 1.0 - 2.0 * _parity_below(src, k)
            mid = src ^ (1 << k)
            sign = sign * (1.0 - 2.0 * _parity_below(mid, j))
            dst = mid | (1 << j)
            out[dst, src] += h[j, k] * sign
    return out


def total_number_operator(n_modes):
    """Diagonal total particle-number operator on the full Fock space."""
    states = np.arange(1 << int(n_modes), dtype=np.int64)
    return np.diag(_occupation_count(states).astype(float))


def site_number_operator(n_modes, site):
    """Occupation operator c^dag_site c_site for a single 1-based site."""
    if not (1 <= site <= n_modes):
        raise ValueError("site %s outside 1..%d" % (site, n_modes))
    states = np.arange(1 << int(n_modes), dtype=np.int64)
    return np.diag(((states >> (site - 1)) & 1).astype(float))
