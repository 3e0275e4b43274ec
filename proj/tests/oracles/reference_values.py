"""Independent numpy/scipy reference values frozen into the C++ tests.

Run: python3 tests/oracles/reference_values.py
"""
import numpy as np
from scipy.linalg import expm, null_space
from scipy.special import eval_laguerre

np.set_printoptions(precision=17)


def ops(n):
    a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    # qubit order: excited, ground
    sz = np.diag([1.0, -1.0]).astype(complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    i2 = np.eye(2)
    return np.kron(i2, a), np.kron(sz, np.eye(n)), np.kron(sx, np.eye(n))


def h_rabi(w, w0, b, n):
    a, sz, sx = ops(n)
    return 0.5 * w0 * sz + w * a.conj().T @ a + b * w * (a + a.conj().T) @ sx


def rabi_levels():
    e = np.linalg.eigvalsh(h_rabi(1.0, 0.15, 0.1, 80))[:8]
    print("rabi w0=0.15 b=0.1 lowest 8:", repr(e))
    e = np.linalg.eigvalsh(h_rabi(1.0, 0.3, 0.2, 80))[:4]
    print("rabi w0=0.3 b=0.2 lowest 4:", repr(e))


def dressed_states(w0, b, n, levels):
    a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    gen = a.conj().T - a
    plus = (np.array([1, 1]) / np.sqrt(2)).astype(complex)
    minus = (np.array([1, -1]) / np.sqrt(2)).astype(complex)
    dp = expm(-b * gen)  # D(-b)
    dm = expm(b * gen)   # D(+b)
    out = []
    for s in (1, -1):
        for N in range(levels):
            fock = np.zeros(n, complex)
            fock[N] = 1
            v = np.kron(plus, dp @ fock) + s * np.kron(minus, dm @ fock)
            out.append((N, s, v / np.sqrt(2)))
    return out


def sw_generator(w, w0, b, n):
    a1 = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    sp = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|
    a = np.kron(np.eye(2), a1)
    ad = a.conj().T
    spj = np.kron(sp, np.eye(n))
    smj = spj.conj().T
    s = b * w * ((a @ spj - ad @ smj) / (w0 - w) + (ad @ spj - a @ smj) / (w0 + w))
    return -s  # sign that satisfies [H0, S] = -V


def h_sw(w, w0, b, n):
    a, sz, _ = ops(n)
    x = a + a.conj().T
    chi = w0 * w * w * b * b / (w0 * w0 - w * w)
    return 0.5 * w0 * sz + w * a.conj().T @ a + chi * sz @ x @ x


def fidelities(w0, b, n=60, k=6):
    ev, vec = np.linalg.eigh(h_rabi(1.0, w0, b, n))
    exact = vec[:, :2 * k]
    ds = dressed_states(w0, b, n, k + 2)
    ad = np.array([v for _, _, v in ds]).T
    w_ad = np.abs(ad.conj().T @ exact[:, :k]) ** 2
    _, vsw = np.linalg.eigh(h_sw(1.0, w0, b, n))
    rot = expm(sw_generator(1.0, w0, b, n)) @ vsw[:, :2 * k + 4]
    w_sw = np.abs(rot.conj().T @ exact[:, :k]) ** 2
    from scipy.optimize import linear_sum_assignment
    r, c = linear_sum_assignment(-w_ad.T)
    f_ad = w_ad.T[r, c]
    r, c = linear_sum_assignment(-w_sw.T)
    f_sw = w_sw.T[r, c]
    print(f"fidelity w0={w0} b={b}: mean f_ad={f_ad.mean():.15f} mean f_sw={f_sw.mean():.15f}")


def driven_nss(levels, nbar, dephase=True):
    w0, b = 0.3, 0.1
    G = 3 * w0 * b * b / 5
    kappa = G / 6
    gf = G / 3 if dephase else 0.0
    om = 1 + 2 * w0 * b * b
    op = 1 - 2 * w0 * b * b
    wp = om
    amp = np.sqrt(nbar) * G / 2
    L = levels
    d = 2 * L
    lad = np.diag(np.sqrt(np.arange(1, L)), 1).astype(complex)
    z = np.zeros((L, L))
    ap = np.block([[lad, z], [z, z]])
    am = np.block([[z, z], [z, lad]])
    pp = np.block([[np.eye(L), z], [z, z]])
    pm = np.block([[z, z], [z, np.eye(L)]])
    off = 0.5 * w0 * (1 - 2 * b * b)
    H = (op - wp) * ap.conj().T @ ap + off * pp + (om - wp) * am.conj().T @ am - off * pm
    H = H + amp * (ap + ap.conj().T + am + am.conj().T)
    lag = [np.exp(-2 * b * b) * eval_laguerre(N, 4 * b * b) for N in range(L)]
    Sz = np.diag(np.concatenate([lag, -np.array(lag)])).astype(complex)
    jumps = [(G, ap), (G, am)]
    for N in range(L):
        c = np.zeros((d, d), complex)
        c[L + N, N] = 1
        jumps.append((kappa, c))
    if gf > 0:
        jumps.append((gf, Sz))
    I = np.eye(d)
    # column stacking: vec(AXB) = (B^T kron A) vec X
    Lsup = -1j * (np.kron(I, H) - np.kron(H.T, I))
    for r, c in jumps:
        cdc = c.conj().T @ c
        Lsup += r * (np.kron(c.conj(), c) - 0.5 * np.kron(I, cdc) - 0.5 * np.kron(cdc.T, I))
    ns = null_space(Lsup)
    rho = ns[:, 0].reshape(d, d, order="F")
    rho = rho / np.trace(rho)
    n_op = ap.conj().T @ ap + am.conj().T @ am
    print(f"driven N_ss levels={L} nbar={nbar} dephase={dephase}: {np.trace(n_op @ rho).real:.15f}")


if __name__ == "__main__":
    for bb in (0.05, 0.1, 0.2):
        print("overlap", bb, repr(np.array([np.exp(-2 * bb * bb) * eval_laguerre(N, 4 * bb * bb) for N in range(9)])))
    rabi_levels()
    for w0 in (0.05, 0.15, 3.0):
        fidelities(w0, 0.1)
    driven_nss(14, 1.0, True)
    driven_nss(14, 1.0, False)
    driven_nss(12, 2.0, True)
