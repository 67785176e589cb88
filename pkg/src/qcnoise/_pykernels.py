"""Pure-Python (numpy) versions of the hot kernels.

Signatures mirror ``_ckernels``.  Ring elements are uint64 words, so every
kernel here requires n <= 63.  Supports of the fixed polynomials are passed
flattened: ``supp[offsets[i]:offsets[i+1]]`` is the support of t_i.
"""

import numpy as np

NAME = "python"

_CHUNK = 1 << 20


def _rotl(x, k, n, mask):
    if k == 0:
        return x
    return ((x << np.uint64(k)) | (x >> np.uint64(n - k))) & mask


def _cmul(x, supp, n, mask):
    acc = np.zeros_like(x)
    for j in supp:
        acc ^= _rotl(x, int(j), n, mask)
    return acc


def fwht(a):
    """In-place unnormalised Walsh-Hadamard transform over (F2^n, xor)."""
    size = a.shape[0]
    h = 1
    while h < size:
        v = a.reshape(-1, 2, h)
        lo = v[:, 0, :].copy()
        hi = v[:, 1, :].copy()
        v[:, 0, :] = lo + hi
        v[:, 1, :] = lo - hi
        h *= 2
    return a


def pushforward(n, inv_supp, pmf_w):
    """probs[x] = pmf_w[|t^-1 x|] for every x in P_n."""
    mask = np.uint64((1 << n) - 1)
    x = np.arange(1 << n, dtype=np.uint64)
    u = _cmul(x, inv_supp, n, mask)
    return pmf_w[np.bitwise_count(u)]


def enumerate_image(n, supp, pmf_w):
    """Law of t*R by summing Pr[R = r] into cell t*r for all 2^n r."""
    mask = np.uint64((1 << n) - 1)
    r = np.arange(1 << n, dtype=np.uint64)
    x = _cmul(r, supp, n, mask)
    return np.bincount(x.astype(np.int64), weights=pmf_w[np.bitwise_count(r)], minlength=1 << n)


def enumerate_sum(n, supp, offsets, pmf_w):
    """Law of sum_i t_i R_i by direct enumeration of all 2^(s n) inputs."""
    s = len(offsets) - 1
    size = 1 << n
    mask = np.uint64(size - 1)
    total = 1 << (s * n)
    probs = np.zeros(size)
    for start in range(0, total, _CHUNK):
        r = np.arange(start, min(start + _CHUNK, total), dtype=np.uint64)
        x = np.zeros_like(r)
        for i in range(s):
            block = (r >> np.uint64(i * n)) & mask
            x ^= _cmul(block, supp[offsets[i]:offsets[i + 1]], n, mask)
        probs += np.bincount(x.astype(np.int64), weights=pmf_w[np.bitwise_count(r)], minlength=size)
    return probs


def noise_bits(R, supp, offsets):
    """Coefficients of sum_i t_i R_i for a batch.

    R has shape (s, batch, n) with 0/1 entries; returns (batch, n) uint8.
    """
    s, batch, n = R.shape
    out = np.zeros((batch, n), dtype=np.uint8)
    for i in range(s):
        for j in supp[offsets[i]:offsets[i + 1]]:
            out ^= np.roll(R[i], int(j), axis=1)
    return out
