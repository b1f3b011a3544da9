"""Counter-based normal variates for reproducible parallel path sampling.

Every Brownian path owns an independent stream addressed by ``(seed, path_id)``.
Raw bits come from Philox4x32-10 (Salmon et al., SC'11) keyed by the 64-bit seed;
the 128-bit counter holds the draw index and the path id.  Normals are produced
by the Marsaglia-Tsang ziggurat, with the layer index and the signed magnitude
taken from two different 32-bit words.

Because a stream depends only on its address, the variates drawn for path ``i``
are identical no matter how paths are split across chunks or threads.
"""

import math

import numba as nb
import numpy as np

__all__ = ["philox4x32", "normals", "uniforms", "split_seed"]

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint32(0x9E3779B9)
_W1 = np.uint32(0xBB67AE85)
_LO = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_TWO_M32 = 2.3283064365386963e-10

# Stream tags occupy the top 16 bits of the last counter word.
TAG_BROWNIAN = 0
TAG_AUX = 1


def _zig_tables():
    m1 = 2147483648.0
    dn = 3.442619855899
    tn = dn
    vn = 9.91256303526217e-3
    kn = np.zeros(128)
    wn = np.zeros(128)
    fn = np.zeros(128)
    q = vn / math.exp(-0.5 * dn * dn)
    kn[0] = (dn / q) * m1
    kn[1] = 0.0
    wn[0] = q / m1
    wn[127] = dn / m1
    fn[0] = 1.0
    fn[127] = math.exp(-0.5 * dn * dn)
    for i in range(126, 0, -1):
        dn = math.sqrt(-2.0 * math.log(vn / dn + math.exp(-0.5 * dn * dn)))
        kn[i + 1] = (dn / tn) * m1
        tn = dn
        fn[i] = math.exp(-0.5 * dn * dn)
        wn[i] = dn / m1
    return kn, wn, fn


_KN, _WN, _FN = _zig_tables()
_ZIG_R = 3.442620


def split_seed(seed):
    """Return the two 32-bit Philox key words of a 64-bit seed."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return np.uint32(seed & 0xFFFFFFFF), np.uint32(seed >> 32)


@nb.njit(inline="always", cache=True)
def philox4x32(c0, c1, c2, c3, k0, k1):
    for _ in range(10):
        p0 = np.uint64(c0) * _M0
        p1 = np.uint64(c2) * _M1
        hi0 = np.uint32(p0 >> _S32)
        lo0 = np.uint32(p0 & _LO)
        hi1 = np.uint32(p1 >> _S32)
        lo1 = np.uint32(p1 & _LO)
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
        k0 = np.uint32(k0 + _W0)
        k1 = np.uint32(k1 + _W1)
    return c0, c1, c2, c3


@nb.njit(inline="always", cache=True)
def new_stream(path_id, tag):
    """Stream state: [draw counter, buffer position, id lo, id hi|tag, w0..w3]."""
    st = np.zeros(8, dtype=np.uint64)
    pid = np.uint64(path_id)
    st[1] = np.uint64(4)
    st[2] = pid & _LO
    st[3] = ((pid >> _S32) & np.uint64(0xFFFF)) | (np.uint64(tag) << np.uint64(16))
    return st


@nb.njit(inline="always", cache=True)
def next_word(st, k0, k1):
    if st[1] >= np.uint64(4):
        ctr = st[0]
        r0, r1, r2, r3 = philox4x32(
            np.uint32(ctr & _LO), np.uint32(ctr >> _S32),
            np.uint32(st[2]), np.uint32(st[3]), k0, k1,
        )
        st[4] = np.uint64(r0)
        st[5] = np.uint64(r1)
        st[6] = np.uint64(r2)
        st[7] = np.uint64(r3)
        st[0] = ctr + np.uint64(1)
        st[1] = np.uint64(0)
    w = st[4 + st[1]]
    st[1] += np.uint64(1)
    return w


@nb.njit(inline="always", cache=True)
def next_uniform(st, k0, k1):
    """Uniform on the open interval (0, 1)."""
    return (np.float64(next_word(st, k0, k1)) + 0.5) * _TWO_M32


@nb.njit(cache=True)
def _ziggurat_slow(hz, iz, st, k0, k1):
    while True:
        x = hz * _WN[iz]
        if iz == 0:
            while True:
                x = -math.log(next_uniform(st, k0, k1)) / _ZIG_R
                y = -math.log(next_uniform(st, k0, k1))
                if y + y >= x * x:
                    break
            return _ZIG_R + x if hz > 0 else -_ZIG_R - x
        if _FN[iz] + next_uniform(st, k0, k1) * (_FN[iz - 1] - _FN[iz]) < math.exp(-0.5 * x * x):
            return x
        hz = np.float64(np.int32(np.uint32(next_word(st, k0, k1))))
        iz = np.int64(next_word(st, k0, k1) & np.uint64(127))
        if abs(hz) < _KN[iz]:
            return hz * _WN[iz]


@nb.njit(inline="always", cache=True)
def fill_normals(st, k0, k1, out):
    """Fill ``out`` with consecutive standard normals from stream ``st``.

    Block filling keeps the ziggurat fast path in a tight loop; calling a
    per-draw function from a kernel is roughly three times slower.
    """
    for j in range(out.shape[0]):
        hz = np.float64(np.int32(np.uint32(next_word(st, k0, k1))))
        iz = np.int64(next_word(st, k0, k1) & np.uint64(127))
        if abs(hz) < _KN[iz]:
            out[j] = hz * _WN[iz]
        else:
            out[j] = _ziggurat_slow(hz, iz, st, k0, k1)


@nb.njit(parallel=True, cache=True)
def _fill_normals(path_ids, n_per_path, tag, k0, k1):
    out = np.empty((path_ids.shape[0], n_per_path))
    for p in nb.prange(path_ids.shape[0]):
        st = new_stream(path_ids[p], tag)
        fill_normals(st, k0, k1, out[p])
    return out


@nb.njit(parallel=True, cache=True)
def _fill_uniforms(path_ids, n_per_path, tag, k0, k1):
    out = np.empty((path_ids.shape[0], n_per_path))
    for p in nb.prange(path_ids.shape[0]):
        st = new_stream(path_ids[p], tag)
        for j in range(n_per_path):
            out[p, j] = next_uniform(st, k0, k1)
    return out


def normals(seed, path_ids, n_per_path, tag=TAG_AUX):
    """Standard normals, one row per stream address ``(seed, path_id)``."""
    k0, k1 = split_seed(seed)
    ids = np.ascontiguousarray(path_ids, dtype=np.uint64)
    return _fill_normals(ids, int(n_per_path), np.uint64(tag), k0, k1)


def uniforms(seed, path_ids, n_per_path, tag=TAG_AUX):
    k0, k1 = split_seed(seed)
    ids = np.ascontiguousarray(path_ids, dtype=np.uint64)
    return _fill_uniforms(ids, int(n_per_path), np.uint64(tag), k0, k1)
