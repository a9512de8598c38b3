# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_pykernels``.

Complex amplitudes are carried as (re, im) pairs of doubles.  Shots are
processed in fixed-size blocks with branch-free inner loops so the C
compiler can vectorise the transcendental calls.  Random draws use the same
counter layout as ``rng.uniform`` / ``rng.box_muller``; floating-point
results agree with the numpy fallback to rounding.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, sqrt, log, exp, fmax, fmin, M_PI, M_PI_2
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef enum:
    BLOCK = 64

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t M2 = 0x94D049BB133111EBULL
cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline double _cos(double x) noexcept nogil:
    # sin and cos of one argument get fused into a scalar-only sincos call;
    # a shifted sin keeps both on the vectorised path
    return sin(x + M_PI_2)


cdef inline double _uniform(uint64_t key, uint64_t counter) noexcept nogil:
    cdef uint64_t z = key + (counter + 1) * GOLDEN
    z = (z ^ (z >> 30)) * M1
    z = (z ^ (z >> 27)) * M2
    z = z ^ (z >> 31)
    return <double>(z >> 11) * INV53


def fidelities(const double[:, ::1] y, const double[:, ::1] z, const cnp.complex128_t[:, ::1] labels):
    cdef Py_ssize_t N = y.shape[0], L = y.shape[1], k = labels.shape[0]
    out_arr = np.empty((N, k), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double ar[BLOCK]
    cdef double ai[BLOCK]
    cdef double br[BLOCK]
    cdef double bi[BLOCK]
    cdef double hy[BLOCK]
    cdef double hz[BLOCK]
    cdef Py_ssize_t blk, i0, b, nb, j, c
    cdef double co, si, nar, nai, nbr, nbi, ch, sh, lr0, li0, lr1, li1, re, im
    with nogil:
        for blk in range((N + BLOCK - 1) // BLOCK):
            i0 = blk * BLOCK
            nb = min(<Py_ssize_t>BLOCK, N - i0)
            for b in range(BLOCK):
                ar[b] = 1.0
                ai[b] = 0.0
                br[b] = 0.0
                bi[b] = 0.0
                hy[b] = 0.0
                hz[b] = 0.0
            for j in range(L):
                for b in range(nb):
                    hy[b] = 0.5 * y[i0 + b, j]
                    hz[b] = 0.5 * z[i0 + b, j]
                # full-width loop so the trip count is a constant
                for b in range(BLOCK):
                    co = _cos(hy[b])
                    si = sin(hy[b])
                    nar = co * ar[b] - si * br[b]
                    nai = co * ai[b] - si * bi[b]
                    nbr = si * ar[b] + co * br[b]
                    nbi = si * ai[b] + co * bi[b]
                    ch = _cos(hz[b])
                    sh = sin(hz[b])
                    # a *= e^{-iz/2}, b *= e^{iz/2}
                    ar[b] = nar * ch + nai * sh
                    ai[b] = nai * ch - nar * sh
                    br[b] = nbr * ch - nbi * sh
                    bi[b] = nbi * ch + nbr * sh
            for c in range(k):
                lr0 = labels[c, 0].real
                li0 = labels[c, 0].imag
                lr1 = labels[c, 1].real
                li1 = labels[c, 1].imag
                for b in range(nb):
                    # conj(l0) a + conj(l1) b
                    re = lr0 * ar[b] + li0 * ai[b] + lr1 * br[b] + li1 * bi[b]
                    im = lr0 * ai[b] - li0 * ar[b] + lr1 * bi[b] - li1 * br[b]
                    out[i0 + b, c] = fmin(re * re + im * im, 1.0)
    return out_arr


def noisy_counts(const double[:, ::1] gamma, const double[:, ::1] t_op, const cnp.uint64_t[::1] keys, long shots,
                 double omega0, double detuning_sigma, double intensity_sigma, double phase_sigma,
                 double timing_sigma, double collision_p, double delta_offset, double gamma_offset,
                 double t2):
    cdef Py_ssize_t M = gamma.shape[0], P = gamma.shape[1]
    cdef uint64_t stride = 4 + 2 * P
    zeros_arr = np.zeros(M, dtype=np.int64)
    coll_arr = np.zeros(M, dtype=np.int64)
    cdef int64_t[::1] zeros = zeros_arr
    cdef int64_t[::1] colls = coll_arr
    cdef Py_ssize_t m, j, b, nb
    cdef long s0
    cdef uint64_t key
    cdef uint64_t base[BLOCK]
    cdef double det[BLOCK]
    cdef double omega[BLOCK]
    cdef double ttot[BLOCK]
    cdef double ar[BLOCK]
    cdef double ai[BLOCK]
    cdef double br[BLOCK]
    cdef double bi[BLOCK]
    cdef double r, th, eps, tau, phj, t, d_eff, g_eff, co, si, eg_r, eg_i
    cdef double nar, nai, nbr, nbi, m01r, m01i, rho00, rho11, r01r, r01i, damp, p0, g, tj
    cdef int64_t nz, nc, hit
    with nogil:
        for m in range(M):
            key = keys[m]
            nz = 0
            nc = 0
            s0 = 0
            while s0 < shots:
                nb = BLOCK
                if shots - s0 < nb:
                    nb = shots - s0
                for b in range(nb):
                    base[b] = <uint64_t>(s0 + b) * stride
                    r = sqrt(-2.0 * log(1.0 - _uniform(key, base[b] + 1)))
                    th = 2.0 * M_PI * _uniform(key, base[b] + 2)
                    det[b] = detuning_sigma * (r * _cos(th))
                    eps = intensity_sigma * (r * sin(th))
                    omega[b] = sqrt((omega0 * (1.0 + eps)) * (omega0 * (1.0 + eps)) + det[b] * det[b])
                    ar[b] = 1.0
                    ai[b] = 0.0
                    br[b] = 0.0
                    bi[b] = 0.0
                    ttot[b] = 0.0
                for j in range(P - 1):
                    g = gamma[m, j] + gamma_offset
                    tj = t_op[m, j]
                    for b in range(nb):
                        r = sqrt(-2.0 * log(1.0 - _uniform(key, base[b] + 3 + 2 * j)))
                        th = 2.0 * M_PI * _uniform(key, base[b] + 4 + 2 * j)
                        tau = r * _cos(th)
                        phj = r * sin(th)
                        t = fmax(tj + timing_sigma * tau, 0.0)
                        ttot[b] = ttot[b] + t
                        d_eff = omega[b] * t + delta_offset
                        g_eff = g + det[b] * t + phase_sigma * phj
                        co = _cos(0.5 * d_eff)
                        si = sin(0.5 * d_eff)
                        eg_r = _cos(g_eff)
                        eg_i = sin(g_eff)
                        # a2 = c a - i s e^{-ig} b ; b2 = -i s e^{ig} a + c b
                        nar = co * ar[b] + si * (-eg_i * br[b] + eg_r * bi[b])
                        nai = co * ai[b] + si * (-eg_i * bi[b] - eg_r * br[b])
                        nbr = co * br[b] + si * (eg_i * ar[b] + eg_r * ai[b])
                        nbi = co * bi[b] + si * (eg_i * ai[b] - eg_r * ar[b])
                        ar[b] = nar
                        ai[b] = nai
                        br[b] = nbr
                        bi[b] = nbi
                # final pulse follows the dephasing of the output state
                j = P - 1
                g = gamma[m, j] + gamma_offset
                tj = t_op[m, j]
                for b in range(nb):
                    r = sqrt(-2.0 * log(1.0 - _uniform(key, base[b] + 3 + 2 * j)))
                    th = 2.0 * M_PI * _uniform(key, base[b] + 4 + 2 * j)
                    tau = r * _cos(th)
                    phj = r * sin(th)
                    t = fmax(tj + timing_sigma * tau, 0.0)
                    damp = exp(-(ttot[b] + t) / t2)
                    d_eff = omega[b] * t + delta_offset
                    g_eff = g + det[b] * t + phase_sigma * phj
                    co = _cos(0.5 * d_eff)
                    si = sin(0.5 * d_eff)
                    eg_r = _cos(g_eff)
                    eg_i = sin(g_eff)
                    m01r = -si * eg_i
                    m01i = -si * eg_r
                    rho00 = ar[b] * ar[b] + ai[b] * ai[b]
                    rho11 = br[b] * br[b] + bi[b] * bi[b]
                    r01r = damp * (ar[b] * br[b] + ai[b] * bi[b])
                    r01i = damp * (ai[b] * br[b] - ar[b] * bi[b])
                    p0 = co * co * rho00 + (m01r * m01r + m01i * m01i) * rho11 + 2.0 * co * (r01r * m01r + r01i * m01i)
                    p0 = fmin(fmax(p0, 0.0), 1.0)
                    hit = _uniform(key, base[b]) < collision_p
                    nc += hit
                    nz += hit | (_uniform(key, base[b] + stride - 1) < p0)
                s0 += nb
            zeros[m] = nz
            colls[m] = nc
    return zeros_arr, coll_arr
