# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled evaluation of the teleportation objective on points and grids.

Each branch is handled through H = M M^dagger of its 2x2 amplitude matrix:
the branch probability is tr H and sqrt(P) = sqrt((h00 - h11)^2 + 4|h01|^2).
The success weight p - sqrt(P) is formed as 4|det M|^2 / (p + sqrt(P)).
"""
from libc.math cimport sin, cos, sqrt

BACKEND = "cython"


cdef inline double _clip(double x, double lo, double hi) noexcept nogil:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


cdef class Evaluator:
    cdef double a0, a1c, a1s, a2sq, a34sq, a3, a4, a2a4, a2a3

    def __init__(self, double a0, double a1, double a2, double a3, double a4, double mu):
        self.a0 = a0
        self.a1c = a1 * cos(mu)
        self.a1s = a1 * sin(mu)
        self.a2sq = a2 * a2
        self.a34sq = a3 * a3 + a4 * a4
        self.a3 = a3
        self.a4 = a4
        self.a2a4 = a2 * a4
        self.a2a3 = a2 * a3

    cdef inline void _branch(self, double k, double g, double cph, double sph,
                             double* r, double* w) noexcept nogil:
        cdef double mre = self.a0 * k * cph + self.a1c * g
        cdef double mim = self.a0 * k * sph + self.a1s * g
        cdef double gg = g * g
        cdef double h00 = mre * mre + mim * mim + self.a2sq * gg
        cdef double h11 = self.a34sq * gg
        cdef double hre = self.a3 * g * mre + self.a2a4 * gg
        cdef double him = self.a3 * g * mim
        cdef double d = h00 - h11
        cdef double p = h00 + h11
        # det M = m00 a4 g - a2 a3 g^2; the success weight p - sqrt(P) is 4|det M|^2 / (p + sqrt(P))
        cdef double dre = mre * self.a4 * g - self.a2a3 * gg
        cdef double dim = mim * self.a4 * g
        r[0] = _clip(sqrt(d * d + 4.0 * (hre * hre + him * him)), 0.0, p)
        w[0] = 4.0 * (dre * dre + dim * dim) / (p + r[0]) if p > 0.0 else 0.0

    cdef inline void _eval(self, double ch, double sh, double cph, double sph,
                           double* f, double* succ) noexcept nogil:
        cdef double r1, w1, r2, w2
        self._branch(ch, sh, cph, sph, &r1, &w1)
        self._branch(-sh, ch, cph, sph, &r2, &w2)
        f[0] = _clip(r1 + r2, 0.0, 1.0)
        succ[0] = _clip(w1 + w2, 0.0, 1.0)

    cpdef double success(self, double theta, double phi):
        cdef double f, s
        self._eval(cos(0.5 * theta), sin(0.5 * theta), cos(phi), sin(phi), &f, &s)
        return s

    cpdef double objective(self, double theta, double phi):
        cdef double f, s
        self._eval(cos(0.5 * theta), sin(0.5 * theta), cos(phi), sin(phi), &f, &s)
        return f

    def fill_grid(self, const double[::1] thetas, const double[::1] phis,
                  double[:, ::1] out_f, double[:, ::1] out_s,
                  Py_ssize_t row_start, Py_ssize_t row_stop):
        cdef Py_ssize_t n_phi = phis.shape[0]
        cdef Py_ssize_t i, j
        cdef double ch, sh
        cdef double[::1] cph = _cos_all(phis)
        cdef double[::1] sph = _sin_all(phis)
        with nogil:
            for i in range(row_start, row_stop):
                ch = cos(0.5 * thetas[i])
                sh = sin(0.5 * thetas[i])
                for j in range(n_phi):
                    self._eval(ch, sh, cph[j], sph[j], &out_f[i, j], &out_s[i, j])


cdef double[::1] _cos_all(const double[::1] x):
    import numpy as np
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t k
    for k in range(x.shape[0]):
        o[k] = cos(x[k])
    return o


cdef double[::1] _sin_all(const double[::1] x):
    import numpy as np
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t k
    for k in range(x.shape[0]):
        o[k] = sin(x[k])
    return o


def local_maxima(const double[:, ::1] succ):
    """Mask of cells no smaller than any of their eight neighbours.

    The last phi column duplicates the first and is dropped; phi wraps around
    and cells past theta = 0 or pi count as absent.
    """
    import numpy as np
    cdef Py_ssize_t nt = succ.shape[0], npf = succ.shape[1] - 1
    out = np.zeros((nt, npf), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    cdef Py_ssize_t i, j, di, dj, ii, jj
    cdef double v
    cdef bint keep
    with nogil:
        for i in range(nt):
            for j in range(npf):
                v = succ[i, j]
                keep = True
                for di in range(-1, 2):
                    ii = i + di
                    if ii < 0 or ii >= nt:
                        continue
                    for dj in range(-1, 2):
                        if di == 0 and dj == 0:
                            continue
                        jj = j + dj
                        if jj < 0:
                            jj = npf - 1
                        elif jj >= npf:
                            jj = 0
                        if succ[ii, jj] > v:
                            keep = False
                            break
                    if not keep:
                        break
                o[i, j] = keep
    return out.view(bool)
