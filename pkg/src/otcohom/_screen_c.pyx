# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled subset-screen kernel.

Mirror of ``_screen_py.py``: identical operation order on IEEE doubles, so
both lanes return the same mask list bit-for-bit. Keep the two files in sync.
C rint() and Python round() both round half to even under the default FP mode.
"""

from libc.math cimport fabs, rint
from libc.stdlib cimport free, malloc, realloc

cdef double TWO_PI = 6.283185307179586


def screen_range(int n, int r, double tol,
                 double[::1] mag_mid, double[::1] mag_rad,
                 double[::1] arg_mid, double[::1] arg_rad,
                 double[::1] mag_shift_mid, double[::1] mag_shift_rad,
                 double[::1] arg_shift_mid, double[::1] arg_shift_rad,
                 unsigned long long lo, unsigned long long hi):
    """Return masks in [lo, hi) passing the interval screen for all generators.

    The four data arrays are row-major length r*n doubles: entry j*n + i
    belongs to generator j, embedding i. The four shift arrays hold one
    double per generator.
    """
    cdef unsigned long long mask
    cdef Py_ssize_t cap = 1024, used = 0, idx
    cdef unsigned long long* buf = <unsigned long long*> malloc(cap * sizeof(unsigned long long))
    cdef unsigned long long* grown
    cdef int i, j, cnt, cm, ca
    cdef Py_ssize_t base
    cdef double sm, se, sa, sae, sabs_m, sabs_a, v, w, k, d, slack_m, slack_a
    cdef bint ok
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for mask in range(lo, hi):
                ok = True
                for j in range(r):
                    base = (<Py_ssize_t> j) * n
                    sm = mag_shift_mid[j]
                    se = mag_shift_rad[j]
                    sabs_m = fabs(sm)
                    sa = arg_shift_mid[j]
                    sae = arg_shift_rad[j]
                    sabs_a = fabs(sa)
                    cm = 1 if (sm != 0.0 or se != 0.0) else 0
                    ca = 1 if (sa != 0.0 or sae != 0.0) else 0
                    cnt = 0
                    for i in range(n):
                        if (mask >> i) & 1:
                            v = mag_mid[base + i]
                            sm += v
                            se += mag_rad[base + i]
                            sabs_m += fabs(v)
                            w = arg_mid[base + i]
                            sa += w
                            sae += arg_rad[base + i]
                            sabs_a += fabs(w)
                            cnt += 1
                    slack_m = 1.1e-16 * (cnt + cm) * sabs_m
                    if fabs(sm) > se + slack_m + tol:
                        ok = False
                        break
                    k = rint(sa / TWO_PI)
                    d = fabs(sa - k * TWO_PI)
                    slack_a = 1.1e-16 * (cnt + ca) * sabs_a + 1e-13
                    if d > sae + slack_a + tol:
                        ok = False
                        break
                if ok:
                    if used == cap:
                        cap *= 2
                        grown = <unsigned long long*> realloc(buf, cap * sizeof(unsigned long long))
                        if grown == NULL:
                            with gil:
                                raise MemoryError()
                        buf = grown
                    buf[used] = mask
                    used += 1
        return [buf[idx] for idx in range(used)]
    finally:
        free(buf)
