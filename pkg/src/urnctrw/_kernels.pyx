# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled chain walkers; see ``_pykernels`` for the reference semantics."""

BACKEND = "cython"


cdef inline long long _binomial_from_mode(long long n, double p, long long m,
                                          double pm, double u) nogil:
    cdef double odds, up_p, dn_p
    cdef long long up_k, dn_k
    cdef bint moved
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    u = u - pm
    if u <= 0.0:
        return m
    odds = p / (1.0 - p)
    up_k = m
    up_p = pm
    dn_k = m
    dn_p = pm
    while True:
        moved = False
        if up_k < n:
            up_p = up_p * (<double>(n - up_k) / <double>(up_k + 1) * odds)
            up_k += 1
            u = u - up_p
            if u <= 0.0:
                return up_k
            moved = True
        if dn_k > 0:
            dn_p = dn_p * (<double>dn_k / <double>(n - dn_k + 1) / odds)
            dn_k -= 1
            u = u - dn_p
            if u <= 0.0:
                return dn_k
            moved = True
        if not moved:
            return m


def binomial_from_mode(long long n, double p, long long m, double pm, double u):
    return _binomial_from_mode(n, p, m, pm, u)


def bl_walk(long long state, const double[::1] uniforms, const double[::1] cum_up,
            const double[::1] cum_stay, long long[::1] out=None):
    cdef Py_ssize_t k, steps = uniforms.shape[0]
    cdef long long i = state
    cdef double u
    cdef bint record = out is not None
    if record:
        out[0] = i
    with nogil:
        for k in range(steps):
            u = uniforms[k]
            if u < cum_up[i]:
                i += 1
            elif u >= cum_stay[i]:
                i -= 1
            if record:
                out[k + 1] = i
    return i


def wf_walk(long long state, long long n, const double[::1] uniforms,
            const double[::1] prob, const long long[::1] mode,
            const double[::1] pmode, long long[::1] out=None):
    cdef Py_ssize_t k, steps = uniforms.shape[0]
    cdef long long i = state
    cdef bint record = out is not None
    if record:
        out[0] = i
    with nogil:
        for k in range(steps):
            i = _binomial_from_mode(n, prob[i], mode[i], pmode[i], uniforms[k])
            if record:
                out[k + 1] = i
    return i
