# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loop for the box+equality QP solver.

Operation-for-operation mirror of carboncast.qp._pure: the same IEEE-754
expressions are evaluated in the same order so both engines produce
bit-identical iterates.  Keep the two files in sync.
"""

BACKEND = "compiled"

cdef double INF = float("inf")


def run(double[:, ::1] F, double[::1] lo, double[::1] up,
        double[::1] a, bint has_eq,
        double[::1] theta, double[::1] g,
        double rel_tol, long max_steps):
    """See carboncast.qp._pure.run for the contract."""
    cdef Py_ssize_t m = theta.shape[0]
    cdef long steps = 0
    cdef double viol = INF
    cdef Py_ssize_t k, i, j, i1
    cdef double gmax, gk, tk, v, best_single
    cdef double r, rmin, rmax, pair_viol, tau

    while steps < max_steps:
        gmax = 0.0
        best_single = 0.0
        i1 = -1
        rmin = INF
        rmax = -INF
        i = -1
        j = -1
        for k in range(m):
            gk = g[k]
            tk = theta[k]
            if gk < 0.0:
                if -gk > gmax:
                    gmax = -gk
            else:
                if gk > gmax:
                    gmax = gk
            if has_eq and a[k] != 0.0:
                r = gk / a[k]
                if a[k] > 0.0:
                    if tk < up[k] and r < rmin:
                        rmin = r
                        i = k
                    if tk > lo[k] and r > rmax:
                        rmax = r
                        j = k
                else:
                    if tk > lo[k] and r < rmin:
                        rmin = r
                        i = k
                    if tk < up[k] and r > rmax:
                        rmax = r
                        j = k
            else:
                if gk > 0.0 and tk > lo[k]:
                    v = gk
                elif gk < 0.0 and tk < up[k]:
                    v = -gk
                else:
                    v = 0.0
                if v > best_single:
                    best_single = v
                    i1 = k
        pair_viol = -INF
        if i >= 0 and j >= 0:
            pair_viol = rmax - rmin

        viol = best_single if best_single > pair_viol else pair_viol
        tau = gmax if gmax > 1.0 else 1.0
        if viol <= rel_tol * tau:
            return steps, viol, True

        if pair_viol >= best_single:
            _pair_step(F, lo, up, a, theta, g, i, j, pair_viol, m)
        else:
            _single_step(F, lo, up, theta, g, i1, m)
        steps += 1

    return steps, viol, False


cdef void _pair_step(double[:, ::1] F, double[::1] lo, double[::1] up,
                     double[::1] a, double[::1] theta, double[::1] g,
                     Py_ssize_t i, Py_ssize_t j, double pair_viol,
                     Py_ssize_t m) noexcept:
    cdef double ai = a[i]
    cdef double aj = a[j]
    cdef double ti = theta[i]
    cdef double tj = theta[j]
    cdef double kappa = F[i, i] / (ai * ai) + F[j, j] / (aj * aj) \
        - 2.0 * F[i, j] / (ai * aj)
    cdef double t_unc = pair_viol / kappa if kappa > 0.0 else INF
    cdef double t_i_max, t_j_max, bound_i, bound_j, t, new_i, new_j, di, dj
    cdef Py_ssize_t k

    if ai > 0.0:
        t_i_max = (up[i] - ti) * ai
        bound_i = up[i]
    else:
        t_i_max = (lo[i] - ti) * ai
        bound_i = lo[i]
    if aj > 0.0:
        t_j_max = (tj - lo[j]) * aj
        bound_j = lo[j]
    else:
        t_j_max = (tj - up[j]) * aj
        bound_j = up[j]
    t = t_unc
    if t_i_max < t:
        t = t_i_max
    if t_j_max < t:
        t = t_j_max

    if t <= 0.0:
        new_i = bound_i if t_i_max <= 0.0 else ti
        new_j = bound_j if t_j_max <= 0.0 else tj
    else:
        new_i = bound_i if t == t_i_max else ti + t / ai
        new_j = bound_j if t == t_j_max else tj - t / aj
        new_i = _clip(new_i, lo[i], up[i])
        new_j = _clip(new_j, lo[j], up[j])

    di = new_i - ti
    dj = new_j - tj
    for k in range(m):
        g[k] = g[k] + F[i, k] * di
        g[k] = g[k] + F[j, k] * dj
    theta[i] = new_i
    theta[j] = new_j


cdef void _single_step(double[:, ::1] F, double[::1] lo, double[::1] up,
                       double[::1] theta, double[::1] g,
                       Py_ssize_t i, Py_ssize_t m) noexcept:
    cdef double ti = theta[i]
    cdef double gi = g[i]
    cdef double fii = F[i, i]
    cdef double nv, d
    cdef Py_ssize_t k
    if fii > 0.0:
        nv = ti - gi / fii
    else:
        nv = lo[i] if gi > 0.0 else up[i]
    nv = _clip(nv, lo[i], up[i])
    d = nv - ti
    for k in range(m):
        g[k] = g[k] + F[i, k] * d
    theta[i] = nv


cdef inline double _clip(double x, double l, double u) noexcept:
    # mirrors Python's min(max(x, l), u)
    cdef double y = x if x > l else l
    return y if y < u else u
