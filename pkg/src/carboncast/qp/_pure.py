"""Pure-Python inner loop for the box+equality QP solver.

This mirrors the compiled engine in carboncast.qp._core operation for
operation: the same expressions are evaluated in the same order, so both
engines produce bit-identical iterates.  Keep the two files in sync.
"""

import numpy as np

BACKEND = "pure"

_INF = float("inf")


def run(F, lo, up, a, has_eq, theta, g, rel_tol, max_steps):
    """Iterate maximal-violating-pair / single-coordinate steps in place.

    theta and g (the running gradient F @ theta + f) are updated in place.
    Returns (steps_used, last_violation, reached_tol).  The stopping
    threshold is rel_tol * max(1, ||g||_inf), re-evaluated every step.
    Ties in the working-set selection break toward the lowest index.
    """
    m = theta.shape[0]
    if has_eq:
        coupled = a != 0.0
        free = ~coupled
        safe_a = np.where(coupled, a, 1.0)
        a_pos = a > 0.0
    else:
        coupled = np.zeros(m, dtype=bool)
        free = np.ones(m, dtype=bool)
        safe_a = None
        a_pos = None

    steps = 0
    viol = _INF
    while steps < max_steps:
        gmax = float(np.max(np.abs(g)))

        # Single-coordinate violations (coordinates outside the equality).
        dn_ok = free & (g > 0.0) & (theta > lo)
        up_ok = free & (g < 0.0) & (theta < up)
        v_single = np.where(dn_ok, g, np.where(up_ok, -g, 0.0))
        i1 = int(np.argmax(v_single)) if m else -1
        best_single = float(v_single[i1]) if i1 >= 0 else 0.0

        # Maximal violating pair among equality-coupled coordinates.
        pair_viol = -_INF
        i = j = -1
        if has_eq:
            r = g / safe_a
            can_up = coupled & np.where(a_pos, theta < up, theta > lo)
            can_dn = coupled & np.where(a_pos, theta > lo, theta < up)
            if bool(np.any(can_up)):
                r_up = np.where(can_up, r, _INF)
                i = int(np.argmin(r_up))
            if bool(np.any(can_dn)):
                r_dn = np.where(can_dn, r, -_INF)
                j = int(np.argmax(r_dn))
            if i >= 0 and j >= 0:
                pair_viol = float(r[j]) - float(r[i])

        viol = best_single if best_single > pair_viol else pair_viol
        if viol <= rel_tol * (gmax if gmax > 1.0 else 1.0):
            return steps, viol, True

        if pair_viol >= best_single:
            _pair_step(F, lo, up, a, theta, g, i, j, pair_viol)
        else:
            _single_step(F, lo, up, theta, g, i1)
        steps += 1

    return steps, viol, False


def _pair_step(F, lo, up, a, theta, g, i, j, pair_viol):
    ai = float(a[i])
    aj = float(a[j])
    ti = float(theta[i])
    tj = float(theta[j])
    # Exchange direction: a_i*theta_i grows by t, a_j*theta_j shrinks by t.
    kappa = float(F[i, i]) / (ai * ai) + float(F[j, j]) / (aj * aj) \
        - 2.0 * float(F[i, j]) / (ai * aj)
    t_unc = pair_viol / kappa if kappa > 0.0 else _INF
    if ai > 0.0:
        t_i_max = (float(up[i]) - ti) * ai
        bound_i = float(up[i])
    else:
        t_i_max = (float(lo[i]) - ti) * ai
        bound_i = float(lo[i])
    if aj > 0.0:
        t_j_max = (tj - float(lo[j])) * aj
        bound_j = float(lo[j])
    else:
        t_j_max = (tj - float(up[j])) * aj
        bound_j = float(up[j])
    t = t_unc
    if t_i_max < t:
        t = t_i_max
    if t_j_max < t:
        t = t_j_max

    if t <= 0.0:
        # Denormal-sized room: saturate the blocking coordinate exactly.
        if t_i_max <= 0.0:
            new_i = bound_i
        else:
            new_i = ti
        if t_j_max <= 0.0:
            new_j = bound_j
        else:
            new_j = tj
    else:
        new_i = bound_i if t == t_i_max else ti + t / ai
        new_j = bound_j if t == t_j_max else tj - t / aj
        new_i = min(max(new_i, float(lo[i])), float(up[i]))
        new_j = min(max(new_j, float(lo[j])), float(up[j]))

    di = new_i - ti
    dj = new_j - tj
    g += F[i, :] * di
    g += F[j, :] * dj
    theta[i] = new_i
    theta[j] = new_j


def _single_step(F, lo, up, theta, g, i):
    ti = float(theta[i])
    gi = float(g[i])
    fii = float(F[i, i])
    if fii > 0.0:
        new = ti - gi / fii
    else:
        new = float(lo[i]) if gi > 0.0 else float(up[i])
    new = min(max(new, float(lo[i])), float(up[i]))
    d = new - ti
    g += F[i, :] * d
    theta[i] = new
