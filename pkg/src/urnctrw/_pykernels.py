"""Pure-Python chain walkers.

Reference implementations of the loops in ``_kernels.pyx``. Both consume the
same pre-drawn uniforms and per-state tables and perform the same floating
point operations in the same order, so the two backends return identical
states.
"""

BACKEND = "python"


def bl_walk(state, uniforms, cum_up, cum_stay, out=None):
    """Run a Bernoulli-Laplace chain for ``len(uniforms)`` steps.

    Step ``k`` moves up if ``u_k < cum_up[i]``, stays if ``u_k < cum_stay[i]``
    and moves down otherwise. When ``out`` is given, ``out[k]`` receives the
    state after ``k`` steps (``out[0]`` is the start).
    """
    i = int(state)
    cu = cum_up.tolist() if hasattr(cum_up, "tolist") else list(cum_up)
    cs = cum_stay.tolist() if hasattr(cum_stay, "tolist") else list(cum_stay)
    us = uniforms.tolist() if hasattr(uniforms, "tolist") else list(uniforms)
    if out is not None:
        out[0] = i
    for k, u in enumerate(us):
        if u < cu[i]:
            i += 1
        elif u >= cs[i]:
            i -= 1
        if out is not None:
            out[k + 1] = i
    return i


def binomial_from_mode(n, p, m, pm, u):
    """Binomial(n, p) variate by inversion over the order m, m+1, m-1, m+2, ...

    ``m`` is the mode and ``pm`` its probability. Expected cost is of the
    order of the standard deviation.
    """
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
            up_p = up_p * ((n - up_k) / (up_k + 1) * odds)
            up_k += 1
            u = u - up_p
            if u <= 0.0:
                return up_k
            moved = True
        if dn_k > 0:
            dn_p = dn_p * (dn_k / (n - dn_k + 1) / odds)
            dn_k -= 1
            u = u - dn_p
            if u <= 0.0:
                return dn_k
            moved = True
        if not moved:
            # rounding left a residue after the whole support was consumed
            return m


def wf_walk(state, n, uniforms, prob, mode, pmode, out=None):
    """Run a Wright-Fisher chain; one uniform per binomial draw."""
    i = int(state)
    n = int(n)
    ps = prob.tolist() if hasattr(prob, "tolist") else list(prob)
    ms = mode.tolist() if hasattr(mode, "tolist") else list(mode)
    pms = pmode.tolist() if hasattr(pmode, "tolist") else list(pmode)
    us = uniforms.tolist() if hasattr(uniforms, "tolist") else list(uniforms)
    if out is not None:
        out[0] = i
    for k, u in enumerate(us):
        i = binomial_from_mode(n, ps[i], ms[i], pms[i], u)
        if out is not None:
            out[k + 1] = i
    return i
