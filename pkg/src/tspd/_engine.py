"""Jitted working-state machinery behind the local search.

The solution lives in flat arrays: the truck tour with a position index, the
delivery triples, per-node activity lookups, and per-objective caches (cost:
one cached contribution per delivery; time: effective-arrival prefixes plus
per-delivery penalties).  A move evaluation builds the
candidate into scratch arrays, validates structure centrally, then prices the
difference incrementally: cost mode composes the changed-arc window with the
re-priced affected deliveries; time mode resumes the timeline walk from the
earliest position the move can influence.  Applying a move copies scratch
back and rebuilds state and caches from scratch, so rounding never
accumulates across accepted moves.

Parameter vector P layout (float64):
  0 endurance, 1 launch_time, 2 retrieve_time, 3 truck_cost_rate,
  4 drone_cost_rate, 5 truck_wait_fee, 6 drone_wait_fee, 7 truck_speed,
  8 drone_speed, 9 omega, 10 truck_relaxed, 11 drone_relaxed,
  12 objective-is-cost, 13 wait-convention-as-written
"""

from __future__ import annotations

import numpy as np

from ._jit import njit

P_EPS = 0
P_SL = 1
P_SR = 2
P_C1 = 3
P_C2 = 4
P_ALPHA = 5
P_BETA = 6
P_TS = 7
P_DS = 8
P_OMEGA = 9
P_RELAXT = 10
P_RELAXD = 11
P_OBJCOST = 12
P_CONVW = 13
P_LEN = 14

K_N1 = 0
K_N2 = 1
K_N3 = 2
K_N4 = 3
K_N5 = 4
K_N6 = 5
K_N7 = 6
K_N8 = 7
K_N9 = 8
K_N10 = 9
K_N11 = 10
K_N12 = 11
K_N13 = 12
K_N14 = 13
K_N15 = 14
K_N16 = 15

ACCEPT_EPS = 1e-9


# ---------------------------------------------------------------------------
# state rebuild


@njit
def _rebuild(tour, pos, dla, dno, dre, la, ra, fly, SI, contrib, penu, effp, CF,
             tt, dt, td, dd, P):
    L = SI[0]
    nd = SI[1]
    n_nodes = pos.shape[0]
    for v in range(n_nodes):
        pos[v] = -1
        la[v] = -1
        ra[v] = -1
        fly[v] = -1
    for p in range(L):
        pos[tour[p]] = p
    # deliveries in launch-position order
    for q in range(1, nd):
        ka, kn, kr = dla[q], dno[q], dre[q]
        key = pos[ka]
        w = q - 1
        while w >= 0 and pos[dla[w]] > key:
            dla[w + 1] = dla[w]
            dno[w + 1] = dno[w]
            dre[w + 1] = dre[w]
            w -= 1
        dla[w + 1] = ka
        dno[w + 1] = kn
        dre[w + 1] = kr
    for q in range(nd):
        la[dla[q]] = q
        ra[dre[q]] = q
        fly[dno[q]] = q

    eps = P[P_EPS]
    s_l = P[P_SL]
    s_r = P[P_SR]
    omega = P[P_OMEGA]
    relax_t = P[P_RELAXT] != 0.0
    relax_d = P[P_RELAXD] != 0.0

    # timeline walk mirroring the reference evaluation
    t = 0.0
    span = 0.0
    active = -1
    dr_arr = 0.0
    feas = 1.0
    adm = 1.0
    pen_time = 0.0
    effp[0] = 0.0
    node = tour[0]
    if la[node] >= 0:
        q = la[node]
        depart = t + s_l
        dr_arr = depart + dt[dla[q]][dno[q]] + dt[dno[q]][dre[q]]
        span = 0.0
        active = q
        t = depart
    for p in range(1, L):
        prev = tour[p - 1]
        node = tour[p]
        step = tt[prev][node]
        t += step
        span += step
        if ra[node] >= 0:
            q = ra[node]
            joint = t if t > dr_arr else dr_arr
            joint += s_r
            seg_t = span
            recover = s_r + s_l if la[node] >= 0 else s_r
            tex = 0.0
            if dla[q] != 0:
                tex = seg_t + recover - eps
                if tex < 0.0:
                    tex = 0.0
            dex = dt[dla[q]][dno[q]] + dt[dno[q]][dre[q]] + s_r - eps
            if dex < 0.0:
                dex = 0.0
            if tex > 0.0:
                feas = 0.0
                if not relax_t:
                    adm = 0.0
            if dex > 0.0:
                feas = 0.0
                if not relax_d:
                    adm = 0.0
            penu[q] = tex if tex > dex else dex
            pen_time += penu[q]
            t = joint
            active = -1
        effp[p] = t
        if la[node] >= 0:
            q = la[node]
            depart = t + s_l
            dr_arr = depart + dt[dla[q]][dno[q]] + dt[dno[q]][dre[q]]
            span = 0.0
            active = q
            t = depart
    completion = effp[L - 1]

    # cost caches
    c1 = P[P_C1]
    arcs = 0.0
    for p in range(1, L):
        arcs += td[tour[p - 1]][tour[p]]
    csum = 0.0
    for q in range(nd):
        contrib[q] = _contrib_cost(tour, pos, la, dla[q], dno[q], dre[q], tt, dt, dd, P)
        csum += contrib[q]

    if P[P_OBJCOST] != 0.0:
        CF[0] = c1 * arcs + csum
    else:
        CF[0] = completion + omega * pen_time
    CF[1] = feas
    CF[2] = adm


@njit
def _contrib_cost(tour, pos, la, i, j, k, tt, dt, dd, P):
    # cost-mode share of one delivery: drone legs, waiting fee, penalties
    a = pos[i]
    r = pos[k]
    seg_t = 0.0
    for p in range(a, r):
        seg_t += tt[tour[p]][tour[p + 1]]
    flight = dt[i][j] + dt[j][k]
    wait_d = seg_t - flight
    if wait_d < 0.0:
        wait_d = 0.0
    wait_t = flight - seg_t
    if wait_t < 0.0:
        wait_t = 0.0
    if P[P_CONVW] != 0.0:
        fee = P[P_ALPHA] * wait_d + P[P_BETA] * wait_t
    else:
        fee = P[P_ALPHA] * wait_t + P[P_BETA] * wait_d
    recover = P[P_SR] + P[P_SL] if la[k] >= 0 else P[P_SR]
    tex = 0.0
    if i != 0:
        tex = seg_t + recover - P[P_EPS]
        if tex < 0.0:
            tex = 0.0
    dex = flight + P[P_SR] - P[P_EPS]
    if dex < 0.0:
        dex = 0.0
    pen = tex * P[P_TS] * P[P_C1] + dex * P[P_DS] * P[P_C2]
    return P[P_C2] * (dd[i][j] + dd[j][k]) + fee + P[P_OMEGA] * pen


@njit
def _excess_cost_mode(tour, pos, la, i, j, k, tt, dt, P):
    # (tex, dex) of one delivery in the candidate arrangement
    a = pos[i]
    r = pos[k]
    seg_t = 0.0
    for p in range(a, r):
        seg_t += tt[tour[p]][tour[p + 1]]
    flight = dt[i][j] + dt[j][k]
    recover = P[P_SR] + P[P_SL] if la[k] >= 0 else P[P_SR]
    tex = 0.0
    if i != 0:
        tex = seg_t + recover - P[P_EPS]
        if tex < 0.0:
            tex = 0.0
    dex = flight + P[P_SR] - P[P_EPS]
    if dex < 0.0:
        dex = 0.0
    return tex, dex


# ---------------------------------------------------------------------------
# scratch indexing and structural validation


@njit
def _copy_base(tour, SI, dla, dno, dre, stour, SS, sdla, sdno, sdre, ssrc):
    L = SI[0]
    nd = SI[1]
    for p in range(L):
        stour[p] = tour[p]
    SS[0] = L
    for q in range(nd):
        sdla[q] = dla[q]
        sdno[q] = dno[q]
        sdre[q] = dre[q]
        ssrc[q] = q
    SS[1] = nd


@njit
def _scratch_index(stour, SS, spos, sla, sra, sdla, sdno, sdre):
    n_nodes = spos.shape[0]
    for v in range(n_nodes):
        spos[v] = -1
        sla[v] = -1
        sra[v] = -1
    for p in range(SS[0]):
        spos[stour[p]] = p
    for q in range(SS[1]):
        sla[sdla[q]] = q
        sra[sdre[q]] = q


@njit
def _spans_ok(SS, spos, sdla, sdno, sdre, order):
    # central structural check: endpoints on tour in order, drone node off
    # tour, spans non-interleaving (boundary sharing = relaunch is fine)
    sL = SS[0]
    nd = SS[1]
    if sL < 3:
        return False
    for q in range(nd):
        a = spos[sdla[q]]
        r = spos[sdre[q]]
        if a < 0 or r < 0 or a >= r:
            return False
        if spos[sdno[q]] >= 0:
            return False
        order[q] = q
    for q in range(1, nd):
        w = q - 1
        key = order[q]
        ka = spos[sdla[key]]
        while w >= 0 and spos[sdla[order[w]]] > ka:
            order[w + 1] = order[w]
            w -= 1
        order[w + 1] = key
    for q in range(1, nd):
        if spos[sdla[order[q]]] < spos[sdre[order[q - 1]]]:
            return False
    return True


# ---------------------------------------------------------------------------
# move builders (write the candidate into scratch; return False when the
# arguments are structurally inapplicable)


@njit
def _b_relocate(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc,
                u, v, seg, rev):
    # relocate the seg-long run starting at u (seg in {1, 2}) after node v;
    # rev inserts the pair in reversed order
    L = SI[0]
    pu = pos[u]
    pv = pos[v]
    if pu < 1 or pv < 0 or pv >= L - 1 or u == v:
        return False
    if pu + seg - 1 >= L - 1:
        return False
    if la[u] >= 0 or ra[u] >= 0:
        return False
    if seg == 2:
        n2 = tour[pu + 1]
        if n2 == v or la[n2] >= 0 or ra[n2] >= 0:
            return False
    if pv >= pu and pv <= pu + seg - 1:
        return False
    if pv == pu - 1 and not rev:
        return False  # no-op
    _copy_base(tour, SI, dla, dno, dre, stour, SS, sdla, sdno, sdre, ssrc)
    w = 0
    for p in range(L):
        if pu <= p <= pu + seg - 1:
            continue
        stour[w] = tour[p]
        w += 1
        if tour[p] == v:
            if rev:
                for s in range(seg - 1, -1, -1):
                    stour[w] = tour[pu + s]
                    w += 1
            else:
                for s in range(seg):
                    stour[w] = tour[pu + s]
                    w += 1
    return True


@njit
def _b_swap_seg(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc,
                u, v, su, sv):
    # swap the su-long run at u with the sv-long run at v (lengths 1 or 2);
    # second members of 2-runs must be activity-free per the move definitions
    L = SI[0]
    pu = pos[u]
    pv = pos[v]
    if pu < 1 or pv < 1:
        return False
    if pu + su - 1 >= L - 1 or pv + sv - 1 >= L - 1:
        return False
    if pv <= pu + su - 1 and pu <= pv + sv - 1:
        return False  # overlap
    if su == 2:
        n2 = tour[pu + 1]
        if la[n2] >= 0 or ra[n2] >= 0:
            return False
    if sv == 2:
        n2 = tour[pv + 1]
        if la[n2] >= 0 or ra[n2] >= 0:
            return False
    _copy_base(tour, SI, dla, dno, dre, stour, SS, sdla, sdno, sdre, ssrc)
    if pu > pv:
        pu, pv = pv, pu
        su, sv = sv, su
    w = pu
    for s in range(sv):
        stour[w] = tour[pv + s]
        w += 1
    for p in range(pu + su, pv):
        stour[w] = tour[p]
        w += 1
    for s in range(su):
        stour[w] = tour[pu + s]
        w += 1
    return True


@njit
def _b_two_opt(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc,
               u, v, before):
    # reverse the run between the two removed arcs; "before" anchors the
    # removed arcs on the predecessor side.  Deliveries wholly inside the
    # reversed run swap orientation; straddling ones make the move illegal.
    L = SI[0]
    pu = pos[u]
    pv = pos[v]
    if pu < 0 or pv < 0:
        return False
    if pu > pv:
        pu, pv = pv, pu
    if before:
        if pu < 1:
            return False
        lo = pu
        hi = pv - 1
    else:
        lo = pu + 1
        hi = pv
    if hi >= L - 1 or lo < 1 or hi - lo < 1:
        return False
    _copy_base(tour, SI, dla, dno, dre, stour, SS, sdla, sdno, sdre, ssrc)
    for p in range(lo, hi + 1):
        stour[p] = tour[hi - (p - lo)]
    for q in range(SI[1]):
        a = pos[dla[q]]
        r = pos[dre[q]]
        inside_a = lo <= a <= hi
        inside_r = lo <= r <= hi
        if inside_a and inside_r:
            sdla[q] = dre[q]
            sdre[q] = dla[q]
        elif inside_a or inside_r:
            return False
    return True


@njit
def _b_drone_truck_swap(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc,
                        q, u, elig):
    # N9: drone customer of delivery q trades places with truck node u
    pu = pos[u]
    if pu < 1 or pu >= SI[0] - 1:
        return False
    if elig[u] == 0 or la[u] >= 0 or ra[u] >= 0:
        return False
    if pos[dla[q]] <= pu <= pos[dre[q]]:
        return False
    _copy_base(tour, SI, dla, dno, dre, stour, SS, sdla, sdno, sdre, ssrc)
    stour[pu] = dno[q]
    sdno[q] = u
    return True


@njit
def _b_tuple_role(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc,
                  q, which, elig):
    # N10 (which=0): launch <-> drone node; N11 (which=1): rendezvous <->
    # drone node; N12 (which=2): launch <-> rendezvous with positions
    i = dla[q]
    k = dre[q]
    if which == 0:
        if i == 0 or elig[i] == 0 or ra[i] >= 0:
            return False
        _copy_base(tour, SI, dla, dno, dre, stour, SS, sdla, sdno, sdre, ssrc)
        stour[pos[i]] = dno[q]
        sdla[q] = dno[q]
        sdno[q] = i
        return True
    if which == 1:
        if pos[k] == SI[0] - 1 or elig[k] == 0 or la[k] >= 0:
            return False
        _copy_base(tour, SI, dla, dno, dre, stour, SS, sdla, sdno, sdre, ssrc)
        stour[pos[k]] = dno[q]
        sdre[q] = dno[q]
        sdno[q] = k
        return True
    if i == 0 or pos[k] == SI[0] - 1 or ra[i] >= 0 or la[k] >= 0:
        return False
    _copy_base(tour, SI, dla, dno, dre, stour, SS, sdla, sdno, sdre, ssrc)
    stour[pos[i]] = k
    stour[pos[k]] = i
    sdla[q] = k
    sdre[q] = i
    return True


@njit
def _b_insert_delivery(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc,
                       j, i, k, elig):
    # N13: lift truck node j into a new sortie launched at i, recovered at k
    L = SI[0]
    nd = SI[1]
    if L < 4:
        return False  # the truck must keep at least one customer
    pj = pos[j]
    if pj < 1 or pj >= L - 1 or elig[j] == 0 or la[j] >= 0 or ra[j] >= 0:
        return False
    pi = pos[i]
    pk = pos[k]
    if pi < 0 or pk < 0 or i == j or k == j or pi >= pk:
        return False
    for q in range(nd):
        if not (pos[dre[q]] <= pi or pos[dla[q]] >= pk):
            return False
    w = 0
    for p in range(L):
        if p == pj:
            continue
        stour[w] = tour[p]
        w += 1
    SS[0] = L - 1
    for q in range(nd):
        sdla[q] = dla[q]
        sdno[q] = dno[q]
        sdre[q] = dre[q]
        ssrc[q] = q
    sdla[nd] = i
    sdno[nd] = j
    sdre[nd] = k
    ssrc[nd] = -1
    SS[1] = nd + 1
    return True


@njit
def _b_remove_delivery(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc,
                       q, u):
    # N14: dissolve delivery q and put its drone customer back after node u
    L = SI[0]
    pu = pos[u]
    if pu < 0 or pu >= L - 1:
        return False
    j = dno[q]
    w = 0
    for p in range(L):
        stour[w] = tour[p]
        w += 1
        if p == pu:
            stour[w] = j
            w += 1
    SS[0] = L + 1
    w = 0
    for qq in range(SI[1]):
        if qq == q:
            continue
        sdla[w] = dla[qq]
        sdno[w] = dno[qq]
        sdre[w] = dre[qq]
        ssrc[w] = qq
        w += 1
    SS[1] = w
    return True


@njit
def _b_swap_drone_nodes(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc,
                        q1, q2):
    _copy_base(tour, SI, dla, dno, dre, stour, SS, sdla, sdno, sdre, ssrc)
    sdno[q1] = dno[q2]
    sdno[q2] = dno[q1]
    return True


@njit
def _b_relocate_delivery(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc,
                         q, i2, k2):
    # N16: re-anchor delivery q on a new launch/rendezvous pair
    p2 = pos[i2]
    r2 = pos[k2]
    j = dno[q]
    if p2 < 0 or r2 < 0 or p2 >= r2 or i2 == j or k2 == j:
        return False
    if i2 == dla[q] and k2 == dre[q]:
        return False
    for qq in range(SI[1]):
        if qq == q:
            continue
        if not (pos[dre[qq]] <= p2 or pos[dla[qq]] >= r2):
            return False
    _copy_base(tour, SI, dla, dno, dre, stour, SS, sdla, sdno, sdre, ssrc)
    sdla[q] = i2
    sdre[q] = k2
    return True


@njit
def _build(kind, a1, a2, a3,
           tour, pos, dla, dno, dre, la, ra, fly, SI,
           stour, SS, sdla, sdno, sdre, ssrc, elig):
    if kind == K_N1:
        return _b_relocate(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2, 1, False)
    if kind == K_N2:
        return _b_relocate(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2, 2, False)
    if kind == K_N3:
        return _b_relocate(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2, 2, True)
    if kind == K_N4:
        return _b_swap_seg(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2, 1, 1)
    if kind == K_N5:
        return _b_swap_seg(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2, 2, 1)
    if kind == K_N6:
        return _b_swap_seg(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2, 2, 2)
    if kind == K_N7:
        return _b_two_opt(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2, False)
    if kind == K_N8:
        return _b_two_opt(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2, True)
    if kind == K_N9:
        return _b_drone_truck_swap(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2, elig)
    if kind == K_N10:
        return _b_tuple_role(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, 0, elig)
    if kind == K_N11:
        return _b_tuple_role(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, 1, elig)
    if kind == K_N12:
        return _b_tuple_role(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, 2, elig)
    if kind == K_N13:
        return _b_insert_delivery(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2, a3, elig)
    if kind == K_N14:
        return _b_remove_delivery(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2)
    if kind == K_N15:
        return _b_swap_drone_nodes(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2)
    return _b_relocate_delivery(tour, pos, dla, dno, dre, la, ra, fly, SI, stour, SS, sdla, sdno, sdre, ssrc, a1, a2, a3)


# ---------------------------------------------------------------------------
# incremental pricing


@njit
def _diff_window(tour, L, stour, sL):
    x = 0
    lim = L if L < sL else sL
    while x < lim and tour[x] == stour[x]:
        x += 1
    ycur = L - 1
    ycand = sL - 1
    while ycur >= x and ycand >= x and tour[ycur] == stour[ycand]:
        ycur -= 1
        ycand -= 1
    return x, ycur, ycand


@njit
def _delivery_changed(q, s, sdla, sdno, sdre, sla, dla, dno, dre, la,
                      pos, spos, x, ycur, ycand):
    if s < 0:
        return True
    if sdla[q] != dla[s] or sdno[q] != dno[s] or sdre[q] != dre[s]:
        return True
    if (sla[sdre[q]] >= 0) != (la[dre[s]] >= 0):
        return True
    a = pos[dla[s]]
    r = pos[dre[s]]
    if a <= ycur and r - 1 >= x - 1:
        return True
    a2 = spos[sdla[q]]
    r2 = spos[sdre[q]]
    if a2 <= ycand and r2 - 1 >= x - 1:
        return True
    return False


@njit
def _delta_cost(tour, pos, dla, dno, dre, la, SI, contrib, CF,
                stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS,
                tt, dt, td, dd, P, marks):
    L = SI[0]
    nd = SI[1]
    sL = SS[0]
    snd = SS[1]
    relax_t = P[P_RELAXT] != 0.0
    relax_d = P[P_RELAXD] != 0.0

    x, ycur, ycand = _diff_window(tour, L, stour, sL)
    arc_old = 0.0
    p = x - 1
    if p < 0:
        p = 0
    while p <= ycur and p + 1 <= L - 1:
        arc_old += td[tour[p]][tour[p + 1]]
        p += 1
    arc_new = 0.0
    p = x - 1
    if p < 0:
        p = 0
    while p <= ycand and p + 1 <= sL - 1:
        arc_new += td[stour[p]][stour[p + 1]]
        p += 1
    delta = P[P_C1] * (arc_new - arc_old)

    for s in range(nd):
        marks[s] = 0
    for q in range(snd):
        s = ssrc[q]
        if s >= 0:
            marks[s] = 1
        if _delivery_changed(q, s, sdla, sdno, sdre, sla, dla, dno, dre, la, pos, spos, x, ycur, ycand):
            tex, dex = _excess_cost_mode(stour, spos, sla, sdla[q], sdno[q], sdre[q], tt, dt, P)
            if tex > 0.0 and not relax_t:
                return 0.0, False
            if dex > 0.0 and not relax_d:
                return 0.0, False
            delta += _contrib_cost(stour, spos, sla, sdla[q], sdno[q], sdre[q], tt, dt, dd, P)
            if s >= 0:
                delta -= contrib[s]
    for s in range(nd):
        if marks[s] == 0:
            delta -= contrib[s]
    return delta, True


@njit
def _delta_time(tour, pos, dla, dno, dre, la, SI, penu, effp, CF,
                stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS,
                tt, dt, P, marks):
    L = SI[0]
    nd = SI[1]
    sL = SS[0]
    snd = SS[1]
    eps = P[P_EPS]
    s_l = P[P_SL]
    s_r = P[P_SR]
    omega = P[P_OMEGA]
    relax_t = P[P_RELAXT] != 0.0
    relax_d = P[P_RELAXD] != 0.0

    x, ycur, ycand = _diff_window(tour, L, stour, sL)
    pc0 = x
    for s in range(nd):
        marks[s] = 0
    for q in range(snd):
        s = ssrc[q]
        if s >= 0:
            marks[s] = 1
        if _delivery_changed(q, s, sdla, sdno, sdre, sla, dla, dno, dre, la, pos, spos, x, ycur, ycand):
            a2 = spos[sdla[q]]
            if a2 < pc0:
                pc0 = a2
            if s >= 0:
                a = pos[dla[s]]
                if a < pc0:
                    pc0 = a
    for s in range(nd):
        if marks[s] == 0:
            a = pos[dla[s]]
            if a < pc0:
                pc0 = a
    if pc0 >= sL:
        pc0 = sL - 1
    # pull the resume point out of any crossing sortie
    moved = True
    while moved:
        moved = False
        for q in range(snd):
            a2 = spos[sdla[q]]
            r2 = spos[sdre[q]]
            if a2 < pc0 <= r2:
                pc0 = a2
                moved = True
    pen_before = 0.0
    for q in range(snd):
        if spos[sdla[q]] < pc0:
            pen_before += penu[ssrc[q]]

    start = pc0 - 1
    if start < 0:
        start = 0
    t = effp[start]
    span = 0.0
    pen_walk = 0.0
    active = -1
    dr_arr = 0.0
    node = stour[start]
    if sla[node] >= 0:
        q = sla[node]
        depart = t + s_l
        dr_arr = depart + dt[sdla[q]][sdno[q]] + dt[sdno[q]][sdre[q]]
        span = 0.0
        active = q
        t = depart
    for p in range(start + 1, sL):
        prev = stour[p - 1]
        node = stour[p]
        step = tt[prev][node]
        t += step
        span += step
        if sra[node] >= 0:
            q = sra[node]
            joint = t if t > dr_arr else dr_arr
            joint += s_r
            seg_t = span
            recover = s_r + s_l if sla[node] >= 0 else s_r
            tex = 0.0
            if sdla[q] != 0:
                tex = seg_t + recover - eps
                if tex < 0.0:
                    tex = 0.0
            dex = dt[sdla[q]][sdno[q]] + dt[sdno[q]][sdre[q]] + s_r - eps
            if dex < 0.0:
                dex = 0.0
            if tex > 0.0 and not relax_t:
                return 0.0, False
            if dex > 0.0 and not relax_d:
                return 0.0, False
            pen_walk += tex if tex > dex else dex
            t = joint
            active = -1
        if sla[node] >= 0:
            q = sla[node]
            depart = t + s_l
            dr_arr = depart + dt[sdla[q]][sdno[q]] + dt[sdno[q]][sdre[q]]
            span = 0.0
            active = q
            t = depart
    new_phi = t + omega * (pen_before + pen_walk)
    return new_phi - CF[0], True


@njit
def _evaluate(kind, a1, a2, a3,
              tour, pos, dla, dno, dre, la, ra, fly, SI, contrib, penu, effp, CF,
              stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS, order, marks,
              tt, dt, td, dd, elig, P):
    ok = _build(kind, a1, a2, a3, tour, pos, dla, dno, dre, la, ra, fly, SI,
                stour, SS, sdla, sdno, sdre, ssrc, elig)
    if not ok:
        return False, 0.0
    _scratch_index(stour, SS, spos, sla, sra, sdla, sdno, sdre)
    if not _spans_ok(SS, spos, sdla, sdno, sdre, order):
        return False, 0.0
    if P[P_OBJCOST] != 0.0:
        delta, adm = _delta_cost(tour, pos, dla, dno, dre, la, SI, contrib, CF,
                                 stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS,
                                 tt, dt, td, dd, P, marks)
    else:
        delta, adm = _delta_time(tour, pos, dla, dno, dre, la, SI, penu, effp, CF,
                                 stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS,
                                 tt, dt, P, marks)
    if not adm:
        return False, 0.0
    return True, delta


@njit
def _apply_scratch(tour, pos, dla, dno, dre, la, ra, fly, SI, contrib, penu, effp, CF,
                   stour, SS, sdla, sdno, sdre, tt, dt, td, dd, P):
    sL = SS[0]
    snd = SS[1]
    for p in range(sL):
        tour[p] = stour[p]
    SI[0] = sL
    for q in range(snd):
        dla[q] = sdla[q]
        dno[q] = sdno[q]
        dre[q] = sdre[q]
    SI[1] = snd
    _rebuild(tour, pos, dla, dno, dre, la, ra, fly, SI, contrib, penu, effp, CF,
             tt, dt, td, dd, P)


# ---------------------------------------------------------------------------
# education driver


@njit
def _shuffle(arr, m):
    for i in range(m - 1, 0, -1):
        j = np.random.randint(0, i + 1)
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


@njit
def _scan_kind(kind, tour, pos, dla, dno, dre, la, ra, fly, SI, contrib, penu, effp, CF,
               stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS, order, marks,
               tt, dt, td, dd, elig, P, glen, n,
               node_perm, del_perm, gw):
    # first-improvement scan of one neighborhood; applies accepted moves in
    # place; node-indexed kinds keep scanning after an accept, delivery-indexed
    # kinds return so the caller rescans with fresh delivery indices
    hit = False
    nd = SI[1]
    for q in range(nd):
        del_perm[q] = q
    if nd > 1:
        _shuffle(del_perm, nd)

    if kind == K_N1 or kind == K_N2 or kind == K_N3 or kind == K_N4 or kind == K_N5 \
            or kind == K_N6 or kind == K_N7 or kind == K_N8:
        for ui in range(n):
            u = node_perm[ui]
            if pos[u] < 0:
                continue
            for s in range(glen):
                v = gw[u, s]
                if pos[v] < 0 or v == u:
                    continue
                ok, delta = _evaluate(kind, u, v, 0,
                                      tour, pos, dla, dno, dre, la, ra, fly, SI,
                                      contrib, penu, effp, CF,
                                      stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS,
                                      order, marks, tt, dt, td, dd, elig, P)
                if ok and delta < -ACCEPT_EPS:
                    _apply_scratch(tour, pos, dla, dno, dre, la, ra, fly, SI,
                                   contrib, penu, effp, CF,
                                   stour, SS, sdla, sdno, sdre, tt, dt, td, dd, P)
                    hit = True
    elif kind == K_N9:
        for qi in range(nd):
            q = del_perm[qi]
            dnode = dno[q]
            for s in range(glen):
                v = gw[dnode, s]
                ok, delta = _evaluate(kind, q, v, 0,
                                      tour, pos, dla, dno, dre, la, ra, fly, SI,
                                      contrib, penu, effp, CF,
                                      stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS,
                                      order, marks, tt, dt, td, dd, elig, P)
                if ok and delta < -ACCEPT_EPS:
                    _apply_scratch(tour, pos, dla, dno, dre, la, ra, fly, SI,
                                   contrib, penu, effp, CF,
                                   stour, SS, sdla, sdno, sdre, tt, dt, td, dd, P)
                    return True
    elif kind == K_N10 or kind == K_N11 or kind == K_N12:
        for qi in range(nd):
            q = del_perm[qi]
            ok, delta = _evaluate(kind, q, 0, 0,
                                  tour, pos, dla, dno, dre, la, ra, fly, SI,
                                  contrib, penu, effp, CF,
                                  stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS,
                                  order, marks, tt, dt, td, dd, elig, P)
            if ok and delta < -ACCEPT_EPS:
                _apply_scratch(tour, pos, dla, dno, dre, la, ra, fly, SI,
                               contrib, penu, effp, CF,
                               stour, SS, sdla, sdno, sdre, tt, dt, td, dd, P)
                return True
    elif kind == K_N13:
        for ji in range(n):
            j = node_perm[ji]
            if pos[j] < 0 or elig[j] == 0 or la[j] >= 0 or ra[j] >= 0:
                continue
            inserted = False
            for s1 in range(glen):
                i = gw[j, s1]
                if pos[i] < 0:
                    continue
                for s2 in range(glen):
                    k = gw[j, s2]
                    if pos[k] < 0 or pos[i] >= pos[k]:
                        continue
                    ok, delta = _evaluate(kind, j, i, k,
                                          tour, pos, dla, dno, dre, la, ra, fly, SI,
                                          contrib, penu, effp, CF,
                                          stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS,
                                          order, marks, tt, dt, td, dd, elig, P)
                    if ok and delta < -ACCEPT_EPS:
                        _apply_scratch(tour, pos, dla, dno, dre, la, ra, fly, SI,
                                       contrib, penu, effp, CF,
                                       stour, SS, sdla, sdno, sdre, tt, dt, td, dd, P)
                        hit = True
                        inserted = True
                        break
                if inserted:
                    break
    elif kind == K_N14:
        for qi in range(nd):
            q = del_perm[qi]
            for ui in range(n + 1):
                u = node_perm[ui] if ui < n else 0
                if pos[u] < 0 or pos[u] >= SI[0] - 1:
                    continue
                ok, delta = _evaluate(kind, q, u, 0,
                                      tour, pos, dla, dno, dre, la, ra, fly, SI,
                                      contrib, penu, effp, CF,
                                      stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS,
                                      order, marks, tt, dt, td, dd, elig, P)
                if ok and delta < -ACCEPT_EPS:
                    _apply_scratch(tour, pos, dla, dno, dre, la, ra, fly, SI,
                                   contrib, penu, effp, CF,
                                   stour, SS, sdla, sdno, sdre, tt, dt, td, dd, P)
                    return True
    elif kind == K_N15:
        for ai in range(nd):
            for bi in range(ai + 1, nd):
                q1 = del_perm[ai]
                q2 = del_perm[bi]
                ok, delta = _evaluate(kind, q1, q2, 0,
                                      tour, pos, dla, dno, dre, la, ra, fly, SI,
                                      contrib, penu, effp, CF,
                                      stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS,
                                      order, marks, tt, dt, td, dd, elig, P)
                if ok and delta < -ACCEPT_EPS:
                    _apply_scratch(tour, pos, dla, dno, dre, la, ra, fly, SI,
                                   contrib, penu, effp, CF,
                                   stour, SS, sdla, sdno, sdre, tt, dt, td, dd, P)
                    return True
    else:
        for qi in range(nd):
            q = del_perm[qi]
            dnode = dno[q]
            for s1 in range(glen):
                i2 = gw[dnode, s1]
                if pos[i2] < 0:
                    continue
                for s2 in range(glen):
                    k2 = gw[dnode, s2]
                    if pos[k2] < 0 or pos[i2] >= pos[k2]:
                        continue
                    ok, delta = _evaluate(kind, q, i2, k2,
                                          tour, pos, dla, dno, dre, la, ra, fly, SI,
                                          contrib, penu, effp, CF,
                                          stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS,
                                          order, marks, tt, dt, td, dd, elig, P)
                    if ok and delta < -ACCEPT_EPS:
                        _apply_scratch(tour, pos, dla, dno, dre, la, ra, fly, SI,
                                       contrib, penu, effp, CF,
                                       stour, SS, sdla, sdno, sdre, tt, dt, td, dd, P)
                        return True
    return hit


@njit
def _round(tour, pos, dla, dno, dre, la, ra, fly, SI, contrib, penu, effp, CF,
           stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS, order, marks,
           tt, dt, td, dd, elig, P, neigh, glen, n,
           kinds, node_perm, del_perm, gw):
    # one pass over all neighborhoods; a kind that accepts is rescanned until
    # clean before moving on; returns the number of accepted moves
    _shuffle(kinds, 16)
    for c in range(n):
        node_perm[c] = c + 1
    _shuffle(node_perm, n)
    for c in range(1, n + 1):
        for s in range(glen):
            gw[c, s] = neigh[c, s]
        if glen > 1:
            _shuffle(gw[c], glen)

    accepts = 0
    for ki in range(16):
        kind = kinds[ki]
        while _scan_kind(kind, tour, pos, dla, dno, dre, la, ra, fly, SI,
                         contrib, penu, effp, CF,
                         stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS, order, marks,
                         tt, dt, td, dd, elig, P, glen, n,
                         node_perm, del_perm, gw):
            accepts += 1
    return accepts


@njit
def _educate_kernel(tour, pos, dla, dno, dre, la, ra, fly, SI, contrib, penu, effp, CF,
                    tt, dt, td, dd, elig, P, neigh, glen, n, seed):
    np.random.seed(seed)
    _rebuild(tour, pos, dla, dno, dre, la, ra, fly, SI, contrib, penu, effp, CF,
             tt, dt, td, dd, P)
    size = pos.shape[0]
    stour = np.empty(size, np.int64)
    spos = np.empty(size, np.int64)
    sla = np.empty(size, np.int64)
    sra = np.empty(size, np.int64)
    sdla = np.empty(size, np.int64)
    sdno = np.empty(size, np.int64)
    sdre = np.empty(size, np.int64)
    ssrc = np.empty(size, np.int64)
    SS = np.empty(2, np.int64)
    order = np.empty(size, np.int64)
    marks = np.empty(size, np.int64)
    kinds = np.arange(16)
    node_perm = np.empty(n, np.int64)
    del_perm = np.empty(size, np.int64)
    gw = np.empty((n + 1, glen if glen > 0 else 1), np.int64)
    while _round(tour, pos, dla, dno, dre, la, ra, fly, SI, contrib, penu, effp, CF,
                 stour, spos, sla, sra, sdla, sdno, sdre, ssrc, SS, order, marks,
                 tt, dt, td, dd, elig, P, neigh, glen, n,
                 kinds, node_perm, del_perm, gw) > 0:
        pass
