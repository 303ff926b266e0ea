# Compiled twin of _kernel_py.run_distributed_chunk. Port rules: identical
# state mutations, and float expressions staged exactly like the numpy
# reference (interference accumulates over ascending transmitter ids, then
# the self term is subtracted) so arbiter verdicts agree bit-for-bit.

import numpy as np

from libc.math cimport ceil

BACKEND = "c"


def run_distributed_chunk(
    long long t0,
    long long m,
    long long theta,
    double phase_base,
    long long phase0,
    double beta_t,
    double noise,
    long long arrive_each_slot,
    const double[::1] lam,
    const double[:, ::1] gain,
    const double[::1] signal,
    const double[:, ::1] u_arr,
    const double[:, ::1] u_coin,
    long long[:, ::1] qcount,
    long long[:, ::1] arr_count,
    long long[::1] qlen,
    long long[::1] headg,
    unsigned char[::1] active,
    long long[::1] k,
    double[::1] prob,
    long long[::1] left,
    long long[::1] scal,
    long long[::1] arrived_by_g,
    long long[::1] delivered_by_g,
    long long[::1] serve_slots,
    long long[::1] sattime,
    long long[::1] tr_max,
    long long[::1] tr_total,
    long long[::1] tr_deliv,
    long long[::1] tr_arr,
    long long[::1] tr_s,
    long long[::1] tr_cur,
):
    cdef Py_ssize_t n = lam.shape[0]
    cdef long long[::1] tx = np.empty(n, dtype=np.int64)
    cdef long long[::1] win = np.empty(n, dtype=np.int64)
    cdef unsigned char[::1] iswin = np.zeros(n, dtype=np.uint8)

    cdef Py_ssize_t i, a, b, l
    cdef long long t, cur, s, s_now, g, maxq
    cdef long long ntx, nwin, na, delivered_now, arrived_now
    cdef double tot, interf

    for i in range(m):
        t = t0 + i
        cur = (t >> 1) / theta + 1
        scal[1] = cur
        delivered_now = 0
        arrived_now = 0

        if (t & 1) == 0:
            s = scal[0]
            if scal[2] > 0:
                serve_slots[s] += 1
                ntx = 0
                for l in range(n):
                    if active[l] and u_coin[i, l] < prob[l]:
                        tx[ntx] = l
                        ntx += 1
                if ntx > 0:
                    scal[6] += ntx
                    nwin = 0
                    for a in range(ntx):
                        l = tx[a]
                        tot = 0.0
                        for b in range(ntx):
                            tot += gain[tx[b], l]
                        interf = tot - gain[l, l]
                        if signal[l] >= beta_t * (interf + noise):
                            win[nwin] = l
                            nwin += 1
                    if nwin > 0:
                        for a in range(nwin):
                            l = win[a]
                            iswin[l] = 1
                            qcount[l, s] -= 1
                            qlen[l] -= 1
                            delivered_by_g[s] += 1
                            if qcount[l, s] > 0:
                                k[l] = 0
                                prob[l] = 0.25
                                left[l] = phase0
                            else:
                                active[l] = 0
                                scal[2] -= 1
                                if qlen[l] == 0:
                                    headg[l] = 0
                                else:
                                    g = s + 1
                                    while qcount[l, g] == 0:
                                        g += 1
                                    headg[l] = g
                        delivered_now = nwin
                        scal[5] += nwin
                        scal[3] -= nwin
                    for l in range(n):
                        if active[l] and not iswin[l]:
                            left[l] -= 1
                            if left[l] == 0:
                                if k[l] < 48:
                                    k[l] += 1
                                    prob[l] *= 0.5
                                left[l] = <long long> ceil(phase_base / prob[l])
                    if nwin > 0:
                        for a in range(nwin):
                            iswin[win[a]] = 0
                else:
                    for l in range(n):
                        if active[l]:
                            left[l] -= 1
                            if left[l] == 0:
                                if k[l] < 48:
                                    k[l] += 1
                                    prob[l] *= 0.5
                                left[l] = <long long> ceil(phase_base / prob[l])
        else:
            s = scal[0]
            if scal[2] == 0 and s < cur:
                s += 1
                scal[0] = s
                sattime[s] = t
                for l in range(n):
                    if qlen[l] > 0 and headg[l] == s:
                        active[l] = 1
                        k[l] = 0
                        prob[l] = 0.25
                        left[l] = phase0
                        scal[2] += 1

        if arrive_each_slot or (t & 1) == 0:
            s_now = scal[0]
            na = 0
            for l in range(n):
                if u_arr[i, l] < lam[l]:
                    if qlen[l] == 0:
                        headg[l] = cur
                        if cur == s_now:
                            active[l] = 1
                            k[l] = 0
                            prob[l] = 0.25
                            left[l] = phase0
                            scal[2] += 1
                    qcount[l, cur] += 1
                    arr_count[l, cur] += 1
                    qlen[l] += 1
                    na += 1
            if na > 0:
                arrived_by_g[cur] += na
                scal[3] += na
                scal[4] += na
                arrived_now = na

        maxq = 0
        for l in range(n):
            if qlen[l] > maxq:
                maxq = qlen[l]
        tr_max[i] = maxq
        tr_total[i] = scal[3]
        tr_deliv[i] = delivered_now
        tr_arr[i] = arrived_now
        tr_s[i] = scal[0]
        tr_cur[i] = cur
