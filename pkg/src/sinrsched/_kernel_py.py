"""Reference implementation of the distributed-mode slot loop.

Pure numpy twin of the compiled kernel in _kernel_c.pyx. Both consume the
same pregenerated uniform arrays and must mutate state identically; the
compiled module is a line-for-line port of this one.

State layout (all arrays indexed by link id, periods 1-based):
  qcount[l, g]   undelivered packets of link l stamped with period g
  arr_count[l,g] packets of link l stamped g (never decremented)
  qlen[l]        total undelivered packets of link l
  headg[l]       stamp of l's oldest packet (0 when empty)
  active[l]      1 iff l holds an undelivered packet stamped s
  k[l], prob[l], left[l]   backoff phase, transmit probability, slots left
  scal           scalar counters, see IDX_* below
  serve_slots[g] data slots in which period g was in service with >=1 active sender
  sattime[g]     physical slot (0-based) at which s advanced to g, -1 if never
"""

import numpy as np

IDX_S = 0  # period currently being served
IDX_CUR = 1  # period currently being stamped
IDX_AC = 2  # number of active links
IDX_TQ = 3  # total undelivered packets
IDX_AR = 4  # cumulative arrivals
IDX_DE = 5  # cumulative deliveries
IDX_TX = 6  # cumulative transmission attempts

BACKEND = "python"


def run_distributed_chunk(
    t0,
    m,
    theta,
    phase_base,
    phase0,
    beta_t,
    noise,
    arrive_each_slot,
    lam,
    gain,
    signal,
    u_arr,
    u_coin,
    qcount,
    arr_count,
    qlen,
    headg,
    active,
    k,
    prob,
    left,
    scal,
    arrived_by_g,
    delivered_by_g,
    serve_slots,
    sattime,
    tr_max,
    tr_total,
    tr_deliv,
    tr_arr,
    tr_s,
    tr_cur,
):
    active_b = active.view(bool)
    kcap = 48  # phase cap keeps 2**k and phase lengths inside int64
    for i in range(m):
        t = t0 + i  # 0-based physical slot; even = data, odd = signaling
        cur = (t >> 1) // theta + 1
        scal[IDX_CUR] = cur
        delivered_now = 0
        arrived_now = 0

        if (t & 1) == 0:
            s = scal[IDX_S]
            if scal[IDX_AC] > 0:
                serve_slots[s] += 1
                act = np.nonzero(active_b)[0]
                tx = act[u_coin[i, act] < prob[act]]
                if tx.size:
                    scal[IDX_TX] += tx.size
                    # SINR arbiter over the actual transmitter set
                    if tx.size == 1:
                        ok = signal[tx] >= beta_t * noise
                    else:
                        sub = gain[np.ix_(tx, tx)]
                        interf = sub.sum(axis=0) - np.diagonal(sub)
                        ok = signal[tx] >= beta_t * (interf + noise)
                    winners = tx[ok]
                    if winners.size:
                        ticked = active_b.copy()
                        for l in winners:
                            ticked[l] = False
                            qcount[l, s] -= 1
                            qlen[l] -= 1
                            delivered_by_g[s] += 1
                            if qcount[l, s] > 0:
                                # next packet, same period: fresh backoff
                                k[l] = 0
                                prob[l] = 0.25
                                left[l] = phase0
                            else:
                                active_b[l] = False
                                scal[IDX_AC] -= 1
                                if qlen[l] == 0:
                                    headg[l] = 0
                                else:
                                    g = s + 1
                                    while qcount[l, g] == 0:
                                        g += 1
                                    headg[l] = g
                        delivered_now = int(winners.size)
                        scal[IDX_DE] += delivered_now
                        scal[IDX_TQ] -= delivered_now
                        tick = np.nonzero(ticked)[0]
                    else:
                        tick = act
                else:
                    tick = act
                # phase countdown for links still waiting on their packet
                if tick.size:
                    left[tick] -= 1
                    done = tick[left[tick] == 0]
                    for l in done:
                        if k[l] < kcap:
                            k[l] += 1
                            prob[l] *= 0.5
                        left[l] = int(np.ceil(phase_base / prob[l]))
        else:
            s = scal[IDX_S]
            # busy tone from every sender still holding a period-s packet;
            # silence (no active senders) lets everyone advance s together
            if scal[IDX_AC] == 0 and s < cur:
                s += 1
                scal[IDX_S] = s
                sattime[s] = t
                wake = np.nonzero((qlen > 0) & (headg == s))[0]
                for l in wake:
                    active_b[l] = True
                    k[l] = 0
                    prob[l] = 0.25
                    left[l] = phase0
                scal[IDX_AC] += wake.size

        if arrive_each_slot or (t & 1) == 0:
            arr = np.nonzero(u_arr[i] < lam)[0]
            if arr.size:
                s_now = scal[IDX_S]
                for l in arr:
                    if qlen[l] == 0:
                        headg[l] = cur
                        if cur == s_now:
                            active_b[l] = True
                            k[l] = 0
                            prob[l] = 0.25
                            left[l] = phase0
                            scal[IDX_AC] += 1
                    qcount[l, cur] += 1
                    arr_count[l, cur] += 1
                    qlen[l] += 1
                arrived_now = int(arr.size)
                arrived_by_g[cur] += arrived_now
                scal[IDX_TQ] += arrived_now
                scal[IDX_AR] += arrived_now

        tr_max[i] = qlen.max()
        tr_total[i] = scal[IDX_TQ]
        tr_deliv[i] = delivered_now
        tr_arr[i] = arrived_now
        tr_s[i] = scal[IDX_S]
        tr_cur[i] = cur
