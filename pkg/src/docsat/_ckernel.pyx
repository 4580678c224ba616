# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trial loop.  Must stay draw-for-draw identical to
engine._run_trial_python and the pickers in heuristics.py."""

from libc.stdint cimport uint64_t, int64_t, int32_t, uint8_t
from libc.stdlib cimport malloc, calloc, free

import numpy as np

cdef enum:
    WALKSAT = 0
    DOCSAT = 1
    GWSAT = 2
    TABU = 3
    NOVELTY = 4


cdef struct Rng:
    uint64_t s0
    uint64_t s1
    uint64_t s2
    uint64_t s3


cdef inline uint64_t rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t next_u64(Rng* r) noexcept nogil:
    cdef uint64_t result = rotl(r.s1 * 5, 7) * 9
    cdef uint64_t t = r.s1 << 17
    r.s2 ^= r.s0
    r.s3 ^= r.s1
    r.s1 ^= r.s2
    r.s0 ^= r.s3
    r.s2 ^= t
    r.s3 = rotl(r.s3, 45)
    return result


cdef inline double rnd(Rng* r) noexcept nogil:
    return <double>(next_u64(r) >> 11) * (1.0 / 9007199254740992.0)


cdef inline int64_t below(Rng* r, uint64_t n) noexcept nogil:
    cdef uint64_t threshold = (<uint64_t>0 - n) % n
    cdef uint64_t v
    while True:
        v = next_u64(r)
        if v >= threshold:
            return <int64_t>(v % n)


cdef inline int choice_index(Rng* r, int k) noexcept nogil:
    if k == 1:
        return 0
    return <int>below(r, k)


cdef struct Search:
    int n_vars
    int n_clauses
    const int32_t* lits
    const int32_t* ps
    const int32_t* pi
    const int32_t* ns
    const int32_t* ni
    uint8_t* x
    int32_t* num_true
    int32_t* unsat
    int32_t* upos
    int n_unsat
    int64_t tlc
    int64_t n_crit


cdef inline int breakcount(Search* s, int k) noexcept nogil:
    cdef const int32_t* start
    cdef const int32_t* idx
    cdef int j, b = 0
    if s.x[k]:
        start = s.ps; idx = s.pi
    else:
        start = s.ns; idx = s.ni
    for j in range(start[k], start[k + 1]):
        if s.num_true[idx[j]] == 1:
            b += 1
    return b


cdef inline int makecount(Search* s, int k) noexcept nogil:
    cdef const int32_t* start
    cdef const int32_t* idx
    cdef int j, m = 0
    if s.x[k]:
        start = s.ns; idx = s.ni
    else:
        start = s.ps; idx = s.pi
    for j in range(start[k], start[k + 1]):
        if s.num_true[idx[j]] == 0:
            m += 1
    return m


cdef inline int tlc_delta(Search* s, int k) noexcept nogil:
    cdef int p = s.ps[k + 1] - s.ps[k]
    cdef int n = s.ns[k + 1] - s.ns[k]
    if s.x[k]:
        return n - p
    return p - n


cdef inline void flip(Search* s, int k, int64_t* o2c_out, int64_t* u2c_out, int64_t* des_out) noexcept nogil:
    cdef const int32_t* ls
    cdef const int32_t* li
    cdef const int32_t* gs
    cdef const int32_t* gi
    cdef int j, c, nt, pos, last
    cdef int o2c = 0, u2c = 0, destroyed = 0
    cdef int32_t* num_true = s.num_true
    if s.x[k]:
        ls = s.ps; li = s.pi; gs = s.ns; gi = s.ni
    else:
        ls = s.ns; li = s.ni; gs = s.ps; gi = s.pi
    for j in range(ls[k], ls[k + 1]):
        c = li[j]
        nt = num_true[c] - 1
        num_true[c] = nt
        if nt == 1:
            o2c += 1
        elif nt == 0:
            destroyed += 1
            s.upos[c] = s.n_unsat
            s.unsat[s.n_unsat] = c
            s.n_unsat += 1
    for j in range(gs[k], gs[k + 1]):
        c = gi[j]
        nt = num_true[c]
        num_true[c] = nt + 1
        if nt == 0:
            u2c += 1
            pos = s.upos[c]
            s.n_unsat -= 1
            last = s.unsat[s.n_unsat]
            if last != c:
                s.unsat[pos] = last
                s.upos[last] = pos
            s.upos[c] = -1
        elif nt == 1:
            destroyed += 1
    s.x[k] = 1 - s.x[k]
    s.tlc += (gs[k + 1] - gs[k]) - (ls[k + 1] - ls[k])
    s.n_crit += o2c + u2c - destroyed
    o2c_out[0] = o2c
    u2c_out[0] = u2c
    des_out[0] = destroyed


cdef inline int walksat_among(int* vs, int* breaks, int n, double u, Rng* rng,
                              double p_walk, int* is_random) noexcept nogil:
    cdef int zeros[3]
    cdef int tied[3]
    cdef int nz = 0, nt = 0, i, lo
    for i in range(n):
        if breaks[i] == 0:
            zeros[nz] = vs[i]
            nz += 1
    is_random[0] = 0
    if nz > 0:
        return zeros[choice_index(rng, nz)]
    if u < p_walk:
        is_random[0] = 1
        return vs[below(rng, n)]
    lo = breaks[0]
    for i in range(1, n):
        if breaks[i] < lo:
            lo = breaks[i]
    for i in range(n):
        if breaks[i] == lo:
            tied[nt] = vs[i]
            nt += 1
    return tied[choice_index(rng, nt)]


cdef inline int argmin_int(int* vs, int* vals, Rng* rng) noexcept nogil:
    cdef int tied[3]
    cdef int nt = 0, i, lo = vals[0]
    for i in range(1, 3):
        if vals[i] < lo:
            lo = vals[i]
    for i in range(3):
        if vals[i] == lo:
            tied[nt] = vs[i]
            nt += 1
    return tied[choice_index(rng, nt)]


def run_trial(const int32_t[:, ::1] lits, const int32_t[::1] ps, const int32_t[::1] pi,
              const int32_t[::1] ns, const int32_t[::1] ni, int n_vars,
              int kind, double p_walk, double r_doc, int tlc_sign, int tabu_len, double p_novelty,
              int64_t max_flips, bint stop_on_solution, uint64_t[::1] rng_state,
              int64_t[:, ::1] hist=None, int64_t[::1] hist_overflow=None,
              int64_t[::1] crit_sum=None, int64_t[::1] crit_count=None,
              int64_t[::1] trans=None):
    """Returns (solved, flips_used, final_energy, final_tlc, solution uint8 array)."""
    cdef int m = lits.shape[0]
    cdef Search s
    cdef Rng rng
    cdef int k, c, i, j, nt, var, is_random, n_allowed, best_i, second_i, newest
    cdef int64_t flips = 0, o2c, u2c, des, lf_max
    cdef int vs[3]
    cdef int allowed[3]
    cdef int ivals[3]
    cdef int keys_i[3]
    cdef double scores[3]
    cdef double u, lo
    cdef int tied[3]
    cdef int ntied, all_pos
    cdef bint do_hist = hist is not None
    cdef bint do_crit = crit_sum is not None
    cdef bint do_trans = trans is not None
    cdef int hist_rows = hist.shape[0] if do_hist else 0
    cdef bint solved = 0
    cdef int64_t first_flips = 0, first_tlc = 0
    cdef int32_t* tabu_ring = NULL
    cdef int32_t* tabu_count = NULL
    cdef int tabu_head = 0, tabu_size = 0
    cdef int64_t* last_flip = NULL

    solution = np.zeros(n_vars, dtype=np.uint8)
    cdef uint8_t[::1] sol = solution

    rng.s0 = rng_state[0]; rng.s1 = rng_state[1]; rng.s2 = rng_state[2]; rng.s3 = rng_state[3]

    s.n_vars = n_vars
    s.n_clauses = m
    s.lits = &lits[0, 0] if m > 0 else NULL
    s.ps = &ps[0]; s.pi = &pi[0] if pi.shape[0] > 0 else NULL
    s.ns = &ns[0]; s.ni = &ni[0] if ni.shape[0] > 0 else NULL
    s.x = <uint8_t*>calloc(n_vars + 1, sizeof(uint8_t))
    s.num_true = <int32_t*>calloc(m + 1, sizeof(int32_t))
    s.unsat = <int32_t*>calloc(m + 1, sizeof(int32_t))
    s.upos = <int32_t*>calloc(m + 1, sizeof(int32_t))
    if kind == TABU and tabu_len > 0:
        tabu_ring = <int32_t*>calloc(tabu_len, sizeof(int32_t))
        tabu_count = <int32_t*>calloc(n_vars + 1, sizeof(int32_t))
    if kind == NOVELTY:
        last_flip = <int64_t*>malloc((n_vars + 1) * sizeof(int64_t))
        for k in range(n_vars + 1):
            last_flip[k] = -1
    try:
        with nogil:
            for k in range(1, n_vars + 1):
                s.x[k] = <uint8_t>(next_u64(&rng) >> 63)
            s.n_unsat = 0
            s.tlc = 0
            s.n_crit = 0
            for c in range(m):
                nt = 0
                for j in range(3):
                    var = s.lits[3 * c + j]
                    if (var > 0) == (s.x[var if var > 0 else -var] == 1):
                        nt += 1
                s.num_true[c] = nt
                s.tlc += nt
                if nt == 1:
                    s.n_crit += 1
                if nt == 0:
                    s.upos[c] = s.n_unsat
                    s.unsat[s.n_unsat] = c
                    s.n_unsat += 1
                else:
                    s.upos[c] = -1

            if do_hist:
                if s.n_unsat < hist_rows:
                    hist[s.n_unsat, s.tlc] += 1
                else:
                    hist_overflow[0] += 1
            if do_crit:
                crit_sum[s.n_unsat] += s.n_crit
                crit_count[s.n_unsat] += 1

            if s.n_unsat == 0:
                solved = 1
                first_flips = 0
                first_tlc = s.tlc
                for k in range(n_vars):
                    sol[k] = s.x[k + 1]

            if not solved or not stop_on_solution:
                while flips < max_flips:
                    if s.n_unsat == 0:
                        if m == 0:
                            break
                        c = <int>below(&rng, m)
                    else:
                        c = s.unsat[below(&rng, s.n_unsat)]
                    for j in range(3):
                        var = s.lits[3 * c + j]
                        vs[j] = var if var > 0 else -var
                    is_random = 0

                    if kind == WALKSAT:
                        for j in range(3):
                            ivals[j] = breakcount(&s, vs[j])
                        u = rnd(&rng)
                        var = walksat_among(vs, ivals, 3, u, &rng, p_walk, &is_random)
                    elif kind == DOCSAT:
                        all_pos = 1
                        for j in range(3):
                            scores[j] = breakcount(&s, vs[j]) + r_doc * (tlc_sign * tlc_delta(&s, vs[j]))
                            if not scores[j] > 0:
                                all_pos = 0
                        u = rnd(&rng)
                        if all_pos and u < p_walk:
                            is_random = 1
                            var = vs[below(&rng, 3)]
                        else:
                            lo = scores[0]
                            for j in range(1, 3):
                                if scores[j] < lo:
                                    lo = scores[j]
                            ntied = 0
                            for j in range(3):
                                if scores[j] == lo:
                                    tied[ntied] = vs[j]
                                    ntied += 1
                            var = tied[choice_index(&rng, ntied)]
                    elif kind == GWSAT:
                        for j in range(3):
                            ivals[j] = breakcount(&s, vs[j]) - makecount(&s, vs[j])
                        u = rnd(&rng)
                        if u < p_walk:
                            is_random = 1
                            var = vs[below(&rng, 3)]
                        else:
                            var = argmin_int(vs, ivals, &rng)
                    elif kind == TABU:
                        n_allowed = 0
                        for j in range(3):
                            if tabu_count == NULL or tabu_count[vs[j]] == 0:
                                allowed[n_allowed] = vs[j]
                                n_allowed += 1
                        u = rnd(&rng)
                        if n_allowed == 0:
                            is_random = 1
                            var = vs[below(&rng, 3)]
                        else:
                            for j in range(n_allowed):
                                ivals[j] = breakcount(&s, allowed[j])
                            var = walksat_among(allowed, ivals, n_allowed, u, &rng, p_walk, &is_random)
                        if tabu_len > 0:
                            if tabu_size == tabu_len:
                                tabu_count[tabu_ring[tabu_head]] -= 1
                                tabu_ring[tabu_head] = var
                                tabu_head = (tabu_head + 1) % tabu_len
                            else:
                                tabu_ring[(tabu_head + tabu_size) % tabu_len] = var
                                tabu_size += 1
                            tabu_count[var] += 1
                    else:
                        # novelty: lexicographic (b - m, last_flip, position)
                        for j in range(3):
                            ivals[j] = breakcount(&s, vs[j]) - makecount(&s, vs[j])
                            keys_i[j] = j
                        for i in range(3):
                            for j in range(2 - i):
                                if (ivals[keys_i[j + 1]] < ivals[keys_i[j]]
                                        or (ivals[keys_i[j + 1]] == ivals[keys_i[j]]
                                            and last_flip[vs[keys_i[j + 1]]] < last_flip[vs[keys_i[j]]])):
                                    k = keys_i[j]; keys_i[j] = keys_i[j + 1]; keys_i[j + 1] = k
                        best_i = keys_i[0]
                        second_i = keys_i[1]
                        newest = 0
                        lf_max = last_flip[vs[0]]
                        for j in range(1, 3):
                            if last_flip[vs[j]] > lf_max:
                                lf_max = last_flip[vs[j]]
                                newest = j
                        var = vs[best_i]
                        if lf_max >= 0 and best_i == newest:
                            if rnd(&rng) < p_novelty:
                                var = vs[second_i]
                        last_flip[var] = flips

                    flip(&s, var, &o2c, &u2c, &des)
                    flips += 1

                    if do_trans:
                        if is_random:
                            trans[4] += 1
                        else:
                            trans[3] += 1
                            trans[0] += o2c
                            trans[1] += u2c
                            trans[2] += des
                    if do_hist:
                        if s.n_unsat < hist_rows:
                            hist[s.n_unsat, s.tlc] += 1
                        else:
                            hist_overflow[0] += 1
                    if do_crit:
                        crit_sum[s.n_unsat] += s.n_crit
                        crit_count[s.n_unsat] += 1

                    if s.n_unsat == 0 and not solved:
                        solved = 1
                        first_flips = flips
                        first_tlc = s.tlc
                        for k in range(n_vars):
                            sol[k] = s.x[k + 1]
                        if stop_on_solution:
                            break

        rng_state[0] = rng.s0; rng_state[1] = rng.s1; rng_state[2] = rng.s2; rng_state[3] = rng.s3
        if solved:
            return True, first_flips, 0, first_tlc, solution
        return False, flips, s.n_unsat, s.tlc, None
    finally:
        free(s.x)
        free(s.num_true)
        free(s.unsat)
        free(s.upos)
        if tabu_ring != NULL:
            free(tabu_ring)
            free(tabu_count)
        if last_flip != NULL:
            free(last_flip)
