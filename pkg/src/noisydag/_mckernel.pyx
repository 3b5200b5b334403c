# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo kernels.

Bit-identical twin of ``_kernels_py``: same splitmix64 streams, same draw
order (see that module's docstring for the contract).  Any change here must
be mirrored there.
"""

from libc.stdint cimport int64_t, uint8_t, uint64_t
from libc.stdlib cimport free, malloc

cdef extern from *:
    ctypedef unsigned __int128 uint128_t


DEF TIE = 2

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15u
cdef uint64_t STREAM_SALT = 0x6A09E667F3BCC909u
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z ^= z >> 30
    z *= 0xBF58476D1CE4E5B9u
    z ^= z >> 27
    z *= 0x94D049BB133111EBu
    return z ^ (z >> 31)


cdef inline uint64_t stream_state(uint64_t seed, uint64_t stream) noexcept nogil:
    return mix64(mix64(seed) ^ (stream * GAMMA) ^ STREAM_SALT)


cdef inline uint64_t rng_next(uint64_t* state) noexcept nogil:
    state[0] += GAMMA
    return mix64(state[0])


cdef inline double rng_uniform(uint64_t* state) noexcept nogil:
    return <double>(rng_next(state) >> 11) * INV_2_53


cdef inline int rng_bit(uint64_t* state) noexcept nogil:
    return <int>(rng_next(state) >> 63)


cdef inline int64_t rng_below(uint64_t* state, uint64_t n) noexcept nogil:
    return <int64_t>((<uint128_t>rng_next(state) * <uint128_t>n) >> 64)


cdef inline int rng_bernoulli(uint64_t* state, double p) noexcept nogil:
    return rng_uniform(state) < p


def broadcast_trials(uint64_t seed, int64_t trial_start, int64_t trial_count,
                     double delta, int64_t[::1] sizes, int64_t[::1] indegs,
                     int64_t[::1] parents_flat, int64_t[::1] parent_offsets,
                     uint8_t[::1] tables_flat, int64_t[::1] table_offsets,
                     bint random_dag, int decoder, double threshold):
    cdef int64_t depth = sizes.shape[0] - 1
    cdef int64_t maxw = 0, maxpar = 0, k
    for k in range(depth + 1):
        if sizes[k] > maxw:
            maxw = sizes[k]
        if k >= 1 and sizes[k] * indegs[k] > maxpar:
            maxpar = sizes[k] * indegs[k]
    cdef uint8_t* prev = <uint8_t*>malloc(maxw)
    cdef uint8_t* cur = <uint8_t*>malloc(maxw)
    cdef int64_t* scratch = <int64_t*>malloc(maxpar * sizeof(int64_t)) if random_dag else NULL
    if prev == NULL or cur == NULL or (random_dag and scratch == NULL):
        free(prev); free(cur); free(scratch)
        raise MemoryError()

    cdef int64_t errors = 0, t, L, lp, d, j, i, base, po, to, ones
    cdef uint64_t state
    cdef uint8_t* tmp
    cdef int64_t* pars
    cdef int root, idx, b, v, decided
    with nogil:
        for t in range(trial_start, trial_start + trial_count):
            state = stream_state(seed, <uint64_t>t)
            root = rng_bit(&state)
            prev[0] = <uint8_t>root
            for k in range(1, depth + 1):
                L = sizes[k]; lp = sizes[k - 1]; d = indegs[k]
                if random_dag:
                    pars = scratch
                    for i in range(L * d):
                        pars[i] = rng_below(&state, <uint64_t>lp)
                else:
                    po = parent_offsets[k]
                    pars = &parents_flat[po]
                to = table_offsets[k]
                for j in range(L):
                    idx = 0
                    base = j * d
                    for i in range(d):
                        b = prev[pars[base + i]] ^ rng_bernoulli(&state, delta)
                        idx |= b << i
                    v = tables_flat[to + idx]
                    if v == TIE:
                        v = rng_bit(&state)
                    cur[j] = <uint8_t>v
                tmp = prev; prev = cur; cur = tmp
            L = sizes[depth]
            ones = 0
            for j in range(L):
                ones += prev[j]
            if decoder == 0:
                decided = 1 if 2 * ones >= L else 0
            elif decoder == 1:
                decided = 1 if (<double>ones) / (<double>L) >= threshold else 0
            else:
                decided = prev[0]
            if decided != root:
                errors += 1
    free(prev); free(cur); free(scratch)
    return errors


def coupled_trials(uint64_t seed, int64_t trial_start, int64_t trial_count,
                   double delta, int64_t[::1] sizes, int64_t[::1] indegs,
                   int64_t[::1] parents_flat, int64_t[::1] parent_offsets,
                   uint8_t[::1] tables_flat, int64_t[::1] table_offsets,
                   bint random_dag):
    cdef int64_t depth = sizes.shape[0] - 1
    cdef int64_t maxw = 0, maxpar = 0, k
    for k in range(depth + 1):
        if sizes[k] > maxw:
            maxw = sizes[k]
        if k >= 1 and sizes[k] * indegs[k] > maxpar:
            maxpar = sizes[k] * indegs[k]
    cdef uint8_t* prev_p = <uint8_t*>malloc(maxw)
    cdef uint8_t* prev_m = <uint8_t*>malloc(maxw)
    cdef uint8_t* cur_p = <uint8_t*>malloc(maxw)
    cdef uint8_t* cur_m = <uint8_t*>malloc(maxw)
    cdef int64_t* scratch = <int64_t*>malloc(maxpar * sizeof(int64_t)) if random_dag else NULL
    if prev_p == NULL or prev_m == NULL or cur_p == NULL or cur_m == NULL or \
            (random_dag and scratch == NULL):
        free(prev_p); free(prev_m); free(cur_p); free(cur_m); free(scratch)
        raise MemoryError()

    cdef double two_delta = 2.0 * delta
    cdef int64_t violations = 0, equal_final = 0
    cdef double gap_sum = 0.0
    cdef int64_t t, L, lp, d, j, i, base, po, to, ones_p, ones_m, p
    cdef uint64_t state
    cdef uint8_t* tmp
    cdef int64_t* pars
    cdef int idx_p, idx_m, in_p, in_m, v_p, v_m, tb, b, same
    with nogil:
        for t in range(trial_start, trial_start + trial_count):
            state = stream_state(seed, <uint64_t>t)
            prev_p[0] = 1
            prev_m[0] = 0
            for k in range(1, depth + 1):
                L = sizes[k]; lp = sizes[k - 1]; d = indegs[k]
                if random_dag:
                    pars = scratch
                    for i in range(L * d):
                        pars[i] = rng_below(&state, <uint64_t>lp)
                else:
                    po = parent_offsets[k]
                    pars = &parents_flat[po]
                to = table_offsets[k]
                for j in range(L):
                    idx_p = 0
                    idx_m = 0
                    base = j * d
                    for i in range(d):
                        if rng_uniform(&state) < two_delta:
                            b = rng_bit(&state)
                            in_p = b
                            in_m = b
                        else:
                            p = pars[base + i]
                            in_p = prev_p[p]
                            in_m = prev_m[p]
                        idx_p |= in_p << i
                        idx_m |= in_m << i
                    v_p = tables_flat[to + idx_p]
                    v_m = tables_flat[to + idx_m]
                    if v_p == TIE or v_m == TIE:
                        tb = rng_bit(&state)
                        if v_p == TIE:
                            v_p = tb
                        if v_m == TIE:
                            v_m = tb
                    if v_p < v_m:
                        violations += 1
                    cur_p[j] = <uint8_t>v_p
                    cur_m[j] = <uint8_t>v_m
                tmp = prev_p; prev_p = cur_p; cur_p = tmp
                tmp = prev_m; prev_m = cur_m; cur_m = tmp
            L = sizes[depth]
            ones_p = 0; ones_m = 0; same = 1
            for j in range(L):
                ones_p += prev_p[j]
                ones_m += prev_m[j]
                if prev_p[j] != prev_m[j]:
                    same = 0
            gap_sum += (<double>(ones_p - ones_m)) / (<double>L)
            if same:
                equal_final += 1
    free(prev_p); free(prev_m); free(cur_p); free(cur_m); free(scratch)
    return violations, gap_sum, equal_final


def percolation_trials(uint64_t seed, int64_t trial_start, int64_t trial_count,
                       double p_open, int64_t[::1] sizes, int64_t d,
                       double[::1] lambda_sums, int64_t[::1] hit_counts):
    cdef int64_t depth = sizes.shape[0] - 1
    cdef int64_t maxw = 0, k
    for k in range(depth + 1):
        if sizes[k] > maxw:
            maxw = sizes[k]
    cdef uint8_t* prev = <uint8_t*>malloc(maxw)
    cdef uint8_t* cur = <uint8_t*>malloc(maxw)
    cdef int64_t* pars = <int64_t*>malloc(maxw * d * sizeof(int64_t))
    if prev == NULL or cur == NULL or pars == NULL:
        free(prev); free(cur); free(pars)
        raise MemoryError()

    cdef int64_t t, L, lp, j, i, base, count
    cdef uint64_t state
    cdef uint8_t* tmp
    cdef int linked, is_open, conn
    with nogil:
        for t in range(trial_start, trial_start + trial_count):
            state = stream_state(seed, <uint64_t>t)
            prev[0] = 1
            lambda_sums[0] += 1.0
            hit_counts[0] += 1
            for k in range(1, depth + 1):
                L = sizes[k]; lp = sizes[k - 1]
                for i in range(L * d):
                    pars[i] = rng_below(&state, <uint64_t>lp)
                count = 0
                for j in range(L):
                    base = j * d
                    linked = 0
                    for i in range(d):
                        if prev[pars[base + i]]:
                            linked = 1
                            break
                    is_open = rng_uniform(&state) < p_open  # one draw per vertex, always
                    conn = 1 if (is_open and linked) else 0
                    cur[j] = <uint8_t>conn
                    count += conn
                tmp = prev; prev = cur; cur = tmp
                lambda_sums[k] += (<double>count) / (<double>L)
                if count >= 1:
                    hit_counts[k] += 1
    free(prev); free(cur); free(pars)
    return None
