"""Pure-Python Monte Carlo kernels; the fallback when the C extension is absent.

The compiled twin in ``_mckernel.pyx`` implements the same trial loops with
the same splitmix64 streams and the same draw order, so both produce
bit-identical counts.  The draw order per trial is a contract:

broadcast:    root bit | per level: [parent draws if random wiring] then per
              vertex: one noise draw per input slot, then one tie bit iff the
              gate ties.
coupled:      per level: [parent draws] then per vertex and slot: one uniform
              (< 2*delta means a shared fresh bit, one extra draw); then one
              shared tie bit iff either chain ties.
percolation:  per level: [parent draws] then one open draw per vertex.

Decoder codes: 0 = fraction >= 1/2, 1 = fraction >= threshold, 2 = first
vertex of the final level.
"""

from ._rng import Stream

TIE = 2


def broadcast_trials(seed, trial_start, trial_count, delta, sizes, indegs,
                     parents_flat, parent_offsets, tables_flat, table_offsets,
                     random_dag, decoder, threshold):
    """Run broadcast trials; return the number of decoding errors."""
    depth = len(sizes) - 1
    errors = 0
    maxw = max(sizes)
    prev = [0] * maxw
    cur = [0] * maxw
    for t in range(trial_start, trial_start + trial_count):
        rng = Stream(seed, t)
        root = rng.bit()
        prev[0] = root
        for k in range(1, depth + 1):
            L = sizes[k]
            lp = sizes[k - 1]
            d = indegs[k]
            po = parent_offsets[k]
            if random_dag:
                pars = [rng.below(lp) for _ in range(L * d)]
            else:
                pars = parents_flat[po:po + L * d]
            to = table_offsets[k]
            for j in range(L):
                idx = 0
                base = j * d
                for i in range(d):
                    b = prev[pars[base + i]] ^ rng.bernoulli(delta)
                    idx |= b << i
                v = tables_flat[to + idx]
                if v == TIE:
                    v = rng.bit()
                cur[j] = v
            prev, cur = cur, prev
        L = sizes[depth]
        if decoder == 0:
            decided = 1 if 2 * sum(prev[:L]) >= L else 0
        elif decoder == 1:
            decided = 1 if sum(prev[:L]) / L >= threshold else 0
        else:
            decided = prev[0]
        errors += decided != root
    return errors


def coupled_trials(seed, trial_start, trial_count, delta, sizes, indegs,
                   parents_flat, parent_offsets, tables_flat, table_offsets,
                   random_dag):
    """Coupled root-1/root-0 trials on shared randomness.

    Returns (monotonicity violations across all vertices and trials,
    sum over trials of the final-level fraction gap, number of trials whose
    final levels agree exactly).
    """
    depth = len(sizes) - 1
    two_delta = 2.0 * delta
    violations = 0
    gap_sum = 0.0
    equal_final = 0
    maxw = max(sizes)
    prev_p = [0] * maxw
    prev_m = [0] * maxw
    cur_p = [0] * maxw
    cur_m = [0] * maxw
    for t in range(trial_start, trial_start + trial_count):
        rng = Stream(seed, t)
        prev_p[0] = 1
        prev_m[0] = 0
        for k in range(1, depth + 1):
            L = sizes[k]
            lp = sizes[k - 1]
            d = indegs[k]
            po = parent_offsets[k]
            if random_dag:
                pars = [rng.below(lp) for _ in range(L * d)]
            else:
                pars = parents_flat[po:po + L * d]
            to = table_offsets[k]
            for j in range(L):
                idx_p = 0
                idx_m = 0
                base = j * d
                for i in range(d):
                    if rng.uniform() < two_delta:
                        b = rng.bit()
                        in_p = in_m = b
                    else:
                        p = pars[base + i]
                        in_p = prev_p[p]
                        in_m = prev_m[p]
                    idx_p |= in_p << i
                    idx_m |= in_m << i
                v_p = tables_flat[to + idx_p]
                v_m = tables_flat[to + idx_m]
                if v_p == TIE or v_m == TIE:
                    tb = rng.bit()
                    if v_p == TIE:
                        v_p = tb
                    if v_m == TIE:
                        v_m = tb
                if v_p < v_m:
                    violations += 1
                cur_p[j] = v_p
                cur_m[j] = v_m
            prev_p, cur_p = cur_p, prev_p
            prev_m, cur_m = cur_m, prev_m
        L = sizes[depth]
        ones_p = sum(prev_p[:L])
        ones_m = sum(prev_m[:L])
        gap_sum += (ones_p - ones_m) / L
        if prev_p[:L] == prev_m[:L]:
            equal_final += 1
    return violations, gap_sum, equal_final


def percolation_trials(seed, trial_start, trial_count, p_open, sizes, d,
                       lambda_sums, hit_counts):
    """Site percolation on freshly wired DAGs; accumulates into the two arrays.

    lambda_sums[k] accumulates the open-connected fraction of level k,
    hit_counts[k] the number of trials with at least one open-connected
    vertex at level k.
    """
    depth = len(sizes) - 1
    maxw = max(sizes)
    prev = [0] * maxw
    cur = [0] * maxw
    for t in range(trial_start, trial_start + trial_count):
        rng = Stream(seed, t)
        prev[0] = 1
        lambda_sums[0] += 1.0
        hit_counts[0] += 1
        for k in range(1, depth + 1):
            L = sizes[k]
            lp = sizes[k - 1]
            pars = [rng.below(lp) for _ in range(L * d)]
            count = 0
            for j in range(L):
                base = j * d
                linked = 0
                for i in range(d):
                    if prev[pars[base + i]]:
                        linked = 1
                        break
                is_open = rng.uniform() < p_open  # one draw per vertex, always
                conn = 1 if (is_open and linked) else 0
                cur[j] = conn
                count += conn
            prev, cur = cur, prev
            lambda_sums[k] += count / L
            hit_counts[k] += 1 if count >= 1 else 0
    return None
