# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo trial loop for the two hot tasks.

This is a performance twin of ``decoding.decode`` driven by the ideal
model, specialized to shuffle and replace-random with closed-form
posterior rows.  It replays the pure-Python draw discipline exactly
(same SplitMix64 stream, same per-step key draws, same row ordering and
cumulative inversion, same tie handling), so for any (task, strategy,
temperature in {0, 1}, seed) the per-trial outcomes are bit-identical to
running the reference loop.  The equality is asserted by tests; if you
touch either side, keep the other in lockstep.

For these two tasks every masked position shares the same row
probabilities at every step, so the score-based rankings (confidence,
margin, entropy) all reduce to the same (tie-key, position) order the
reference implementation produces; the selection code below relies on
that.
"""

import numpy as np

cdef enum:
    CAP = 64

cdef enum:
    S_RANDOM = 0
    S_CONFIDENCE = 1
    S_MARGIN = 2
    S_ENTROPY = 3
    S_LEFT_TO_RIGHT = 4
    S_THRESHOLD = 5
    S_FACTOR = 6

cdef enum:
    K_SHUFFLE = 0
    K_REPLACE_RANDOM = 1

cdef unsigned long long GOLDEN = <unsigned long long>0x9E3779B97F4A7C15
cdef unsigned long long MIX_A = <unsigned long long>0xBF58476D1CE4E5B9
cdef unsigned long long MIX_B = <unsigned long long>0x94D049BB133111EB
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline unsigned long long _mix64(unsigned long long z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX_A
    z = (z ^ (z >> 27)) * MIX_B
    return z ^ (z >> 31)


cdef inline double _rng_random(unsigned long long* state) noexcept nogil:
    state[0] = state[0] + GOLDEN
    return <double>(_mix64(state[0]) >> 11) * INV_2_53


cdef inline unsigned long long _substream_seed(
    unsigned long long master, unsigned long long index
) noexcept nogil:
    return _mix64(master ^ _mix64((index + 1) * GOLDEN))


cdef inline int _tie_pick(double u, int ntied) noexcept nogil:
    cdef int idx = <int>(u * ntied)
    return idx if idx < ntied else ntied - 1


cdef int _select(
    int strategy, int k, double gamma, double f_param, double conf,
    int m, double* keys, int* masked, int* selected,
) noexcept nogil:
    """Fill ``selected`` (ascending positions) and return its size.

    ``keys[i]`` is the tie key of ``masked[i]`` (ascending positions);
    all rows share confidence ``conf``, so score-based rankings reduce to
    (key, position) order.
    """
    cdef int i, j, count, best, mm
    cdef unsigned char taken[CAP]

    if strategy == S_THRESHOLD:
        if conf > gamma:
            for i in range(m):
                selected[i] = masked[i]
            return m
        best = 0
        for i in range(1, m):
            if keys[i] < keys[best]:
                best = i
        selected[0] = masked[best]
        return 1

    if strategy == S_LEFT_TO_RIGHT:
        count = k if k < m else m
        for i in range(count):
            selected[i] = masked[i]
        return count

    if strategy == S_FACTOR:
        count = 1
        for mm in range(1, m + 1):
            if (mm + 1) * (1.0 - conf) < f_param:
                count = mm
    else:
        count = k if k < m else m

    for i in range(m):
        taken[i] = 0
    for j in range(count):
        best = -1
        for i in range(m):
            if taken[i]:
                continue
            if best < 0 or keys[i] < keys[best]:
                best = i
        taken[best] = 1
    j = 0
    for i in range(m):
        if taken[i]:
            selected[j] = masked[i]
            j += 1
    return count


cdef int _trial_shuffle(
    int n, int strategy, int k, double gamma, double f_param, double temperature,
    unsigned long long seed, int* steps_out,
) noexcept nogil:
    cdef unsigned long long state = seed
    cdef int out[CAP]
    cdef unsigned char used[CAP]
    cdef unsigned char stale_used[CAP]
    cdef int masked[CAP]
    cdef int selected[CAP]
    cdef int unused[CAP]
    cdef double keys[CAP]
    cdef int i, j, m, mu, count, steps, item, pos
    cdef double u, conf, cum, p
    cdef bint inconsistent = 0, have_stale = 0

    for j in range(n):
        out[j] = -1
        used[j] = 0
    m = n
    steps = 0

    while m > 0:
        if have_stale and inconsistent:
            # failure completion: one step sampling every remaining
            # position from the stale posterior (uniform over the items
            # unused at the time of the last query)
            mu = 0
            for i in range(n):
                if not stale_used[i]:
                    unused[mu] = i
                    mu += 1
            for j in range(n):
                if out[j] != -1:
                    continue
                u = _rng_random(&state)
                if temperature == 0.0:
                    item = unused[_tie_pick(u, mu)]
                else:
                    p = 1.0 / mu
                    cum = 0.0
                    item = unused[mu - 1]
                    for i in range(mu):
                        cum += p
                        if u < cum:
                            item = unused[i]
                            break
                out[j] = item
            steps += 1
            break

        # posterior snapshot: every row is uniform over the unused items
        mu = 0
        count = 0
        for j in range(n):
            stale_used[j] = used[j]
            if not used[j]:
                unused[mu] = j
                mu += 1
            if out[j] == -1:
                masked[count] = j
                count += 1
        have_stale = 1
        conf = 1.0 / m

        for i in range(m):
            keys[i] = _rng_random(&state)
        count = _select(strategy, k, gamma, f_param, conf, m, keys, masked, selected)

        for i in range(count):
            pos = selected[i]
            u = _rng_random(&state)
            if temperature == 0.0:
                item = unused[_tie_pick(u, mu)]
            else:
                p = 1.0 / mu
                cum = 0.0
                item = unused[mu - 1]
                for j in range(mu):
                    cum += p
                    if u < cum:
                        item = unused[j]
                        break
            out[pos] = item
            if used[item]:
                inconsistent = 1
            used[item] = 1
        m -= count
        steps += 1

    steps_out[0] = steps
    for j in range(n):
        used[j] = 0
    for j in range(n):
        if used[out[j]]:
            return 0
        used[out[j]] = 1
    return 1


cdef inline int _sample_rr(
    double u, double temperature, int m, bint replaced, unsigned char f_first
) noexcept nogil:
    """Sample keep(0)/replace(1) from the row parameterized by (m, replaced).

    ``f_first`` says whether the replacement item precedes the original in
    vocabulary order, i.e. comes first in the row.
    """
    cdef double p_keep, p_rep, p_first
    if replaced:
        return 0
    if m == 1:
        return 1
    p_keep = <double>(m - 1) / m
    p_rep = 1.0 / m
    if temperature == 0.0:
        if p_keep == p_rep:
            # two-way tie resolved in row order
            if _tie_pick(u, 2) == 0:
                return 1 if f_first else 0
            return 0 if f_first else 1
        # m >= 3: keeping wins outright under greedy
        return 0
    p_first = p_rep if f_first else p_keep
    if u < p_first:
        return 1 if f_first else 0
    return 0 if f_first else 1


cdef int _trial_replace_random(
    int n, int strategy, int k, double gamma, double f_param, double temperature,
    unsigned long long seed, unsigned char* f_first, int* steps_out,
) noexcept nogil:
    # out[j]: -1 masked, 0 kept original, 1 replacement item
    cdef unsigned long long state = seed
    cdef int out[CAP]
    cdef int masked[CAP]
    cdef int selected[CAP]
    cdef double keys[CAP]
    cdef int i, j, m, count, steps, pos, f_count, stale_m, pick
    cdef bint stale_replaced = 0, have_stale = 0
    cdef double u, conf, p_keep, p_rep

    for j in range(n):
        out[j] = -1
    m = n
    f_count = 0
    steps = 0
    stale_m = n

    while m > 0:
        if have_stale and f_count >= 2:
            for j in range(n):
                if out[j] != -1:
                    continue
                u = _rng_random(&state)
                out[j] = _sample_rr(u, temperature, stale_m, stale_replaced, f_first[j])
            steps += 1
            break

        # posterior snapshot
        stale_m = m
        stale_replaced = f_count >= 1
        have_stale = 1
        count = 0
        for j in range(n):
            if out[j] == -1:
                masked[count] = j
                count += 1
        if stale_replaced or m == 1:
            conf = 1.0
        else:
            p_keep = <double>(m - 1) / m
            p_rep = 1.0 / m
            conf = p_keep if p_keep >= p_rep else p_rep

        for i in range(m):
            keys[i] = _rng_random(&state)
        count = _select(strategy, k, gamma, f_param, conf, m, keys, masked, selected)

        for i in range(count):
            pos = selected[i]
            u = _rng_random(&state)
            pick = _sample_rr(u, temperature, stale_m, stale_replaced, f_first[pos])
            out[pos] = pick
            if pick == 1:
                f_count += 1
        m -= count
        steps += 1

    steps_out[0] = steps
    return 1 if f_count == 1 else 0


def run_trials(
    int kind, int n, int strategy, int k, double gamma, double f_param,
    double temperature, long long trials, unsigned long long master_seed,
    f_first_flags=None,
):
    """Run ``trials`` independent decode runs; returns (valid, steps) arrays.

    ``kind``: 0 shuffle, 1 replace-random.  ``f_first_flags`` (replace-random
    only): per position, whether the replacement item sorts before the
    original in the vocabulary.
    """
    if not 1 <= n <= CAP:
        raise ValueError(f"n must be in 1..{CAP}")
    if temperature != 0.0 and temperature != 1.0:
        raise ValueError("kernel supports temperature 0 or 1 only")
    if kind != K_SHUFFLE and kind != K_REPLACE_RANDOM:
        raise ValueError("kernel supports shuffle (0) and replace-random (1)")
    if not 0 <= strategy <= 6:
        raise ValueError("unknown strategy code")
    if trials < 0:
        raise ValueError("trials must be nonnegative")

    cdef unsigned char f_first[CAP]
    cdef int j
    for j in range(CAP):
        f_first[j] = 0
    if f_first_flags is not None:
        for j, flag in enumerate(f_first_flags):
            if j >= CAP:
                break
            f_first[j] = 1 if flag else 0

    valid = np.empty(trials, dtype=np.uint8)
    steps = np.empty(trials, dtype=np.int32)
    cdef unsigned char[::1] valid_v = valid
    cdef int[::1] steps_v = steps
    cdef long long t
    cdef int step_count = 0
    cdef unsigned long long seed

    with nogil:
        for t in range(trials):
            seed = _substream_seed(master_seed, <unsigned long long>t)
            if kind == K_SHUFFLE:
                valid_v[t] = <unsigned char>_trial_shuffle(
                    n, strategy, k, gamma, f_param, temperature, seed, &step_count
                )
            else:
                valid_v[t] = <unsigned char>_trial_replace_random(
                    n, strategy, k, gamma, f_param, temperature, seed, f_first, &step_count
                )
            steps_v[t] = step_count
    return valid, steps
