"""Compiled inner loops for learning trials.

Phenomes arrive as uint8 arrays of ASCII codes. Every trial is expressed
literally (no closed-form shortcuts) so that per-trial lengths and the tabu
memory behave exactly as the Python-level definitions in ``learning``.
"""

import numba as nb
import numpy as np

ZERO = 48
ONE = 49
QMARK = 63
TILDE = 126

ROLLOUT = 0
RESOLVE = 1
EXPAND = 2
SOCIAL = 3

@nb.njit(cache=True, inline="always")
def _coin(pool):
    """One fair bit, served from a pool of 62 bits per generator call."""
    if pool[1] == 0:
        pool[0] = np.random.randint(0, 1 << 62)
        pool[1] = 62
    b = pool[0] & 1
    pool[0] >>= 1
    pool[1] -= 1
    return b


@nb.njit(cache=True, inline="always")
def _express(ph, mode, buf, pool, cap, pl, n_tilde, mpl, ipl):
    """Write one phenotype (0/1 bytes) into ``buf`` and return its length."""
    n = 0
    if mode == ROLLOUT:
        p_flip = 1.0 / pl
        for i in range(pl):
            b = ph[i] - ZERO
            if np.random.random() < p_flip:
                b = 1 - b
            buf[i] = b
        return pl

    budget = cap - pl
    if budget < 0:
        budget = 0
    base = 0
    rem = 0
    if mode == SOCIAL and n_tilde > 0:
        extra = abs(mpl - ipl)
        if extra > budget:
            extra = budget
        base = extra // n_tilde
        rem = extra % n_tilde
    k = 0
    for i in range(pl):
        c = ph[i]
        if c == ZERO:
            buf[n] = 0
            n += 1
        elif c == ONE:
            buf[n] = 1
            n += 1
        elif c == QMARK:
            buf[n] = _coin(pool)
            n += 1
        else:
            # structural symbol: always at least one ?
            reps = 1
            if mode == EXPAND:
                while budget > 0 and _coin(pool):
                    reps += 1
                    budget -= 1
            elif mode == SOCIAL:
                reps += base
                if k < rem:
                    reps += 1
            k += 1
            for _ in range(reps):
                buf[n] = _coin(pool)
                n += 1
    return n


@nb.njit(cache=True)
def _pack(buf, n):
    w0 = np.uint64(0)
    w1 = np.uint64(0)
    for i in range(n):
        if buf[i]:
            if i < 64:
                w0 |= np.uint64(1) << np.uint64(i)
            else:
                w1 |= np.uint64(1) << np.uint64(i - 64)
    return w0, w1


@nb.njit(cache=True)
def _slot(klen, w0, w1, mask):
    h = np.uint64(klen) * np.uint64(0x9E3779B97F4A7C15)
    h ^= w0 * np.uint64(0xBF58476D1CE4E5B9)
    h ^= w1 * np.uint64(0x94D049BB133111EB)
    h ^= h >> np.uint64(31)
    return np.int64(h & np.uint64(mask))


@nb.njit(cache=True)
def _find(tlen, tw0, tw1, klen, w0, w1, mask):
    """Index of the key, or of the empty slot where it would go."""
    i = _slot(klen, w0, w1, mask)
    while True:
        if tlen[i] == -1:
            return i
        if tlen[i] == klen and tw0[i] == w0 and tw1[i] == w1:
            return i
        i = (i + 1) & mask


@nb.njit(cache=True)
def _plain_loop(ph, target, T, mode, buf, pool, hist, cap, pl, n_tilde, mpl):
    L = target.shape[0]
    ipl = 0
    n = 0
    for trial in range(1, T + 1):
        n = _express(ph, mode, buf, pool, cap, pl, n_tilde, mpl, ipl)
        hist[n] += 1
        if n > ipl:
            ipl = n
        if n == L:
            hit = True
            for i in range(L):
                if buf[i] != target[i]:
                    hit = False
                    break
            if hit:
                return trial, n
    return -1, n


@nb.njit(cache=True)
def _tabu_loop(ph, target, T, mode, buf, pool, hist, cap, pl, n_tilde, mpl,
               retry_limit, tlen, tw0, tw1, mask):
    L = target.shape[0]
    # without structural symbols the phenotype space is finite: 2**q strings
    space = -1
    if n_tilde == 0:
        q = 0
        for i in range(pl):
            if ph[i] == QMARK:
                q += 1
        if q < 20:
            space = 1 << q
    for i in range(tlen.shape[0]):
        if tlen[i] != -1:
            # entries from an earlier memory may lie outside this phenome's space
            space = -1
            break
    n_seen = 0
    ipl = 0
    n = 0
    for trial in range(1, T + 1):
        if n_seen == space:
            # every later trial is a forced duplicate of length pl; none can match
            # (a matching string would already have been expressed and seen)
            n = _express(ph, mode, buf, pool, cap, pl, n_tilde, mpl, ipl)
            hist[n] += T - trial + 1
            return -1, n
        tries = 0
        while True:
            n = _express(ph, mode, buf, pool, cap, pl, n_tilde, mpl, ipl)
            w0, w1 = _pack(buf, n)
            s = _find(tlen, tw0, tw1, n, w0, w1, mask)
            if tlen[s] == -1 or tries >= retry_limit:
                break
            tries += 1
        if tlen[s] == -1:
            tlen[s] = n
            tw0[s] = w0
            tw1[s] = w1
            if n == pl:
                n_seen += 1
        hist[n] += 1
        if n > ipl:
            ipl = n
        if n == L:
            hit = True
            for i in range(L):
                if buf[i] != target[i]:
                    hit = False
                    break
            if hit:
                return trial, n
    return -1, n


@nb.njit(cache=True)
def run_trials(ph, target, T, cap, mode, mpl, retry_limit, seed, seen_len, seen_w0, seen_w1):
    """Express up to ``T`` phenotypes, stopping at the first match of ``target``.

    Returns ``(t, hist, last, tlen, tw0, tw1)`` where ``t`` is the 1-based trial
    that hit the target (-1 if none), ``hist[n]`` counts expressed phenotypes of
    length ``n``, ``last`` is the final phenotype, and the ``t*`` arrays are the
    tabu table (slots with ``tlen == -1`` are empty). A negative
    ``retry_limit`` disables the tabu memory.
    """
    np.random.seed(seed)
    pl = ph.shape[0]
    n_tilde = 0
    for i in range(pl):
        if ph[i] == TILDE:
            n_tilde += 1
    width = cap if cap > pl else pl
    buf = np.zeros(width, np.uint8)
    pool = np.zeros(2, np.int64)
    hist = np.zeros(width + 1, np.int64)

    size = 16
    while retry_limit >= 0 and size < 2 * (T + seen_len.shape[0] + 1):
        size *= 2
    mask = size - 1
    tlen = np.full(size, -1, np.int64)
    tw0 = np.zeros(size, np.uint64)
    tw1 = np.zeros(size, np.uint64)
    if retry_limit >= 0:
        for j in range(seen_len.shape[0]):
            s = _find(tlen, tw0, tw1, seen_len[j], seen_w0[j], seen_w1[j], mask)
            tlen[s] = seen_len[j]
            tw0[s] = seen_w0[j]
            tw1[s] = seen_w1[j]

    if retry_limit >= 0:
        found, n = _tabu_loop(ph, target, T, mode, buf, pool, hist, cap, pl, n_tilde, mpl,
                              retry_limit, tlen, tw0, tw1, mask)
    else:
        found, n = _plain_loop(ph, target, T, mode, buf, pool, hist, cap, pl, n_tilde, mpl)
    return found, hist, buf[:n].copy(), tlen, tw0, tw1
