"""Naive reference implementations used as independent oracles.

Everything here is deliberately written as plain loops straight off the
defining formulas, no vectorization and no code shared with the package.
"""

import math

import numpy as np


def naive_pe(x, order, step=1):
    """Ordinal-pattern Shannon entropy; ties rank by position."""
    x = list(map(float, x))
    span = (order - 1) * step
    counts = {}
    for t in range(len(x) - span):
        window = [x[t + j * step] for j in range(order)]
        pattern = tuple(sorted(range(order), key=lambda i: (window[i], i)))
        counts[pattern] = counts.get(pattern, 0) + 1
    total = sum(counts.values())
    h = 0.0
    for c in counts.values():
        p = c / total
        h -= p * math.log(p)
    return h


def _cheb(a, b):
    return max(abs(u - v) for u, v in zip(a, b))


def naive_ae(x, m, r):
    """Approximate entropy, self-matches included."""
    x = list(map(float, x))
    n = len(x)
    phis = []
    for ell in (m, m + 1):
        count = n - ell + 1
        windows = [x[i:i + ell] for i in range(count)]
        total = 0.0
        for i in range(count):
            matches = 0
            for j in range(count):
                if _cheb(windows[i], windows[j]) <= r:
                    matches += 1
            total += math.log(matches / count)
        phis.append(total / count)
    return phis[0] - phis[1]


def naive_se(x, m, r):
    """Sample entropy over the first N-m templates of both lengths,
    self-matches excluded; None when either match count is zero."""
    x = list(map(float, x))
    n = len(x)
    count = n - m
    sums = []
    for ell in (m, m + 1):
        windows = [x[i:i + ell] for i in range(count)]
        total = 0
        for i in range(count):
            for j in range(count):
                if i != j and _cheb(windows[i], windows[j]) <= r:
                    total += 1
        if total == 0:
            return None
        sums.append(total / (count * (count - 1)))
    return math.log(sums[0]) - math.log(sums[1])


def naive_fe(x, m, weight, r):
    """Fuzzy entropy with mean-removed windows, same truncation as naive_se."""
    x = list(map(float, x))
    n = len(x)
    count = n - m
    avgs = []
    for ell in (m, m + 1):
        windows = []
        for i in range(count):
            w = x[i:i + ell]
            mu = sum(w) / ell
            windows.append([v - mu for v in w])
        total = 0.0
        for i in range(count):
            for j in range(count):
                if i != j:
                    d = _cheb(windows[i], windows[j])
                    total += math.exp(-(d ** weight) / r)
        avgs.append(total / (count * (count - 1)))
    return math.log(avgs[0]) - math.log(avgs[1])


def _naive_normalize(x):
    lo, hi = min(x), max(x)
    return [(v - lo) / (hi - lo) for v in x]


def _naive_bins(y, k):
    counts = [0] * k
    for v in y:
        counts[min(int(v * k), k - 1)] += 1
    return counts


def naive_bwe(x, k):
    """Per-sample binning, midpoint-weighted Shannon sum."""
    y = _naive_normalize(list(map(float, x)))
    counts = _naive_bins(y, k)
    n = len(y)
    h = 0.0
    for i, c in enumerate(counts):
        if c:
            f = c / n
            h -= ((i + 0.5) / k) * f * math.log(f)
    return h


def naive_wavelet_sets(x, k, min_len):
    """(baseline_bin, gamma_l, gamma_u, runs) with runs as (start, end, side)."""
    y = _naive_normalize(list(map(float, x)))
    counts = _naive_bins(y, k)
    baseline = counts.index(max(counts))
    gl, gu = baseline / k, (baseline + 1) / k
    runs = []
    i, n = 0, len(y)
    while i < n:
        if y[i] > gu or y[i] < gl:
            above = y[i] > gu
            j = i
            while j < n and ((y[j] > gu) if above else (y[j] < gl)):
                j += 1
            if j - i >= min_len:
                runs.append((i, j, "above" if above else "below"))
            i = j
        else:
            i += 1
    return baseline, gl, gu, runs


def naive_wse(x, k, variant, gain, min_len):
    """Excursion-set entropy straight from the definitions."""
    y = _naive_normalize(list(map(float, x)))
    baseline, gl, gu, runs = naive_wavelet_sets(x, k, min_len)
    center = (gl + gu) / 2
    if not runs:
        return 0.0
    n = len(y)
    total = sum(j - i for i, j, _ in runs)
    h = 0.0
    for i, j, _ in runs:
        seg = y[i:j]
        w = sum(v - center for v in seg) / (j - i)
        if variant == "absolute":
            w = abs(w)
        adev = [abs(v - center) for v in seg]
        target = sum(adev) / 2
        cum = 0.0
        pin = 0
        for q, a in enumerate(adev):
            cum += a
            if cum >= target:
                pin = q
                break
        p_idx = i + pin
        phi = gain * w * (p_idx / n)
        pr = (j - i) / total
        h += -pr * math.log(pr) * w + phi
    return h


def random_sequences(n_sequences, max_len, seed):
    """Mixed bag of test sequences: noise, walks, and noisy sines."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_sequences):
        length = int(rng.integers(24, max_len + 1))
        kind = i % 3
        if kind == 0:
            seq = rng.normal(0, 1, length)
        elif kind == 1:
            seq = rng.normal(0, 1, length).cumsum()
        else:
            t = np.arange(length)
            seq = np.sin(2 * np.pi * t / rng.uniform(8, 40)) + rng.normal(0, 0.1, length)
        out.append(seq)
    return out
