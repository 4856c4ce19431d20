"""Independent brute-force reference values for the table1 fixture.

Enumerates every set partition of the ten rows (restricted growth strings),
computes SSE in min-max normalized space, and the silhouette of the optimum.
The printed numbers are frozen into the C++ tests.
"""
import itertools
import math

ROWS = {
    "T100": (2, 2, 4, 2, 3, 5),
    "T101": (3, 5, 3, 3, 4, 4),
    "T102": (4, 4, 2, 4, 5, 8),
    "T103": (5, 5, 5, 4, 5, 2),
    "T104": (2, 3, 4, 5, 4, 5),
    "T105": (3, 2, 3, 5, 3, 3),
    "T106": (4, 4, 2, 4, 2, 4),
    "T107": (5, 5, 2, 4, 1, 5),
    "T108": (5, 5, 3, 3, 1, 5),
    "T109": (4, 3, 4, 3, 3, 4),
}
IDS = list(ROWS)
X = [[(r - 1) / 9 for r in ROWS[i]] for i in IDS]


def rgs(n, k):
    def rec(prefix, m):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for lab in range(min(m + 1, k)):
            yield from rec(prefix + [lab], max(m, lab + 1))
    yield from rec([], 0)


def sse(labels):
    total = 0.0
    for c in set(labels):
        mem = [X[i] for i, l in enumerate(labels) if l == c]
        mu = [sum(col) / len(mem) for col in zip(*mem)]
        total += sum(sum((a - b) ** 2 for a, b in zip(p, mu)) for p in mem)
    return total


def best(k, must=(), cannot=()):
    idx = {v: i for i, v in enumerate(IDS)}
    out = None
    for lab in rgs(len(X), k):
        if any(lab[idx[a]] != lab[idx[b]] for a, b in must):
            continue
        if any(lab[idx[a]] == lab[idx[b]] for a, b in cannot):
            continue
        s = sse(lab)
        if out is None or s < out[0] - 1e-12:
            out = (s, lab)
    return out


def silhouette(labels):
    def d(i, j):
        return math.sqrt(sum((a - b) ** 2 for a, b in zip(X[i], X[j])))
    vals = []
    for i, li in enumerate(labels):
        own = [j for j, l in enumerate(labels) if l == li and j != i]
        if not own:
            vals.append(0.0)
            continue
        a = sum(d(i, j) for j in own) / len(own)
        b = min(
            sum(d(i, j) for j, l in enumerate(labels) if l == c) / labels.count(c)
            for c in set(labels) if c != li)
        m = max(a, b)
        vals.append(0.0 if m == 0 else (b - a) / m)
    return sum(vals) / len(vals)


if __name__ == "__main__":
    for k in (2, 3):
        s, lab = best(k)
        print(f"k={k} sse={s!r} labels={lab}")
        if k == 2:
            print(f"  silhouette={silhouette(list(lab))!r}")
    s, lab = best(2, must=[("T103", "T108")])
    print(f"k=2 must(T103,T108) sse={s!r} labels={lab}")


# --- k-means++ seeding replay (SplitMix64, D^2 sampling), k=3 seed=42 -------
M64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & M64

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & M64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
        return z ^ (z >> 31)

    def uniform(self):
        return (self.next() >> 11) * 2.0 ** -53

    def below(self, n):
        return (self.next() * n) >> 64


def kmeanspp_picks(points, k, seed):
    rng = SplitMix64(seed)
    first = rng.below(len(points))
    picks = [first]
    d2 = [sum((a - b) ** 2 for a, b in zip(p, points[first])) for p in points]
    while len(picks) < k:
        target = rng.uniform() * sum(d2)
        cum, pick = 0.0, None
        for i, v in enumerate(d2):
            if v <= 0:
                continue
            cum += v
            pick = i
            if cum > target:
                break
        picks.append(pick)
        d2 = [min(d2[i], sum((a - b) ** 2 for a, b in zip(points[i], points[pick]))) for i in range(len(points))]
    return picks


if __name__ == "__main__":
    print("kmeans++ picks k=3 seed=42:", [IDS[i] for i in kmeanspp_picks(X, 3, 42)])
