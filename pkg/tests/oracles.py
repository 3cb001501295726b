"""Brute-force reference implementations used to derive expected values.

Nothing here imports the package: functions are plain integers whose bit
``t`` is the value on minterm ``t`` (variable ``j`` is bit ``j`` of ``t``).
"""

from __future__ import annotations

from itertools import permutations, product


def var_table(n: int, j: int) -> int:
    return sum(1 << t for t in range(1 << n) if (t >> j) & 1)


def full(n: int) -> int:
    return (1 << (1 << n)) - 1


def apply_op(op: int, a: int, b: int, n: int) -> int:
    """Two-input gate with table ``op`` (bit ``x + 2*y`` for fanins x, y)."""
    out = 0
    for t in range(1 << n):
        x, y = (a >> t) & 1, (b >> t) & 1
        out |= ((op >> (x + 2 * y)) & 1) << t
    return out


NONTRIVIAL = [op for op in range(16) if op not in (0x0, 0xF, 0xA, 0x5, 0xC, 0x3)]


def min_chain_sizes(n: int, max_steps: int) -> dict[int, int]:
    """Minimum number of fanin-2 steps for every function reachable within ``max_steps``.

    Breadth-first over the *set* of signals a chain has computed so far;
    a function costs the first level at which it appears as a signal.
    Constants and (complemented) projections cost 0 steps.
    """
    inputs = [var_table(n, j) for j in range(n)]
    mask = full(n)
    best = {0: 0, mask: 0}
    for x in inputs:
        best[x] = 0
        best[x ^ mask] = 0
    # precompute gate results for every (op, a, b) lazily
    cache: dict[tuple[int, int], list[int]] = {}

    def results(a: int, b: int) -> list[int]:
        key = (a, b)
        if key not in cache:
            cache[key] = [apply_op(op, a, b, n) for op in NONTRIVIAL]
        return cache[key]

    frontier = {tuple(inputs)}
    for level in range(1, max_steps + 1):
        last = level == max_steps
        nxt = set()
        for signals in frontier:
            for i in range(len(signals)):
                for k in range(i + 1, len(signals)):
                    for g in results(signals[i], signals[k]):
                        if g not in best:
                            best[g] = level
                            best[g ^ mask] = level
                        if not last and g not in signals and g ^ mask not in signals:
                            nxt.add(tuple(sorted(signals + (g,))))
        frontier = nxt
    return best


def eval_expression(text: str, n: int) -> int:
    """Evaluate ``!``, ``(xy)`` AND, ``{xy}`` OR, ``[xy]`` XOR over letters a.. and 0/1."""
    pos = 0
    mask = full(n)

    def parse() -> int:
        nonlocal pos
        ch = text[pos]
        pos += 1
        if ch == "!":
            return parse() ^ mask
        if ch == "0":
            return 0
        if ch == "1":
            return mask
        if ch.isalpha():
            j = ord(ch) - ord("a")
            if not 0 <= j < n:
                raise ValueError(f"variable {ch} out of range")
            return var_table(n, j)
        closing = {"(": ")", "{": "}", "[": "]"}[ch]
        left = parse()
        right = parse()
        if text[pos] != closing:
            raise ValueError(f"expected {closing} at {pos}")
        pos += 1
        if ch == "(":
            return left & right
        if ch == "{":
            return left | right
        return left ^ right

    value = parse()
    if pos != len(text):
        raise ValueError("trailing characters")
    return value


def npn_transform(f: int, n: int, perm, phase: int, out: bool) -> int:
    """g(x) = out XOR f(w) with w_k = x[perm[k]] XOR phase_k."""
    g = 0
    for x in range(1 << n):
        w = 0
        for k in range(n):
            w |= (((x >> perm[k]) & 1) ^ ((phase >> k) & 1)) << k
        g |= (((f >> w) & 1) ^ out) << x
    return g


def npn_representative(f: int, n: int) -> int:
    return min(
        npn_transform(f, n, perm, phase, out)
        for perm in permutations(range(n))
        for phase in range(1 << n)
        for out in (0, 1)
    )


def anf_monomials(f: int, n: int) -> set[int]:
    """Monomials (as variable bitmasks) of the algebraic normal form, by Moebius inversion."""
    monomials = set()
    for m in range(1 << n):
        coeff = 0
        for t in range(1 << n):
            if t & ~m == 0:
                coeff ^= (f >> t) & 1
        if coeff:
            monomials.add(m)
    return monomials


def brute_force_sat(num_vars: int, clauses) -> bool:
    """Satisfiability of clauses over literals ``2*v + negated``."""
    for bits in product((False, True), repeat=num_vars):
        if all(any(bits[x >> 1] != bool(x & 1) for x in c) for c in clauses):
            return True
    return False
