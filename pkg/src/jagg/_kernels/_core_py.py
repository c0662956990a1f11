"""Pure-Python kernels for the hot circuit loops.

Same API as the compiled module jagg._kernels._core; selected as a fallback
when the extension is missing or when JAGG_PURE_KERNELS=1 is set.

Circuits arrive flattened: parallel arrays indexed by node id, children
before parents, root last.  Node kinds: 0 false, 1 true, 2 literal,
3 and, 4 or.  Max-plus values are int64 with NEG_SENTINEL standing in
for minus infinity.
"""

from __future__ import annotations

IMPL = "pure"

NEG_SENTINEL = -(2**62)

K_FALSE, K_TRUE, K_LIT, K_AND, K_OR = range(5)


def lam_index(lit: int) -> int:
    """Position of a literal's label in the flat label array."""
    return 2 * lit if lit > 0 else -2 * lit + 1


def maxplus_pass(kinds, lits, child_start, child_flat, lam, out) -> int:
    """Bottom-up max-plus evaluation; fills `out` per node, returns root value."""
    neg = NEG_SENTINEL
    n = len(kinds)
    for i in range(n):
        k = kinds[i]
        if k == K_LIT:
            out[i] = lam[lam_index(lits[i])]
        elif k == K_AND:
            acc = 0
            for j in range(child_start[i], child_start[i + 1]):
                v = out[child_flat[j]]
                if v == neg:
                    acc = neg
                    break
                acc += v
            out[i] = acc
        elif k == K_OR:
            acc = neg
            for j in range(child_start[i], child_start[i + 1]):
                v = out[child_flat[j]]
                if v > acc:
                    acc = v
            out[i] = acc
        elif k == K_TRUE:
            out[i] = 0
        else:
            out[i] = neg
    return out[n - 1]


def sat_masks(kinds, lits, child_start, child_flat, n_issues, lo, hi):
    """Masks in [lo, hi) whose assignment satisfies the circuit.

    Bit layout: issue variable v (1-based) lives at bit (n_issues - v), so
    ascending masks enumerate ballots in lexicographic order.
    """
    n = len(kinds)
    val = bytearray(n)
    result = []
    for mask in range(lo, hi):
        for i in range(n):
            k = kinds[i]
            if k == K_LIT:
                lit = lits[i]
                bit = (mask >> (n_issues - (lit if lit > 0 else -lit))) & 1
                val[i] = bit == (1 if lit > 0 else 0)
            elif k == K_AND:
                acc = 1
                for j in range(child_start[i], child_start[i + 1]):
                    if not val[child_flat[j]]:
                        acc = 0
                        break
                val[i] = acc
            elif k == K_OR:
                acc = 0
                for j in range(child_start[i], child_start[i + 1]):
                    if val[child_flat[j]]:
                        acc = 1
                        break
                val[i] = acc
            else:
                val[i] = k == K_TRUE
        if val[n - 1]:
            result.append(mask)
    return result
