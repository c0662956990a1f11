# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot circuit loops (see _core_py for the contract)."""

IMPL = "compiled"

NEG_SENTINEL = -(2**62)

cdef long long C_NEG = -(2**62)

cdef enum:
    K_FALSE = 0
    K_TRUE = 1
    K_LIT = 2
    K_AND = 3
    K_OR = 4


def lam_index(int lit):
    return 2 * lit if lit > 0 else -2 * lit + 1


def maxplus_pass(int[::1] kinds, long long[::1] lits, int[::1] child_start,
                 int[::1] child_flat, long long[::1] lam, long long[::1] out):
    cdef Py_ssize_t n = kinds.shape[0]
    cdef Py_ssize_t i, j
    cdef int k
    cdef long long acc, v, lit
    for i in range(n):
        k = kinds[i]
        if k == K_LIT:
            lit = lits[i]
            out[i] = lam[2 * lit] if lit > 0 else lam[-2 * lit + 1]
        elif k == K_AND:
            acc = 0
            for j in range(child_start[i], child_start[i + 1]):
                v = out[child_flat[j]]
                if v == C_NEG:
                    acc = C_NEG
                    break
                acc += v
            out[i] = acc
        elif k == K_OR:
            acc = C_NEG
            for j in range(child_start[i], child_start[i + 1]):
                v = out[child_flat[j]]
                if v > acc:
                    acc = v
            out[i] = acc
        elif k == K_TRUE:
            out[i] = 0
        else:
            out[i] = C_NEG
    return out[n - 1]


def sat_masks(int[::1] kinds, long long[::1] lits, int[::1] child_start,
              int[::1] child_flat, int n_issues, unsigned long long lo,
              unsigned long long hi):
    cdef Py_ssize_t n = kinds.shape[0]
    cdef Py_ssize_t i, j
    cdef int k
    cdef unsigned long long mask
    cdef long long lit
    cdef char acc
    cdef bytearray scratch = bytearray(n)
    cdef char[::1] val = scratch
    result = []
    for mask in range(lo, hi):
        for i in range(n):
            k = kinds[i]
            if k == K_LIT:
                lit = lits[i]
                if lit > 0:
                    val[i] = (mask >> (n_issues - lit)) & 1
                else:
                    val[i] = ((mask >> (n_issues + lit)) & 1) ^ 1
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
            elif k == K_TRUE:
                val[i] = 1
            else:
                val[i] = 0
        if val[n - 1]:
            result.append(mask)
    return result
