# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_victims_py``; same contract, same answers.

The search recurses over items in ascending index order and accumulates
costs in that order too, so float totals match the pure-Python module
bit for bit.
"""

from libc.stdlib cimport free, malloc

__all__ = ["min_cost_subset"]


cdef struct Ctx:
    int n
    long dv
    long dr
    long dd
    long *v
    long *r
    long *d
    long *sv
    long *sr
    long *sd
    double *c
    int have_best
    double best_cost
    int best_size
    int *best_idx
    int *chosen


cdef bint _smaller_tuple(int *a, int *b, int size) noexcept:
    cdef int i
    for i in range(size):
        if a[i] != b[i]:
            return a[i] < b[i]
    return False


cdef void _walk(Ctx *ctx, int i, long fv, long fr, long fd,
                double cost, int depth) noexcept:
    cdef int k
    cdef bint better
    if fv >= ctx.dv and fr >= ctx.dr and fd >= ctx.dd:
        if not ctx.have_best:
            better = True
        elif cost != ctx.best_cost:
            better = cost < ctx.best_cost
        elif depth != ctx.best_size:
            better = depth < ctx.best_size
        else:
            better = _smaller_tuple(ctx.chosen, ctx.best_idx, depth)
        if better:
            ctx.have_best = 1
            ctx.best_cost = cost
            ctx.best_size = depth
            for k in range(depth):
                ctx.best_idx[k] = ctx.chosen[k]
        # growing a feasible set only raises its cost or its size
        return
    if i == ctx.n:
        return
    if (fv + ctx.sv[i] < ctx.dv or fr + ctx.sr[i] < ctx.dr
            or fd + ctx.sd[i] < ctx.dd):
        return
    if ctx.have_best:
        if cost > ctx.best_cost:
            return
        if cost == ctx.best_cost and depth + 1 > ctx.best_size:
            return
    ctx.chosen[depth] = i
    _walk(ctx, i + 1, fv + ctx.v[i], fr + ctx.r[i], fd + ctx.d[i],
          cost + ctx.c[i], depth + 1)
    _walk(ctx, i + 1, fv, fr, fd, cost, depth)


def min_cost_subset(dv, dr, dd, vcpus, ram, disk, costs):
    """See ``_victims_py.min_cost_subset`` for the full contract."""
    cdef int n = len(costs)
    cdef Ctx ctx
    cdef int i
    cdef object result_idx
    if n == 0:
        if dv <= 0 and dr <= 0 and dd <= 0:
            return (), 0.0
        return None
    ctx.n = n
    ctx.dv = dv
    ctx.dr = dr
    ctx.dd = dd
    ctx.v = <long *> malloc(n * sizeof(long))
    ctx.r = <long *> malloc(n * sizeof(long))
    ctx.d = <long *> malloc(n * sizeof(long))
    ctx.sv = <long *> malloc((n + 1) * sizeof(long))
    ctx.sr = <long *> malloc((n + 1) * sizeof(long))
    ctx.sd = <long *> malloc((n + 1) * sizeof(long))
    ctx.c = <double *> malloc(n * sizeof(double))
    ctx.best_idx = <int *> malloc(n * sizeof(int))
    ctx.chosen = <int *> malloc(n * sizeof(int))
    try:
        if (ctx.v == NULL or ctx.r == NULL or ctx.d == NULL
                or ctx.sv == NULL or ctx.sr == NULL or ctx.sd == NULL
                or ctx.c == NULL or ctx.best_idx == NULL
                or ctx.chosen == NULL):
            raise MemoryError
        for i in range(n):
            ctx.v[i] = vcpus[i]
            ctx.r[i] = ram[i]
            ctx.d[i] = disk[i]
            ctx.c[i] = costs[i]
        ctx.sv[n] = 0
        ctx.sr[n] = 0
        ctx.sd[n] = 0
        for i in range(n - 1, -1, -1):
            ctx.sv[i] = ctx.sv[i + 1] + ctx.v[i]
            ctx.sr[i] = ctx.sr[i + 1] + ctx.r[i]
            ctx.sd[i] = ctx.sd[i + 1] + ctx.d[i]
        if ctx.sv[0] < ctx.dv or ctx.sr[0] < ctx.dr or ctx.sd[0] < ctx.dd:
            return None
        ctx.have_best = 0
        ctx.best_cost = 0.0
        ctx.best_size = 0
        _walk(&ctx, 0, 0, 0, 0, 0.0, 0)
        if not ctx.have_best:
            return None
        result_idx = tuple(ctx.best_idx[i] for i in range(ctx.best_size))
        return result_idx, ctx.best_cost
    finally:
        free(ctx.v)
        free(ctx.r)
        free(ctx.d)
        free(ctx.sv)
        free(ctx.sr)
        free(ctx.sd)
        free(ctx.c)
        free(ctx.best_idx)
        free(ctx.chosen)
