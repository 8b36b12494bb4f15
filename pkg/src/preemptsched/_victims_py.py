"""Exhaustive search for the cheapest set of instances to terminate.

Pure-Python twin of the compiled module ``_victims_c``.  Both expose the
same ``min_cost_subset`` contract and must agree on every input,
including float cost totals, which is why both accumulate costs in
ascending index order.  Callers keep the candidate list sorted by
instance id, so comparing index tuples is the same as comparing id
tuples.
"""

__all__ = ["min_cost_subset"]


def min_cost_subset(dv, dr, dd, vcpus, ram, disk, costs):
    """Cheapest subset of items whose freed resources cover the deficit.

    dv, dr, dd: outstanding vcpu, ram and disk deficits, non-negative.
    vcpus, ram, disk, costs: parallel per-item sequences; costs must be
    non-negative or the branch pruning below is unsound.

    Returns ``(indices, total_cost)`` with indices ascending, or ``None``
    when taking every item still leaves some deficit uncovered.  Ties
    resolve to the lower cost, then the smaller subset, then the
    lexicographically smallest index tuple.
    """
    n = len(costs)
    # suffix totals, so a branch can tell whether the remaining items
    # could ever cover what is still missing
    sv = [0] * (n + 1)
    sr = [0] * (n + 1)
    sd = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        sv[i] = sv[i + 1] + vcpus[i]
        sr[i] = sr[i + 1] + ram[i]
        sd[i] = sd[i + 1] + disk[i]
    if sv[0] < dv or sr[0] < dr or sd[0] < dd:
        return None

    best = None  # (cost, size, indices)

    def walk(i, fv, fr, fd, cost, chosen):
        nonlocal best
        if fv >= dv and fr >= dr and fd >= dd:
            key = (cost, len(chosen), tuple(chosen))
            if best is None or key < best:
                best = key
            # growing a feasible set only raises its cost or its size
            return
        if i == n:
            return
        if fv + sv[i] < dv or fr + sr[i] < dr or fd + sd[i] < dd:
            return
        if best is not None:
            if cost > best[0]:
                return
            if cost == best[0] and len(chosen) + 1 > best[1]:
                return
        chosen.append(i)
        walk(i + 1, fv + vcpus[i], fr + ram[i], fd + disk[i],
             cost + costs[i], chosen)
        chosen.pop()
        walk(i + 1, fv, fr, fd, cost, chosen)

    walk(0, 0, 0, 0, 0.0, [])
    if best is None:
        return None
    return best[2], best[0]
