"""Straight-line Python transliterations of the three factoring listings.

Used only as an independent check on the interpreter: no parser, no DSL, the
repeat-until loop is a real loop. Each function returns what a run of the
matching corpus program should record for one received assignment.
"""


def _search(n):
    """The repeat-until trial-division block; returns (p, iterations)."""
    p, iterations = 1, 0
    while True:
        p += 1
        iterations += 1
        if n % p == 0 or p * p > n:
            return p, iterations


def _record(outputs, sends, looped, loop, extra_labels=()):
    counts = {"JUMP": int(looped), "LOOP": loop, "DONE": int(looped), "FINAL": 1}
    counts.update({label: 1 for label in extra_labels})
    return {"outputs": outputs, "sends": sends, "label_counts": counts}


def brun1(n, tt):
    p = tt
    looped, loop = False, 0
    if not (p > 1 and n % p == 0):
        looped = True
        p, loop = _search(n)
        if p * p > n:
            p = n
    return _record([p], {"tt": [p]}, looped, loop)


def brun2(n, tt):
    p = tt
    looped, loop = False, 0
    if p == n or not (p > 1 and n % p == 0):
        looped = True
        p, loop = _search(n)
        if p * p > n:
            p = n
    return _record([p], {"tt": [p]}, looped, loop)


def brun3(n, tt, flag):
    p, f = tt, flag
    flag_sends = []
    looped, loop = False, 0
    if (p == n and f == 0) or not (p > 1 and n % p == 0):
        looped = True
        p, loop = _search(n)
        if p * p > n:
            p = n
            flag_sends.append(1)
    tt_sends = [p]
    if p == n:
        flag_sends.append(1)
    return _record([p], {"tt": tt_sends, "flag": flag_sends}, looped, loop, ("SHOW",))


ALGORITHMS = {"brun1": brun1, "brun2": brun2, "brun3": brun3}


def trace(program, n, received):
    if program == "brun3":
        return brun3(n, received["tt"], received["flag"])
    return ALGORITHMS[program](n, received["tt"])


def fixed_points(program, n):
    """Brute-force fixed points straight from the transliterations."""
    tts = [-1] + list(range(1, n + 1))
    flags = [0, 1] if program == "brun3" else [None]
    found = set()
    for flag in flags:
        for tt in tts:
            received = {"tt": tt} if flag is None else {"tt": tt, "flag": flag}
            rec = trace(program, n, received)
            ok = all(
                (rec["sends"][r] and rec["sends"][r][-1] == v)
                or (not rec["sends"][r] and v == {"tt": -1, "flag": 0}[r])
                for r, v in received.items()
            )
            if ok:
                found.add(tuple(sorted(received.items())))
    return found
