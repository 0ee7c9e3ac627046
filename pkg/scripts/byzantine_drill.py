#!/usr/bin/env python3
"""Robustness drill: retrievals against adversarial servers.

Runs trials at (q=16, m=2, s=2, d=14), where nu = 4 servers may answer
arbitrarily, sweeping the number of corrupted servers from 0 to nu+1 and
each corruption mode.  Up to nu the retrievals must all come back
correct; beyond nu, failures are expected but silent wrong answers are
counted separately (and should stay at zero).
"""

import argparse
import random
from collections import Counter

from multipir.field import make_field
from multipir.mpoly import random_poly
from multipir.multcode import encode, make_params
from multipir.pir import ByzantineMode, preprocess, retrieve_record
from multipir.transport import InProcessTransport, ShareServer


def drill(params, mode, n_bad, trials, rng):
    outcomes = Counter()
    for trial in range(trials):
        F = random_poly(params.field, params.m, params.d, rng)
        cw = encode(params, F)
        shares = preprocess(params, F)
        bad = set(rng.sample(range(params.q), n_bad))
        transport = InProcessTransport([
            ShareServer(sh, mode if sh.index in bad else ByzantineMode.HONEST, seed=trial)
            for sh in shares
        ])
        j = rng.randrange(params.n)
        try:
            got, _ = retrieve_record(params, transport, j, rng)
        except ValueError:
            outcomes["failure"] += 1
            continue
        outcomes["correct" if got == cw.symbols[j] else "WRONG"] += 1
    return outcomes


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    params = make_params(make_field(2, 4), 2, 2, 14)
    rng = random.Random(args.seed)
    print(f"nu = {params.nu} of {params.q} servers may lie\n")
    for mode in (ByzantineMode.GARBAGE, ByzantineMode.FIXED, ByzantineMode.BITFLIP):
        for n_bad in (0, params.nu, params.nu + 1):
            outcomes = drill(params, mode, n_bad, args.trials, rng)
            print(f"{mode.value:>8} x{n_bad}: {dict(outcomes)}")


if __name__ == "__main__":
    main()
