"""Step counts of the trace-reduction algorithm against the a priori bound.

    python scripts/reduction_stats.py --n 5000 --hi 50
"""

import argparse
import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from charvar.charspace import Character, kappa
from charvar.reduction import Verdict, reduce


@dataclass
class Config:
    n: int = 5000
    hi: int = 20
    den: int = 8
    seed: int = 0


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, val in vars(Config()).items():
        p.add_argument(f"--{name}", type=int, default=val)
    cfg = Config(**vars(p.parse_args()))
    rng = random.Random(cfg.seed)

    steps, verdicts, slack = Counter(), Counter(), []
    done = 0
    while done < cfg.n:
        c = Character(*(Fraction(rng.randint(2 * cfg.den + 1, cfg.hi * cfg.den), cfg.den) for _ in range(3)))
        if kappa(c) <= 2:
            continue
        done += 1
        r = reduce(c)
        steps[r.steps] += 1
        verdicts[r.verdict.value if r.verdict is Verdict.FRICKE_PANTS else f"{r.verdict.value}({r.axis})"] += 1
        bound = math.ceil(float(c.x + c.y + c.z - 6) / (2 * math.sqrt(float(kappa(c)) - 2)))
        slack.append(bound - r.steps)

    print("steps histogram:", dict(sorted(steps.items())))
    print("verdicts:", dict(verdicts.most_common()))
    print(f"bound slack: min {min(slack)}, median {sorted(slack)[len(slack) // 2]}, max {max(slack)}")


if __name__ == "__main__":
    main()
