"""Rewrite chains from HA-provability to PA-provability of negated Sigma2 sentences.

    python scripts/chain_demo.py --count 5 --seed 1
"""

import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
import generators as gen  # noqa: E402

from rcbench.arith import text  # noqa: E402
from rcbench.rewriter import derive_chain, replay, sigma2_box_chain_endpoints  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    for _ in range(args.count):
        phi = gen.sigma2(rng)
        start, goal = sigma2_box_chain_endpoints(phi)
        tr = derive_chain(start, goal)
        print(f"# {text(phi)}: {len(tr)} steps, replay {'ok' if replay(tr) else 'FAILED'}")
        print(tr.to_text())
        print()


if __name__ == "__main__":
    main()
