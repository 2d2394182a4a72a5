"""Cross-check decide_rc1 against proof search and tree countermodels.

    python scripts/oracle_sweep.py --size 6 --nodes 6
"""

import argparse

from rcbench.calculus import all_formulas
from rcbench.formula import to_text
from rcbench.oracle import rc1_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=6, help="largest formula size on either side")
    ap.add_argument("--nodes", type=int, default=6, help="largest tree model")
    ap.add_argument("--atoms", default="p,q")
    args = ap.parse_args()
    atoms = tuple(args.atoms.split(","))
    print(f"{len(all_formulas(atoms, args.size))} formulas of size <= {args.size} over {atoms}")
    rep = rc1_sweep(atoms, max_size=args.size, max_nodes=args.nodes)
    print(f"sequents      {rep.sequents}")
    print(f"derivable     {rep.derivable}")
    print(f"disagreements {len(rep.disagreements)}")
    print(f"both sides    {len(rep.both)}")
    print(f"neither side  {len(rep.neither)}")
    print(f"bad proofs    {len(rep.bad_derivations)}")
    print(f"seconds       {rep.seconds:.1f}")
    for s in (rep.disagreements + rep.both + rep.neither)[:10]:
        print("  ", to_text(s))


if __name__ == "__main__":
    main()
