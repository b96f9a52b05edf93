"""How close does the bundled Sidon search get for (Z/2)^k -> Z/N?

Prints the graph energy reached next to the Sidon value 2n^2 - n.

    python3 scripts/sidon_search.py --k 2..8 --N 1009 --moves 3000
"""
import argparse
import time

from charbound import lab, maps
from charbound.additive import graph_energy


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", default="2..8")
    ap.add_argument("--N", type=int, default=1009)
    ap.add_argument("--moves", type=int, default=3000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = lab.SweepConfig(experiment="corollary1", k=lab.parse_value("k", args.k), N=args.N,
                          sidon_moves=args.moves, seed=args.seed).validate()
    for idx, k in enumerate(cfg.k):
        t0 = time.perf_counter()
        graph, verified = lab.corollary1_map(cfg, k, idx)
        n = 2**k
        print(f"k={k}  energy {graph_energy(graph)}  sidon {maps.sidon_energy(n)}  "
              f"verified {verified}  {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
