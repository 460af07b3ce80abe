"""Generators, relations and surviving classes of H(vect(n); Omega) for n = 1, 2."""
import argparse
import json
import time

from gfcoh.gf_classes import phi_on_slice, realize, scalar_ratio, verify_ring_presentation, wronskian_cocycle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2])
    args = ap.parse_args()
    for n in args.n:
        t = time.perf_counter()
        rep = verify_ring_presentation(n)
        print(f"== n={n} ({time.perf_counter() - t:.1f}s) ok={rep.ok}")
        print(json.dumps(rep.to_dict(), indent=2, sort_keys=True, default=str))
    r = scalar_ratio(phi_on_slice(realize("a1*t1", 1), 3), wronskian_cocycle())
    print(f"Phi(a1*t1) / Wronskian = {r}")


if __name__ == "__main__":
    main()
