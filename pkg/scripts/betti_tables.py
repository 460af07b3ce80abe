"""Reduced Betti numbers of vect(n) from the CE engine next to the minimal model."""
import argparse
import json
import time

from gfcoh.ce_engine import betti, gl_complex_betti
from gfcoh.xn_model import model_betti


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=2)
    ap.add_argument("--q-max", type=int, default=6)
    ap.add_argument("--out", default=None, help="write JSON here instead of stdout")
    args = ap.parse_args()

    rows = []
    for n in range(1, args.n_max + 1):
        q_max = min(args.q_max, 4 if n == 1 else args.q_max)
        t = time.perf_counter()
        eng = betti(n, q_max)
        dt = time.perf_counter() - t
        mod = model_betti(n, q_max)
        gl = gl_complex_betti(n, 0).as_list(range(0, n * n + 1))
        rows.append({
            "n": n,
            "engine": {q: eng[q] for q in range(1, q_max + 1)},
            "model": {q: mod[q] for q in range(0, q_max + 1)},
            "gl_trivial": gl,
            "seconds": round(dt, 2),
        })
        print(f"n={n}: engine {eng.as_list(range(1, q_max + 1))}  "
              f"model {[mod[q] for q in range(q_max + 1)]}  gl {gl}  ({dt:.1f}s)")
    text = json.dumps(rows, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


if __name__ == "__main__":
    main()
