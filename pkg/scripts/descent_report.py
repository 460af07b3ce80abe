"""Descent of Phi(class) on C^n, its delta integrand and the local-functional checks.

The three-dimensional case (a2*t2 on C^3) is slow and only runs with --enable-3d.
"""
import argparse
import time

from gfcoh.gf_classes import parse_class, phi_on_slice, realize
from gfcoh import local_descent as ld

CASES = [(1, "a1*t1"), (2, "a1*t2"), (2, "a1*t1^2")]


def report(n, cls, inputs):
    t = time.perf_counter()
    expr = parse_class(cls)
    p, q = expr.bidegree()
    sol = ld.descent_solution(phi_on_slice(realize(expr, n), p + q), check_closed=n < 3)
    print(f"== {cls} on C^{n}")
    for (i, j) in sorted(sol.components):
        print(f"  phi^{i},{j}: {len(sol.component(i, j))} terms")
    print(f"  polynomial descent equations: {ld.verify_descent_polynomial(sol).holds}")
    if inputs and n == 1:
        cert = ld.verify_descent_inputs(sol, jet_bound=3, margin=1)
        print(f"  input-level check: holds={cert.holds} inputs={cert.inputs_checked} "
              f"stabilized={cert.stabilized}")
    L = ld.delta_integrand(sol)
    print(f"  integrand terms: {len(L)}; trivial mod divergence: {ld.is_total_divergence(n, L)}")
    print(f"  d_T(integrand) is a divergence: {ld.is_total_divergence(n, ld.density_coboundary(n, L))}")
    kind = ld.reference_density_kind(expr, n)
    if kind:
        r = ld.equivalent_mod_divergence(n, L, ld.reference_density(n, kind))
        print(f"  integrand = {r} * [{kind}] mod divergence")
    print(f"  ({time.perf_counter() - t:.1f}s)")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--inputs", action="store_true", help="also run the input-level check for n=1")
    ap.add_argument("--enable-3d", action="store_true")
    args = ap.parse_args()
    cases = CASES + ([(3, "a2*t2")] if args.enable_3d else [])
    for n, cls in cases:
        report(n, cls, args.inputs)


if __name__ == "__main__":
    main()
