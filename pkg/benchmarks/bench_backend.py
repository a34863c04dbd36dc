"""Compare the modexp backends (gmpy2 vs builtin pow) on raw exponentiation and a full EABEHP pipeline.

    python3 benchmarks/bench_backend.py [--group default] [--repeat 200] [--attrs 32]
"""

import argparse
import random
import time

from ecsvc import eabehp as E
from ecsvc.group import available_backends, exp, named_group, random_element, random_scalar, use_backend


def bench_exp(params, repeat, rng):
    bases = [random_element(params, rng) for _ in range(repeat)]
    exps = [random_scalar(params, rng) for _ in range(repeat)]
    t0 = time.perf_counter()
    for b, e in zip(bases, exps):
        exp(b, e, params)
    return (time.perf_counter() - t0) / repeat


def bench_pipeline(params, n, rng):
    mk = E.setup(params, n, rng)
    attrs = E.AttributeSet.of(range(1, n // 2 + 1), n)
    uk = E.keygen(mk, 1, attrs, rng)
    policy = E.Policy([1] + [0] * (n - 1))
    omega = random_scalar(params, rng)
    M = random_element(params, rng)
    t0 = time.perf_counter()
    sc = E.shuffle(E.encrypt(mk.mpk, policy, omega, M, rng), omega)
    t1 = time.perf_counter()
    sc2 = E.transform_ciphertext(sc, mk.tk, params)
    t2 = time.perf_counter()
    i_hat = E.inverse_permute_attrs(attrs, omega, n)
    pd = E.proxy_decrypt1(E.extract(sc2, i_hat, params), E.transform_user_key(omega, uk, params), uk.rk, mk.tk,
                          params)
    t3 = time.perf_counter()
    out = E.proxy_decrypt2(pd, attrs, i_hat, params)
    t4 = time.perf_counter()
    assert out == M
    return t1 - t0, t2 - t1, t3 - t2, t4 - t3


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--group", default="default")
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--attrs", type=int, default=32)
    args = ap.parse_args()
    params = named_group(args.group)
    print(f"group {args.group}: p {params.p.bit_length()} bits, q {params.q.bit_length()} bits, N={args.attrs}")
    print(f"{'backend':8} {'exp (us)':>10} {'enc+shuf':>10} {'transform':>10} {'extr+pd1':>10} {'pd2':>10}  (ms)")
    for name in available_backends():
        use_backend(name)
        rng = random.Random(7)
        per_exp = bench_exp(params, args.repeat, rng)
        stages = bench_pipeline(params, args.attrs, rng)
        print(f"{name:8} {per_exp * 1e6:10.1f} " + " ".join(f"{s * 1e3:10.2f}" for s in stages))


if __name__ == "__main__":
    main()
