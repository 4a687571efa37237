"""Closure dimension and certificate depth for the sqrt-primes chain, n = 2..N."""
import argparse
import time

from larckit.lie import larc_check, thm2_certificate, thm2_hypotheses, word_depth
from larckit.models import make_thm2_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=8)
    args = ap.parse_args()
    print("n  closure  n^2  verdict  max_depth  max_error  seconds")
    for n in range(2, args.max_n + 1):
        start = time.perf_counter()
        sys_ = make_thm2_model(n)
        assert thm2_hypotheses(sys_)["all"]
        rep = larc_check(sys_)
        cert = thm2_certificate(sys_)
        depth = max(word_depth(e.word) for e in cert)
        err = max(e.error for e in cert)
        print(f"{n:<2} {rep.closure_dim:>7} {n * n:>4}  {rep.verdict.value:<7} {depth:>9}  {err:9.2e}"
              f"  {time.perf_counter() - start:7.3f}")


if __name__ == "__main__":
    main()
