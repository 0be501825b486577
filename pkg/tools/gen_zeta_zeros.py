"""Regenerate the bundled table of Riemann zeta zero heights.

Writes one imaginary part per line, ascending, 12 decimal places.
Slow (a couple of minutes); run offline, the output is committed.
"""

import argparse
from multiprocessing import Pool

import mpmath


def height(n: int) -> str:
    mpmath.mp.dps = 20
    z = mpmath.zetazero(n)
    return mpmath.nstr(z.imag, 14, strip_zeros=False)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=1050)
    ap.add_argument("--out", default="src/factorsim/data/zeta_zeros.txt")
    ap.add_argument("--jobs", type=int, default=2)
    args = ap.parse_args()

    with Pool(args.jobs) as pool:
        heights = pool.map(height, range(1, args.count + 1))
    with open(args.out, "w") as fh:
        fh.write("\n".join(heights) + "\n")
    print(f"wrote {len(heights)} zero heights to {args.out}")


if __name__ == "__main__":
    main()
