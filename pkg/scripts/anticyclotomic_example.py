"""Weight patterns of characters of Gal(Q_{p^2}/Q_p) = Z/2.

A character with weights (a_0, a_1) acts on K = Q_{p^2} through
x -> a_0 x + a_1 sigma(x). The cyclotomic pattern (a, a) is a multiple of
the trace and only reaches the line Q_p. The anticyclotomic patterns
(a, 0) and (0, a) are bijective on K.

Run from the repository root:
    python scripts/anticyclotomic_example.py --max-weight 3
"""
import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))

from normlift.weights import WeightClass, WeightVector, circulant_det, classify_weights  # noqa: E402

MEANING = {
    WeightClass.ZERO_MAP: "zero map",
    WeightClass.TRACE_LINE: "image is Q_p (a multiple of the trace)",
    WeightClass.BIJECTIVE: "image is all of K",
}


def main():
    parser = argparse.ArgumentParser(description="Classify the weight patterns of characters of Gal(Q_{p^2}/Q_p).")
    parser.add_argument('--max-weight', type=int, default=3, help="Largest weight a to try.")
    args, unknown = parser.parse_known_args()

    if args.max_weight < 1:
        print("Error: --max-weight must be at least 1.", file=sys.stderr)
        sys.exit(2)

    print("--- Weight patterns over Q_{p^2} ---")
    for a in range(1, args.max_weight + 1):
        for pattern in ((a, 0), (0, a), (a, a)):
            w = WeightVector.of(pattern)
            cls = classify_weights(w)
            print(f"{pattern}: det {circulant_det(w):>4}  {cls.value:<10} {MEANING[cls]}")


if __name__ == "__main__":
    main()
