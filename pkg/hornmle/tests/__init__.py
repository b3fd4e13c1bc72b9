import json
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent.parent / 'data'


def data_path(name: str) -> str:
    return str(DATA_DIR / name)


def load_data(name: str):
    with open(DATA_DIR / name, encoding='utf-8') as f:
        return json.load(f)


def random_positive_point(rng, n, numerators=50, denominators=20):
    """n positive rationals with small numerators and denominators."""
    from fractions import Fraction
    return [Fraction(int(rng.integers(1, numerators + 1)), int(rng.integers(1, denominators + 1))) for _ in range(n)]
