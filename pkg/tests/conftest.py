import random
from fractions import Fraction

import pytest

from saubasis.stepfn import OrthoFamily, StepFn


def rand_dyadic_stepfn(rng: random.Random, denom: int = 16, max_cells: int = 5,
                       val_num: int = 8, val_den: int = 4) -> StepFn:
    """Random step function with breakpoints on the 1/denom grid and values
    p/val_den, p in [-val_num, val_num]."""
    k = rng.randint(1, max_cells - 1)
    bps = sorted(rng.sample(range(1, denom), min(k, denom - 1)))
    vals = [Fraction(rng.randint(-val_num, val_num), val_den) for _ in range(len(bps) + 1)]
    return StepFn.make(
        [Fraction(0)] + [Fraction(b, denom) for b in bps] + [Fraction(1)], vals
    )


def rand_sign_fn(rng: random.Random, denom: int = 16) -> StepFn:
    """Random +-1-valued step function on the 1/denom grid."""
    k = rng.randint(1, 5)
    bps = sorted(rng.sample(range(1, denom), min(k, denom - 1)))
    vals = [rng.choice([-1, 1]) for _ in range(len(bps) + 1)]
    return StepFn.make(
        [Fraction(0)] + [Fraction(b, denom) for b in bps] + [Fraction(1)], vals
    )


def rand_mean_zero_sign_fn(rng: random.Random, denom: int = 8) -> StepFn:
    """+-1-valued with trace exactly 0: a pattern on [0,1/2) mirrored with
    opposite sign on [1/2,1)."""
    half = rand_sign_fn(rng, denom)
    bps = [Fraction(b, 2) for b in half.breakpoints]
    bps += [Fraction(1, 2) + Fraction(b, 2) for b in half.breakpoints[1:]]
    vals = list(half.values) + [-v for v in half.values]
    return StepFn.make(bps, vals)


@pytest.fixture(scope="session")
def walsh8() -> OrthoFamily:
    """8-member exactly orthonormal family of sign-valued unitaries,
    grown by the stage driver."""
    from saubasis.basis import run_stages

    fam = run_stages(55).family
    assert len(fam) >= 8
    return fam
