"""Hybrid quad/polygon subdivision with a tunable polygon shrinkage factor, and isogeometric analysis on it."""

__version__ = "0.1.0"

LAMBDA_MIN = 0.25
LAMBDA_MAX = 1.0


def check_lambda(lam):
    """Raise ``ValueError`` unless ``lam`` lies strictly inside (1/4, 1)."""
    lam = float(lam)
    if not (LAMBDA_MIN < lam < LAMBDA_MAX):
        raise ValueError(f"lambda must lie in the open interval (1/4, 1), got {lam}")
    return lam
