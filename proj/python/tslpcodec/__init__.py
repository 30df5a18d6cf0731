"""Grammar-based compression and universal coding of binary trees."""

from fractions import Fraction

try:
    from ._tslpcodec import *  # noqa: F401,F403
    from . import _tslpcodec as _core
except ImportError:  # running against a build tree on PYTHONPATH
    from _tslpcodec import *  # noqa: F401,F403
    import _tslpcodec as _core


def prob_fraction(source, tree):
    """Exact tree probability as a fractions.Fraction."""
    return Fraction(_core.prob(source, tree))


__all__ = [name for name in dir(_core) if not name.startswith("_")] + [
    "prob_fraction"
]
