"""OpEntropy: generalized operator relative entropy H(A,B) = tr[φ(A) − φ(B) − φ′(B)(A−B)]."""

from app.version import VERSION

__all__ = ["VERSION"]
