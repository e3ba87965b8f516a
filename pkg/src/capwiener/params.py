"""Exponent bookkeeping for the absorption problem ``u_t - Δu + u^q = 0``."""

from __future__ import annotations

from dataclasses import dataclass, field


class InvalidParameterError(ValueError):
    """Raised when an input violates a documented precondition."""


@dataclass(frozen=True)
class Params:
    """Dimension and absorption exponent with every derived exponent.

    Attributes
    ----------
    N : int
        Spatial dimension.
    q : float
        Absorption exponent, ``q > 1``.
    q_crit : float
        ``(N + 2) / N``; isolated singularities are removable for ``q >= q_crit``.
    q_conj : float
        Conjugate exponent ``q / (q - 1)``; the capacity power ``p``.
    cap_order : float
        Bessel order ``2 / q``.
    supercritical : bool
        ``q >= q_crit``.
    """

    N: int
    q: float
    q_crit: float = field(init=False)
    q_conj: float = field(init=False)
    cap_order: float = field(init=False)
    supercritical: bool = field(init=False)

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise InvalidParameterError(f"N must be a positive integer, got {self.N!r}")
        q = float(self.q)
        if not q > 1.0:
            raise InvalidParameterError(f"q must exceed 1, got {self.q!r}")
        N = int(self.N)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "q_crit", (N + 2) / N)
        object.__setattr__(self, "q_conj", q / (q - 1.0))
        object.__setattr__(self, "cap_order", 2.0 / q)
        # compare q*N >= N+2 to avoid the rounding in (N+2)/N
        object.__setattr__(self, "supercritical", q * N >= N + 2)

    @property
    def cap_power(self) -> float:
        return self.q_conj

    @property
    def decay_exponent(self) -> float:
        """``1 / (q - 1)``, the exponent of the flat solution ``((q-1)t)^(-1/(q-1))``."""
        return 1.0 / (self.q - 1.0)

    @property
    def slice_exponent(self) -> float:
        """``N/2 - 1/(q-1)``, the power of ``(n+1)`` weighting each slice."""
        return self.N / 2.0 - 1.0 / (self.q - 1.0)

    def flat_solution(self, t):
        """Spatially constant solution issued from infinite data, ``((q-1)t)^(-1/(q-1))``."""
        return ((self.q - 1.0) * t) ** (-self.decay_exponent)

    def to_dict(self) -> dict:
        return {"N": self.N, "q": self.q}

    @classmethod
    def from_dict(cls, d: dict) -> "Params":
        try:
            return cls(d["N"], d["q"])
        except KeyError as exc:
            raise InvalidParameterError(f"params missing field {exc.args[0]!r}") from None


def make_params(N: int, q: float) -> Params:
    return Params(N, q)
