"""Physical constants entering the model prefactors.

All values are plain numbers in whatever unit system the caller adopts;
nothing in the core fixes a convention.  The dimensionless defaults
(everything 1) make the physical rates coincide with the geometric
functional values.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ModelParams:
    """Constants for the collapse and hybrid models.

    g_newton : gravitational constant G
    hbar : reduced Planck constant
    m0 : reference mass (conventionally the proton mass)
    gamma_csl : localization rate constant of the continuous model
    total_mass : total mass M of the system under consideration
    grw_rates / masses : per-particle localization rates and masses,
        combined as sum(rate_j / mass_j) in the discrete-model prefactor
    """

    g_newton: float = 1.0
    hbar: float = 1.0
    m0: float = 1.0
    gamma_csl: float = 1.0
    total_mass: float = 1.0
    grw_rates: tuple[float, ...] = (1.0,)
    masses: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "grw_rates", tuple(float(x) for x in self.grw_rates))
        object.__setattr__(self, "masses", tuple(float(x) for x in self.masses))
        for name in ("g_newton", "hbar", "m0", "gamma_csl", "total_mass"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if len(self.grw_rates) != len(self.masses):
            raise ValueError("grw_rates and masses must have equal length")
        if any(x <= 0 for x in self.grw_rates) or any(x <= 0 for x in self.masses):
            raise ValueError("per-particle rates and masses must be strictly positive")

    @property
    def grw_rate_over_mass(self) -> float:
        return sum(lam / m for lam, m in zip(self.grw_rates, self.masses))
