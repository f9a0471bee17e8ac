"""Per-configuration transmitter/receiver setup shared by both link ends."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .analysis import msug_powers
from .config import SystemConfig
from .txchain import MessageCoder, assemble_signal, interleaver, msug_transform


@dataclass(frozen=True, eq=False)
class GroupParams:
    """Power level, interleaver and receiver noise model of one user group."""

    index: int
    coded_power: float
    pilot_power: float
    noise_level: float
    perm: np.ndarray | None


@dataclass(frozen=True, eq=False)
class Scheme:
    config: SystemConfig

    @cached_property
    def coder(self) -> MessageCoder:
        return MessageCoder(self.config)

    @cached_property
    def group_powers(self) -> np.ndarray:
        c = self.config
        if not c.uses_grouping:
            return np.array([c.coded_power])
        return msug_powers(c.G, c.coded_power, c.phi, c.users_per_group_slot, c.receive_dims,
                           c.L, c.n_p, c.noise_var, J=c.J, n_c=c.n_c)

    @cached_property
    def groups(self) -> tuple:
        """Groups in ascending power order."""
        c = self.config
        zeta = (c.J * c.phi * c.n_p + c.n_c) / c.L
        k0 = c.users_per_group_slot
        out = []
        weaker = 0.0
        for g, p in enumerate(self.group_powers):
            perm = interleaver(c.seed, g, c.L, c.identity_interleaver) if c.uses_grouping else None
            out.append(GroupParams(g, float(p), c.phi * float(p), zeta * k0 * weaker + c.noise_var, perm))
            weaker += float(p)
        return tuple(out)

    def transmitted(self, bits, group: int = 0) -> np.ndarray:
        """Samples a user with message ``bits`` in ``group`` puts on the air."""
        grp = self.groups[group]
        x = assemble_signal(self.coder.split(bits), self.coder, grp.pilot_power, grp.coded_power)
        return x if grp.perm is None else msug_transform(x, grp.perm)
