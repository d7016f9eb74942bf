"""Inverter-chain diagrams for two-qubit entanglement.

A diagram records a chain of bit-flip (sigma_x) links between two
qubits, plus a +/-1 phase flag. Chain parity selects the sector: even
chains live on {|00>, |11>} (the phi states), odd chains on
{|01>, |10>} (the psi states). Growing the chain by one link is the
same thing as acting with sigma_x on one qubit; toggling the phase flag
is acting with sigma_z. Only the four Bell states are
diagram-representable; ``classify`` sorts arbitrary two-qubit states
into Bell / sector-confined / product / generic.

Chain length beyond its parity carries no amplitude content; it is
kept as data only (two diagrams of equal parity and phase denote the
same state however long their chains are).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .phasespace import BELL_ORDER, BellState, Sector, pair_determinant
from .statevec import (
    ATOL,
    DimensionError,
    StateVector,
    ValidationError,
    equal_up_to_global_phase,
)


@dataclass(frozen=True)
class IclDiagram:
    """A chain of ``chain_length`` inverters with a phase flag.

    The sector is redundant with the chain parity (even chain = even
    sector) and the constructor enforces that consistency.
    """

    chain_length: int
    sector: Sector
    phase: int

    def __post_init__(self):
        if self.chain_length < 0:
            raise ValidationError(f"chain_length must be >= 0, got {self.chain_length}")
        expected = Sector.EVEN if self.chain_length % 2 == 0 else Sector.ODD
        if self.sector is not expected:
            raise ValidationError(
                f"a chain of {self.chain_length} links lies in the {expected.value} "
                f"sector, not {self.sector.value}"
            )
        if self.phase not in (+1, -1):
            raise ValidationError(f"phase must be +1 or -1, got {self.phase}")

    def to_json(self) -> dict:
        return {"chain": self.chain_length, "sector": self.sector.value, "phase": self.phase}


class IclKind(Enum):
    BELL = "bell"
    SECTOR_CONFINED = "sector-confined"
    PRODUCT = "product"
    GENERIC = "generic"


@dataclass(frozen=True)
class IclClass:
    """Classification of a two-qubit state under the inverter-chain model."""

    kind: IclKind
    bell: BellState | None = None
    sector: Sector | None = None

    @classmethod
    def of_bell(cls, tag: BellState) -> "IclClass":
        return cls(IclKind.BELL, bell=tag)

    @classmethod
    def of_sector(cls, sector: Sector) -> "IclClass":
        return cls(IclKind.SECTOR_CONFINED, sector=sector)

    @classmethod
    def product(cls) -> "IclClass":
        return cls(IclKind.PRODUCT)

    @classmethod
    def generic(cls) -> "IclClass":
        return cls(IclKind.GENERIC)

    def to_json(self) -> dict:
        out: dict = {"class": self.kind.value}
        if self.bell is not None:
            out["bell"] = self.bell.value
        if self.sector is not None:
            out["sector"] = self.sector.value
        return out


def classify(state: StateVector) -> IclClass:
    """Sort a two-qubit state into Bell / sector-confined / product / generic.

    Bell matching is insensitive to a global phase. Sector confinement
    means all support lies on {|00>, |11>} or on {|01>, |10>};
    entanglement is decided by the reshaped 2x2 determinant exceeding
    the package tolerance.
    """
    if state.qubit_count != 2:
        raise DimensionError("classification is defined for two-qubit states")
    for tag in BELL_ORDER:
        if equal_up_to_global_phase(state, tag.vector()):
            return IclClass.of_bell(tag)
    support = {i for i, a in enumerate(state.amps) if abs(a) > ATOL}
    entangled = abs(pair_determinant(state)) > ATOL
    for sector in Sector:
        if support <= set(sector.basis_indexes) and entangled:
            return IclClass.of_sector(sector)
    if not entangled:
        return IclClass.product()
    return IclClass.generic()


def diagram_to_state(diagram: IclDiagram) -> StateVector:
    """Canonical Bell vector a diagram stands for (parity + phase only)."""
    return BellState.from_sector_phase(diagram.sector, diagram.phase).vector()


def extend_sigma_x(diagram: IclDiagram) -> IclDiagram:
    """Grow the chain by one inverter: parity flips, phase is untouched."""
    return IclDiagram(diagram.chain_length + 1, diagram.sector.flipped(), diagram.phase)


def apply_sigma_z(diagram: IclDiagram) -> IclDiagram:
    """Toggle the phase flag; the chain itself is untouched."""
    return IclDiagram(diagram.chain_length, diagram.sector, -diagram.phase)


def state_to_diagram(tag: BellState, chain_length_hint: int | None = None) -> IclDiagram:
    """Minimal diagram for a Bell state: 2 links for phi, 1 for psi.

    A hint overrides the length but must match the sector's parity.
    """
    minimal = 2 if tag.sector is Sector.EVEN else 1
    length = minimal if chain_length_hint is None else chain_length_hint
    if length % 2 != minimal % 2:
        raise ValidationError(
            f"chain length {length} has the wrong parity for a {tag.value} diagram"
        )
    return IclDiagram(length, tag.sector, tag.phase)
