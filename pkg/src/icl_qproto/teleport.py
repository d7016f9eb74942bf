"""Quantum teleportation over a shared phi+ pair.

Alice holds the input qubit U and half A of the pair; Bob holds B. The
joint state U (x) phi+ expands over the Bell basis of (U, A) with
coefficient 1/2 on every branch, leaving Bob a fixed unitary image of
the input on each branch:

    branch   Bob's conditional state      correction Bob applies
    phi+     (alpha, beta)                identity
    phi-     sigma_z (alpha, beta)        sigma_z
    psi+     sigma_x (alpha, beta)        sigma_x
    psi-     sigma_x sigma_z (alpha,beta) sigma_z sigma_x

Alice Bell-measures (U, A), sends the two outcome bits over the
classical channel, and Bob's table lookup restores the input exactly
(the psi- branch closes up to a global sign, which a state cannot
carry observably).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .harness import (
    ClassicalChannel,
    Message2,
    Party,
    ProtocolTrace,
    TraceEvent,
    channel_recv,
    channel_send,
)
from .phasespace import BELL_ORDER, BellState, bell_projectors
from .statevec import (
    ATOL,
    IDENTITY2,
    SIGMA_X,
    SIGMA_Z,
    DimensionError,
    RandomSource,
    StateVector,
    ValidationError,
    branch_probabilities,
    measure_projective,
    overlap,
    single_qubit,
    tensor,
)


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    m.setflags(write=False)
    return m


# Bob's conditional state on each branch is this matrix applied to (alpha, beta).
CONDITIONAL_MATRICES = {
    BellState.PHI_PLUS: IDENTITY2,
    BellState.PHI_MINUS: SIGMA_Z,
    BellState.PSI_PLUS: SIGMA_X,
    BellState.PSI_MINUS: _frozen(SIGMA_X @ SIGMA_Z),
}

CORRECTIONS = {
    BellState.PHI_PLUS: IDENTITY2,
    BellState.PHI_MINUS: SIGMA_Z,
    BellState.PSI_PLUS: SIGMA_X,
    BellState.PSI_MINUS: _frozen(SIGMA_Z @ SIGMA_X),
}

CORRECTION_NAMES = {
    BellState.PHI_PLUS: "identity",
    BellState.PHI_MINUS: "sigma_z",
    BellState.PSI_PLUS: "sigma_x",
    BellState.PSI_MINUS: "sigma_z*sigma_x",
}

# Bell projectors on (U, A) extended with identity on B.
_UA_PROJECTORS = tuple(_frozen(np.kron(p, IDENTITY2)) for p in bell_projectors())


@dataclass(frozen=True)
class InputQubit:
    """The qubit to teleport: alpha|0> + beta|1>, normalized."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        sumsq = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if not np.isfinite(sumsq) or abs(sumsq - 1.0) > ATOL:
            raise ValidationError(f"input qubit is not normalized: |a|^2+|b|^2 = {sumsq!r}")

    @property
    def pair(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    def state(self) -> StateVector:
        return single_qubit(self.alpha, self.beta)


@dataclass(frozen=True)
class BellOutcome:
    """A Bell-measurement result and its fixed two-bit encoding."""

    tag: BellState

    @property
    def bits(self) -> tuple[int, int]:
        return self.tag.bits

    @property
    def bit_string(self) -> str:
        b1, b0 = self.bits
        return f"{b1}{b0}"

    def message(self) -> Message2:
        return Message2(*self.bits)


@dataclass(frozen=True)
class TeleportEntry:
    bell: BellState
    conditional_bob: StateVector
    correction: np.ndarray
    coefficient: float = 0.5


@dataclass(frozen=True)
class TeleportDecomposition:
    """The four (branch, conditional Bob state, correction) triples."""

    entries: tuple[TeleportEntry, TeleportEntry, TeleportEntry, TeleportEntry]

    def __getitem__(self, tag: BellState) -> TeleportEntry:
        for entry in self.entries:
            if entry.bell is tag:
                return entry
        raise KeyError(tag)

    def reconstruct(self) -> StateVector:
        """Re-sum the branches; equals the joint input state U (x) phi+."""
        total = sum(
            e.coefficient * np.kron(e.bell.vector().amps, e.conditional_bob.amps)
            for e in self.entries
        )
        return StateVector(3, total)


def decompose(u: InputQubit) -> TeleportDecomposition:
    """Expand U (x) phi+ over the Bell basis of (U, A)."""
    entries = tuple(
        TeleportEntry(
            tag,
            StateVector(1, CONDITIONAL_MATRICES[tag] @ u.pair),
            CORRECTIONS[tag],
        )
        for tag in BELL_ORDER
    )
    return TeleportDecomposition(entries)  # type: ignore[arg-type]


def correction_for(outcome: "BellOutcome | BellState") -> np.ndarray:
    """Bob's correction unitary for a Bell outcome."""
    tag = outcome.tag if isinstance(outcome, BellOutcome) else outcome
    return CORRECTIONS[tag]


def _bell_measure_full(
    state: StateVector,
    rand: RandomSource | None,
    forced: BellState | None,
) -> tuple[BellOutcome, StateVector, float]:
    if state.qubit_count != 3:
        raise DimensionError("Bell measurement expects the 3-qubit joint state (U, A, B)")
    if forced is not None:
        k = BELL_ORDER.index(forced)
        prob = float(branch_probabilities(state, _UA_PROJECTORS)[k])
        if prob <= ATOL:
            raise ValidationError(f"cannot force outcome {forced}: branch probability {prob!r}")
        collapsed = StateVector(3, (_UA_PROJECTORS[k] @ state.amps) / np.sqrt(prob))
        return BellOutcome(forced), collapsed, prob
    if rand is None:
        raise ValidationError("a RandomSource is required when no outcome is forced")
    k, collapsed, prob = measure_projective(state, _UA_PROJECTORS, rand)
    return BellOutcome(BELL_ORDER[k]), collapsed, prob


def bell_measure(
    state: StateVector,
    rand: RandomSource | None,
    forced: BellState | None = None,
) -> tuple[BellOutcome, StateVector]:
    """Measure qubits (U, A) of the joint state in the Bell basis.

    ``forced`` is a testing hook that collapses deterministically onto
    the named branch; the production path samples from ``rand``.
    """
    outcome, collapsed, _ = _bell_measure_full(state, rand, forced)
    return outcome, collapsed


def extract_bob_state(collapsed: StateVector, tag: BellState) -> StateVector:
    """Bob's qubit after the (U, A) register collapsed onto ``tag``."""
    if collapsed.qubit_count != 3:
        raise DimensionError("expected the collapsed 3-qubit state")
    amps = tag.vector().amps.conj() @ collapsed.amps.reshape(4, 2)
    norm = np.linalg.norm(amps)
    if norm <= ATOL:
        raise ValidationError(f"collapsed state carries no {tag} component")
    return StateVector(1, amps / norm)


def run_teleportation(
    u: InputQubit,
    seed: int,
    force_outcome: BellState | None = None,
) -> ProtocolTrace:
    """Execute the full protocol and return its six-event trace.

    The trace records, in order: the shared-pair creation, Alice
    attaching the input, her Bell measurement, the two classical bits
    crossing the channel, Bob's correction, and the final fidelity.
    """
    rand = RandomSource(seed)
    alice = Party("alice", frozenset({1, 2}))
    bob = Party("bob", frozenset({3}))
    channel = ClassicalChannel()

    resource = BellState.PHI_PLUS.vector()
    joint = tensor(u.state(), resource)
    alice = alice.advance(1)

    outcome, collapsed, prob = _bell_measure_full(joint, rand, force_outcome)
    alice = alice.advance(2)

    channel = channel_send(channel, outcome.message())
    alice = alice.advance(3)

    received, channel = channel_recv(channel)
    received_tag = BellState.from_bits(received.b1, received.b0)
    bob_before = extract_bob_state(collapsed, received_tag)
    bob_after = StateVector(1, CORRECTIONS[received_tag] @ bob_before.amps)
    bob = bob.advance(1)

    fidelity = abs(overlap(u.state(), bob_after)) ** 2
    bob = bob.advance(2)

    events = (
        TraceEvent(1, "system", "share-bell-pair",
                   {"pair": "phi+", "state": resource.to_json()}),
        TraceEvent(2, "alice", "attach-input",
                   {"input": u.state().to_json(), "state": joint.to_json()}),
        TraceEvent(3, "alice", "bell-measurement",
                   {"outcome": outcome.tag.value, "bits": outcome.bit_string,
                    "probability": prob}),
        TraceEvent(4, "alice", "send-bits", {"bits": str(received)}),
        TraceEvent(5, "bob", "apply-correction",
                   {"correction": CORRECTION_NAMES[received_tag],
                    "before": bob_before.to_json(), "state": bob_after.to_json()}),
        TraceEvent(6, "bob", "verdict", {"fidelity": fidelity}),
    )
    return ProtocolTrace("teleport", seed, events)
