"""Two-party protocol plumbing: classical channel, parties, traces, wire demo.

The in-process pieces are pure values. A ``ClassicalChannel`` is an
ordered, lossless, exactly-once queue of two-bit messages from Alice to
Bob; sending or receiving returns a new channel. A ``ProtocolTrace`` is
the replayable record of one protocol run: with the same protocol,
parameters, and seed, the emitted JSON-lines bytes are identical.

The wire demo runs the same protocols between two processes over a TCP
socket with an ASCII line protocol:

    HELLO v1 <seed>     handshake; the server echoes it back verbatim
    CC <b1><b0>         teleportation's two classical bits
    QUBIT-SENT          superdense coding's qubit-transfer marker
    DONE <verdict>      final verdict, sent by both sides and compared
    ERR <reason>        rejection, connection closes

Only classical bits ever cross the wire: both ends rebuild the full
quantum state deterministically from the shared seed, so the marker
lines stand in for the quantum channel.
"""

from __future__ import annotations

import json
import socket
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, TextIO

from .statevec import ValidationError

WIRE_VERSION = "v1"

SEED_ENV_VAR = "ICL_QPROTO_SEED"


class ChannelEmptyError(RuntimeError):
    """Receive on an empty channel would block; the protocols are turn-based."""


class TraceWriteError(OSError):
    """A trace sink could not be written."""


class HandshakeError(RuntimeError):
    """The wire peers disagree on protocol version or handshake shape."""


class TransportError(RuntimeError):
    """The wire connection failed or closed mid-protocol."""


@dataclass(frozen=True)
class Message2:
    """Two classical bits (b1, b0)."""

    b1: int
    b0: int

    def __post_init__(self):
        if self.b1 not in (0, 1) or self.b0 not in (0, 1):
            raise ValidationError(f"bits must be 0 or 1, got ({self.b1}, {self.b0})")

    @property
    def bits(self) -> tuple[int, int]:
        return (self.b1, self.b0)

    @classmethod
    def from_string(cls, text: str) -> "Message2":
        if len(text) != 2 or any(c not in "01" for c in text):
            raise ValidationError(f"expected two bits like '10', got {text!r}")
        return cls(int(text[0]), int(text[1]))

    def __str__(self) -> str:
        return f"{self.b1}{self.b0}"


@dataclass(frozen=True)
class ClassicalChannel:
    """FIFO, lossless, exactly-once queue of ``Message2`` from Alice to Bob."""

    queue: tuple[Message2, ...] = ()


def channel_send(channel: ClassicalChannel, bits: Message2) -> ClassicalChannel:
    """Append a message; returns the new channel state."""
    return ClassicalChannel(channel.queue + (bits,))


def channel_recv(channel: ClassicalChannel) -> tuple[Message2, ClassicalChannel]:
    """Pop the head message; empty channels raise instead of blocking."""
    if not channel.queue:
        raise ChannelEmptyError("receive on empty channel would block")
    return channel.queue[0], ClassicalChannel(channel.queue[1:])


@dataclass(frozen=True)
class Party:
    """One protocol participant: a name, held qubit indexes, a script stage."""

    name: str
    held_qubits: frozenset[int]
    stage: int = 0

    def advance(self, stage: int) -> "Party":
        """Move to a later script stage; stages only ever increase."""
        if stage <= self.stage:
            raise ValidationError(
                f"{self.name} cannot move from stage {self.stage} back to {stage}"
            )
        return Party(self.name, self.held_qubits, stage)

    def holds(self, qubit: int) -> bool:
        return qubit in self.held_qubits


def transfer_qubit(sender: Party, receiver: Party, qubit: int) -> tuple[Party, Party]:
    """Move a qubit between parties; each qubit is held by exactly one party."""
    if not sender.holds(qubit):
        raise ValidationError(f"{sender.name} does not hold qubit {qubit}")
    if receiver.holds(qubit):
        raise ValidationError(f"{receiver.name} already holds qubit {qubit}")
    return (
        Party(sender.name, sender.held_qubits - {qubit}, sender.stage),
        Party(receiver.name, receiver.held_qubits | {qubit}, receiver.stage),
    )


@dataclass(frozen=True)
class TraceEvent:
    step: int
    actor: str
    action: str
    payload: dict[str, Any]

    def to_json_line(self) -> str:
        record = {
            "step": self.step,
            "actor": self.actor,
            "action": self.action,
            "payload": self.payload,
        }
        return json.dumps(record, separators=(",", ":"))


@dataclass(frozen=True)
class ProtocolTrace:
    """Ordered event log of one protocol run, replayable from its seed."""

    protocol: str
    seed: int | None
    events: tuple[TraceEvent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for i, event in enumerate(self.events, start=1):
            if event.step != i:
                raise ValidationError(
                    f"trace steps must run 1..{len(self.events)}; "
                    f"event {i} carries step {event.step}"
                )

    @property
    def verdict(self) -> dict[str, Any]:
        """Payload of the final verdict event."""
        if not self.events or self.events[-1].action != "verdict":
            raise ValidationError("trace is not finalized: no verdict event")
        return self.events[-1].payload

    def header_line(self) -> str:
        return json.dumps(
            {"protocol": self.protocol, "seed": self.seed}, separators=(",", ":")
        )

    def lines(self) -> Iterable[str]:
        yield self.header_line()
        for event in self.events:
            yield event.to_json_line()


def emit_trace(trace: ProtocolTrace, sink: "str | Path | TextIO | None" = None) -> None:
    """Write a finalized trace as JSON lines: one header, one line per event."""
    trace.verdict  # rejects unfinalized traces
    text = "".join(line + "\n" for line in trace.lines())
    if sink is None:
        sys.stdout.write(text)
        return
    if isinstance(sink, (str, Path)):
        try:
            with open(sink, "w", encoding="ascii") as fh:
                fh.write(text)
        except OSError as exc:
            raise TraceWriteError(f"cannot write trace to {sink}: {exc}") from exc
        return
    sink.write(text)


def _count(trace: ProtocolTrace, action: str) -> int:
    return sum(1 for e in trace.events if e.action == action)


def validate_trace(trace: ProtocolTrace) -> None:
    """Check the resource ledger of a finished run.

    Teleportation must consume exactly one shared pair and two classical
    bits and reconstruct exactly one qubit (a fidelity verdict);
    superdense coding must consume one shared pair and one qubit
    transfer and end in a decoded message.
    """
    verdict = trace.verdict
    if _count(trace, "share-bell-pair") != 1:
        raise ValidationError("trace must consume exactly one shared Bell pair")
    if trace.protocol == "teleport":
        sends = [e for e in trace.events if e.action == "send-bits"]
        if len(sends) != 1:
            raise ValidationError("teleportation sends exactly one classical message")
        bits = sends[0].payload.get("bits", "")
        if len(bits) != 2 or any(c not in "01" for c in bits):
            raise ValidationError(f"classical message must be two bits, got {bits!r}")
        if "fidelity" not in verdict:
            raise ValidationError("teleportation verdict must record a fidelity")
    elif trace.protocol == "superdense":
        if _count(trace, "send-qubit") != 1:
            raise ValidationError("superdense coding sends exactly one qubit")
        if "decoded" not in verdict:
            raise ValidationError("superdense verdict must record the decoded message")
    else:
        raise ValidationError(f"unknown protocol {trace.protocol!r}")


# --- wire demo -------------------------------------------------------------


def _send_line(wire, line: str) -> None:
    wire.write(line + "\n")
    wire.flush()


def _recv_line(wire) -> str:
    line = wire.readline()
    if line == "":
        raise TransportError("connection closed by peer")
    return line.rstrip("\n")


def _mirror_run(
    protocol: str,
    seed: int,
    input_qubit,
    message,
    force_outcome,
) -> tuple[ProtocolTrace, str, str]:
    """Run the protocol in-process; return (trace, payload line, verdict string)."""
    if protocol == "teleport":
        from .teleport import run_teleportation

        trace = run_teleportation(input_qubit, seed, force_outcome=force_outcome)
        bits = next(e.payload["bits"] for e in trace.events if e.action == "send-bits")
        return trace, f"CC {bits}", f"fidelity={trace.verdict['fidelity']!r}"
    if protocol == "superdense":
        from .superdense import run_superdense

        trace = run_superdense(message)
        return trace, "QUBIT-SENT", f"decoded={trace.verdict['decoded']}"
    raise ValidationError(f"unknown protocol {protocol!r}")


def _alice_session(wire, protocol, seed, input_qubit, message, force_outcome) -> str:
    hello = f"HELLO {WIRE_VERSION} {seed}"
    _send_line(wire, hello)
    echo = _recv_line(wire)
    if echo != hello:
        raise HandshakeError(f"peer rejected handshake: {echo!r}")
    _, payload_line, verdict = _mirror_run(
        protocol, seed, input_qubit, message, force_outcome
    )
    _send_line(wire, payload_line)
    _send_line(wire, f"DONE {verdict}")
    peer = _recv_line(wire)
    if peer != f"DONE {verdict}":
        raise ValidationError(f"verdicts disagree: sent {verdict!r}, peer said {peer!r}")
    return verdict


def _bob_session(wire, protocol, input_qubit, message, force_outcome) -> str:
    hello = _recv_line(wire)
    parts = hello.split()
    if len(parts) != 3 or parts[0] != "HELLO":
        _send_line(wire, "ERR malformed-handshake")
        raise HandshakeError(f"malformed handshake line: {hello!r}")
    if parts[1] != WIRE_VERSION:
        _send_line(wire, f"ERR unsupported-version {parts[1]}")
        raise HandshakeError(f"unsupported wire version {parts[1]!r}")
    try:
        seed = int(parts[2])
    except ValueError:
        _send_line(wire, "ERR malformed-seed")
        raise HandshakeError(f"malformed seed in handshake: {parts[2]!r}") from None
    _send_line(wire, hello)
    _, payload_line, verdict = _mirror_run(
        protocol, seed, input_qubit, message, force_outcome
    )
    got = _recv_line(wire)
    if got != payload_line:
        raise ValidationError(
            f"channel payload diverged: got {got!r}, expected {payload_line!r}"
        )
    peer_done = _recv_line(wire)
    if peer_done != f"DONE {verdict}":
        raise ValidationError(
            f"verdicts disagree: computed {verdict!r}, peer said {peer_done!r}"
        )
    _send_line(wire, f"DONE {verdict}")
    return verdict


def run_wire_demo(
    role: str,
    host: str,
    port: int,
    protocol: str,
    *,
    seed: int | None = None,
    input_qubit=None,
    message=None,
    force_outcome=None,
    ready_callback: Callable[[int], None] | None = None,
    verdict_callback: Callable[[str], None] | None = None,
    timeout: float = 10.0,
) -> int:
    """Run one side of the two-process demo; returns 0 on matching verdicts.

    Alice connects and drives the handshake (her seed is authoritative);
    Bob listens, adopts the seed, and mirrors the run. ``ready_callback``
    receives Bob's bound port once listening, which lets callers bind
    port 0. ``verdict_callback`` receives the agreed verdict string.
    """
    if role not in ("alice", "bob"):
        raise ValidationError(f"role must be 'alice' or 'bob', got {role!r}")
    if protocol == "teleport" and input_qubit is None:
        raise ValidationError("teleport demo needs an input qubit")
    if protocol == "superdense" and message is None:
        raise ValidationError("superdense demo needs a message")

    if role == "alice":
        try:
            sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise TransportError(f"cannot connect to {host}:{port}: {exc}") from exc
        with sock:
            sock.settimeout(timeout)
            with sock.makefile("rw", encoding="ascii", newline="\n") as wire:
                try:
                    verdict = _alice_session(
                        wire, protocol, seed if seed is not None else 0,
                        input_qubit, message, force_outcome,
                    )
                except OSError as exc:
                    raise TransportError(f"wire failure: {exc}") from exc
    else:
        try:
            listener = socket.create_server((host, port))
        except OSError as exc:
            raise TransportError(f"cannot listen on {host}:{port}: {exc}") from exc
        with listener:
            listener.settimeout(timeout)
            if ready_callback is not None:
                ready_callback(listener.getsockname()[1])
            try:
                conn, _ = listener.accept()
            except OSError as exc:
                raise TransportError(f"no peer connected: {exc}") from exc
            with conn:
                conn.settimeout(timeout)
                with conn.makefile("rw", encoding="ascii", newline="\n") as wire:
                    try:
                        verdict = _bob_session(
                            wire, protocol, input_qubit, message, force_outcome
                        )
                    except OSError as exc:
                        raise TransportError(f"wire failure: {exc}") from exc

    if verdict_callback is not None:
        verdict_callback(verdict)
    return 0
