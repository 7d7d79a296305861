"""Message logs and per-phase operation counts for protocol runs."""

import json
from dataclasses import dataclass, field

from .field import digest

PHASES = ("offline-noise", "sharing", "exchange", "answer")


@dataclass(frozen=True)
class Message:
    phase: str
    sender: str
    recipient: str
    symbols: int
    digest: str


@dataclass
class TraceReport:
    """Everything one simulated run produced, in a canonically serializable form."""

    scheme: str
    meta: dict
    messages: list = field(default_factory=list)
    decode_ok: bool = None
    op_counts: dict = field(default_factory=dict)

    def log(self, phase, sender, recipient, payload):
        """Record one delivery; symbol count and digest come from the payload."""
        if phase not in PHASES:
            raise ValueError(f"unknown phase {phase!r}")
        mats = [payload] if not isinstance(payload, (list, tuple)) else list(payload)
        symbols = sum(m.data.size for m in mats)
        self.messages.append(Message(phase, sender, recipient, symbols, digest(mats)))

    def phase_messages(self, phase):
        return [m for m in self.messages if m.phase == phase]

    def symbols(self, phase=None, sender=None):
        total = 0
        for m in self.messages:
            if phase is not None and m.phase != phase:
                continue
            if sender is not None and m.sender != sender:
                continue
            total += m.symbols
        return total

    def to_dict(self):
        return {
            "scheme": self.scheme,
            "meta": self.meta,
            "messages": [
                {
                    "phase": m.phase,
                    "from": m.sender,
                    "to": m.recipient,
                    "symbols": m.symbols,
                    "digest": m.digest,
                }
                for m in self.messages
            ],
            "decode_ok": self.decode_ok,
            "op_counts": self.op_counts,
        }

    def to_json(self):
        """Canonical JSON; equal runs serialize to equal bytes."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
