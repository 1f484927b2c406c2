"""Two-party public-channel protocol: authenticate, sift, order.

All messages share one wire format:

    DNAOTP/1 <msg-type> <party> <pad-id> <count>
    <ACGT line> x count
    <hex sha256 digest of everything above>

Message types: ``announce`` (index announcement), ``ordering`` (the
explicit random ordering O_r of the sifted intersection) and ``errseq``
(error-estimation sequences in O_r order).  Messages carry only index
and error-estimation material, never payload.
"""

from __future__ import annotations

import hashlib
import io
import struct
from dataclasses import dataclass, field

import numpy as np

from . import seq

WIRE_MAGIC = "DNAOTP/1"
INDEX_SPACE_BITS = 60            # 4^30 index space
DEFAULT_TAU = 0.5
MSG_TYPES = ("announce", "ordering", "errseq")


class ProtocolError(Exception):
    pass


def _canonical(msg_type: str, party: str, pad_id: str, seqs) -> bytes:
    if msg_type not in MSG_TYPES:
        raise ProtocolError(f"unknown message type {msg_type!r}")
    for name in (party, pad_id):
        if not name or any(c.isspace() for c in name):
            raise ProtocolError("party/pad ids must be non-empty, no spaces")
    head = f"{WIRE_MAGIC} {msg_type} {party} {pad_id} {len(seqs)}\n"
    return head.encode("ascii") + "".join(s + "\n" for s in seqs).encode("ascii")


def _digest(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


@dataclass
class Message:
    msg_type: str
    party: str
    pad_id: str
    seqs: list

    def __post_init__(self):
        for s in self.seqs:
            if not s or set(s) - set("ACGT"):
                raise ProtocolError(f"non-ACGT sequence line {s!r}")

    @property
    def digest(self) -> str:
        return _digest(_canonical(self.msg_type, self.party,
                                  self.pad_id, self.seqs))

    def to_bytes(self) -> bytes:
        body = _canonical(self.msg_type, self.party, self.pad_id, self.seqs)
        return body + (self.digest + "\n").encode("ascii")

    @classmethod
    def from_bytes(cls, data: bytes) -> "Message":
        text = data.decode("ascii")
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise ProtocolError("empty message")
        head = lines[0].split(" ")
        if len(head) != 5 or head[0] != WIRE_MAGIC:
            raise ProtocolError(f"bad header {lines[0]!r}")
        _, msg_type, party, pad_id, count = head
        count = int(count)
        if len(lines) != count + 2:
            raise ProtocolError("line count mismatch")
        seqs = lines[1:1 + count]
        msg = cls(msg_type, party, pad_id, seqs)
        if msg.digest != lines[-1]:
            raise ProtocolError("digest mismatch (corrupted message)")
        return msg

    def write(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def read(cls, path) -> "Message":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def IndexAnnouncement(party: str, pad_id: str, indices) -> Message:
    indices = list(indices)
    if len(set(indices)) != len(indices):
        raise ProtocolError("announced indices must be unique")
    return Message("announce", party, pad_id, indices)


def OrderingMessage(party: str, pad_id: str, ordered_indices) -> Message:
    ordered = list(ordered_indices)
    if len(set(ordered)) != len(ordered):
        raise ProtocolError("ordering contains duplicate indices")
    return Message("ordering", party, pad_id, ordered)


# ---------------------------------------------------------------------------
# stream transport: length-prefixed frames over a reliable byte stream

def send_frame(stream, msg: Message) -> None:
    data = msg.to_bytes()
    stream.write(struct.pack(">I", len(data)))
    stream.write(data)


def recv_frame(stream) -> Message:
    head = stream.read(4)
    if len(head) != 4:
        raise ProtocolError("truncated frame header")
    (n,) = struct.unpack(">I", head)
    data = stream.read(n)
    if len(data) != n:
        raise ProtocolError("truncated frame body")
    return Message.from_bytes(data)


# ---------------------------------------------------------------------------
# protocol operations

@dataclass
class AuthResult:
    accept: bool
    overlap: int
    overlap_fraction: float
    expected_random_overlap: float
    threshold: float


def authenticate(local_indices, remote: Message,
                 tau: float = DEFAULT_TAU) -> AuthResult:
    """Accept iff the overlap fraction of the remote announcement >= tau.

    ``expected_random_overlap`` = |A|*|B| / 4^30 is the number of exact
    matches an imposter announcing uniformly random indices would
    produce in expectation; with tau >> that bound the false-accept
    probability is negligible.
    """
    if remote.msg_type != "announce":
        raise ProtocolError("authenticate expects an announce message")
    local = set(local_indices)
    if not local or not remote.seqs:
        raise ProtocolError("empty index set")
    overlap = len(local.intersection(remote.seqs))
    frac = overlap / len(remote.seqs)
    expected = len(local) * len(remote.seqs) / float(2 ** INDEX_SPACE_BITS)
    return AuthResult(frac >= tau, overlap, frac, expected, tau)


def sift(local_indices, remote: Message, party: str, pad_id: str,
         seed: int) -> Message:
    """Intersect index sets and emit an explicit random ordering O_r."""
    if remote.msg_type != "announce":
        raise ProtocolError("sift expects an announce message")
    local = list(local_indices)
    if len(set(local)) != len(local):
        raise ProtocolError("duplicate index in local set")
    if len(set(remote.seqs)) != len(remote.seqs):
        raise ProtocolError("duplicate index in remote announcement")
    inter = sorted(set(local).intersection(remote.seqs))
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(inter))
    ordered = [inter[i] for i in order]
    return OrderingMessage(party, pad_id, ordered)


def apply_ordering(local_indices, local_payloads: np.ndarray,
                   ordering: Message) -> np.ndarray:
    """Local payload rows rearranged into O_r order.

    A missing or duplicate index signals desynchronization and raises.
    """
    if ordering.msg_type != "ordering":
        raise ProtocolError("apply_ordering expects an ordering message")
    local_indices = list(local_indices)
    pos = {}
    for i, idx in enumerate(local_indices):
        if idx in pos:
            raise ProtocolError(f"duplicate local index {idx}")
        pos[idx] = i
    if len(set(ordering.seqs)) != len(ordering.seqs):
        raise ProtocolError("ordering contains duplicates")
    rows = np.empty(len(ordering.seqs), dtype=np.int64)
    for j, idx in enumerate(ordering.seqs):
        if idx not in pos:
            raise ProtocolError(f"ordering references unknown index {idx}")
        rows[j] = pos[idx]
    return np.asarray(local_payloads)[rows]


def indices_of(keys, template) -> list:
    """Index sequences (strings) of a consensus key table."""
    mat = keys.block_view(template, template.index_block_range)
    return [seq.decode(row) for row in mat]
