"""Per-channel counters: monotonic send numbers, replay and gap tracking.

Message numbers prove to the receiver that nothing was lost (gaps) and
that nothing is being fed to it twice (replay). Counters live in one
small text file per channel; updates are atomic (write-temp, fsync,
rename) and a send number is persisted *before* the frame leaves the
machine, so a crash can burn a number but never reuse one.

A malformed state file is a hard error: silently resetting counters
would reopen the replay window.

State file layout (UTF-8, one item per line)::

    qrypt0-state-v1
    channel=<id>
    profile=FULL|COMPACT
    next_send=<u64>
    highest_received=<u64>
    gaps=<comma-separated u64 list, may be empty>
"""

from __future__ import annotations

import fcntl
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from .crypto import validate_channel_id
from .envelope import Profile
from .errors import AlreadyExists, CorruptState, StateIoFailure

STATE_MAGIC = "qrypt0-state-v1"
_U64_MAX = 2**64 - 1


@dataclass
class ChannelConfig:
    """Identity shared by both parties; must match the KDF input."""

    channel_id: str
    profile: Profile = Profile.FULL
    created_at: int = 0  # known only for records created in this process


@dataclass
class ChannelState:
    """Counters; next_send starts at 1, highest_received at 0."""

    next_send: int = 1
    highest_received: int = 0
    received_gaps: set[int] = field(default_factory=set)


@dataclass
class ChannelRecord:
    """Config plus counters, the unit that is loaded and stored."""

    config: ChannelConfig
    state: ChannelState = field(default_factory=ChannelState)


@dataclass(frozen=True)
class Accept:
    """Message accepted; ``gaps`` lists numbers newly detected as missing."""

    gaps: tuple[int, ...] = ()


@dataclass(frozen=True)
class Replay:
    """Message number was already accepted once; reject it."""

    msg_number: int


def default_state_dir() -> Path:
    """QRYPT0_STATE_DIR, else $XDG_STATE_HOME/qrypt0, else ~/.local/state/qrypt0."""
    override = os.environ.get("QRYPT0_STATE_DIR")
    if override:
        return Path(override)
    xdg = os.environ.get("XDG_STATE_HOME")
    base = Path(xdg) if xdg else Path.home() / ".local" / "state"
    return base / "qrypt0"


def state_path(state_dir: Path, channel_id: str) -> Path:
    validate_channel_id(channel_id)
    return Path(state_dir) / f"{channel_id}.state"


def fresh_record(channel_id: str, profile: Profile = Profile.FULL) -> ChannelRecord:
    config = ChannelConfig(channel_id, profile, created_at=int(time.time()))
    return ChannelRecord(config=config)


def load_state(path, channel_id: str) -> ChannelRecord:
    """Load a channel record; a missing file yields a fresh record.

    Any malformed content raises CorruptState instead of falling back
    to fresh counters.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        return fresh_record(channel_id)
    except OSError as exc:
        raise StateIoFailure(f"cannot read {path}: {exc}") from exc

    lines = text.splitlines()
    if len(lines) != 6 or lines[0] != STATE_MAGIC:
        raise CorruptState(f"{path}: not a {STATE_MAGIC} file")
    fields = {}
    for line, key in zip(lines[1:], ("channel", "profile", "next_send",
                                     "highest_received", "gaps")):
        name, sep, value = line.partition("=")
        if name != key or not sep:
            raise CorruptState(f"{path}: expected '{key}=', found {line!r}")
        fields[key] = value

    if fields["channel"] != channel_id:
        raise CorruptState(
            f"{path}: file belongs to channel {fields['channel']!r}, "
            f"not {channel_id!r}"
        )
    try:
        profile = Profile[fields["profile"]]
    except KeyError:
        raise CorruptState(f"{path}: unknown profile {fields['profile']!r}") from None

    def parse_u64(key: str, value: str) -> int:
        if not value.isdigit():
            raise CorruptState(f"{path}: {key} is not an unsigned integer")
        n = int(value)
        if n > _U64_MAX:
            raise CorruptState(f"{path}: {key} exceeds 64 bits")
        return n

    next_send = parse_u64("next_send", fields["next_send"])
    highest = parse_u64("highest_received", fields["highest_received"])
    gaps = set()
    if fields["gaps"]:
        gaps = {parse_u64("gaps", g) for g in fields["gaps"].split(",")}
    if next_send < 1:
        raise CorruptState(f"{path}: next_send must be at least 1")
    if any(not 1 <= g < highest for g in gaps):
        raise CorruptState(f"{path}: gap entry outside [1, highest_received)")

    return ChannelRecord(
        config=ChannelConfig(channel_id, profile),
        state=ChannelState(next_send, highest, gaps),
    )


def store_state(path, record: ChannelRecord) -> None:
    """Atomically replace the state file (temp file, fsync, rename)."""
    path = Path(path)
    state = record.state
    gaps = ",".join(str(g) for g in sorted(state.received_gaps))
    text = (
        f"{STATE_MAGIC}\n"
        f"channel={record.config.channel_id}\n"
        f"profile={record.config.profile.name}\n"
        f"next_send={state.next_send}\n"
        f"highest_received={state.highest_received}\n"
        f"gaps={gaps}\n"
    )
    tmp = path.with_name(path.name + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd = os.open(tmp, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
        try:
            os.write(fd, text.encode("utf-8"))
            os.fsync(fd)
        finally:
            os.close(fd)
        os.replace(tmp, path)
    except OSError as exc:
        raise StateIoFailure(f"cannot write {path}: {exc}") from exc


def create_channel(state_dir, channel_id: str,
                   profile: Profile = Profile.FULL) -> ChannelRecord:
    """Initialize a channel; refuses if its state file already exists."""
    path = state_path(state_dir, channel_id)
    if path.exists():
        raise AlreadyExists(f"channel {channel_id!r} already initialized at {path}")
    record = fresh_record(channel_id, profile)
    store_state(path, record)
    return record


@contextmanager
def channel_lock(state_dir, channel_id: str):
    """Advisory exclusive lock serializing load-mutate-store sequences."""
    lock_path = state_path(state_dir, channel_id).with_suffix(".lock")
    try:
        lock_path.parent.mkdir(parents=True, exist_ok=True)
        fd = os.open(lock_path, os.O_WRONLY | os.O_CREAT, 0o600)
    except OSError as exc:
        raise StateIoFailure(f"cannot open lock {lock_path}: {exc}") from exc
    try:
        fcntl.flock(fd, fcntl.LOCK_EX)
        yield
    finally:
        fcntl.flock(fd, fcntl.LOCK_UN)
        os.close(fd)


def allocate_send_number(record: ChannelRecord, path) -> int:
    """Return the next send number, persisting the increment first.

    The caller must hold the channel lock. Persist-before-release means
    a crash after this call burns the number instead of reusing it.
    """
    number = record.state.next_send
    if number >= _U64_MAX:  # keep the stored successor within 64 bits
        raise StateIoFailure("send counter exhausted")
    record.state.next_send = number + 1
    store_state(path, record)
    return number


def register_received(record: ChannelRecord, msg_number: int, path) -> Accept | Replay:
    """Classify an authenticated message number and persist the outcome.

    Numbers above the highest seen are accepted and any skipped range
    is recorded as gaps; numbers filling a known gap are accepted late;
    everything else is a replay. Only call with numbers from frames
    whose MAC already verified.
    """
    state = record.state
    if msg_number > state.highest_received:
        new_gaps = tuple(range(state.highest_received + 1, msg_number))
        state.received_gaps.update(new_gaps)
        state.highest_received = msg_number
        store_state(path, record)
        return Accept(gaps=new_gaps)
    if msg_number in state.received_gaps:
        state.received_gaps.discard(msg_number)
        store_state(path, record)
        return Accept(gaps=())
    return Replay(msg_number)
