"""Command-line tool for both machine roles.

Isolated machine: ``init``, ``encrypt``, ``decrypt``, ``erase``.
Connected machine: ``courier`` (relays ciphertext without keys) and
``inspect`` (shows exactly what an observer learns from a symbol).

Exit codes: 0 success, 1 authentication/corruption failure (including
replays), 2 usage error, 3 state or file I/O failure. The passphrase is
prompted without echo per operation and never stored; QRYPT0_PASSPHRASE
overrides the prompt for scripting and tests, which is insecure because
environment variables leak. QRYPT0_STATE_DIR relocates the counter
files.
"""

from __future__ import annotations

import argparse
import getpass
import os
import secrets
import stat
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import channel as channel_mod
from . import crypto, qr
from .envelope import Envelope, Profile
from .errors import (
    BadMagic,
    CorruptionError,
    EmptyPassphrase,
    IoFailure,
    NotARegularFile,
    Qrypt0Error,
    StorageError,
    UnsupportedVersion,
    UsageError,
)
from .image import read_pbm, write_pbm

EXIT_OK = 0
EXIT_CORRUPT = 1
EXIT_USAGE = 2
EXIT_STORAGE = 3


def _state_dir(args) -> Path:
    if args.state_dir:
        return Path(args.state_dir)
    return channel_mod.default_state_dir()


def _get_passphrase(channel_id: str) -> str:
    passphrase = os.environ.get("QRYPT0_PASSPHRASE")
    if passphrase is None:
        passphrase = getpass.getpass(f"passphrase for channel {channel_id!r}: ")
    if not passphrase:
        raise EmptyPassphrase("passphrase must not be empty")
    return passphrase


def _require_initialized(state_dir: Path, channel_id: str) -> Path:
    path = channel_mod.state_path(state_dir, channel_id)
    if not path.exists():
        raise UsageError(
            f"channel {channel_id!r} is not initialized; run: "
            f"qrypt0 init --channel {channel_id}"
        )
    return path


def _format_timestamp(ts: int) -> str:
    stamp = datetime.fromtimestamp(ts, timezone.utc).strftime("%Y-%m-%d %H:%M:%S UTC")
    age = int(time.time()) - ts
    if age >= 0:
        return f"{stamp} ({age}s ago)"
    return f"{stamp} ({-age}s in the future)"


# --- commands ---------------------------------------------------------------

def cmd_init(args) -> int:
    crypto.validate_channel_id(args.channel)
    profile = Profile[args.profile.upper()]
    record = channel_mod.create_channel(_state_dir(args), args.channel, profile)
    path = channel_mod.state_path(_state_dir(args), args.channel)
    print(f"channel {args.channel!r} initialized ({record.config.profile.name})")
    print(f"state file: {path}")
    print("share the passphrase with the other party out of band; it is never stored")
    return EXIT_OK


def cmd_encrypt(args) -> int:
    state_dir = _state_dir(args)
    path = _require_initialized(state_dir, args.channel)

    if args.in_path:
        try:
            body = Path(args.in_path).read_bytes()
        except OSError as exc:
            raise IoFailure(f"cannot read {args.in_path}: {exc}") from exc
    else:
        body = sys.stdin.buffer.read()

    with channel_mod.channel_lock(state_dir, args.channel):
        record = channel_mod.load_state(path, args.channel)
        profile = record.config.profile
        if len(body) > profile.max_body:
            raise UsageError(
                f"message is {len(body)} bytes; profile {profile.name} "
                f"allows at most {profile.max_body}"
            )
        keys = crypto.derive_keys(_get_passphrase(args.channel), args.channel)
        number = channel_mod.allocate_send_number(record, path)
        env = Envelope(number, int(time.time()), body, profile)
        frame = crypto.seal(env, keys)
        symbol = qr.qr_encode(frame, qr.EcLevel.L)
        write_pbm(qr.render(symbol), args.out_path)

    print(f"number: {number}")
    print(f"frame bytes: {len(frame)}")
    print(f"symbol: version {symbol.version}, {symbol.side}x{symbol.side} modules")
    print(f"wrote: {args.out_path}")
    return EXIT_OK


def cmd_decrypt(args) -> int:
    state_dir = _state_dir(args)
    path = _require_initialized(state_dir, args.channel)

    frame = qr.qr_decode(read_pbm(args.in_path))
    with channel_mod.channel_lock(state_dir, args.channel):
        record = channel_mod.load_state(path, args.channel)
        keys = crypto.derive_keys(_get_passphrase(args.channel), args.channel)
        env = crypto.open_frame(frame, keys, record.config.profile)
        outcome = channel_mod.register_received(record, env.msg_number, path)

    if isinstance(outcome, channel_mod.Replay):
        print(
            f"replay: message {outcome.msg_number} was already received; "
            "refusing to show it again",
            file=sys.stderr,
        )
        return EXIT_CORRUPT

    print(f"number: {env.msg_number}")
    print(f"timestamp: {_format_timestamp(env.timestamp)}")
    if outcome.gaps:
        missing = ", ".join(str(g) for g in outcome.gaps)
        print(f"warning: messages not yet received: {missing}")
    print(f"body ({len(env.body)} bytes):")
    sys.stdout.flush()
    sys.stdout.buffer.write(env.body + b"\n")
    sys.stdout.buffer.flush()
    return EXIT_OK


def cmd_courier(args) -> int:
    src = Path(args.in_path)
    dst = Path(args.out_path)
    if src.resolve() == dst.resolve():
        raise UsageError(
            "courier output must be a new file name, never the input "
            "(file names must not travel with the ciphertext)"
        )
    frame = qr.qr_decode(read_pbm(src))
    if len(frame) < 4 or frame[:2] != crypto.MAGIC:
        raise BadMagic("input symbol does not carry a qrypt0 frame")
    if frame[2] != crypto.WIRE_VERSION:
        raise UnsupportedVersion(f"unsupported wire version 0x{frame[2]:02x}")
    symbol = qr.qr_encode(frame, qr.EcLevel.L)
    write_pbm(qr.render(symbol), dst)
    print(f"relayed frame: {len(frame)} bytes")
    print(f"wrote: {dst}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    frame = qr.qr_decode(read_pbm(args.in_path))
    symbol = qr.locate_symbol(read_pbm(args.in_path))
    side = symbol.shape[0]
    version = (side - 17) // 4
    print(f"symbol: version {version}, {side}x{side} modules")
    print(f"frame bytes: {len(frame)}")
    if len(frame) < 4 or frame[:2] != crypto.MAGIC:
        print("not a qrypt0 frame")
        return EXIT_OK
    print('magic: ok ("Q0")')
    version_ok = frame[2] == crypto.WIRE_VERSION
    suite_ok = frame[3] == crypto.SUITE_AES256CTR_HMACSHA256
    print(f"wire version: {frame[2]} ({'supported' if version_ok else 'unsupported'})")
    print(f"suite: {frame[3]} ({'supported' if suite_ok else 'unsupported'})")
    print("nothing else is visible without the channel keys")
    return EXIT_OK


def cmd_erase(args) -> int:
    path = Path(args.path)
    try:
        info = os.lstat(path)
    except OSError as exc:
        raise IoFailure(f"cannot stat {path}: {exc}") from exc
    import stat

    if not stat.S_ISREG(info.st_mode):
        raise NotARegularFile(f"{path} is not a regular file")

    size = info.st_size
    try:
        with open(path, "r+b") as fh:
            for pattern in (b"\x00", None):
                fh.seek(0)
                remaining = size
                while remaining > 0:
                    chunk = min(remaining, 1 << 16)
                    fh.write(pattern * chunk if pattern else secrets.token_bytes(chunk))
                    remaining -= chunk
                fh.flush()
                os.fsync(fh.fileno())
            fh.seek(0)
            fh.truncate(0)
            fh.flush()
            os.fsync(fh.fileno())
        scrambled = path.with_name(secrets.token_hex(8))
        os.rename(path, scrambled)
        os.unlink(scrambled)
    except OSError as exc:
        raise IoFailure(f"erase of {path} failed: {exc}") from exc

    print(f"erased: {path}")
    print(
        "caveat: journaling and flash-translation layers may retain older "
        "copies of the data; physical destruction is the only certain erase"
    )
    return EXIT_OK


# --- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrypt0",
        description="exchange encrypted messages with an isolated machine "
        "through QR symbols",
    )
    parser.add_argument(
        "--state-dir",
        default=None,
        help="channel state directory (default: QRYPT0_STATE_DIR or "
        "~/.local/state/qrypt0)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a channel's counter state")
    p.add_argument("--channel", required=True, help="channel id shared by both parties")
    p.add_argument("--profile", choices=("full", "compact"), default="full",
                   help="frame size class (compact halves capacity for weak scanners)")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("encrypt", help="seal a message into a QR symbol")
    p.add_argument("--channel", required=True)
    p.add_argument("--in", dest="in_path", default=None,
                   help="message file (default: stdin)")
    p.add_argument("--out", dest="out_path", required=True, help="output PBM file")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="open a received QR symbol")
    p.add_argument("--channel", required=True)
    p.add_argument("--in", dest="in_path", required=True, help="input PBM file")
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("courier", help="relay ciphertext to a fresh symbol (no key)")
    p.add_argument("--in", dest="in_path", required=True, help="input PBM file")
    p.add_argument("--out", dest="out_path", required=True,
                   help="output PBM file (must be a new name)")
    p.set_defaults(func=cmd_courier)

    p = sub.add_parser("inspect", help="show what an observer sees in a symbol")
    p.add_argument("--in", dest="in_path", required=True, help="input PBM file")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("erase", help="overwrite and remove a plaintext file")
    p.add_argument("path", help="file to erase")
    p.set_defaults(func=cmd_erase)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorruptionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except StorageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STORAGE
    except Qrypt0Error as exc:  # safety net; concrete classes map above
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CORRUPT


if __name__ == "__main__":
    sys.exit(main())
