"""stashkit command line: one subcommand per pipeline stage.

Exit codes: 0 ok, 1 usage, 2 format, 3 integrity, 4 policy denied, 5 transport.
"""
import argparse
import asyncio
import sys
from typing import Optional, Sequence

import numpy as np
from loguru import logger

from stashkit import __version__
from stashkit.archive import extract_tree, list_entries, pack, pack_tree, unpack
from stashkit.bootsim import boot, dump_boot_report, parse_mode
from stashkit.config import Settings, StashkitConfig, load_config
from stashkit.errors import EXIT_OK, EXIT_USAGE, PolicyDenied, StashkitError
from stashkit.gesture import (
    bindings_from_config,
    capture_photo,
    decode_events,
    detect,
    directory_sink,
    watch,
)
from stashkit.observability.logging import configure_logging
from stashkit.schemas import (
    Camera,
    Decision,
    DeviceFlags,
    GestureConfig,
    TunnelEvent,
    TunnelSession,
    TunnelState,
)
from stashkit.stash import (
    embed,
    extract,
    load_manifest,
    locate,
    manifest_to_text,
    pick_seed,
    save_manifest,
    scan,
    scramble,
    update,
)
from stashkit.stash.keystream import MASK64
from stashkit.tether import (
    StreamTransport,
    plan_down,
    plan_up,
    ping,
    request_photo,
    serve_endpoint,
    transition,
)
from stashkit.utils.io import open_image, read_bytes, write_bytes
from stashkit.utils.timebase import clock_from_flag


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as exceptions instead of exiting 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _hex_u64(value: str) -> int:
    try:
        seed = int(value, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex number: {value!r}") from None
    if not 0 <= seed <= MASK64:
        raise argparse.ArgumentTypeError(f"seed {value} exceeds 64 bits")
    return seed


def _camera(value: str) -> Camera:
    try:
        return Camera[value.upper()]
    except KeyError:
        raise argparse.ArgumentTypeError("camera must be back or front") from None


def _signatures(args: argparse.Namespace, cfg: StashkitConfig) -> list:
    if not getattr(args, "signature", None):
        return cfg.stash.signature_list()
    pairs = []
    for item in args.signature:
        name, sep, pattern = item.partition("=")
        if not sep:
            raise UsageError(f"--signature expects name=hex, got {item!r}")
        try:
            pairs.append((name, bytes.fromhex(pattern)))
        except ValueError:
            raise UsageError(f"--signature {name}: pattern is not hex") from None
    return pairs


def _rng(args: argparse.Namespace) -> np.random.Generator:
    # --rng-seed wins; otherwise --seed makes the fill reproducible too
    seed = getattr(args, "rng_seed", None)
    if seed is None:
        seed = getattr(args, "seed", None)
    return np.random.default_rng(seed)


def _out(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


# Archive

def cmd_pack(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    entries = pack_tree(args.in_dir, mtime=args.clock)
    compress = args.gzip or args.out.endswith(".gz")
    data = pack(entries, compress=compress, gzip_level=cfg.archive.gzip_level)
    write_bytes(args.out, data)
    logger.info("wrote {} ({} entries, {} bytes)", args.out, len(entries), len(data))
    return EXIT_OK


def cmd_unpack(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    with open(args.in_file, "rb") as f:
        entries = unpack(f)
    for path in extract_tree(entries, args.out):
        _out(path + "\n")
    return EXIT_OK


def cmd_list(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    with open(args.in_file, "rb") as f:
        for entry in list_entries(f):
            _out(f"{entry.mode:06o} {entry.size:>10} {entry.name}\n")
    return EXIT_OK


# Stash

def cmd_embed(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    rng = _rng(args)
    signatures = _signatures(args, cfg)
    payload = read_bytes(args.payload)
    seed = args.seed
    if args.obfuscate and seed is None:
        seed = pick_seed(payload, rng, signatures)
    with open_image(args.image, writable=True) as image:
        manifest = embed(
            image,
            payload,
            args.obfuscate,
            seed,
            cfg.stash.nonce_len if args.nonce_len is None else args.nonce_len,
            margin=cfg.stash.safety_margin,
            indexed=args.indexed,
            rng=rng,
            clock=clock_from_flag(args.clock),
            signatures=signatures,
        )
    if args.manifest:
        save_manifest(manifest, args.manifest)
    _out(manifest_to_text(manifest))
    return EXIT_OK


def cmd_extract(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    if not args.manifest and not args.indexed:
        raise UsageError("extract needs --manifest or --indexed")
    with open_image(args.image) as image:
        manifest = load_manifest(args.manifest) if args.manifest else locate(image)
        payload = extract(image, manifest)
    if args.out:
        write_bytes(args.out, payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return EXIT_OK


def cmd_update(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    manifest = load_manifest(args.manifest)
    overlay = pack_tree(args.overlay, mtime=args.clock)
    with open_image(args.image, writable=True) as image:
        new_manifest = update(
            image,
            manifest,
            overlay,
            margin=cfg.stash.safety_margin,
            gzip_level=cfg.archive.gzip_level,
            rng=_rng(args),
            clock=clock_from_flag(args.clock),
            signatures=_signatures(args, cfg),
        )
    save_manifest(new_manifest, args.out_manifest or args.manifest)
    _out(manifest_to_text(new_manifest))
    return EXIT_OK


def cmd_scramble(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    manifest = load_manifest(args.manifest)
    with open_image(args.image, writable=True) as image:
        scramble(image, manifest, _rng(args), _signatures(args, cfg))
    return EXIT_OK


def cmd_scan(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    signatures = _signatures(args, cfg)
    with open_image(args.image) as image:
        hits = scan(image, signatures)
    for hit in hits:
        _out(f"{hit.offset} {hit.signature_name}\n")
    return EXIT_OK


# Boot simulation

def cmd_boot(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    manifest = load_manifest(args.manifest)
    boot_cfg = cfg.bootsim
    options = dict(
        entry_point=boot_cfg.entry_point if args.entry_point is None else args.entry_point,
        device_flags=DeviceFlags(**boot_cfg.device_flags.model_dump()),
        boot_log_name=boot_cfg.boot_log,
        rng=_rng(args),
        clock=clock_from_flag(args.clock),
        signatures=_signatures(args, cfg),
    )
    delay = boot_cfg.ui_gate_delay_ms if args.ui_gate_delay_ms is None else args.ui_gate_delay_ms
    try:
        with open_image(args.image, writable=True) as image:
            report = boot(image, manifest, parse_mode(args.mode), args.staging, delay, **options)
    except StashkitError as e:
        if e.report is not None:
            _emit_report(e.report, args.report)
        raise

    _emit_report(report, args.report)
    if any(event.outcome == Decision.DENIED.value for event in report.events):
        raise PolicyDenied(f"boot denied by SELinux policy in {args.mode} mode")
    return EXIT_OK


def _emit_report(report, path: Optional[str]) -> None:
    text = dump_boot_report(report)
    if path:
        write_bytes(path, text.encode("utf-8"))
    _out(text)


# Gestures

def _gesture_config(args: argparse.Namespace, cfg: StashkitConfig) -> GestureConfig:
    g = cfg.gesture
    return GestureConfig(
        axis_code=g.axis_code if args.axis is None else args.axis,
        fallback_axis_code=g.fallback_axis_code,
        threshold=g.threshold if args.threshold is None else args.threshold,
        window_ms=g.window_ms if args.window_ms is None else args.window_ms,
    )


def cmd_gestures_decode(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    for e in decode_events(read_bytes(args.in_file)):
        _out(f"{e.tv_sec}.{e.tv_usec:06d} {e.etype:#04x} {e.code:#04x} {e.value}\n")
    return EXIT_OK


def cmd_gestures_detect(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    events = decode_events(read_bytes(args.in_file))
    for g in detect(events, _gesture_config(args, cfg)):
        _out(f"{g.kind} {g.start_ms} {g.end_ms} {g.displacement:+d}\n")
    return EXIT_OK


def cmd_gestures_watch(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    bindings = bindings_from_config(cfg.gesture.bindings)
    sink = directory_sink(args.out_dir) if args.out_dir else None
    clock = clock_from_flag(args.clock)
    if args.in_file in (None, "-"):
        photos = watch(sys.stdin.buffer, _gesture_config(args, cfg), bindings, sink, clock)
    else:
        with open(args.in_file, "rb") as source:
            photos = watch(source, _gesture_config(args, cfg), bindings, sink, clock)
    _out(f"photos {photos}\n")
    return EXIT_OK


def cmd_photo(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    write_bytes(args.out, capture_photo(args.camera, clock_from_flag(args.clock)))
    return EXIT_OK


# Tether

def cmd_tether_plan_up(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    t = cfg.tether
    plan = plan_up(args.iface or t.iface, args.cidr or t.cidr, args.endpoint or t.endpoint)
    for action in plan.actions:
        _out(action.render() + "\n")
    return EXIT_OK


def cmd_tether_plan_down(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    session = TunnelSession(state=TunnelState(args.state), iface_name=args.iface or cfg.tether.iface)
    for action in plan_down(session).actions:
        _out(action.render() + "\n")
    return EXIT_OK


def cmd_tether_walk(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    session = TunnelSession(iface_name=cfg.tether.iface, remote_endpoint=cfg.tether.endpoint)
    for name in args.events:
        session = transition(session, TunnelEvent(name))
        record = session.log[-1]
        _out(f"{record.event.value} {record.before.value} {record.after.value}\n")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    clock = clock_from_flag(args.clock)
    served = asyncio.run(serve_endpoint(
        args.endpoint or cfg.tether.endpoint,
        lambda camera: capture_photo(camera, clock),
        max_frame=cfg.tether.max_frame,
        max_requests=args.max_requests,
    ))
    _out(f"served {served}\n")
    return EXIT_OK


async def _trigger(args: argparse.Namespace, cfg: StashkitConfig) -> Optional[bytes]:
    timeout_ms = args.timeout_ms or cfg.tether.timeout_ms
    transport = await StreamTransport.connect(args.endpoint or cfg.tether.endpoint, timeout_ms)
    try:
        if args.ping:
            await ping(transport, timeout_ms)
            return None
        return await request_photo(transport, args.camera, timeout_ms, cfg.tether.max_frame)
    finally:
        await transport.close()


def cmd_trigger(args: argparse.Namespace, cfg: StashkitConfig) -> int:
    image = asyncio.run(_trigger(args, cfg))
    if image is None:
        _out("pong\n")
    elif args.out:
        write_bytes(args.out, image)
    else:
        sys.stdout.buffer.write(image)
        sys.stdout.flush()
    return EXIT_OK


# Parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="YAML defaults file (env STASHKIT_CONFIG)")

    def _seeded(p: argparse.ArgumentParser,
                seed_help: str = "seed for random fill (hex u64)") -> None:
        p.add_argument("--seed", type=_hex_u64, help=seed_help)
        p.add_argument("--rng-seed", type=int,
                       help="decimal fill seed, overrides --seed for the fill")
        p.add_argument("--signature", action="append", metavar="NAME=HEX",
                       help="carving signature (repeatable; replaces the configured set)")

    parser = _Parser(prog="stashkit", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"stashkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pack", parents=[common], help="archive a directory tree")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--gzip", action="store_true", help="gzip-wrap (implied by a .gz suffix)")
    p.add_argument("--clock", type=int, help="fixed mtime for every entry")
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("unpack", parents=[common], help="extract an archive into a directory")
    p.add_argument("--in", dest="in_file", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_unpack)

    p = sub.add_parser("list", parents=[common], help="list archive members")
    p.add_argument("--in", dest="in_file", required=True)
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("embed", parents=[common], help="hide a payload at the image tail")
    p.add_argument("--image", required=True)
    p.add_argument("--payload", required=True)
    p.add_argument("--manifest", help="write the manifest here")
    p.add_argument("--obfuscate", action="store_true")
    p.add_argument("--nonce-len", type=int)
    p.add_argument("--indexed", action="store_true", help="also write the 64-byte footer")
    p.add_argument("--clock", type=int)
    _seeded(p, "keystream seed (hex u64); also seeds the nonce fill")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", parents=[common], help="recover the payload")
    p.add_argument("--image", required=True)
    p.add_argument("--manifest")
    p.add_argument("--indexed", action="store_true", help="locate the stash via its footer")
    p.add_argument("--out")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("update", parents=[common], help="overlay files onto the stashed archive")
    p.add_argument("--image", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--overlay", required=True, help="directory of replacement files")
    p.add_argument("--out-manifest")
    p.add_argument("--clock", type=int)
    _seeded(p)
    p.set_defaults(func=cmd_update)

    p = sub.add_parser("scramble", parents=[common], help="refill the nonce region")
    p.add_argument("--image", required=True)
    p.add_argument("--manifest", required=True)
    _seeded(p)
    p.set_defaults(func=cmd_scramble)

    p = sub.add_parser("scan", parents=[common], help="report carving signature hits")
    p.add_argument("--image", required=True)
    p.add_argument("--signature", action="append", metavar="NAME=HEX")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("boot", parents=[common], help="simulate the boot-time chroot")
    p.add_argument("--image", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--mode", choices=["enforcing", "permissive"], default="permissive")
    p.add_argument("--staging", required=True, help="empty directory standing in for the tmpfs")
    p.add_argument("--report", help="also write the boot report here")
    p.add_argument("--entry-point")
    p.add_argument("--ui-gate-delay-ms", type=int)
    p.add_argument("--clock", type=int)
    _seeded(p)
    p.set_defaults(func=cmd_boot)

    gestures = sub.add_parser("gestures", help="input-event tools").add_subparsers(
        dest="gesture_command", required=True, parser_class=_Parser)
    for name, func in (("decode", cmd_gestures_decode), ("detect", cmd_gestures_detect),
                       ("watch", cmd_gestures_watch)):
        p = gestures.add_parser(name, parents=[common])
        p.add_argument("--in", dest="in_file", required=name != "watch")
        if name != "decode":
            p.add_argument("--axis", type=lambda v: int(v, 0))
            p.add_argument("--threshold", type=int)
            p.add_argument("--window-ms", type=int)
        if name == "watch":
            p.add_argument("--out-dir", help="store captured photos here")
            p.add_argument("--clock", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("photo", parents=[common], help="capture a stub camera frame")
    p.add_argument("--camera", type=_camera, default=Camera.BACK)
    p.add_argument("--out", required=True)
    p.add_argument("--clock", type=int)
    p.set_defaults(func=cmd_photo)

    tether = sub.add_parser("tether", help="tether plans and lifecycle").add_subparsers(
        dest="tether_command", required=True, parser_class=_Parser)
    p = tether.add_parser("plan-up", parents=[common])
    p.add_argument("--iface")
    p.add_argument("--cidr")
    p.add_argument("--endpoint")
    p.set_defaults(func=cmd_tether_plan_up)
    p = tether.add_parser("plan-down", parents=[common])
    p.add_argument("--state", choices=[s.value for s in TunnelState],
                   default=TunnelState.ACTIVE.value)
    p.add_argument("--iface")
    p.set_defaults(func=cmd_tether_plan_down)
    p = tether.add_parser("walk", parents=[common], help="apply lifecycle events from Down")
    p.add_argument("events", nargs="+", choices=[e.value for e in TunnelEvent])
    p.set_defaults(func=cmd_tether_walk)

    p = sub.add_parser("serve", parents=[common], help="answer photo triggers on host:port")
    p.add_argument("--endpoint")
    p.add_argument("--max-requests", type=int)
    p.add_argument("--clock", type=int)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("trigger", parents=[common], help="request a photo from a server")
    p.add_argument("--endpoint")
    p.add_argument("--camera", type=_camera, default=Camera.BACK)
    p.add_argument("--ping", action="store_true")
    p.add_argument("--out")
    p.add_argument("--timeout-ms", type=int)
    p.set_defaults(func=cmd_trigger)

    return parser


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the command and map every failure to an exit code."""
    configure_logging(Settings().LOG_LEVEL)
    parser = build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
        cfg = load_config(args.config if hasattr(args, "config") else None)
        return args.func(args, cfg)
    except StashkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help / --version
        return e.code if isinstance(e.code, int) else EXIT_OK
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_OK


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
