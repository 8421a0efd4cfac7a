"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 corrupt stream.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import analysis
from .codec import (
    FORMAT_444,
    BitstreamHeader,
    EncoderConfig,
    chunk_breakdown,
    decode,
    encode420,
    encode444,
)
from .crc import BLOCK_CHOICES, PARTITION_CHOICES, SCALE_CHOICES, CrcParams
from .errors import ContainerError, DimensionError, FormatError, ParameterError, StreamError, UsageError
from .pixelio import I420, PLANAR444, Image420, Image444, read_image, read_planar, rgb_to_420, write_planar, write_pnm

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CORRUPT = 0, 1, 2, 3

RAW_SUFFIXES = (".yuv", ".raw")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="scf420", description="Lossless 4:2:0 screen content codec")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    enc = sub.add_parser("encode", help="compress a raw YUV or RGB image file")
    enc.add_argument("input")
    enc.add_argument("-o", "--output", required=True)
    enc.add_argument("--width", type=int)
    enc.add_argument("--height", type=int)
    enc.add_argument("--layout", choices=[I420, PLANAR444], default=I420,
                     help="raw input layout (default I420)")
    enc.add_argument("--keep-444", action="store_true",
                     help="code RGB/4:4:4 input directly instead of converting to 4:2:0")
    enc.add_argument("--no-lmap", action="store_true")
    enc.add_argument("--no-crc", action="store_true")
    enc.add_argument("--no-boost", action="store_true")
    enc.add_argument("--crc-blocks", type=int, default=4, help=f"one of {BLOCK_CHOICES}")
    enc.add_argument("--crc-partitions", type=int, default=64, help=f"one of {PARTITION_CHOICES}")
    enc.add_argument("--crc-scale", type=int, default=64, help=f"one of {SCALE_CHOICES}")

    dec = sub.add_parser("decode", help="decompress to raw planar samples (or PPM for RGB streams)")
    dec.add_argument("input")
    dec.add_argument("-o", "--output", required=True)

    info = sub.add_parser("info", help="print the stream header")
    info.add_argument("input")

    an = sub.add_parser("analyze", help="NMI and MAP/LMAP statistics of a corpus directory or file")
    an.add_argument("input")
    an.add_argument("--width", type=int)
    an.add_argument("--height", type=int)
    an.add_argument("--csv", help="write CSV here instead of stdout")

    ab = sub.add_parser("ablate", help="bpp of full / no-CRC / no-CRC-no-LMAP variants over a corpus")
    ab.add_argument("corpus")
    ab.add_argument("--csv", help="write CSV here instead of stdout")
    return p


def _encoder_config(args) -> EncoderConfig:
    try:
        params = CrcParams(args.crc_blocks, args.crc_partitions, args.crc_scale)
    except ParameterError as exc:
        raise UsageError(str(exc)) from exc
    return EncoderConfig(lmap=not args.no_lmap, crc=not args.no_crc, crc_params=params, boost=not args.no_boost)


def _load_input(args):
    path = Path(args.input)
    if path.suffix.lower() in RAW_SUFFIXES:
        if args.width is None or args.height is None:
            raise UsageError("raw input needs --width and --height")
        return read_planar(path, args.width, args.height, getattr(args, "layout", I420))
    return read_image(path)


def cmd_encode(args) -> int:
    config = _encoder_config(args)
    image = _load_input(args)
    if isinstance(image, Image444):
        if args.keep_444:
            data = encode444(image, config)
        else:
            if image.order != "RGB":
                raise UsageError("4:4:4 YCbCr input needs --keep-444")
            image = rgb_to_420(image)
            data = encode420(image, config)
    else:
        data = encode420(image, config)
    Path(args.output).write_bytes(data)
    parts = chunk_breakdown(data)
    bpp = 8 * len(data) / (image.width * image.height)
    detail = ", ".join(f"{k}_bytes={v}" for k, v in parts.items())
    print(f"bpp={bpp:.4f}, total_bytes={len(data)}, {detail}")
    return EXIT_OK


def cmd_decode(args) -> int:
    data = Path(args.input).read_bytes()
    image = decode(data)
    out = Path(args.output)
    if isinstance(image, Image444) and image.order == "RGB" and out.suffix.lower() in (".ppm", ".pnm"):
        write_pnm(image, out)
    else:
        write_planar(image, out)
    kind = "4:2:0" if isinstance(image, Image420) else f"4:4:4 {image.order}"
    print(f"decoded {image.width}x{image.height} {kind}, checksum ok")
    return EXIT_OK


def cmd_info(args) -> int:
    data = Path(args.input).read_bytes()
    h = BitstreamHeader.unpack(data)
    fmt = "4:4:4" if h.format == FORMAT_444 else "4:2:0"
    print(f"format={fmt} version={h.version} size={h.width}x{h.height} bitdepth={h.bitdepth}")
    print(f"lmap={int(h.lmap)} crc={int(h.crc)} boost={int(h.boost)}")
    p = h.crc_params
    print(f"crc_blocks={p.blocks} crc_partitions={p.partitions} crc_scale={p.scale} ymax={h.ymax}")
    print(f"chunks={list(h.chunk_lengths)} checksum=0x{h.checksum:08x} total_bytes={len(data)}")
    return EXIT_OK


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_analyze(args) -> int:
    path = Path(args.input)
    if path.is_dir():
        images = analysis.load_corpus(path)
    else:
        img = _load_input(args)
        if isinstance(img, Image444):
            img = rgb_to_420(img)
        images = [(path.name, img)]
    rows = analysis.corpus_stats(images)
    fh = _open_out(args.csv)
    try:
        analysis.write_rows_csv(rows, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_ablate(args) -> int:
    result = analysis.run_ablation(args.corpus)
    fh = _open_out(args.csv)
    try:
        result.write_csv(fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    pct = result.percentages()
    ref = " / ".join(f"{analysis.REFERENCE_PERCENT[v]:.2f}" for v in result.variants)
    ours = " / ".join(f"{pct[v]:.2f}" for v in result.variants)
    print(f"# percent vs full: {ours} (reference figures {ref})", file=sys.stderr)
    for name, err in result.failures:
        print(f"# failed {name}: {err}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "info": cmd_info,
    "analyze": cmd_analyze,
    "ablate": cmd_ablate,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        return COMMANDS[args.command](args)
    except (UsageError, DimensionError) as exc:
        print(f"scf420: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ContainerError, StreamError) as exc:
        print(f"scf420: corrupt stream: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except (OSError, FormatError) as exc:
        print(f"scf420: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
