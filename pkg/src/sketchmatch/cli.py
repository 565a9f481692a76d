"""``sketchmatch`` command line: extract, enroll, query, evaluate.

Exit codes:

==  ====================================================================
0   success
1   usage error: bad arguments, bad config file, malformed manifest
2   extraction failure (the failing stage is named on stderr)
3   I/O error: unreadable or unparsable image, gallery or output path
4   gallery was enrolled with incompatible extraction settings
==  ====================================================================
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .config import MODALITIES, Config, load_config
from .errors import ExtractionError, FormatError, IncompatibleGalleryError, SketchMatchError
from .evaluation import REPORT_COMPONENTS, ExtractionOutcome, cmc, extraction_success_rate, format_report
from .extractors import extract_all
from .features import center, feature_vector
from .matcher import DEFAULT_K, Gallery, fmt, knn_query
from .pipeline import analyze, build_gallery, enroll
from .raster import Rect, load_image, mask_to_gray, normalize_size, save_image

EXIT_OK, EXIT_USAGE, EXIT_EXTRACTION, EXIT_IO, EXIT_INCOMPATIBLE = range(5)
IMAGE_SUFFIXES = (".pgm", ".ppm", ".pnm")


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Exit(EXIT_USAGE, f"{self.prog}: error: {message}")


def _fmt_vec(vec) -> str:
    return " ".join(fmt(v) for v in vec)


def _read_image(path) -> np.ndarray:
    try:
        return load_image(path)
    except (OSError, FormatError) as exc:
        raise _Exit(EXIT_IO, f"cannot read image {path}: {exc}") from None


def _load_config(args) -> Config:
    if args.config is None:
        return Config()
    try:
        return load_config(args.config)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read config {args.config}: {exc}") from None
    except FormatError as exc:
        raise _Exit(EXIT_USAGE, f"bad config: {exc}") from None


def _extraction_failed(label, exc: SketchMatchError) -> _Exit:
    stage = getattr(exc, "component", "extraction")
    cause = getattr(exc, "cause", exc)
    return _Exit(EXIT_EXTRACTION, f"{label}: extraction failed at stage {stage}: {cause}")


# -- extract -----------------------------------------------------------------

def cmd_extract(args, config: Config) -> int:
    path = Path(args.image)
    modality = args.modality or config.gallery_modality
    img = normalize_size(_read_image(path), config.model.L, config.model.W)
    try:
        cs = extract_all(img, config, modality)
    except SketchMatchError as exc:
        raise _extraction_failed(path, exc) from None

    out = Path(args.out or ".")
    stem = path.stem
    rect_lines = [f"{name} {comp.rect}" for name, comp in cs.components().items()]
    rect_lines.append(f"face {_mask_bbox(cs.face.mask)}")
    sidecar = rect_lines + [
        f"eye_ball_row {cs.rows.eye_ball_row}",
        f"mid_lip_row {cs.rows.mid_lip_row}",
        f"nostril_row {cs.nostril_abs_row}",
        f"upper_lip_row {cs.u_lip_abs_row}",
    ]
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, comp in cs.components().items():
            save_image(out / f"{stem}.{name}.pgm", comp.image)
        save_image(out / f"{stem}.mask.pgm", mask_to_gray(cs.face.mask))
        (out / f"{stem}.rects.txt").write_text("\n".join(sidecar) + "\n", encoding="utf-8")
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot write to {out}: {exc}") from None

    print("\n".join(rect_lines))
    try:
        vec = feature_vector(cs, modality, config)
    except SketchMatchError as exc:
        raise _extraction_failed(path, exc) from None
    print(f"{stem} {_fmt_vec(vec)}")
    return EXIT_OK


def _mask_bbox(mask) -> Rect:
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return Rect(int(rows[0]) + 1, int(cols[0]) + 1, int(rows[-1]) + 1, int(cols[-1]) + 1)


# -- enroll ------------------------------------------------------------------

def cmd_enroll(args, config: Config) -> int:
    photo_dir = Path(args.photo_dir)
    if not photo_dir.is_dir():
        raise _Exit(EXIT_IO, f"not a directory: {photo_dir}")
    if args.modality:
        config = dataclasses.replace(config, gallery_modality=args.modality)
    files = sorted(p for p in photo_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    faces = [(p.stem, p, _read_image(p)) for p in files]
    gallery, skipped = enroll(faces, config)
    for ident, reason in skipped:
        print(f"skipped {ident}: {reason}", file=sys.stderr)
    if gallery is None:
        raise _Exit(EXIT_EXTRACTION, f"no enrollable faces in {photo_dir}")
    try:
        gallery.save(args.gallery)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot write gallery {args.gallery}: {exc}") from None
    print(f"enrolled {len(gallery)} of {len(faces)} faces into {args.gallery}")
    return EXIT_OK


# -- query -------------------------------------------------------------------

def _load_gallery(path) -> Gallery:
    try:
        return Gallery.load(path)
    except (OSError, FormatError) as exc:
        raise _Exit(EXIT_IO, f"cannot read gallery {path}: {exc}") from None


def cmd_query(args, config: Config) -> int:
    gallery = _load_gallery(args.gallery)
    if gallery.fingerprint != config.fingerprint():
        raise _Exit(EXIT_INCOMPATIBLE,
                    f"gallery fingerprint {gallery.fingerprint} does not match "
                    f"configuration {config.fingerprint()}")
    img = _read_image(args.sketch)
    modality = args.modality or config.probe_modality
    try:
        _, vec = analyze(img, modality, config)
    except SketchMatchError as exc:
        raise _extraction_failed(args.sketch, exc) from None
    probe = center(vec, gallery.centering_mode, gallery.grand_mean)
    try:
        matches = knn_query(gallery, probe, args.k, fingerprint=config.fingerprint())
    except IncompatibleGalleryError as exc:
        raise _Exit(EXIT_INCOMPATIBLE, str(exc)) from None
    for rank, m in enumerate(matches, 1):
        print(f"{rank} {m.identity} {m.photo_path} {m.distance:.6f}")
    return EXIT_OK


# -- evaluate ----------------------------------------------------------------

@dataclasses.dataclass
class ManifestEntry:
    identity: str
    photo: Path
    sketch: Path
    truth: dict


def parse_manifest(text: str, base: Path) -> list[ManifestEntry]:
    """Tab-separated ``identity photo sketch [component=x1,y1,x2,y2 ...]`` lines.

    Relative paths are resolved against ``base``.  Blank lines and lines
    starting with ``#`` are ignored.  Raises :class:`FormatError` naming the
    offending line.
    """
    entries, seen = [], set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.rstrip("\r\n").split("\t")
        if len(fields) < 3 or not all(f.strip() for f in fields[:3]):
            raise FormatError(f"manifest line {lineno}: expected identity, photo and sketch fields")
        ident, photo, sketch = (f.strip() for f in fields[:3])
        if ident in seen:
            raise FormatError(f"manifest line {lineno}: duplicate identity {ident!r}")
        seen.add(ident)
        truth = {}
        for tok in fields[3:]:
            tok = tok.strip()
            if not tok:
                continue
            name, _, coords = tok.partition("=")
            if name not in REPORT_COMPONENTS:
                raise FormatError(f"manifest line {lineno}: unknown component {name!r}")
            try:
                x1, y1, x2, y2 = (int(v) for v in coords.split(","))
            except ValueError:
                raise FormatError(f"manifest line {lineno}: bad box {tok!r}") from None
            truth[name] = Rect(x1, y1, x2, y2)
        entries.append(ManifestEntry(ident, base / photo, base / sketch, truth))
    if not entries:
        raise FormatError("manifest has no entries")
    return entries


def _process(img, modality, config):
    """``(component rects or None, feature vector or None, error or None)`` for one face."""
    img = normalize_size(img, config.model.L, config.model.W)
    try:
        cs = extract_all(img, config, modality)
    except SketchMatchError as exc:
        return None, None, exc
    rects = {c: getattr(cs, c).rect for c in REPORT_COMPONENTS if c != "nose"}
    rects["nose"] = cs.nose_actual.rect
    try:
        return rects, feature_vector(cs, modality, config), None
    except SketchMatchError as exc:
        return rects, None, ExtractionError(getattr(exc, "component", "features"), exc)


def cmd_evaluate(args, config: Config) -> int:
    manifest = Path(args.manifest)
    try:
        text = manifest.read_text(encoding="utf-8")
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read manifest {manifest}: {exc}") from None
    except UnicodeDecodeError as exc:
        raise _Exit(EXIT_USAGE, f"{manifest}: not a text manifest ({exc.reason})") from None
    try:
        entries = parse_manifest(text, manifest.parent)
    except FormatError as exc:
        raise _Exit(EXIT_USAGE, f"{manifest}: {exc}") from None

    outcomes = {"photo": [], "sketch": []}
    idents, paths, vecs, probes = [], [], [], []
    for e in entries:
        for role, modality, path in (("photo", config.gallery_modality, e.photo),
                                     ("sketch", config.probe_modality, e.sketch)):
            rects, vec, err = _process(_read_image(path), modality, config)
            if err is not None:
                print(f"{role} {e.identity}: {err}", file=sys.stderr)
            for comp in REPORT_COMPONENTS:
                outcomes[role].append(ExtractionOutcome(
                    e.identity, comp, None if rects is None else rects[comp],
                    e.truth.get(comp), config.iou_tau))
            if role == "photo" and vec is not None:
                idents.append(e.identity)
                paths.append(str(path))
                vecs.append(vec)
            elif role == "sketch":
                probes.append((e.identity, vec))
    if not vecs:
        raise _Exit(EXIT_EXTRACTION, "no gallery photo could be enrolled")
    gallery = build_gallery(idents, paths, vecs, config)

    results = []
    for ident, vec in probes:
        matches = []
        if vec is not None:
            probe = center(vec, gallery.centering_mode, gallery.grand_mean)
            matches = knn_query(gallery, probe, args.k)
        results.append((ident, matches, ident))
    curve = cmc(results, args.k)

    rates = None
    if any(e.truth for e in entries):
        rates = {}
        for comp in REPORT_COMPONENTS:
            if any(comp in e.truth for e in entries):
                rates[comp] = tuple(extraction_success_rate(outcomes[r], comp) for r in ("photo", "sketch"))
    report = format_report(rates, curve)
    sys.stdout.write(report)
    if args.out:
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "report.txt").write_text(report, encoding="utf-8")
        except OSError as exc:
            raise _Exit(EXIT_IO, f"cannot write report to {out}: {exc}") from None
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def _global_flags(parser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, help="key = value configuration file")
    parser.add_argument("--modality", choices=MODALITIES, default=default,
                        help="override the modality the command assumes for its input images")
    parser.add_argument("--k", type=int, default=argparse.SUPPRESS if suppress else DEFAULT_K,
                        help=f"number of matches / CMC ranks (default {DEFAULT_K})")
    parser.add_argument("--out", default=default, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sketchmatch", description="Match face sketches to photos by component geometry.",
                     epilog="exit codes: 0 ok, 1 usage, 2 extraction, 3 I/O, 4 incompatible gallery")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="extract components of one face and print its feature vector")
    p.add_argument("image")
    p = sub.add_parser("enroll", help="build a gallery file from a directory of <identity>.pgm photos")
    p.add_argument("photo_dir")
    p.add_argument("gallery")
    p = sub.add_parser("query", help="rank gallery photos against one sketch")
    p.add_argument("sketch")
    p.add_argument("gallery")
    p = sub.add_parser("evaluate", help="extraction and CMC report for a manifest of photo/sketch pairs")
    p.add_argument("manifest")
    for p in sub.choices.values():
        _global_flags(p, suppress=True)
    return parser


_COMMANDS = {"extract": cmd_extract, "enroll": cmd_enroll, "query": cmd_query, "evaluate": cmd_evaluate}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.k < 1:
            raise _Exit(EXIT_USAGE, f"--k must be >= 1, got {args.k}")
        return _COMMANDS[args.command](args, _load_config(args))
    except _Exit as exc:
        if str(exc):
            print(str(exc), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
