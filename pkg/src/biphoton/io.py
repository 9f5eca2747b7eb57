"""Config files, CSV export and static SVG plots."""

from __future__ import annotations

import configparser
import os
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .core import ExperimentConfig, JointDensity2D, ScanSpec, ValidatedConfig
from .presets import PRESETS, get_preset

CONFIG_KEYS = {
    "source": ("wavelength_mm", "correlation_a_mm"),
    "geometry": ("slit_width_mm", "z1_mm", "z2_mm"),
    "left": ("y_fixed_mm",),
    "scan": ("y_min_mm", "y_max_mm", "points"),
}


class ParseError(ValueError):
    def __init__(self, message, path=None, line=None, column=None):
        self.path, self.line, self.column = path, line, column
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}:{column or 1}"
            where += ": "
        super().__init__(f"ParseError: {where}{message}")


def _locate(text, section, key=None):
    """1-based (line, column) of a section header or of a key inside it."""
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            if key is None and current == section:
                return lineno, raw.index("[") + 1
            continue
        if key is not None and current == section:
            name = stripped.split("=", 1)[0].strip()
            if name == key:
                return lineno, raw.index(key) + 1
    return None, None


def parse_config(text: str, path=None, name="custom") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path or "<config>"))
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ParseError(f"malformed line: {exc.errors[0][1] if exc.errors else exc}", path, line) from None
    except configparser.Error as exc:
        raise ParseError(str(exc).splitlines()[0], path, getattr(exc, "lineno", None)) from None

    values = {}
    for section, keys in CONFIG_KEYS.items():
        if not parser.has_section(section):
            raise ParseError(f"missing section [{section}] (needs {', '.join(keys)})", path)
        for key in keys:
            if not parser.has_option(section, key):
                line, col = _locate(text, section)
                raise ParseError(f"missing key {key!r} in [{section}]", path, line, col)
            raw = parser.get(section, key)
            try:
                values[key] = int(raw) if key == "points" else float(raw)
            except ValueError:
                line, col = _locate(text, section, key)
                raise ParseError(f"{key} = {raw!r} is not a number", path, line, col) from None
        extra = set(parser.options(section)) - set(keys)
        if extra:
            line, col = _locate(text, section, sorted(extra)[0])
            raise ParseError(f"unknown key {sorted(extra)[0]!r} in [{section}]", path, line, col)
    return ExperimentConfig(
        wavelength=values["wavelength_mm"],
        slit_width=values["slit_width_mm"],
        correlation_a=values["correlation_a_mm"],
        z1=values["z1_mm"],
        z2=values["z2_mm"],
        left_detector_y=values["y_fixed_mm"],
        scan=ScanSpec(values["y_min_mm"], values["y_max_mm"], values["points"]),
        name=name,
    )


def load_config(source) -> ExperimentConfig:
    """Load a preset by name ("kim-shih", "strekalov") or a config file by path."""
    if isinstance(source, str) and source in PRESETS:
        return get_preset(source)
    path = Path(source)
    if not path.exists():
        if isinstance(source, str) and os.sep not in source and not path.suffix:
            return get_preset(source)  # raises UnknownPreset
        raise FileNotFoundError(f"FileNotFound: {path}")
    return parse_config(path.read_text(), path, name=path.stem)


def format_config(cfg: ExperimentConfig | ValidatedConfig) -> str:
    if isinstance(cfg, ValidatedConfig):
        cfg = cfg.config
    # repr() of a float round-trips exactly
    lines = [
        "[source]",
        f"wavelength_mm = {cfg.wavelength!r}",
        f"correlation_a_mm = {cfg.correlation_a!r}",
        "",
        "[geometry]",
        f"slit_width_mm = {cfg.slit_width!r}",
        f"z1_mm = {cfg.z1!r}",
        f"z2_mm = {cfg.z2!r}",
        "",
        "[left]",
        f"y_fixed_mm = {cfg.left_detector_y!r}",
        "",
        "[scan]",
        f"y_min_mm = {cfg.scan.y_min!r}",
        f"y_max_mm = {cfg.scan.y_max!r}",
        f"points = {cfg.scan.points:d}",
    ]
    return "\n".join(lines) + "\n"


def save_config(cfg, path) -> None:
    Path(path).write_text(format_config(cfg))


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def write_csv(result, path) -> None:
    """Write a ScanResult (``y_mm,probability_density``) or a JointDensity2D.

    Values are printed with 12 significant digits, one row per grid point.
    """
    if isinstance(result, JointDensity2D):
        yl = result.left_grid.samples
        yr = result.right_grid.samples
        rows = ["y_L_mm,y_R_mm,probability_density"]
        for i, a in enumerate(yl):
            fa = _fmt(a)
            rows.extend(f"{fa},{_fmt(b)},{_fmt(v)}" for b, v in zip(yr, result.values[i]))
    else:
        try:
            y = np.asarray(result.distribution.grid.samples)
            v = np.asarray(result.distribution.values)
        except AttributeError:
            raise TypeError("write_csv expects a ScanResult or JointDensity2D") from None
        if y.size < 3 or v.shape != y.shape:
            raise ValueError("refusing to write a scan with fewer than 3 points")
        rows = ["y_mm,probability_density"]
        rows.extend(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(y, v))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")


def read_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return tuple(data[:, i] for i in range(data.shape[1]))


PALETTE = ("#1f4e99", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#555555")
WIDTH, HEIGHT = 720, 440
MARGIN = dict(left=78, right=24, top=40, bottom=56)


def plot_series(results, scale="density"):
    """(label, x, y) triples as they would be drawn.

    ``scale``: "density" (normalized over the window), "peak" (each curve
    divided by its maximum) or "raw" (undo the window normalization).
    """
    out = []
    for r in results:
        v = np.asarray(r.distribution.values, dtype=float)
        if scale == "peak":
            v = v / v.max()
        elif scale == "raw":
            v = v * r.distribution.scale
        elif scale != "density":
            raise ValueError("scale must be 'density', 'peak' or 'raw'")
        out.append((r.label, np.asarray(r.y, dtype=float), v))
    return out


def _ticks(lo, hi, n=5):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [t for t in np.arange(start, hi + step * 1e-9, step)]


def _axes_svg(series, x0, y0, w, h, title, ylabel):
    xs = np.concatenate([s[1] for s in series])
    ys = np.concatenate([s[2] for s in series])
    xlo, xhi = float(xs.min()), float(xs.max())
    ylo, yhi = 0.0, float(ys.max()) * 1.05 or 1.0

    def px(x):
        return x0 + (x - xlo) / (xhi - xlo) * w

    def py(y):
        return y0 + h - (y - ylo) / (yhi - ylo) * h

    parts = [
        f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="#000" stroke-width="1"/>',
        f'<text x="{x0 + w / 2:.1f}" y="{y0 - 12}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{x0 + w / 2:.1f}" y="{y0 + h + 40}" text-anchor="middle" font-size="12">y (mm)</text>',
        f'<text transform="translate({x0 - 60},{y0 + h / 2:.1f}) rotate(-90)" text-anchor="middle" '
        f'font-size="12">{escape(ylabel)}</text>',
    ]
    for t in _ticks(xlo, xhi):
        parts.append(f'<line x1="{px(t):.2f}" y1="{y0 + h}" x2="{px(t):.2f}" y2="{y0 + h + 5}" stroke="#000"/>')
        parts.append(f'<text x="{px(t):.2f}" y="{y0 + h + 18}" text-anchor="middle" font-size="11">{t:g}</text>')
    for t in _ticks(ylo, yhi):
        parts.append(f'<line x1="{x0 - 5}" y1="{py(t):.2f}" x2="{x0}" y2="{py(t):.2f}" stroke="#000"/>')
        parts.append(f'<text x="{x0 - 8}" y="{py(t) + 4:.2f}" text-anchor="end" font-size="11">{t:.3g}</text>')
    for k, (label, x, y) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        parts.append(
            f'<polyline data-label="{escape(label)}" fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>'
        )
        ly = y0 + 16 + 16 * k
        parts.append(f'<line x1="{x0 + w - 200}" y1="{ly}" x2="{x0 + w - 176}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{x0 + w - 170}" y="{ly + 4}" font-size="11">{escape(label)}</text>')
    return parts


def emit_svg_plot(results, path, overlay=True, scale="density", title=None) -> None:
    """Draw scan results as polylines on linear axes.

    With ``overlay`` every curve shares one pair of axes; otherwise each
    result gets its own panel, stacked vertically.
    """
    results = list(results)
    if not results:
        raise ValueError("emit_svg_plot needs at least one result")
    ylabel = {"density": "probability density (1/mm)", "peak": "relative probability (peak = 1)",
              "raw": "joint density (arb. units)"}[scale]
    series = plot_series(results, scale)
    w = WIDTH - MARGIN["left"] - MARGIN["right"]
    h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    if overlay:
        panels = [(series, title or " vs ".join(r.scenario for r in results))]
    else:
        panels = [([s], title or r.label) for s, r in zip(series, results)]
    total_h = HEIGHT * len(panels)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{total_h}" '
        f'viewBox="0 0 {WIDTH} {total_h}" font-family="sans-serif">',
        f'<rect width="{WIDTH}" height="{total_h}" fill="#fff"/>',
    ]
    for i, (ser, ttl) in enumerate(panels):
        parts.extend(_axes_svg(ser, MARGIN["left"], MARGIN["top"] + i * HEIGHT, w, h, ttl, ylabel))
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
