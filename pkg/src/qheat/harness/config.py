"""INI-style experiment configuration.

Sections and keys (defaults in brackets)::

    [qubit]       omega0_GHz [6.0], g_GHz [1.0]
    [drive]       kind [tanh_cosine | asymmetric_square], a [8.0],
                  dt2_ns [pi/omega2] (number or ``pi/omega2``),
                  f_GHz [none] (single operating point for trajectory runs)
    [sweep]       variable [f_L | dt1], start, stop, points [400],
                  refine [true], refine_factor [8], refine_window [0.05], n_max [6]
    [bath.N]      kappa, T_mK, active_branch [always | low_gap | high_gap],
                  dephasing [true], filter_Q [none],
                  filter_f_GHz [none] (number, ``omega1`` or ``omega2``)
    [integrator]  steps_per_cycle [4096], tol [1e-10], max_cycles [20000]
    [output]      csv [sweep.csv], trajectory [trajectory.csv],
                  sample_stride [16], workers [1]
    [study]       variable [omega_ratio | a], values, orders [1, 2, 3, 4],
                  window [0.03], points [41]
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from ..dissipation import BathCoupling, Branch, ResonatorFilter
from ..lindblad import IntegratorConfig
from ..model import AsymmetricSquare, QubitDriveModel, TanhCosine
from ..units import TWO_PI, ghz_to_angular

PRESETS = ("fig1c", "fig1d", "fig1e", "fig3")


class ParseError(ValueError):
    def __init__(self, message, line=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.key = key


class ValidationError(ValueError):
    def __init__(self, violations):
        super().__init__("invalid configuration:\n  " + "\n  ".join(violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class BathSpec:
    kappa: float
    T_mK: float
    active_branch: str = "always"
    dephasing: bool = True
    filter_Q: Optional[float] = None
    filter_f: Optional[str] = None  # GHz as text, or omega1 / omega2


@dataclass(frozen=True)
class SweepSpec:
    variable: str = "f_L"
    start: float = 0.8
    stop: float = 6.6
    points: int = 400
    refine: bool = True
    refine_factor: int = 8
    refine_window: float = 0.05
    n_max: int = 6


@dataclass(frozen=True)
class StudySpec:
    variable: str = "omega_ratio"
    values: tuple = ()
    orders: tuple = (1, 2, 3, 4)
    window: float = 0.03
    points: int = 41


@dataclass(frozen=True)
class ExperimentConfig:
    omega0_GHz: float = 6.0
    g_GHz: float = 1.0
    drive_kind: str = "tanh_cosine"
    a: float = 8.0
    dt2: str = "pi/omega2"
    f_GHz: Optional[float] = None
    sweep: SweepSpec = SweepSpec()
    baths: tuple = ()
    steps_per_cycle: int = 4096
    tol: float = 1e-10
    max_cycles: int = 20000
    csv: str = "sweep.csv"
    trajectory: str = "trajectory.csv"
    sample_stride: int = 16
    workers: int = 1
    study: Optional[StudySpec] = None
    source: str = field(default="", compare=False, repr=False)

    # -- builders -----------------------------------------------------------

    def base_model(self):
        """Model with a placeholder drive frequency of f_M."""
        m = QubitDriveModel.from_ghz(self.omega0_GHz, self.g_GHz, TanhCosine(1.0, 1.0))
        f = self.f_GHz or (m.omega1 + m.omega2) / (2 * TWO_PI)
        return self.model_at(f_L=f)

    def dt2_ns(self):
        m = QubitDriveModel.from_ghz(self.omega0_GHz, self.g_GHz, TanhCosine(1.0, 1.0))
        if self.dt2.replace(" ", "") == "pi/omega2":
            return math.pi / m.omega2
        return float(self.dt2)

    def model_at(self, f_L=None, dt1=None):
        """Model at a drive frequency (GHz) or, for square waves, a leg ``dt1`` (ns)."""
        if self.drive_kind == "tanh_cosine":
            drive = TanhCosine.from_ghz(self.a, f_L)
        else:
            dt2 = self.dt2_ns()
            if dt1 is None:
                dt1 = 1.0 / f_L - dt2
            drive = AsymmetricSquare(dt1, dt2)
        return QubitDriveModel.from_ghz(self.omega0_GHz, self.g_GHz, drive)

    def bath_couplings(self):
        m = QubitDriveModel.from_ghz(self.omega0_GHz, self.g_GHz, TanhCosine(1.0, 1.0))
        out = []
        for b in self.baths:
            filt = None
            if b.filter_Q is not None:
                token = b.filter_f.strip()
                if token == "omega1":
                    w_r = m.omega1
                elif token == "omega2":
                    w_r = m.omega2
                else:
                    w_r = ghz_to_angular(float(token))
                filt = ResonatorFilter(b.filter_Q, w_r)
            out.append(BathCoupling(b.kappa, b.T_mK, filt, Branch(b.active_branch), b.dephasing))
        return tuple(out)

    def integrator(self):
        return IntegratorConfig(self.steps_per_cycle, self.tol, self.max_cycles)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_KEYS = {
    "qubit": {"omega0_GHz", "g_GHz"},
    "drive": {"kind", "a", "dt2_ns", "f_GHz"},
    "sweep": {"variable", "start", "stop", "points", "refine", "refine_factor",
              "refine_window", "n_max"},
    "bath": {"kappa", "T_mK", "active_branch", "dephasing", "filter_Q", "filter_f_GHz"},
    "integrator": {"steps_per_cycle", "tol", "max_cycles"},
    "output": {"csv", "trajectory", "sample_stride", "workers"},
    "study": {"variable", "values", "orders", "window", "points"},
}


class _Reader:
    """Typed access to a configparser section that records every violation."""

    def __init__(self, parser, section, errors):
        self.sec = parser[section] if parser.has_section(section) else {}
        self.name = section
        self.errors = errors

    def _raw(self, key):
        return self.sec.get(key) if self.sec else None

    def get(self, key, conv, default=None, required=False):
        raw = self._raw(key)
        if raw is None or raw.strip() == "":
            if required:
                self.errors.append(f"[{self.name}] {key}: missing")
            return default
        try:
            return conv(raw.strip())
        except ValueError:
            self.errors.append(f"[{self.name}] {key}: cannot read {raw.strip()!r}")
            return default


def _bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _ints(text):
    return tuple(int(v) for v in text.replace(",", " ").split())


def _dt2(text):
    if text.replace(" ", "") != "pi/omega2":
        float(text)
    return text


def _filter_f(text):
    if text not in ("omega1", "omega2"):
        float(text)
    return text


def parse_config(text):
    """Parse and validate configuration text; raises ParseError or ValidationError."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("key outside of any section", line=exc.lineno) from exc
    except configparser.DuplicateOptionError as exc:
        raise ParseError("duplicate key", line=exc.lineno, key=exc.option) from exc
    except configparser.DuplicateSectionError as exc:
        raise ParseError(f"duplicate section [{exc.section}]", line=exc.lineno) from exc
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ParseError("malformed line", line=line) from exc

    errors = []
    bath_sections = []
    for section in parser.sections():
        base = "bath" if section.startswith("bath.") else section
        if base not in _KEYS:
            errors.append(f"unknown section [{section}]")
            continue
        if base == "bath":
            bath_sections.append(section)
        for key in parser[section]:
            if key not in _KEYS[base]:
                errors.append(f"[{section}] unknown key {key!r}")

    q = _Reader(parser, "qubit", errors)
    d = _Reader(parser, "drive", errors)
    s = _Reader(parser, "sweep", errors)
    it = _Reader(parser, "integrator", errors)
    out = _Reader(parser, "output", errors)

    kind = d.get("kind", str, "tanh_cosine")
    if kind not in ("tanh_cosine", "asymmetric_square"):
        errors.append(f"[drive] kind: unknown waveform {kind!r}")
    sweep_default = SweepSpec()
    if kind == "asymmetric_square":
        sweep_default = SweepSpec(variable="dt1", start=0.05, stop=0.45)
    sweep = SweepSpec(
        variable=s.get("variable", str, sweep_default.variable),
        start=s.get("start", float, sweep_default.start),
        stop=s.get("stop", float, sweep_default.stop),
        points=s.get("points", int, sweep_default.points),
        refine=s.get("refine", _bool, sweep_default.refine),
        refine_factor=s.get("refine_factor", int, sweep_default.refine_factor),
        refine_window=s.get("refine_window", float, sweep_default.refine_window),
        n_max=s.get("n_max", int, sweep_default.n_max),
    )

    baths = []
    for section in sorted(bath_sections, key=_bath_order):
        b = _Reader(parser, section, errors)
        baths.append(
            BathSpec(
                kappa=b.get("kappa", float, 0.0, required=True),
                T_mK=b.get("T_mK", float, 0.0, required=True),
                active_branch=b.get("active_branch", str, "always"),
                dephasing=b.get("dephasing", _bool, True),
                filter_Q=b.get("filter_Q", float),
                filter_f=b.get("filter_f_GHz", _filter_f),
            )
        )

    study = None
    if parser.has_section("study"):
        st = _Reader(parser, "study", errors)
        study = StudySpec(
            variable=st.get("variable", str, "omega_ratio"),
            values=st.get("values", _floats, (), required=True),
            orders=st.get("orders", _ints, (1, 2, 3, 4)),
            window=st.get("window", float, 0.03),
            points=st.get("points", int, 41),
        )

    cfg = ExperimentConfig(
        omega0_GHz=q.get("omega0_GHz", float, 6.0),
        g_GHz=q.get("g_GHz", float, 1.0),
        drive_kind=kind,
        a=d.get("a", float, 8.0),
        dt2=d.get("dt2_ns", _dt2, "pi/omega2"),
        f_GHz=d.get("f_GHz", float),
        sweep=sweep,
        baths=tuple(baths),
        steps_per_cycle=it.get("steps_per_cycle", int, 4096),
        tol=it.get("tol", float, 1e-10),
        max_cycles=it.get("max_cycles", int, 20000),
        csv=out.get("csv", str, "sweep.csv"),
        trajectory=out.get("trajectory", str, "trajectory.csv"),
        sample_stride=out.get("sample_stride", int, 16),
        workers=out.get("workers", int, 1),
        study=study,
        source=text,
    )
    errors.extend(_validate(cfg))
    if errors:
        raise ValidationError(errors)
    return cfg


def _bath_order(section):
    suffix = section.split(".", 1)[1]
    return (0, int(suffix), "") if suffix.isdigit() else (1, 0, suffix)


def _validate(cfg):
    errs = []
    if not cfg.omega0_GHz > 0:
        errs.append("[qubit] omega0_GHz must be positive")
    if cfg.g_GHz < 0:
        errs.append("[qubit] g_GHz must be non-negative")
    if cfg.drive_kind == "tanh_cosine" and not cfg.a > 0:
        errs.append("[drive] a must be positive")
    if cfg.drive_kind == "asymmetric_square":
        try:
            if not cfg.dt2_ns() > 0:
                errs.append("[drive] dt2_ns must be positive")
        except (ValueError, ZeroDivisionError):
            pass
    if cfg.f_GHz is not None and not cfg.f_GHz > 0:
        errs.append("[drive] f_GHz must be positive")
    sw = cfg.sweep
    if sw.variable not in ("f_L", "dt1"):
        errs.append(f"[sweep] variable must be f_L or dt1, got {sw.variable!r}")
    if sw.variable == "dt1" and cfg.drive_kind != "asymmetric_square":
        errs.append("[sweep] a dt1 sweep needs an asymmetric_square drive")
    if not (sw.start > 0 and sw.stop > 0):
        errs.append("[sweep] start and stop must be positive")
    if not sw.stop > sw.start:
        errs.append("[sweep] empty range: stop must exceed start")
    if sw.points < 1:
        errs.append("[sweep] points must be >= 1")
    if sw.refine_factor < 1 or not sw.refine_window > 0:
        errs.append("[sweep] refine_factor >= 1 and refine_window > 0 required")
    if sw.n_max < 1:
        errs.append("[sweep] n_max must be >= 1")
    if not cfg.baths:
        errs.append("at least one [bath.N] section is required")
    for i, b in enumerate(cfg.baths, start=1):
        if b.kappa < 0:
            errs.append(f"[bath.{i}] kappa must be non-negative")
        if not b.T_mK > 0:
            errs.append(f"[bath.{i}] T_mK must be positive")
        if b.active_branch not in {br.value for br in Branch}:
            errs.append(f"[bath.{i}] active_branch must be always, low_gap or high_gap")
        if (b.filter_Q is None) != (b.filter_f is None):
            errs.append(f"[bath.{i}] filter_Q and filter_f_GHz go together")
        if b.filter_Q is not None and not b.filter_Q > 0:
            errs.append(f"[bath.{i}] filter_Q must be positive")
        if b.filter_f not in (None, "omega1", "omega2") and not float(b.filter_f) > 0:
            errs.append(f"[bath.{i}] filter_f_GHz must be positive")
    if cfg.steps_per_cycle < 256:
        errs.append("[integrator] steps_per_cycle must be >= 256")
    if not 0 < cfg.tol <= 1e-4:
        errs.append("[integrator] tol must lie in (0, 1e-4]")
    if cfg.max_cycles < 1:
        errs.append("[integrator] max_cycles must be >= 1")
    if cfg.sample_stride < 1:
        errs.append("[output] sample_stride must be >= 1")
    if cfg.workers < 1:
        errs.append("[output] workers must be >= 1")
    if cfg.study is not None:
        st = cfg.study
        if st.variable not in ("omega_ratio", "a"):
            errs.append("[study] variable must be omega_ratio or a")
        if st.variable == "omega_ratio" and any(v < 1 for v in st.values):
            errs.append("[study] omega_ratio values must be >= 1")
        if st.variable == "a" and any(v <= 0 for v in st.values):
            errs.append("[study] a values must be positive")
        if not st.orders or min(st.orders) < 1:
            errs.append("[study] orders must be positive integers")
        if not 0 < st.window < 1 or st.points < 3:
            errs.append("[study] window in (0, 1) and points >= 3 required")
    return errs


def preset_text(name):
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return resources.files("qheat.presets").joinpath(f"{name}.ini").read_text(encoding="utf-8")


def load_config(source):
    """Load a preset by name or a config file by path."""
    if str(source) in PRESETS:
        return parse_config(preset_text(str(source)))
    return parse_config(Path(source).read_text(encoding="utf-8"))
