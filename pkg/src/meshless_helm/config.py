"""Run configuration: TOML files validated into solver objects.

Grammar
-------
TOML with the sections below.  Scalar fields that describe functions take
expression strings over ``x, y, z`` (and ``t`` or ``s`` where noted) built
from numbers, ``+ - * / **``, the constants ``pi`` and ``e`` and the
functions in :data:`FUNCTIONS`.

``[problem]``
    ``kind`` one of ``helmholtz``, ``diffusion_lt``, ``diffusion_step``,
    ``wave_lt``, ``wave_step``.  Helmholtz problems take ``operator``
    (``modified`` for ``Delta u - lam^2 u``, ``oscillatory`` for
    ``Delta u + kappa^2 u``), ``wavenumber``, ``source`` and ``dirichlet``.
    Time problems take ``coefficient`` (``k`` or ``c``), ``u0``, ``v0``,
    ``g`` (over ``x, y, t``), ``boundary_transform`` (over ``x, y, s``) and
    ``offset``.  ``exact`` (over ``x, y[, z][, t]``) or ``series`` (``diffusion``
    or ``wave``) sets the reference solution.
``[domain]``, ``[fictitious]``
    ``shape`` one of ``disk``, ``ball``, ``rect``, ``polar_cosine`` with
    ``center``/``radius``, ``x_range``/``y_range`` or
    ``base``/``amplitude``/``frequency``/``center``.
``[mfs]``
    ``n_points``, ``regularization``.
``[mps]``
    ``rbf`` (``gaussian`` or ``bump``), ``c``, ``n``, ``gamma``, ``delta``,
    ``normalize``.
``[time]``
    ``t`` and ``ns`` (Laplace drivers); ``T``, ``steps``, ``extension``,
    ``lambda_convention`` (time stepping); ``sign`` (wave Laplace driver).
``[evaluation]``
    ``points`` (list of coordinates), ``boundary`` (count of domain boundary
    points), ``spiral`` (count of points on ``r = theta / 14``).
``[output]``
    ``dir``.
"""
import ast
import hashlib
import math
import re
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .geometry import Ball, Disk, PolarStar, Rect

FUNCTIONS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "log": np.log,
    "sqrt": np.sqrt, "abs": np.abs, "sinh": np.sinh, "cosh": np.cosh,
    "tanh": np.tanh, "arctan": np.arctan,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
KINDS = ("helmholtz", "diffusion_lt", "diffusion_step", "wave_lt", "wave_step")
SHAPES = ("disk", "ball", "rect", "polar_cosine")
_SHAPE_KEYS = {"shape", "center", "radius", "x_range", "y_range", "base", "amplitude",
               "frequency"}
KNOWN_KEYS = {
    "problem": {"kind", "operator", "wavenumber", "source", "dirichlet", "exact", "series",
                "series_half_width", "coefficient", "u0", "v0", "g", "boundary_transform",
                "offset"},
    "domain": _SHAPE_KEYS,
    "fictitious": _SHAPE_KEYS,
    "mfs": {"n_points", "regularization"},
    "mps": {"rbf", "c", "n", "gamma", "delta", "normalize"},
    "time": {"t", "ns", "sign", "T", "steps", "extension", "lambda_convention"},
    "evaluation": {"points", "boundary", "spiral"},
    "output": {"dir"},
}
_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_UNARY = (ast.UAdd, ast.USub)


class Expression:
    """Vectorized function compiled from a whitelisted arithmetic expression.

    Parameters
    ----------
    text : str
    variables : tuple of str
        Names bound at call time; point coordinates are named ``x, y, z``.
    """

    def __init__(self, text, variables):
        self.text = text
        self.variables = tuple(variables)
        try:
            tree = ast.parse(text, mode="eval")
        except SyntaxError as exc:
            raise ValueError(f"cannot parse expression {text!r}: {exc.msg}")
        for node in ast.walk(tree):
            self._check(node)
        self._code = compile(tree, "<expression>", "eval")

    def _check(self, node):
        if isinstance(node, (ast.Expression, ast.Load) + _BINOPS + _UNARY):
            return
        if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
            return
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, _UNARY):
            return
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return
        if isinstance(node, ast.Name):
            if node.id in self.variables or node.id in CONSTANTS or node.id in FUNCTIONS:
                return
            raise ValueError(f"unknown name {node.id!r} in {self.text!r}; "
                             f"allowed variables: {', '.join(self.variables)}")
        if isinstance(node, ast.Call):
            if isinstance(node.func, ast.Name) and node.func.id in FUNCTIONS \
                    and len(node.args) == 1 and not node.keywords:
                return
            raise ValueError(f"only one-argument calls to {sorted(FUNCTIONS)} are allowed "
                             f"in {self.text!r}")
        raise ValueError(f"unsupported syntax {type(node).__name__} in {self.text!r}")

    def evaluate(self, **values):
        scope = dict(CONSTANTS)
        scope.update(FUNCTIONS)
        scope.update(values)
        return eval(self._code, {"__builtins__": {}}, scope)

    def point_function(self, dim, extra=()):
        """``f(points, *extra)`` returning one value per point."""
        names = ("x", "y", "z")[:dim]

        def fun(points, *args):
            points = np.atleast_2d(np.asarray(points, dtype=np.float64))
            values = {n: points[:, i] for i, n in enumerate(names)}
            values.update(dict(zip(extra, args)))
            out = np.asarray(self.evaluate(**values), dtype=np.float64)
            return np.broadcast_to(out, (points.shape[0],)).copy()

        fun.expression = self.text
        return fun


@dataclass
class RunConfig:
    """Validated configuration; ``raw`` keeps the parsed TOML tables."""
    path: str
    text: str
    raw: dict
    kind: str
    dim: int
    domain: object
    fictitious: object
    mfs: dict
    mps: dict = None
    problem: dict = field(default_factory=dict)
    time: dict = field(default_factory=dict)
    points: np.ndarray = None
    out_dir: str = "out"

    @property
    def digest(self):
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()


class _Reader:
    """Field access with ``file:line: section.key: message`` diagnostics."""

    def __init__(self, path, text, data):
        self.path = path
        self.text = text
        self.data = data
        self.lines = text.split("\n")

    def line_of(self, section, key=None):
        header = re.compile(r"^\s*\[\s*" + re.escape(section) + r"\s*\]\s*(#.*)?$")
        any_header = re.compile(r"^\s*\[")
        start = None
        for i, line in enumerate(self.lines):
            if header.match(line):
                start = i
                break
        if start is None:
            return None
        if key is None:
            return start + 1
        keyline = re.compile(r"^\s*" + re.escape(key) + r"\s*=")
        for i in range(start + 1, len(self.lines)):
            if any_header.match(self.lines[i]):
                break
            if keyline.match(self.lines[i]):
                return i + 1
        return start + 1

    def fail(self, section, key, message):
        line = self.line_of(section, key)
        where = f"{self.path}:{line}" if line else self.path
        name = f"{section}.{key}" if key else section
        raise ConfigError(f"{where}: {name}: {message}")

    def table(self, section, required=True):
        value = self.data.get(section)
        if value is None:
            if required:
                raise ConfigError(f"{self.path}: [{section}]: missing section")
            return {}
        if not isinstance(value, dict):
            self.fail(section, None, "must be a table")
        return value

    def get(self, section, key, kind, default=..., check=None, hint=""):
        tab = self.data.get(section, {})
        if key not in tab:
            if default is ...:
                line = self.line_of(section)
                where = f"{self.path}:{line}" if line else self.path
                raise ConfigError(f"{where}: {section}.{key}: missing required field")
            return default
        value = tab[key]
        ok = _type_ok(value, kind)
        if ok and check is not None:
            try:
                ok = bool(check(value))
            except Exception:
                ok = False
        if not ok:
            self.fail(section, key, f"invalid value {value!r}" + (f"; {hint}" if hint else ""))
        return float(value) if kind is float else value

    def expression(self, section, key, variables, default=None, dim=2, extra=()):
        text = self.data.get(section, {}).get(key)
        if text is None:
            return default
        if isinstance(text, (int, float)) and not isinstance(text, bool):
            text = repr(float(text))
        if not isinstance(text, str):
            self.fail(section, key, "must be an expression string")
        try:
            expr = Expression(text, variables)
            probe = {v: np.full(2, 0.5) for v in variables}
            with np.errstate(all="ignore"):
                np.asarray(expr.evaluate(**probe), dtype=np.float64)
        except ValueError as exc:
            self.fail(section, key, str(exc))
        except Exception as exc:
            self.fail(section, key, f"expression {text!r} fails to evaluate ({exc})")
        return expr.point_function(dim, extra)


def _type_ok(value, kind):
    if kind is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool) \
            and math.isfinite(value)
    if kind is int:
        return isinstance(value, int) and not isinstance(value, bool)
    if kind is bool:
        return isinstance(value, bool)
    if kind is str:
        return isinstance(value, str)
    if kind is list:
        return isinstance(value, list)
    return True


def _point(value, dim):
    return isinstance(value, list) and len(value) == dim and all(_type_ok(v, float) for v in value)


def _shape(reader, section):
    reader.table(section)
    shape = reader.get(section, "shape", str, check=lambda v: v in SHAPES,
                       hint=f"expected one of {', '.join(SHAPES)}")
    if shape in ("disk", "ball"):
        dim = 2 if shape == "disk" else 3
        center = reader.get(section, "center", list, [0.0] * dim, check=lambda v: _point(v, dim),
                            hint=f"expected {dim} numbers")
        radius = reader.get(section, "radius", float, 1.0, check=lambda v: v > 0,
                            hint="expected a positive number")
        cls = Disk if dim == 2 else Ball
        return cls(tuple(float(c) for c in center), radius)
    if shape == "rect":
        pair = lambda v: _point(v, 2) and v[0] < v[1]
        xr = reader.get(section, "x_range", list, [0.0, 1.0], check=pair,
                        hint="expected [lo, hi] with lo < hi")
        yr = reader.get(section, "y_range", list, [0.0, 1.0], check=pair,
                        hint="expected [lo, hi] with lo < hi")
        return Rect(tuple(map(float, xr)), tuple(map(float, yr)))
    base = reader.get(section, "base", float)
    amplitude = reader.get(section, "amplitude", float, 0.0)
    frequency = reader.get(section, "frequency", int, 1, check=lambda v: v >= 0,
                           hint="expected a nonnegative integer")
    center = reader.get(section, "center", list, [0.0, 0.0], check=lambda v: _point(v, 2),
                        hint="expected 2 numbers")
    if not base > abs(amplitude):
        reader.fail(section, "amplitude", "radius base + amplitude * cos(...) must stay positive")
    return PolarStar.cosine(base, amplitude, frequency, tuple(map(float, center)))


def _positive(v):
    return v > 0


def _zero_transform(points, s):
    return np.zeros(np.atleast_2d(points).shape[0])


def load(path):
    """Parse and validate a configuration file.

    Raises
    ------
    ConfigError
        With ``file:line: section.key: message`` text.
    """
    try:
        with open(path, "rb") as fh:
            raw_bytes = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read configuration ({exc.strerror})")
    try:
        text = raw_bytes.decode("utf-8")
    except UnicodeDecodeError:
        raise ConfigError(f"{path}: configuration is not valid UTF-8")
    return loads(text, str(path))


def loads(text, path="<config>"):
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML syntax error: {exc}")
    r = _Reader(path, text, data)
    for section, body in data.items():
        if section not in KNOWN_KEYS:
            r.fail(section, None,
                   f"unknown section; expected one of {', '.join(sorted(KNOWN_KEYS))}")
        if not isinstance(body, dict):
            raise ConfigError(f"{path}: {section}: must be a [table]")
        for key in body:
            if key not in KNOWN_KEYS[section]:
                r.fail(section, key, "unknown field; expected one of "
                       + ", ".join(sorted(KNOWN_KEYS[section])))

    r.table("problem")
    kind = r.get("problem", "kind", str, check=lambda v: v in KINDS,
                 hint=f"expected one of {', '.join(KINDS)}")
    domain = _shape(r, "domain")
    dim = domain.dim
    if kind != "helmholtz" and dim != 2:
        r.fail("domain", "shape", "time-dependent problems are two-dimensional")
    fictitious = _shape(r, "fictitious")
    if fictitious.dim != dim:
        r.fail("fictitious", "shape", "must have the same dimension as the domain")

    r.table("mfs")
    mfs = {
        "n_points": r.get("mfs", "n_points", int, check=_positive,
                          hint="expected a positive integer"),
        "regularization": r.get("mfs", "regularization", float, 0.0, check=lambda v: v >= 0,
                                hint="expected a nonnegative number"),
    }

    mps = None
    if "mps" in data:
        r.table("mps")
        rbf = r.get("mps", "rbf", str, "gaussian", check=lambda v: v in ("gaussian", "bump"),
                    hint="expected gaussian or bump")
        mps = {
            "rbf": rbf,
            "c": r.get("mps", "c", float, 1.0 if rbf == "bump" else ..., check=_positive,
                       hint="expected a positive number"),
            "n": r.get("mps", "n", int, check=_positive, hint="expected a positive integer"),
            "gamma": r.get("mps", "gamma", float, 0.5, check=lambda v: 0 <= v <= 1,
                           hint="expected a number in [0, 1]"),
            "delta": r.get("mps", "delta", float, 0.2, check=_positive,
                           hint="expected a positive number"),
            "normalize": r.get("mps", "normalize", bool, True),
        }

    coords = ("x", "y", "z")[:dim]
    prob = {}
    if kind == "helmholtz":
        prob["operator"] = r.get("problem", "operator", str, "modified",
                                 check=lambda v: v in ("modified", "oscillatory"),
                                 hint="expected modified or oscillatory")
        prob["wavenumber"] = r.get("problem", "wavenumber", float, check=lambda v: v >= 0,
                                   hint="expected a nonnegative number")
        prob["dirichlet"] = r.expression("problem", "dirichlet", coords, dim=dim)
        if prob["dirichlet"] is None:
            r.get("problem", "dirichlet", str)
        prob["source"] = r.expression("problem", "source", coords, dim=dim)
        prob["exact"] = r.expression("problem", "exact", coords, dim=dim)
    else:
        prob["coefficient"] = r.get("problem", "coefficient", float, check=_positive,
                                    hint="expected a positive number")
        prob["u0"] = r.expression("problem", "u0", coords, dim=dim)
        prob["offset"] = r.get("problem", "offset", float, 0.0)
        if kind.startswith("wave"):
            prob["v0"] = r.expression("problem", "v0", coords, dim=dim)
        if kind.endswith("_lt"):
            prob["boundary_transform"] = r.expression(
                "problem", "boundary_transform", coords + ("s",), dim=dim, extra=("s",))
            if prob["boundary_transform"] is None:
                prob["boundary_transform"] = _zero_transform
        else:
            prob["g"] = r.expression("problem", "g", coords + ("t",), dim=dim, extra=("t",))
        prob["exact"] = r.expression("problem", "exact", coords + ("t",), dim=dim, extra=("t",))
    series = r.get("problem", "series", str, None, check=lambda v: v in ("diffusion", "wave"),
                   hint="expected diffusion or wave")
    if series is not None and kind == "helmholtz":
        r.fail("problem", "series", "series references apply to time-dependent problems")
    if series is not None and prob.get("exact") is not None:
        r.fail("problem", "series", "give either exact or series, not both")
    prob["series"] = series
    prob["series_half_width"] = r.get("problem", "series_half_width", float, 0.1,
                                      check=_positive, hint="expected a positive number")

    needs_mps = (kind == "helmholtz" and prob["source"] is not None) or kind.endswith("_step") \
        or (kind.endswith("_lt") and (prob.get("u0") is not None or prob.get("v0") is not None))
    if needs_mps and mps is None:
        raise ConfigError(f"{path}: [mps]: required for a nonzero source term")

    time = {}
    if kind != "helmholtz":
        r.table("time")
        if kind.endswith("_lt"):
            time["t"] = r.get("time", "t", float, check=_positive, hint="expected a positive time")
            time["ns"] = r.get("time", "ns", int, 10, check=lambda v: 2 <= v <= 20 and v % 2 == 0,
                               hint="expected an even integer in [2, 20]")
            if kind == "wave_lt":
                time["sign"] = r.get("time", "sign", str, "derived",
                                     check=lambda v: v in ("derived", "paper"),
                                     hint="expected derived or paper")
        else:
            time["T"] = r.get("time", "T", float, check=_positive, hint="expected a positive time")
            time["steps"] = r.get("time", "steps", int,
                                  check=(lambda v: v >= 2) if kind == "wave_step" else _positive,
                                  hint="expected a positive integer (at least 2 for waves)")
            time["extension"] = r.get("time", "extension", str, "reflect",
                                      check=lambda v: v in ("reflect", "project", "field"),
                                      hint="expected reflect, project or field")
            time["lambda_convention"] = r.get("time", "lambda_convention", str, "pde",
                                              check=lambda v: v in ("pde", "paper"),
                                              hint="expected pde or paper")

    r.table("evaluation")
    pts = [np.zeros((0, dim))]
    listed = r.get("evaluation", "points", list, [],
                   check=lambda v: all(_point(p, dim) for p in v),
                   hint=f"expected a list of {dim}-coordinate points")
    if listed:
        pts.append(np.array(listed, dtype=np.float64))
    spiral = r.get("evaluation", "spiral", int, 0, check=lambda v: v >= 0,
                   hint="expected a nonnegative integer")
    if spiral:
        if dim != 2:
            r.fail("evaluation", "spiral", "spiral points are two-dimensional")
        from .geometry import spiral_points
        pts.append(spiral_points(spiral))
    nb = r.get("evaluation", "boundary", int, 0, check=lambda v: v >= 0,
               hint="expected a nonnegative integer")
    if nb:
        pts.append(domain.boundary_points(nb))
    points = np.vstack(pts)
    if points.shape[0] == 0:
        raise ConfigError(f"{path}: [evaluation]: no evaluation points configured")

    out_dir = r.get("output", "dir", str, "out")
    return RunConfig(path, text, data, kind, dim, domain, fictitious, mfs, mps, prob, time,
                     points, out_dir)
