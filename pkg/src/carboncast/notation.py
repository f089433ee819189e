"""Parsing and formatting of SVR hyperparameter strings.

Grammar:  SVR( key = value {, key = value} )  with arbitrary whitespace.
Keys: C, epsilon, gamma, kernel, degree, coef0.  Values are decimal
literals or single-quoted strings.  Omitted keys take the documented
defaults epsilon=0.1, gamma='scale', kernel='rbf' (degree=3, coef0=0.0
for the polynomial kernel).  Formatting emits one canonical form per spec,
so parse(format(spec)) == spec and format(parse(s)) is idempotent.
"""

import re

from .baselines import BaselineSpec
from .errors import BadValue, NotationSyntaxError, UnknownKey
from .kernels import KernelSpec
from .svm import SvmHyperParams

_KEYS = ("C", "epsilon", "gamma", "kernel", "degree", "coef0")
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

DEFAULT_EPSILON = 0.1
DEFAULT_GAMMA = "scale"
DEFAULT_KERNEL = "rbf"


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, literal: str):
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            raise NotationSyntaxError(f"expected {literal!r}", self.pos)
        self.pos += len(literal)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def ident(self) -> str:
        self.skip_ws()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            raise NotationSyntaxError("expected a key name", self.pos)
        self.pos = m.end()
        return m.group()

    def value(self):
        """Returns ('str', s) or ('num', x)."""
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == "'":
            end = self.text.find("'", self.pos + 1)
            if end < 0:
                raise NotationSyntaxError("unterminated string", self.pos)
            s = self.text[self.pos + 1:end]
            self.pos = end + 1
            return "str", s
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            raise NotationSyntaxError("expected a number or quoted string", self.pos)
        self.pos = m.end()
        return "num", float(m.group())


def parse_model_string(s: str) -> SvmHyperParams:
    """Parse an SVR hyperparameter string; see the module grammar."""
    sc = _Scanner(s)
    sc.expect("SVR")
    sc.expect("(")
    entries = {}
    if sc.peek() != ")":
        while True:
            key_pos = sc.pos
            key = sc.ident()
            if key not in _KEYS:
                raise UnknownKey(f"unknown key {key!r} (position {key_pos}); "
                                 f"valid keys: {', '.join(_KEYS)}")
            if key in entries:
                raise BadValue(f"duplicate key {key!r}")
            sc.expect("=")
            entries[key] = sc.value()
            nxt = sc.peek()
            if nxt == ",":
                sc.pos += 1
                continue
            if nxt == ")":
                break
            raise NotationSyntaxError("expected ',' or ')'", sc.pos)
    sc.expect(")")
    sc.skip_ws()
    if sc.pos != len(s):
        raise NotationSyntaxError("trailing characters after ')'", sc.pos)
    return _build(entries)


def _num(entries, key, default):
    if key not in entries:
        return default
    kind, val = entries[key]
    if kind != "num":
        raise BadValue(f"{key} must be a number, got {val!r}")
    return val


def _build(entries) -> SvmHyperParams:
    C = _num(entries, "C", None)
    if C is None:
        raise BadValue("C is required")
    if C <= 0:
        raise BadValue("C must be > 0")
    epsilon = _num(entries, "epsilon", DEFAULT_EPSILON)
    if epsilon < 0:
        raise BadValue("epsilon must be >= 0")

    kernel = DEFAULT_KERNEL
    if "kernel" in entries:
        kind, val = entries["kernel"]
        if kind != "str":
            raise BadValue(f"kernel must be a quoted string, got {val!r}")
        kernel = {"poly": "polynomial"}.get(val, val)
        if kernel not in ("linear", "rbf", "polynomial"):
            raise BadValue(f"kernel must be 'linear', 'rbf' or 'polynomial', got {val!r}")

    gamma = DEFAULT_GAMMA
    if "gamma" in entries:
        kind, val = entries["gamma"]
        if kind == "str":
            if val not in ("scale", "auto"):
                raise BadValue(f"gamma must be 'scale', 'auto' or a positive number, got {val!r}")
            gamma = val
        else:
            if val <= 0:
                raise BadValue("explicit gamma must be > 0")
            gamma = val

    degree = 3
    if "degree" in entries:
        val = _num(entries, "degree", 3)
        if val != int(val) or val < 1:
            raise BadValue(f"degree must be a positive integer, got {val}")
        degree = int(val)
    coef0 = _num(entries, "coef0", 0.0)

    if kernel == "linear":
        # the linear kernel ignores these keys; normalize so the canonical
        # form round-trips
        gamma, degree, coef0 = DEFAULT_GAMMA, 3, 0.0

    return SvmHyperParams(C=C, epsilon=epsilon,
                          kernel=KernelSpec(kernel, gamma, degree, coef0))


def _fmt_num(x: float) -> str:
    return repr(float(x))


def format_model_string(params: SvmHyperParams) -> str:
    """Canonical string for an SVR spec; the linear kernel omits the keys
    it ignores so specs round-trip unchanged."""
    parts = [f"C={_fmt_num(params.C)}", f"epsilon={_fmt_num(params.epsilon)}"]
    k = params.kernel
    if k.kind != "linear":
        gamma = f"'{k.gamma}'" if isinstance(k.gamma, str) else _fmt_num(k.gamma)
        parts.append(f"gamma={gamma}")
    if k.kind == "polynomial":
        parts.append(f"degree={k.degree}")
        parts.append(f"coef0={_fmt_num(k.coef0)}")
    parts.append(f"kernel='{k.kind}'")
    return f"SVR({', '.join(parts)})"


def format_spec(spec) -> str:
    """Display string for any grid candidate (SVR or baseline)."""
    if isinstance(spec, SvmHyperParams):
        return format_model_string(spec)
    if isinstance(spec, BaselineSpec):
        if spec.kind == "ols":
            return "OLS()"
        if spec.kind == "ridge":
            return f"Ridge(lambda={_fmt_num(spec.lam)})"
        if spec.kind == "lasso":
            return f"Lasso(lambda={_fmt_num(spec.lam)})"
        return f"Polynomial(degree={spec.degree})"
    return repr(spec)
