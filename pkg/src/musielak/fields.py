"""Spatial coefficient fields and the expression mini-language.

A SpatialField maps points in R^n to scalars. Three kinds are supported:

- ``constant``:   payload is a number.
- ``expression``: payload is a formula over x1..xn and abs(x) (the euclidean
                  norm), with + - * / ^, exp, log, min, max and literals.
- ``grid``:       payload tabulates values against |x| (radial table, linear
                  interpolation, clamped at the ends).

Every field may declare a closed range [lo, hi]; evaluation raises
FieldDomainError when a computed value escapes it. Fields may also declare a
``limit``: the value approached as |x| -> infinity. Declared limits let
downstream asymptotics skip the radius-ladder sweep.
"""

import ast

import numpy as np

from .errors import ConfigError, FieldDomainError

_ALLOWED_CALLS = {"abs", "exp", "log", "min", "max"}

_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


def _compile_node(node, n):
    """Recursively compile an AST node to a closure over (X, R).

    X has shape (m, n); R = |X| row norms, precomputed once per evaluation.
    """
    if isinstance(node, ast.Expression):
        return _compile_node(node.body, n)
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ConfigError(f"non-numeric literal {node.value!r} in expression")
        v = float(node.value)
        return lambda X, R: v
    if isinstance(node, ast.Name):
        name = node.id
        if name == "x":
            raise ConfigError("bare 'x' is only valid inside abs(x)")
        if name.startswith("x") and name[1:].isdigit():
            i = int(name[1:]) - 1
            if not 0 <= i < n:
                raise ConfigError(f"coordinate {name} out of range for n={n}")
            return lambda X, R: X[:, i]
        raise ConfigError(f"unknown identifier {name!r} in expression")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _compile_node(node.operand, n)
        if isinstance(node.op, ast.USub):
            return lambda X, R: -inner(X, R)
        return inner
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        lhs = _compile_node(node.left, n)
        rhs = _compile_node(node.right, n)
        return lambda X, R: op(lhs(X, R), rhs(X, R))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_CALLS:
            raise ConfigError("only abs/exp/log/min/max calls are allowed")
        fname = node.func.id
        if node.keywords:
            raise ConfigError("keyword arguments are not part of the grammar")
        if fname == "abs":
            if len(node.args) != 1:
                raise ConfigError("abs takes exactly one argument")
            arg = node.args[0]
            if isinstance(arg, ast.Name) and arg.id == "x":
                return lambda X, R: R
            inner = _compile_node(arg, n)
            return lambda X, R: np.abs(inner(X, R))
        if fname in ("exp", "log"):
            if len(node.args) != 1:
                raise ConfigError(f"{fname} takes exactly one argument")
            inner = _compile_node(node.args[0], n)
            fn = np.exp if fname == "exp" else np.log
            return lambda X, R: fn(inner(X, R))
        # min/max over two or more arguments
        if len(node.args) < 2:
            raise ConfigError(f"{fname} needs at least two arguments")
        parts = [_compile_node(a, n) for a in node.args]
        red = np.minimum if fname == "min" else np.maximum
        def folded(X, R, parts=parts, red=red):
            acc = parts[0](X, R)
            for p in parts[1:]:
                acc = red(acc, p(X, R))
            return acc
        return folded
    raise ConfigError(f"disallowed syntax in expression: {ast.dump(node)}")


def compile_expression(text, n):
    """Compile an expression string to ``f(X) -> values`` over points X (m,n)."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as e:
        raise ConfigError(f"cannot parse expression {text!r}: {e}") from e
    fn = _compile_node(tree, n)

    def evaluate(X, fn=fn):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            R = np.sqrt(np.sum(X * X, axis=1))
            out = fn(X, R)
        return np.broadcast_to(np.asarray(out, dtype=float), (X.shape[0],)).copy()

    return evaluate


class SpatialField:
    """Scalar coefficient field on R^n with optional range and limit at infinity."""

    def __init__(self, kind, payload, n, rng=None, limit=None, name=""):
        self.kind = kind
        self.n = int(n)
        self.name = name
        self.range = None if rng is None else (float(rng[0]), float(rng[1]))
        self._limit = None if limit is None else float(limit)
        if kind == "constant":
            self._value = float(payload)
            if self._limit is None:
                self._limit = self._value
        elif kind == "expression":
            self._text = str(payload)
            self._fn = compile_expression(self._text, self.n)
        elif kind == "grid":
            radii = np.asarray(payload["radii"], dtype=float)
            values = np.asarray(payload["values"], dtype=float)
            if radii.ndim != 1 or radii.shape != values.shape or radii.size < 2:
                raise ConfigError("grid field needs matching 1-d radii/values, len >= 2")
            if np.any(np.diff(radii) <= 0):
                raise ConfigError("grid field radii must be strictly increasing")
            self._radii, self._values = radii, values
            if self._limit is None:
                self._limit = float(values[-1])
        else:
            raise ConfigError(f"unknown field kind {kind!r}")

    def __call__(self, X):
        """Evaluate at points X of shape (m, n) or a single point of shape (n,)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n:
            raise FieldDomainError(
                f"field {self.name or self.kind}: points have dimension "
                f"{X.shape[1]}, expected {self.n}")
        if self.kind == "constant":
            out = np.full(X.shape[0], self._value)
        elif self.kind == "expression":
            out = self._fn(X)
        else:
            r = np.sqrt(np.sum(X * X, axis=1))
            out = np.interp(r, self._radii, self._values)
        if self.range is not None:
            lo, hi = self.range
            bad = (out < lo - 1e-12) | (out > hi + 1e-12) | ~np.isfinite(out)
            if np.any(bad):
                i = int(np.argmax(bad))
                raise FieldDomainError(
                    f"field {self.name or self.kind}: value {out[i]!r} at "
                    f"x={X[i]} escapes declared range [{lo}, {hi}]")
        return out

    def at(self, x):
        """Scalar evaluation at one point."""
        return float(self(np.asarray(x, dtype=float).reshape(1, -1))[0])

    @property
    def limit(self):
        """Declared value at |x| -> infinity, or None if not declared."""
        return self._limit

    @classmethod
    def constant(cls, value, n, name=""):
        return cls("constant", value, n, name=name)

    @classmethod
    def from_config(cls, doc, n):
        """Build from a config mapping {name, kind, payload, range?, limit?}."""
        allowed = {"name", "kind", "payload", "range", "limit"}
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigError(f"field config has unknown keys {sorted(unknown)}")
        for key in ("kind", "payload"):
            if key not in doc:
                raise ConfigError(f"field config is missing required key {key!r}")
        return cls(doc["kind"], doc["payload"], n, rng=doc.get("range"),
                   limit=doc.get("limit"), name=doc.get("name", ""))
