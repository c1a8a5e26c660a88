# Copyright © 2025 The linsys developers

"""
Arithmetic expressions over a vector of base means.

SMOOTH entries of a :class:`linsys.moments.MomentModel` are written as strings
such as ``"m[1]/m[0] - (m[1]/m[0])^3/3"``. Only numbers, the variable ``m``
indexed by integer literals, unary signs, parentheses and the binary
operators ``+ - * / ^`` are accepted; ``**`` is a synonym for ``^``.

Examples
--------

>>> from linsys.expression import Expression
>>> _g = Expression("m[0]^2 + 2*m[1]")
>>> _g([3.0, 0.5])
10.0
>>> _g.arity
2
"""

import ast
import operator

import numpy as np

from .exceptions import ModelSpecError

__all__ = ["Expression"]

_BINARY = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


class Expression:
    """A parsed expression, callable on a sequence of base means."""

    def __init__(self, source):
        if not isinstance(source, str) or not source.strip():
            raise ModelSpecError(
                "expression must be a non-empty string, found {0!r}".format(source)
            )
        self.source = source
        try:
            _tree = ast.parse(source.replace("^", "**"), mode="eval")
        except SyntaxError as _err:
            raise ModelSpecError(
                "cannot parse expression {0!r}: {1}".format(source, _err.msg)
            ) from _err
        self._body = _tree.body
        self._indices = set()
        self._check(self._body)

    @property
    def arity(self) -> int:
        """One more than the largest index of ``m`` that appears."""
        return max(self._indices) + 1 if self._indices else 0

    def _check(self, node):
        if isinstance(node, ast.BinOp) and type(node.op) in _BINARY:
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            self._check(node.operand)
        elif isinstance(node, ast.Constant) and _is_number(node.value):
            pass
        elif isinstance(node, ast.Subscript):
            self._indices.add(_subscript_index(node, self.source))
        else:
            raise ModelSpecError(
                "unsupported syntax {0} in expression {1!r}".format(
                    type(node).__name__, self.source
                )
            )

    def _eval(self, node, means):
        if isinstance(node, ast.BinOp):
            return _BINARY[type(node.op)](
                self._eval(node.left, means), self._eval(node.right, means)
            )
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](self._eval(node.operand, means))
        if isinstance(node, ast.Constant):
            return float(node.value)
        return means[_subscript_index(node, self.source)]

    def __call__(self, means) -> float:
        _means = np.asarray(means, dtype=float)
        if _means.shape[0] < self.arity:
            raise ModelSpecError(
                "expression {0!r} needs {1} base means, got {2}".format(
                    self.source, self.arity, _means.shape[0]
                )
            )
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            try:
                return float(self._eval(self._body, _means))
            except (ZeroDivisionError, OverflowError, TypeError):
                return float("nan")

    def __repr__(self) -> str:
        return "Expression({0!r})".format(self.source)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _subscript_index(node, source) -> int:
    _slice = node.slice
    # Python 3.8 wraps the index in ast.Index
    if isinstance(_slice, getattr(ast, "Index", ())):
        _slice = _slice.value
    if (
        isinstance(node.value, ast.Name)
        and node.value.id == "m"
        and isinstance(_slice, ast.Constant)
        and isinstance(_slice.value, int)
        and not isinstance(_slice.value, bool)
        and _slice.value >= 0
    ):
        return _slice.value
    raise ModelSpecError(
        "only m[<non-negative integer>] may be indexed in {0!r}".format(source)
    )
