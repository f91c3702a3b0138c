"""Arithmetic mini-language for dependent properties.

Deliberately small so config files stay portable: numbers, + - * / **,
unary minus, pi, pow/min/max/abs/sqrt, bare names (sibling properties) and
dotted names (properties exported by an upstream feature, written
``feature_name.property``). Anything else is rejected at parse time.
Arbitrary code only enters the engine through the external-function hook
in the embedding API, never through config text.
"""

from __future__ import annotations

import ast
import math
from collections.abc import Mapping

from .errors import UnknownReference, ValidationError

_ALLOWED_CALLS = {
    "pow": pow,
    "min": min,
    "max": max,
    "abs": abs,
    "sqrt": math.sqrt,
}

_CONSTANTS = {"pi": math.pi}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a**b,
}


class Expression:
    """A parsed dependent-property expression."""

    def __init__(self, text: str):
        self.text = text
        try:
            tree = ast.parse(text, mode="eval")
        except SyntaxError as exc:
            raise ValidationError(f"bad expression {text!r}: {exc.msg}") from exc
        _check(tree.body, text)
        self._tree = tree.body
        self.references = _collect_references(tree.body)

    def evaluate(
        self,
        local: Mapping[str, float],
        upstream: Mapping[str, Mapping[str, float]] | None = None,
    ) -> float:
        """Evaluate against sibling values and named upstream records."""
        return _eval(self._tree, local, upstream or {})

    def __repr__(self) -> str:
        return f"Expression({self.text!r})"


def _check(node: ast.expr, text: str) -> None:
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ValidationError(f"non-numeric constant in {text!r}")
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ValidationError(f"operator not allowed in {text!r}")
        _check(node.left, text)
        _check(node.right, text)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise ValidationError(f"operator not allowed in {text!r}")
        _check(node.operand, text)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_CALLS:
            raise ValidationError(f"call not allowed in {text!r}")
        if node.keywords:
            raise ValidationError(f"keyword arguments not allowed in {text!r}")
        arity = {"abs": (1, 1), "sqrt": (1, 1), "pow": (2, 2), "min": (2, None), "max": (2, None)}
        low, high = arity[node.func.id]
        if len(node.args) < low or (high is not None and len(node.args) > high):
            raise ValidationError(
                f"{node.func.id} takes {'at least ' if high is None else ''}"
                f"{low}{'' if high in (low, None) else f'..{high}'} arguments "
                f"in {text!r}"
            )
        for arg in node.args:
            _check(arg, text)
    elif isinstance(node, ast.Name):
        pass
    elif isinstance(node, ast.Attribute):
        if not isinstance(node.value, ast.Name):
            raise ValidationError(f"only one-level dotted names allowed in {text!r}")
    else:
        raise ValidationError(f"syntax not allowed in {text!r}: {type(node).__name__}")


def _collect_references(node: ast.expr) -> tuple[str, ...]:
    """All names the expression reads, dotted ones as 'feature.prop'."""
    refs: list[str] = []

    def walk(n: ast.expr) -> None:
        if isinstance(n, ast.Name):
            if n.id not in _CONSTANTS:
                refs.append(n.id)
        elif isinstance(n, ast.Attribute):
            refs.append(f"{n.value.id}.{n.attr}")  # type: ignore[union-attr]
        elif isinstance(n, ast.BinOp):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, ast.UnaryOp):
            walk(n.operand)
        elif isinstance(n, ast.Call):
            for a in n.args:
                walk(a)

    walk(node)
    return tuple(dict.fromkeys(refs))


def _eval(
    node: ast.expr,
    local: Mapping[str, float],
    upstream: Mapping[str, Mapping[str, float]],
) -> float:
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](
            _eval(node.left, local, upstream), _eval(node.right, local, upstream)
        )
    if isinstance(node, ast.UnaryOp):
        value = _eval(node.operand, local, upstream)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.Call):
        args = [_eval(a, local, upstream) for a in node.args]
        return float(_ALLOWED_CALLS[node.func.id](*args))  # type: ignore[union-attr]
    if isinstance(node, ast.Name):
        if node.id in _CONSTANTS:
            return _CONSTANTS[node.id]
        if node.id in local:
            return local[node.id]
        raise UnknownReference(f"unknown property '{node.id}'")
    if isinstance(node, ast.Attribute):
        feature = node.value.id  # type: ignore[union-attr]
        if feature not in upstream:
            raise UnknownReference(f"unknown upstream feature '{feature}'")
        values = upstream[feature]
        if node.attr not in values:
            raise UnknownReference(f"upstream '{feature}' has no property '{node.attr}'")
        return values[node.attr]
    raise AssertionError(f"unchecked node {node!r}")
