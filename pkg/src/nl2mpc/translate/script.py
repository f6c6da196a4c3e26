"""Reward-script parsing: a deliberately tiny, safe surface.

Completions are code-writing responses.  We extract the code region (fenced
blocks if present, otherwise the whole text), parse it with the `ast`
module, and accept only: calls to whitelisted functions with literal-ish
arguments, and one simple loop form (a variable iterating over a list of
string literals with calls in the body).  Arguments may be numbers, strings,
booleans, None, tuples/lists of those, unary minus, products, `np.pi`/`pi`,
and `np.deg2rad(...)`; everything else is rejected with the source line.
Import statements and comments are skipped.  Nothing is ever executed;
interpretation happens separately against the embodiment's reward API.
"""

from __future__ import annotations

import ast
import json
import math
import re
from dataclasses import dataclass, field
from typing import Collection

from nl2mpc.errors import ParseError, StructureError, WhitelistError

_FENCE_RE = re.compile(r"```[a-zA-Z0-9_+-]*\n(.*?)```", re.DOTALL)


@dataclass(frozen=True)
class LoopVar:
    """Occurrence of the loop variable inside a loop body call."""

    name: str


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple = ()
    kwargs: tuple = ()             # ((name, value), ...) in source order
    line: int = 0

    def bound(self, var: str, value: str) -> "Call":
        def fill(v):
            if isinstance(v, LoopVar) and v.name == var:
                return value
            if isinstance(v, tuple):
                return tuple(fill(e) for e in v)
            return v

        return Call(
            name=self.name,
            args=tuple(fill(a) for a in self.args),
            kwargs=tuple((k, fill(v)) for k, v in self.kwargs),
            line=self.line,
        )


@dataclass(frozen=True)
class Loop:
    var: str
    items: tuple[str, ...]
    body: tuple[Call, ...]
    line: int = 0


@dataclass(frozen=True)
class RewardScript:
    statements: tuple = ()         # Call | Loop, in source order

    def calls(self) -> tuple[Call, ...]:
        """Loop-expanded call sequence."""
        out = []
        for stmt in self.statements:
            if isinstance(stmt, Call):
                out.append(stmt)
            else:
                for item in stmt.items:
                    out.extend(c.bound(stmt.var, item) for c in stmt.body)
        return tuple(out)


def extract_code(text: str) -> str:
    """The fenced code blocks joined, or the whole text when unfenced."""
    blocks = _FENCE_RE.findall(text)
    if blocks:
        return "\n".join(blocks)
    return text


def _eval_arg(node: ast.expr, loop_var: str | None):
    if isinstance(node, ast.Constant):
        v = node.value
        if v is None or isinstance(v, (bool, int, float, str)):
            return v
        raise ParseError(f"unsupported literal {v!r}", line=node.lineno)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        inner = _eval_arg(node.operand, loop_var)
        if isinstance(inner, bool) or not isinstance(inner, (int, float)):
            raise ParseError("unary minus on a non-number", line=node.lineno)
        return -inner
    if isinstance(node, (ast.Tuple, ast.List)):
        return tuple(_eval_arg(e, loop_var) for e in node.elts)
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Mult):
        a = _eval_arg(node.left, loop_var)
        b = _eval_arg(node.right, loop_var)
        for v in (a, b):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError("product of non-numbers", line=node.lineno)
        return a * b
    if isinstance(node, ast.Attribute):
        if isinstance(node.value, ast.Name) and node.value.id == "np" and node.attr == "pi":
            return math.pi
        raise ParseError(f"unsupported attribute expression at line {node.lineno}", line=node.lineno)
    if isinstance(node, ast.Name):
        if node.id == "pi":
            return math.pi
        if loop_var is not None and node.id == loop_var:
            return LoopVar(node.id)
        raise ParseError(f"unknown name {node.id!r} in argument", line=node.lineno)
    if isinstance(node, ast.Call):
        fn = node.func
        is_deg2rad = (
            isinstance(fn, ast.Attribute)
            and isinstance(fn.value, ast.Name)
            and fn.value.id == "np"
            and fn.attr == "deg2rad"
        ) or (isinstance(fn, ast.Name) and fn.id == "deg2rad")
        if not is_deg2rad:
            raise ParseError("only np.deg2rad may be called inside arguments", line=node.lineno)
        if len(node.args) != 1 or node.keywords:
            raise ParseError("np.deg2rad takes exactly one argument", line=node.lineno)
        inner = _eval_arg(node.args[0], loop_var)
        if isinstance(inner, bool) or not isinstance(inner, (int, float)):
            raise ParseError("np.deg2rad of a non-number", line=node.lineno)
        return math.radians(inner)
    raise ParseError(
        f"unsupported argument expression at line {node.lineno}", line=node.lineno
    )


def _parse_call(node: ast.Call, allowed: Collection[str], loop_var: str | None) -> Call:
    if not isinstance(node.func, ast.Name):
        raise ParseError("only plain function calls are allowed", line=node.lineno)
    name = node.func.id
    if name not in allowed:
        raise WhitelistError(
            f"call to {name!r} is not in the allowed function set", line=node.lineno
        )
    args = tuple(_eval_arg(a, loop_var) for a in node.args)
    kwargs = []
    for kw in node.keywords:
        if kw.arg is None:
            raise ParseError("**kwargs expansion is not allowed", line=node.lineno)
        kwargs.append((kw.arg, _eval_arg(kw.value, loop_var)))
    return Call(name=name, args=args, kwargs=tuple(kwargs), line=node.lineno)


def _parse_loop(node: ast.For, allowed: Collection[str]) -> Loop:
    if not isinstance(node.target, ast.Name):
        raise ParseError("loop target must be a plain variable", line=node.lineno)
    if node.orelse:
        raise ParseError("for/else is not allowed", line=node.lineno)
    if not isinstance(node.iter, (ast.List, ast.Tuple)):
        raise ParseError("loops may only iterate over a list of strings", line=node.lineno)
    items = []
    for elt in node.iter.elts:
        if not (isinstance(elt, ast.Constant) and isinstance(elt.value, str)):
            raise ParseError("loops may only iterate over a list of strings", line=node.lineno)
        items.append(elt.value)
    var = node.target.id
    body = []
    for stmt in node.body:
        if not (isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Call)):
            raise ParseError("loop bodies may only contain calls", line=stmt.lineno)
        body.append(_parse_call(stmt.value, allowed, var))
    return Loop(var=var, items=tuple(items), body=tuple(body), line=node.lineno)


def parse_reward_script(text: str, allowed_calls: Collection[str]) -> RewardScript:
    """Parse a completion into a validated RewardScript.

    `allowed_calls` is the embodiment's reward API plus the interpreter
    built-ins (reset_reward, execute_plan).  Exactly one execute_plan call
    must appear, as the final statement.
    """
    code = extract_code(text)
    try:
        tree = ast.parse(code)
    except SyntaxError as e:
        raise ParseError(f"syntax error: {e.msg}", line=e.lineno or 0) from None

    statements = []
    for node in tree.body:
        if isinstance(node, (ast.Import, ast.ImportFrom)):
            continue
        if isinstance(node, ast.Expr) and isinstance(node.value, ast.Call):
            statements.append(_parse_call(node.value, allowed_calls, None))
        elif isinstance(node, ast.For):
            statements.append(_parse_loop(node, allowed_calls))
        else:
            raise ParseError(
                f"unsupported statement at line {node.lineno}", line=node.lineno
            )

    script = RewardScript(statements=tuple(statements))
    execs = [c for c in script.calls() if c.name == "execute_plan"]
    if not execs:
        raise StructureError("execute_plan absent: it must be called exactly once at the end")
    if len(execs) > 1:
        raise StructureError(
            f"execute_plan called {len(execs)} times; it must be called exactly once",
            line=execs[1].line,
        )
    last = script.statements[-1]
    if not (isinstance(last, Call) and last.name == "execute_plan"):
        raise StructureError(
            "execute_plan must be the final statement", line=execs[0].line
        )
    return script


def _render_value(v) -> str:
    if isinstance(v, LoopVar):
        return v.name
    if v is None or isinstance(v, bool):
        return repr(v)
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, tuple):
        inner = ", ".join(_render_value(e) for e in v)
        return f"({inner},)" if len(v) == 1 else f"({inner})"
    raise TypeError(f"cannot render {v!r}")


def _render_call(call: Call) -> str:
    parts = [_render_value(a) for a in call.args]
    parts += [f"{k}={_render_value(v)}" for k, v in call.kwargs]
    return f"{call.name}({', '.join(parts)})"


def pretty(script: RewardScript) -> str:
    """Canonical rendering; parsing it back yields an equivalent script."""
    lines = []
    for stmt in script.statements:
        if isinstance(stmt, Call):
            lines.append(_render_call(stmt))
        else:
            items = ", ".join(json.dumps(i) for i in stmt.items)
            lines.append(f"for {stmt.var} in [{items}]:")
            lines.extend(f"    {_render_call(c)}" for c in stmt.body)
    return "\n".join(lines) + "\n"
