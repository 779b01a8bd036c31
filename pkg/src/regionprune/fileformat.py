"""Reader and writer for the ``.POMDP`` model text format.

Supported statements::

    discount: 0.95
    values: reward | cost
    states: 3            | states: s0 s1 s2        (same for actions:, observations:)
    start: 0.5 0.5 0     | start: uniform | start: s1
    start include: s0 s1 | start exclude: s2
    T: a : s : s2 p      | T: a : s  <row>     | T: a  <matrix> | uniform | identity
    O: a : s2 : z p      | O: a : s2 <row>     | O: a  <matrix> | uniform
    R: a : s : s2 : z v  | R: a : s : s2 <row> | R: a : s <matrix>

``*`` is a wildcard in any identifier position and ``#`` starts a comment.
A statement naming more positions explicitly overrides one that uses more
wildcards, whatever their order; at equal specificity the later one wins.
Rewards are reduced to R^a(s) by taking the expectation over s2 and z.
"""

from __future__ import annotations

import logging
import re
import warnings
from dataclasses import dataclass

import numpy as np

from .dp import PomdpModel, model_diagnostics

log = logging.getLogger(__name__)

ROW_TOL = 1e-6
_HEADERS = ("discount", "values", "states", "actions", "observations", "start")
_BODY = ("T", "O", "R")
_TOKEN = re.compile(r":|[^\s:]+")


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class _Tok:
    text: str
    line: int


@dataclass
class _Stmt:
    keyword: str
    line: int
    tokens: list  # _Tok after the keyword's colon


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    for no, raw in enumerate(text.splitlines(), start=1):
        for t in _TOKEN.findall(raw.split("#", 1)[0]):
            toks.append(_Tok(t, no))
    return toks


def _statements(toks: list[_Tok]) -> list[_Stmt]:
    out: list[_Stmt] = []
    i = 0
    while i < len(toks):
        t = toks[i]
        if t.text in _HEADERS + _BODY and i + 1 < len(toks) and toks[i + 1].text == ":":
            out.append(_Stmt(t.text, t.line, []))
            i += 2
        elif t.text == "start" and i + 2 < len(toks) and toks[i + 1].text in ("include", "exclude") and toks[i + 2].text == ":":
            out.append(_Stmt("start " + toks[i + 1].text, t.line, []))
            i += 3
        elif not out:
            raise ParseError(f"unknown keyword {t.text!r}", t.line)
        else:
            stmt = out[-1]
            # a bare word at the start of a line after a complete statement
            if stmt.tokens and t.line != stmt.tokens[-1].line and _looks_like_keyword(toks, i):
                raise ParseError(f"unknown keyword {t.text!r}", t.line)
            stmt.tokens.append(t)
            i += 1
    return out


def _looks_like_keyword(toks, i) -> bool:
    return i + 1 < len(toks) and toks[i + 1].text == ":" and toks[i + 1].line == toks[i].line and not _is_number(toks[i].text)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def _number(tok: _Tok) -> float:
    try:
        v = float(tok.text)
    except ValueError:
        raise ParseError(f"expected a number, got {tok.text!r}", tok.line) from None
    if not np.isfinite(v):
        raise ParseError(f"non-finite number {tok.text!r}", tok.line)
    return v


class _Names:
    def __init__(self, what: str, stmt: _Stmt):
        self.what = what
        toks = stmt.tokens
        if not toks:
            raise ParseError(f"{what}: needs a count or a list of names", stmt.line)
        if len(toks) == 1 and toks[0].text.isdigit():
            self.size = int(toks[0].text)
            self.names = None
        else:
            self.names = tuple(t.text for t in toks)
            if len(set(self.names)) != len(self.names):
                raise ParseError(f"duplicate {what} name", stmt.line)
            self.size = len(self.names)
        if self.size < 1:
            raise ParseError(f"{what}: count must be positive", stmt.line)

    def resolve(self, tok: _Tok) -> list[int]:
        if tok.text == "*":
            return list(range(self.size))
        if self.names is not None and tok.text in self.names:
            return [self.names.index(tok.text)]
        if tok.text.isdigit() and int(tok.text) < self.size:
            return [int(tok.text)]
        raise ParseError(f"unknown {self.what} {tok.text!r}", tok.line)


def _split_fields(stmt: _Stmt) -> tuple[list[_Tok], list[_Tok]]:
    """Identifiers separated by colons, then the trailing data tokens."""
    toks = stmt.tokens
    ids: list[_Tok] = []
    i = 0
    while i < len(toks):
        ids.append(toks[i])
        if i + 1 < len(toks) and toks[i + 1].text == ":":
            i += 2
        else:
            i += 1
            break
    data = toks[i:]
    for t in data:
        if t.text == ":":
            raise ParseError("unexpected ':'", t.line)
    return ids, data


class _Layer:
    """Dense array plus per-entry specificity of the statement that set it."""

    def __init__(self, shape):
        self.value = np.zeros(shape)
        self.rank = np.full(shape, -1, dtype=np.int64)
        self.line = np.zeros(shape, dtype=np.int64)

    def assign(self, index: tuple, values, rank: int, line: int) -> None:
        ix = np.ix_(*index)
        mask = rank >= self.rank[ix]
        self.value[ix] = np.where(mask, np.broadcast_to(values, mask.shape), self.value[ix])
        self.rank[ix] = np.where(mask, rank, self.rank[ix])
        self.line[ix] = np.where(mask, line, self.line[ix])


def _body(stmt: _Stmt, layer: _Layer, dims: list[_Names], allow_identity: bool) -> None:
    """Shared logic for T:, O: and R: at all arities.

    ``dims`` are the name tables of every position; the statement names a
    prefix of them and supplies data for the remaining ones.
    """
    ids, data = _split_fields(stmt)
    if not ids:
        raise ParseError(f"{stmt.keyword}: missing identifiers", stmt.line)
    if len(ids) > len(dims):
        raise ParseError(f"{stmt.keyword}: too many fields", stmt.line)
    index = [names.resolve(t) for names, t in zip(dims, ids)]
    free = dims[len(ids):]
    rank = sum(t.text != "*" for t in ids) + len(free)
    shape = tuple(d.size for d in free)
    if not free:
        if len(data) != 1:
            raise ParseError(f"{stmt.keyword}: expected exactly one value", stmt.line)
        layer.assign(tuple(index), _number(data[0]), rank, stmt.line)
        return
    index += [list(range(d.size)) for d in free]
    if len(data) == 1 and data[0].text in ("uniform", "identity"):
        if stmt.keyword == "R":
            raise ParseError(f"{data[0].text} not allowed for R:", data[0].line)
        if data[0].text == "uniform":
            block = np.full(shape, 1.0 / shape[-1])
        else:
            if not allow_identity or len(shape) != 2 or shape[0] != shape[1]:
                raise ParseError("identity needs a square state-to-state matrix", data[0].line)
            block = np.eye(shape[0])
        layer.assign(tuple(index), block.reshape((1,) * len(ids) + shape), rank, stmt.line)
        return
    n = int(np.prod(shape))
    if len(data) != n:
        raise ParseError(f"{stmt.keyword}: expected {n} values, got {len(data)}", stmt.line)
    block = np.array([_number(t) for t in data]).reshape((1,) * len(ids) + shape)
    layer.assign(tuple(index), block, rank, stmt.line)


def _check_rows(P: _Layer, what: str, A: _Names, S: _Names, lines_of, strict: bool) -> np.ndarray:
    neg = np.argwhere(P.value < 0)
    if neg.size and strict:
        idx = tuple(int(x) for x in neg[0])
        raise ParseError(f"negative {what} probability {P.value[idx]:.10g}", int(P.line[idx]))
    sums = P.value.sum(axis=-1)
    bad = np.abs(sums - 1.0) > ROW_TOL
    if bad.any():
        idx = tuple(int(x) for x in np.argwhere(bad)[0])
        set_lines = P.line[idx][P.rank[idx] >= 0]
        line = int(set_lines.max()) if set_lines.size else lines_of
        a, s = idx
        a_name = A.names[a] if A.names else str(a)
        s_name = S.names[s] if S.names else str(s)
        msg = f"{what} row for action {a_name} state {s_name} sums to {sums[idx]:.10g}"
        if strict:
            raise ParseError(msg, line)
        return P.value
    # rows off by more than rounding (but within ROW_TOL) are rescaled
    drift = np.abs(sums - 1.0) > 1e-9
    out = P.value.copy()
    out[drift] /= sums[drift][:, None]
    return out


def parse(text: str, strict: bool = True) -> PomdpModel:
    """Parse ``.POMDP`` text into a :class:`PomdpModel`.

    With ``strict`` (the default) any row-sum violation or invalid discount
    raises :class:`ParseError`; otherwise the model is returned as read and
    :func:`validate` reports the problems.
    """
    stmts = _statements(_tokenize(text))
    head: dict[str, _Stmt] = {}
    for st in stmts:
        if st.keyword in _HEADERS:
            if st.keyword in head:
                raise ParseError(f"duplicate {st.keyword}: statement", st.line)
            head[st.keyword] = st
    for key in ("discount", "states", "actions", "observations"):
        if key not in head:
            raise ParseError(f"missing mandatory {key}: statement")

    d = head["discount"]
    if len(d.tokens) != 1:
        raise ParseError("discount: expects one number", d.line)
    discount = _number(d.tokens[0])
    if strict and not 0.0 <= discount < 1.0:
        raise ParseError(f"discount {discount!r} outside [0, 1)", d.line)
    sign = 1.0
    if "values" in head:
        v = head["values"]
        if len(v.tokens) != 1 or v.tokens[0].text not in ("reward", "cost"):
            raise ParseError("values: must be 'reward' or 'cost'", v.line)
        sign = -1.0 if v.tokens[0].text == "cost" else 1.0

    S = _Names("state", head["states"])
    A = _Names("action", head["actions"])
    Z = _Names("observation", head["observations"])

    T = _Layer((A.size, S.size, S.size))
    O = _Layer((A.size, S.size, Z.size))
    R = _Layer((A.size, S.size, S.size, Z.size))
    R.value[:] = 0.0
    for st in stmts:
        if st.keyword == "T":
            _body(st, T, [A, S, S], allow_identity=True)
        elif st.keyword == "O":
            _body(st, O, [A, S, Z], allow_identity=False)
        elif st.keyword == "R":
            _body(st, R, [A, S, S, Z], allow_identity=False)
        elif st.keyword in ("start include", "start exclude"):
            head.setdefault("start", st)
            if head["start"] is not st:
                raise ParseError("more than one start statement", st.line)

    trans = _check_rows(T, "transition", A, S, d.line, strict)
    obs = _check_rows(O, "observation", A, S, d.line, strict)
    # expected immediate reward R^a(s) = sum_{s2,z} P(s2|s) O(z|s2) R(a,s,s2,z)
    reward = np.einsum("ast,atz,astz->as", trans, obs, R.value)
    # rewards that ignore s2 and z are taken as given, not re-averaged
    flat = R.value.reshape(A.size, S.size, -1)
    const = np.all(flat == flat[..., :1], axis=-1)
    reward[const] = flat[..., 0][const]
    reward = sign * reward
    start = _start(head.get("start"), S)
    if start is not None:
        warnings.warn("start distribution is retained but not used by the solver", stacklevel=2)
    return PomdpModel(trans, obs, reward, discount, S.names, A.names, Z.names, start)


def _start(st: _Stmt | None, S: _Names) -> np.ndarray | None:
    if st is None:
        return None
    toks = st.tokens
    if not toks:
        raise ParseError("empty start statement", st.line)
    if st.keyword != "start":
        chosen = sorted({i for t in toks for i in S.resolve(t)})
        if st.keyword == "start exclude":
            chosen = [i for i in range(S.size) if i not in chosen]
        if not chosen:
            raise ParseError("start statement leaves no states", st.line)
        b = np.zeros(S.size)
        b[chosen] = 1.0 / len(chosen)
        return b
    if len(toks) == 1 and toks[0].text == "uniform":
        return np.full(S.size, 1.0 / S.size)
    if len(toks) == S.size and all(_is_number(t.text) for t in toks):
        b = np.array([_number(t) for t in toks])
        if np.any(b < 0) or abs(b.sum() - 1.0) > ROW_TOL:
            raise ParseError("start distribution is not a probability vector", st.line)
        return b / b.sum()
    if len(toks) == 1:
        if toks[0].text == "*":
            raise ParseError("start: '*' is not a state", st.line)
        b = np.zeros(S.size)
        b[S.resolve(toks[0])[0]] = 1.0
        return b
    raise ParseError("unsupported start statement", st.line)


def validate(model: PomdpModel) -> list[str]:
    """Diagnostics for a model; empty means valid."""
    return model_diagnostics(model, ROW_TOL)


def _names_line(key: str, names, size: int) -> str:
    return f"{key}: {' '.join(names) if names else size}\n"


def serialize(model: PomdpModel) -> str:
    """Fully expanded text form; parsing it gives back the same model."""
    sn = model.state_names or [str(i) for i in range(model.n_states)]
    an = model.action_names or [str(i) for i in range(model.n_actions)]
    zn = model.observation_names or [str(i) for i in range(model.n_observations)]
    out = [
        f"discount: {model.discount!r}\n",
        "values: reward\n",
        _names_line("states", model.state_names, model.n_states),
        _names_line("actions", model.action_names, model.n_actions),
        _names_line("observations", model.observation_names, model.n_observations),
    ]
    if model.start is not None:
        out.append("start: " + " ".join(repr(float(x)) for x in model.start) + "\n")
    out.append("\n")
    for a, s, t in zip(*np.nonzero(model.transition)):
        out.append(f"T: {an[a]} : {sn[s]} : {sn[t]} {float(model.transition[a, s, t])!r}\n")
    for a, t, z in zip(*np.nonzero(model.observation)):
        out.append(f"O: {an[a]} : {sn[t]} : {zn[z]} {float(model.observation[a, t, z])!r}\n")
    for a, s in zip(*np.nonzero(model.reward)):
        out.append(f"R: {an[a]} : {sn[s]} : * : * {float(model.reward[a, s])!r}\n")
    return "".join(out)


def load(path, strict: bool = True) -> PomdpModel:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), strict=strict)


__all__ = ["ParseError", "load", "parse", "serialize", "validate"]
