"""Line-oriented text formats.

Every format starts with a header line (``vcl 1``, ``vci 1``, ``cut 1``,
``nae 1``, ``lp 1``, ``vcg 1``, ``vcs 1``), ``#`` starts a comment and tokens
are whitespace separated.  Rationals are written ``p/q`` in lowest terms, or
``p`` when ``q = 1``.  Serializers emit the canonical form, so
``serialize(parse(serialize(x))) == serialize(x)`` byte for byte.
"""
from __future__ import annotations

import os
import re
from fractions import Fraction
from typing import Callable, Iterator, Mapping

from .core import Constraint, CostFunction, Gadget, Instance, Language, tuples
from .errors import FormatError, VcspError
from .exactlp import LinearProgram
from .reductions.hardness import CnfFormula, MaxCutInstance, NaeFormula

_RATIONAL = re.compile(r"[+-]?\d+(/\d*[1-9]\d*)?\Z")
_INT = re.compile(r"[+-]?\d+\Z")


def fmt(q: Fraction) -> str:
    return str(q)


class _Lines:
    """Tokenized, comment-stripped lines with their 1-based numbers."""

    def __init__(self, text: str, file=None):
        self.file = file
        self.items = []
        for no, raw in enumerate(text.splitlines(), 1):
            toks = raw.split("#", 1)[0].split()
            if toks:
                self.items.append((no, toks))
        self.pos = 0

    def error(self, message, line=None):
        return FormatError(message, line, self.file)

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else None

    def __iter__(self) -> Iterator[tuple[int, list[str]]]:
        while self.pos < len(self.items):
            item = self.items[self.pos]
            self.pos += 1
            yield item

    def header(self, kind: str):
        item = self.peek()
        if item is None:
            raise self.error(f"empty input, expected header '{kind} 1'", 1)
        no, toks = item
        if toks != [kind, "1"]:
            raise self.error(f"expected header '{kind} 1'", no)
        self.pos += 1

    def rational(self, tok, no) -> Fraction:
        if not _RATIONAL.match(tok):
            raise self.error(f"bad rational literal {tok!r}", no)
        return Fraction(tok)

    def integer(self, tok, no, low=None) -> int:
        if not _INT.match(tok):
            raise self.error(f"bad integer {tok!r}", no)
        value = int(tok)
        if low is not None and value < low:
            raise self.error(f"value {value} must be at least {low}", no)
        return value

    def arity(self, toks, n, no):
        if len(toks) != n:
            raise self.error(f"'{toks[0]}' takes {n - 1} arguments, got {len(toks) - 1}", no)


def _wrap(fn):
    """Turn model validation errors raised while building objects into FormatErrors."""

    def inner(lines: _Lines, no, *args):
        try:
            return fn(*args)
        except FormatError:
            raise
        except (VcspError, ValueError) as exc:
            raise lines.error(str(exc), no) from None

    return inner


# ----------------------------------------------------------------------------
# languages


class _LanguageBuilder:
    def __init__(self, lines: _Lines):
        self.lines = lines
        self.domain = None
        self.domain_line = None
        self.functions: list[CostFunction] = []
        self.current = None  # (name, arity, line, values)

    def feed(self, no, toks) -> bool:
        key = toks[0]
        L = self.lines
        if key == "domain":
            L.arity(toks, 2, no)
            if self.domain is not None:
                raise L.error("domain declared twice", no)
            self.domain = L.integer(toks[1], no, 1)
            self.domain_line = no
        elif key == "fn":
            L.arity(toks, 3, no)
            if self.domain is None:
                raise L.error("'fn' before 'domain'", no)
            self.close()
            arity = L.integer(toks[2], no, 1)
            self.current = (toks[1], arity, no, {})
        elif key == "val":
            if self.current is None:
                raise L.error("'val' outside a function", no)
            name, arity, _, values = self.current
            L.arity(toks, arity + 2, no)
            t = tuple(L.integer(x, no) for x in toks[1:-1])
            if any(not 0 <= a < self.domain for a in t):
                raise L.error(f"tuple {t} has a label outside the domain", no)
            if t in values:
                raise L.error(f"duplicate value for {name}{t}", no)
            values[t] = L.rational(toks[-1], no)
        else:
            return False
        return True

    def close(self):
        if self.current is None:
            return
        name, arity, no, values = self.current
        for t in tuples(self.domain, arity):
            if t not in values:
                raise self.lines.error(f"function {name!r} has no value for tuple {' '.join(map(str, t))}", no)
        self.functions.append(
            _wrap(CostFunction.from_mapping)(self.lines, no, name, arity, self.domain, values)
        )
        self.current = None

    def build(self, no=None) -> Language:
        self.close()
        if self.domain is None:
            raise self.lines.error("missing 'domain' line", no)
        names = [f.name for f in self.functions]
        if len(set(names)) != len(names):
            raise self.lines.error("duplicate function name", no)
        return Language(self.domain, self.functions)


def parse_language(text: str, file=None) -> Language:
    lines = _Lines(text, file)
    lines.header("vcl")
    b = _LanguageBuilder(lines)
    for no, toks in lines:
        if not b.feed(no, toks):
            raise lines.error(f"unknown keyword {toks[0]!r}", no)
    return b.build()


def _language_lines(language: Language) -> list[str]:
    out = [f"domain {language.domain}"]
    for f in language:
        out.append(f"fn {f.name} {f.arity}")
        for t, v in f.items():
            out.append(f"val {' '.join(map(str, t))} {fmt(v)}")
    return out


def serialize_language(language: Language) -> str:
    return "\n".join(["vcl 1"] + _language_lines(language)) + "\n"


def read_language(path) -> Language:
    with open(path, encoding="utf-8") as fh:
        return parse_language(fh.read(), file=str(path))


# ----------------------------------------------------------------------------
# instances


def parse_instance(
    text: str,
    file=None,
    base_dir=None,
    load_language: Callable[[str], Language] | None = None,
) -> Instance:
    """Parse ``vci 1``.  ``language <path>`` is resolved relative to ``base_dir``."""
    lines = _Lines(text, file)
    lines.header("vci")
    item = lines.peek()
    if item is None or item[1][0] != "language":
        raise lines.error("expected 'language inline' or 'language <path>'", item[0] if item else None)
    no, toks = next(iter(lines))
    lines.arity(toks, 2, no)
    inline = toks[1] == "inline"
    builder = _LanguageBuilder(lines) if inline else None
    language = None
    if not inline:
        path = toks[1]
        if load_language is not None:
            language = load_language(path)
        else:
            full = os.path.join(base_dir or (os.path.dirname(file) if file else "."), path)
            try:
                language = read_language(full)
            except OSError as exc:
                raise lines.error(f"cannot read language file: {exc}", no) from None
    n_vars = None
    offset = Fraction(0)
    threshold = None
    cons = []
    last = no
    for no, toks in lines:
        last = no
        key = toks[0]
        if builder is not None and builder.feed(no, toks):
            continue
        if key == "vars":
            lines.arity(toks, 2, no)
            n_vars = lines.integer(toks[1], no, 0)
        elif key == "offset":
            lines.arity(toks, 2, no)
            offset = lines.rational(toks[1], no)
        elif key == "threshold":
            lines.arity(toks, 2, no)
            threshold = lines.rational(toks[1], no)
        elif key == "con":
            if len(toks) < 4:
                raise lines.error("'con' needs a function, a weight and a scope", no)
            scope = tuple(lines.integer(x, no, 0) for x in toks[3:])
            cons.append((no, Constraint(scope, toks[1], lines.rational(toks[2], no))))
        else:
            raise lines.error(f"unknown keyword {key!r}", no)
    if builder is not None:
        language = builder.build(last)
    if n_vars is None:
        raise lines.error("missing 'vars' line", last)
    for no, c in cons:
        _wrap(Instance)(lines, no, language, n_vars, (c,))
    return _wrap(Instance)(lines, last, language, n_vars, tuple(c for _, c in cons), threshold, offset)


def serialize_instance(instance: Instance, language_path: str | None = None) -> str:
    out = ["vci 1"]
    if language_path is None:
        out.append("language inline")
        out.extend(_language_lines(instance.language))
    else:
        out.append(f"language {language_path}")
    out.append(f"vars {instance.n_vars}")
    if instance.offset:
        out.append(f"offset {fmt(instance.offset)}")
    if instance.threshold is not None:
        out.append(f"threshold {fmt(instance.threshold)}")
    for scope, name, weight in instance.constraints:
        out.append(f"con {name} {fmt(weight)} {' '.join(map(str, scope))}")
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------------
# gadgets and scale maps


def parse_gadgets(text: str, language: Language, file=None) -> dict[str, Gadget]:
    """``vcg 1`` with blocks ``gadget <fn> vars <n> proj <v...>`` then ``offset``/``con`` lines."""
    lines = _Lines(text, file)
    lines.header("vcg")
    blocks = []
    for no, toks in lines:
        key = toks[0]
        if key == "gadget":
            if len(toks) < 6 or toks[2] != "vars" or toks[4] != "proj":
                raise lines.error("expected 'gadget <fn> vars <n> proj <v...>'", no)
            proj = tuple(lines.integer(x, no, 0) for x in toks[5:])
            blocks.append([no, toks[1], lines.integer(toks[3], no, 0), proj, Fraction(0), []])
        elif not blocks:
            raise lines.error(f"{key!r} before the first 'gadget'", no)
        elif key == "offset":
            lines.arity(toks, 2, no)
            blocks[-1][4] = lines.rational(toks[1], no)
        elif key == "con":
            if len(toks) < 4:
                raise lines.error("'con' needs a function, a weight and a scope", no)
            scope = tuple(lines.integer(x, no, 0) for x in toks[3:])
            blocks[-1][5].append(Constraint(scope, toks[1], lines.rational(toks[2], no)))
        else:
            raise lines.error(f"unknown keyword {key!r}", no)
    out = {}
    for no, name, n, proj, offset, cons in blocks:
        if name in out:
            raise lines.error(f"second gadget for {name!r}", no)
        inst = _wrap(Instance)(lines, no, language, n, tuple(cons), None, offset)
        out[name] = _wrap(Gadget)(lines, no, inst, proj)
    return out


def serialize_gadgets(gadgets: Mapping[str, Gadget]) -> str:
    out = ["vcg 1"]
    for name in sorted(gadgets):
        g = gadgets[name]
        inst = g.instance
        out.append(f"gadget {name} vars {inst.n_vars} proj {' '.join(map(str, g.projection))}")
        if inst.offset:
            out.append(f"offset {fmt(inst.offset)}")
        for scope, fname, weight in inst.constraints:
            out.append(f"con {fname} {fmt(weight)} {' '.join(map(str, scope))}")
    return "\n".join(out) + "\n"


def parse_scale_entries(text: str, file=None) -> dict[str, tuple[str, Fraction, Fraction]]:
    """``vcs 1`` with lines ``map <source fn> <target fn> <scale> <shift>``."""
    lines = _Lines(text, file)
    lines.header("vcs")
    out = {}
    for no, toks in lines:
        if toks[0] != "map":
            raise lines.error(f"unknown keyword {toks[0]!r}", no)
        lines.arity(toks, 5, no)
        if toks[1] in out:
            raise lines.error(f"second entry for {toks[1]!r}", no)
        out[toks[1]] = (toks[2], lines.rational(toks[3], no), lines.rational(toks[4], no))
    return out


def serialize_scale_entries(entries: Mapping[str, tuple]) -> str:
    out = ["vcs 1"]
    for name in sorted(entries):
        g, a, b = entries[name]
        out.append(f"map {name} {g} {fmt(Fraction(a))} {fmt(Fraction(b))}")
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------------
# graphs and formulas


def parse_maxcut(text: str, file=None) -> MaxCutInstance:
    lines = _Lines(text, file)
    lines.header("cut")
    n = None
    threshold = None
    edges = []
    last = 1
    for no, toks in lines:
        last = no
        key = toks[0]
        if key == "vertices":
            lines.arity(toks, 2, no)
            n = lines.integer(toks[1], no, 0)
        elif key == "threshold":
            lines.arity(toks, 2, no)
            threshold = lines.rational(toks[1], no)
        elif key == "edge":
            lines.arity(toks, 4, no)
            u, v = lines.integer(toks[1], no, 0), lines.integer(toks[2], no, 0)
            if u == v:
                raise lines.error(f"self-loop on vertex {u}", no)
            if n is not None and max(u, v) >= n:
                raise lines.error(f"edge ({u}, {v}) uses an undeclared vertex", no)
            edges.append((u, v, lines.rational(toks[3], no)))
        else:
            raise lines.error(f"unknown keyword {key!r}", no)
    if n is None:
        raise lines.error("missing 'vertices' line", last)
    return _wrap(MaxCutInstance.from_edges)(lines, last, n, edges, threshold)


def serialize_maxcut(cut: MaxCutInstance) -> str:
    out = ["cut 1", f"vertices {cut.n_vertices}"]
    if cut.threshold is not None:
        out.append(f"threshold {fmt(cut.threshold)}")
    for u, v, w in cut.edges:
        out.append(f"edge {u} {v} {fmt(w)}")
    return "\n".join(out) + "\n"


def parse_nae(text: str, file=None) -> NaeFormula:
    """``nae 1`` / ``width 3|4`` / ``vars n`` / ``clause v:b ...``."""
    lines = _Lines(text, file)
    lines.header("nae")
    width = n = None
    clauses = []
    last = 1
    for no, toks in lines:
        last = no
        key = toks[0]
        if key == "width":
            lines.arity(toks, 2, no)
            width = lines.integer(toks[1], no)
            if width not in (3, 4):
                raise lines.error("width must be 3 or 4", no)
        elif key == "vars":
            lines.arity(toks, 2, no)
            n = lines.integer(toks[1], no, 0)
        elif key == "clause":
            lits = []
            for tok in toks[1:]:
                v, sep, b = tok.partition(":")
                if not sep or b not in ("0", "1"):
                    raise lines.error(f"bad literal {tok!r}, expected <var>:<bit>", no)
                lits.append((lines.integer(v, no, 0), int(b)))
            clauses.append((no, tuple(lits)))
        else:
            raise lines.error(f"unknown keyword {key!r}", no)
    if width is None or n is None:
        raise lines.error("missing 'width' or 'vars' line", last)
    for no, clause in clauses:
        _wrap(NaeFormula)(lines, no, n, (clause,), width)
    return NaeFormula(n, tuple(c for _, c in clauses), width)


def serialize_nae(nae: NaeFormula) -> str:
    out = ["nae 1", f"width {nae.width}", f"vars {nae.n_vars}"]
    for clause in nae.clauses:
        out.append("clause " + " ".join(f"{v}:{b}" for v, b in clause))
    return "\n".join(out) + "\n"


def parse_dimacs_cnf(text: str, pad: bool = False, file=None) -> CnfFormula:
    """DIMACS CNF with exactly three literals per clause.

    With ``pad`` shorter clauses are widened by repeating their last literal.
    Variable ``k`` becomes id ``k-1``; a negative literal has bit 1.
    """
    n = declared = None
    clauses = []
    current: list[tuple[int, int]] = []
    start = None
    last = 1
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        last = no
        toks = line.split()
        if toks[0] == "p":
            if len(toks) != 4 or toks[1] != "cnf" or n is not None:
                raise FormatError("bad problem line, expected 'p cnf <vars> <clauses>'", no, file)
            try:
                n, declared = int(toks[2]), int(toks[3])
            except ValueError:
                raise FormatError("bad problem line counts", no, file) from None
            continue
        if n is None:
            raise FormatError("clause before the problem line", no, file)
        for tok in toks:
            if not _INT.match(tok):
                raise FormatError(f"bad literal {tok!r}", no, file)
            lit = int(tok)
            if lit == 0:
                clauses.append((start or no, current))
                current, start = [], None
                continue
            if abs(lit) > n:
                raise FormatError(f"literal {lit} exceeds the declared {n} variables", no, file)
            if start is None:
                start = no
            current.append((abs(lit) - 1, 1 if lit < 0 else 0))
    if current:
        raise FormatError("last clause is not terminated by 0", last, file)
    if n is None:
        raise FormatError("missing problem line", last, file)
    if declared != len(clauses):
        raise FormatError(f"problem line declares {declared} clauses, found {len(clauses)}", last, file)
    out = []
    for no, lits in clauses:
        if not lits:
            raise FormatError("empty clause", no, file)
        if len(lits) > 3:
            raise FormatError(f"clause has {len(lits)} literals, at most 3 are supported", no, file)
        if len(lits) < 3:
            if not pad:
                raise FormatError(f"clause has {len(lits)} literals; use padding", no, file)
            lits = lits + [lits[-1]] * (3 - len(lits))
        out.append(tuple(lits))
    return CnfFormula(n, tuple(out), 3)


def serialize_dimacs_cnf(cnf: CnfFormula) -> str:
    out = [f"p cnf {cnf.n_vars} {len(cnf.clauses)}"]
    for clause in cnf.clauses:
        out.append(" ".join(str(-(v + 1) if b else v + 1) for v, b in clause) + " 0")
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------------
# linear programs


def parse_lp(text: str, file=None) -> LinearProgram:
    """``lp 1`` text; rows are named ``r0, r1, ...`` in file order."""
    lines = _Lines(text, file)
    lines.header("lp")
    sense = None
    columns, bounds, objective, rows = [], {}, {}, []
    last = 1
    for no, toks in lines:
        last = no
        key = toks[0]
        if key in ("maximize", "minimize"):
            lines.arity(toks, 1, no)
            if sense is not None:
                raise lines.error("sense declared twice", no)
            sense = "max" if key == "maximize" else "min"
        elif key == "var":
            if len(toks) < 2:
                raise lines.error("'var' needs an id", no)
            cid = toks[1]
            if cid in bounds:
                raise lines.error(f"column {cid!r} declared twice", no)
            rest = toks[2:]
            lo = hi = None
            while rest:
                if len(rest) < 2 or rest[0] not in ("lb", "ub"):
                    raise lines.error("expected 'lb <q>' or 'ub <q>'", no)
                q = lines.rational(rest[1], no)
                if rest[0] == "lb":
                    lo = q
                else:
                    hi = q
                rest = rest[2:]
            columns.append(cid)
            bounds[cid] = (lo, hi)
        elif key == "obj":
            lines.arity(toks, 3, no)
            if toks[1] not in bounds:
                raise lines.error(f"unknown column {toks[1]!r}", no)
            objective[toks[1]] = lines.rational(toks[2], no)
        elif key == "row":
            if len(toks) < 3 or toks[1] not in ("<=", "=", ">=") or len(toks) % 2 == 0:
                raise lines.error("expected 'row <=|=|>= <rhs> (<id> <coef>)*'", no)
            coeffs = []
            for cid, q in zip(toks[3::2], toks[4::2]):
                if cid not in bounds:
                    raise lines.error(f"unknown column {cid!r}", no)
                coeffs.append((cid, lines.rational(q, no)))
            rows.append((f"r{len(rows)}", tuple(coeffs), toks[1], lines.rational(toks[2], no)))
        else:
            raise lines.error(f"unknown keyword {key!r}", no)
    if sense is None:
        raise lines.error("missing 'maximize' or 'minimize'", last)
    return _wrap(LinearProgram)(lines, last, tuple(columns), tuple(rows), objective, sense, bounds)


def serialize_lp(lp: LinearProgram) -> str:
    out = ["lp 1", "maximize" if lp.sense == "max" else "minimize"]
    for c in lp.columns:
        lo, hi = lp.bounds.get(c, (None, None))
        parts = [f"var {c}"]
        if lo is not None:
            parts.append(f"lb {fmt(lo)}")
        if hi is not None:
            parts.append(f"ub {fmt(hi)}")
        out.append(" ".join(parts))
    for c, a in lp.objective.items():
        out.append(f"obj {c} {fmt(a)}")
    for row in lp.rows:
        terms = "".join(f" {c} {fmt(a)}" for c, a in row.coeffs)
        out.append(f"row {row.relation} {fmt(row.rhs)}{terms}")
    return "\n".join(out) + "\n"
