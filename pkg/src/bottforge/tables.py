"""Closed-form lookups: classifying spaces, the periodic table, stability bounds, unstable cases."""
import csv
import io
import json
from dataclasses import dataclass

from .clifford import CARTAN_NAMES, MINIMAL_MULTIPLICITY, parse_class

# Table row order: complex classes first, then the Bott clock s = 0..7.
TABLE_CLASSES = ("A", "AIII") + CARTAN_NAMES
COLUMNS = (0, 1, 2, 3)


@dataclass(frozen=True)
class AbGroupLabel:
    """One of Zero, Z2, Z, Zmod(m) or FiniteSet(m)."""

    kind: str
    order: int = None

    def __post_init__(self):
        if self.kind not in ("Zero", "Z2", "Z", "Zmod", "FiniteSet"):
            raise ValueError(f"unknown label kind {self.kind!r}")
        if self.kind in ("Zmod", "FiniteSet") and (self.order is None or self.order < 1):
            raise ValueError(f"{self.kind} needs a positive order")

    def __str__(self):
        if self.kind == "Zero":
            return "0"
        if self.kind in ("Zmod", "FiniteSet"):
            return f"Z_{self.order}"
        return self.kind

    def to_json(self):
        out = {"kind": self.kind, "label": str(self)}
        if self.order is not None:
            out["order"] = self.order
        return out


ZERO, Z2, Z = AbGroupLabel("Zero"), AbGroupLabel("Z2"), AbGroupLabel("Z")

REAL_SEED = (Z2, ZERO, Z, ZERO, ZERO, ZERO, Z, Z2)
COMPLEX_SEED = (Z, ZERO)


def m_s(cls):
    """Minimal band multiplicity. Integers beyond 7 continue by m_{s+8} = 16 m_s."""
    if isinstance(cls, int):
        if cls < 0:
            raise ValueError("s must be non-negative")
        return MINIMAL_MULTIPLICITY[cls % 8] * 16 ** (cls // 8)
    return parse_class(cls).multiplicity


# ---------------------------------------------------------------- classifying spaces

def _group_dim(name, N):
    if name == "U":
        return N * N
    if name == "O":
        return N * (N - 1) // 2
    if name == "Sp":
        return N * (N + 1) // 2
    raise ValueError(name)


@dataclass(frozen=True)
class HomogeneousSpace:
    """G / H with G a product of groups; each group is (name, size)."""

    numerator: tuple
    denominator: tuple
    union_over: str = ""

    @property
    def dimension(self):
        return sum(_group_dim(g, N) for g, N in self.numerator) - sum(_group_dim(g, N) for g, N in self.denominator)

    def __str__(self):
        def prod(groups):
            return "x".join(f"{g}_{N}" for g, N in groups) or "1"

        num = prod(self.numerator)
        if len(self.numerator) > 1:
            num = f"({num})"
        den = prod(self.denominator)
        if len(self.denominator) > 1:
            den = f"({den})"
        body = num if not self.denominator else f"{num}/{den}"
        return f"U[{self.union_over}] {body}" if self.union_over else body


@dataclass(frozen=True)
class ClassifyingSpaceInfo:
    cls: str
    n: int
    complex_space: HomogeneousSpace
    real_space: HomogeneousSpace = None

    def to_json(self):
        out = {"class": self.cls, "n": self.n,
               "C": str(self.complex_space), "dim_C": self.complex_space.dimension}
        if self.real_space is not None:
            out.update({"R": str(self.real_space), "dim_R": self.real_space.dimension})
        return out


def _split(total, p=None):
    p = total // 2 if p is None else p
    if not 0 <= p <= total:
        raise ValueError(f"component index {p} outside 0..{total}")
    return p, total - p


def _grass(N, p, q):
    return HomogeneousSpace((("U", N),), (("U", p), ("U", q)))


def _pair(g, N):
    return HomogeneousSpace(((g, N), (g, N)), ((g, N),))


def classifying_space(cls, n, p=None):
    """Base-point components of C_s(n) and R_s(n); unions are resolved at index p (default: balanced)."""
    c = parse_class(cls)
    m = c.multiplicity
    if n < 1 or n % m:
        raise ValueError(f"n = {n} is not a positive multiple of m_s = {m} for class {c.name}")
    if c.kind == "A":
        pp, qq = _split(2 * n, p)
        return ClassifyingSpaceInfo("A", n, _grass(2 * n, pp, qq))
    if c.kind == "AIII":
        return ClassifyingSpaceInfo("AIII", n, _pair("U", n))
    s = c.s
    if s == 0:
        pp, qq = _split(2 * n, p)
        C = _grass(2 * n, pp, qq)
        R = HomogeneousSpace((("O", 2 * n),), (("U", n),))
    elif s == 1:
        C, R = _pair("U", n), HomogeneousSpace((("U", n),), (("Sp", n),))
    elif s == 2:
        pp, qq = _split(n // 2, p)
        C = _grass(n, 2 * pp, 2 * qq)
        R = HomogeneousSpace((("Sp", n),), (("Sp", 2 * pp), ("Sp", 2 * qq)))
    elif s == 3:
        C, R = _pair("U", n // 2), _pair("Sp", n // 2)
    elif s == 4:
        pp, qq = _split(n // 2, p)
        C = _grass(n // 2, pp, qq)
        R = HomogeneousSpace((("Sp", n // 2),), (("U", n // 4),))
    elif s == 5:
        C, R = _pair("U", n // 4), HomogeneousSpace((("U", n // 4),), (("O", n // 4),))
    elif s == 6:
        pp, qq = _split(n // 4, p)
        C = _grass(n // 4, pp, qq)
        R = HomogeneousSpace((("O", n // 4),), (("O", pp), ("O", qq)))
    else:
        C, R = _pair("U", n // 8), _pair("O", n // 8)
    return ClassifyingSpaceInfo(c.name, n, C, R)


# ---------------------------------------------------------------- periodic table

def periodic_table_entry(cls, dx, dk, n=None):
    """Equivariant homotopy classes [S^{dx,dk}, C_s(n)]; n is needed only for dx = dk = 0."""
    if dx < 0 or dk < 0:
        raise ValueError("dx and dk must be non-negative")
    c = parse_class(cls)
    if dx == 0 and dk == 0 and c.name in ("A", "AII", "AI"):
        if n is None:
            raise ValueError(f"the d = 0 entry of class {c.name} depends on n; pass n")
        if n < 1 or n % c.multiplicity:
            raise ValueError(f"bad n = {n} for class {c.name}")
        order = {"A": 2 * n + 1, "AII": n // 2 + 1, "AI": n // 4 + 1}[c.name]
        return AbGroupLabel("FiniteSet", order)
    if c.is_real:
        return REAL_SEED[(c.s - (dk - dx)) % 8]
    return COMPLEX_SEED[(c.s - (dk - dx)) % 2]


def periodic_table(columns=COLUMNS):
    """Rows (class, s, [entries for dk - dx in columns]) using dx = 0 or dk = 0 as needed."""
    rows = []
    for name in TABLE_CLASSES:
        c = parse_class(name)
        cells = [periodic_table_entry(c, max(0, -d), max(0, d)) if d else _seed(c) for d in columns]
        rows.append((name, c.s, cells))
    return rows


def _seed(c):
    # the dk - dx = 0 column for dx + dk >= 1 (dx = dk = 1)
    return periodic_table_entry(c, 1, 1)


# ---------------------------------------------------------------- stability

@dataclass(frozen=True)
class BoundsResult:
    cls: str
    n: int
    r: int
    d1: int
    d2: object
    case_tag: str
    p: int = None
    q: int = None

    def bijective(self, dim_m, dim_fixed=0):
        return dim_m < self.d1 and (self.d2 is None or dim_fixed < self.d2)

    def surjective(self, dim_m, dim_fixed=0):
        return dim_m <= self.d1 and (self.d2 is None or dim_fixed <= self.d2)

    def to_json(self):
        return {"class": self.cls, "n": self.n, "r": self.r, "p": self.p, "q": self.q,
                "d1": self.d1, "d2": self.d2, "case": self.case_tag}


def _pq(total, p, q):
    if p is None and q is None:
        p = total // 2
        q = total - p
    elif p is None:
        p = total - q
    elif q is None:
        q = total - p
    if p < 0 or q < 0 or p + q != total:
        raise ValueError(f"inconsistent p = {p}, q = {q}: need p, q >= 0 with p + q = {total}")
    return p, q


def stability_bounds(cls, n, p=None, q=None):
    """d1, d2 for the band-adding inclusion i_s at n = m_s r bands."""
    c = parse_class(cls)
    m = c.multiplicity
    if n < 1 or n % m:
        raise ValueError(f"n = {n} is not a positive multiple of m_s = {m}")
    r = n // m
    if c.kind == "A":
        # C_0(n) is a union of U_{2n}/(U_p x U_q) with p + q = 2n
        p, q = _pq(2 * n, p, q)
        return BoundsResult("A", n, r, min(2 * p + 1, 2 * q + 1), None, "iv", p, q)
    if p is not None or q is not None:
        if c.kind == "AIII" or c.s not in (2, 6):
            raise ValueError(f"class {c.name} takes no p, q")
    if c.kind == "AIII":
        return BoundsResult("AIII", n, r, 2 * r, None, "i")
    s = c.s
    if s in (2, 6):
        p, q = _pq(r, p, q)
        if s == 2:
            return BoundsResult(c.name, n, r, min(4 * p + 1, 4 * q + 1), min(4 * p + 3, 4 * q + 3), "iv", p, q)
        return BoundsResult(c.name, n, r, min(2 * p + 1, 2 * q + 1), min(p, q), "iv", p, q)
    d1, d2, case = {
        0: (2 * r + 1, 2 * r - 1, "ii"),
        1: (4 * r, 4 * r, "ii"),
        3: (4 * r, 4 * r + 2, "i"),
        4: (2 * r + 1, 2 * r + 1, "iii"),
        5: (2 * r, r, "iii"),
        7: (2 * r, r - 1, "i"),
    }[s]
    return BoundsResult(c.name, n, r, d1, d2, case)


@dataclass(frozen=True)
class BandAdditionBounds:
    cls: str
    q: int
    bij_dim: int          # bijective iff dim M < bij_dim ...
    bij_fixed: object     # ... and dim M^Z2 < bij_fixed (None: no condition)
    surj_dim: int         # surjective iff dim M <= surj_dim ...
    surj_fixed: object

    def bijective(self, dim_m, dim_fixed=0):
        return dim_m < self.bij_dim and (self.bij_fixed is None or dim_fixed < self.bij_fixed)

    def surjective(self, dim_m, dim_fixed=0):
        return dim_m <= self.surj_dim and (self.surj_fixed is None or dim_fixed <= self.surj_fixed)

    def describe(self):
        bij = f"dim M < {self.bij_dim}"
        surj = f"dim M <= {self.surj_dim}"
        if self.bij_fixed is not None:
            bij += f" and dim M^Z2 < {self.bij_fixed}"
            surj += f" and dim M^Z2 <= {self.surj_fixed}"
        return {"bijective": bij, "surjective": surj}


def band_addition_bounds(cls, q):
    """Conditions for adding one conduction band in the Grassmannian classes A, AI, AII."""
    c = parse_class(cls)
    if q < 0:
        raise ValueError("q must be non-negative")
    if c.name == "A":
        return BandAdditionBounds("A", q, 2 * q + 1, None, 2 * q + 1, None)
    if c.name == "AI":
        return BandAdditionBounds("AI", q, 2 * q + 1, q, 2 * q + 1, q)
    if c.name == "AII":
        return BandAdditionBounds("AII", q, 4 * q + 3, None, 4 * q + 3, None)
    raise ValueError(f"band addition bounds cover A, AI and AII, not {c.name}")


# ---------------------------------------------------------------- unstable cases

# Changes at r = q = 1, dx = 0 that neither K-theory nor vector-bundle isomorphism capture.
# The target groups are transcribed; the source is the stable entry.
UNSTABLE_TARGETS = {
    ("A", 0, 3): Z,
    ("AIII", 0, 2): ZERO,
    ("AIII", 0, 3): ZERO,
    ("D", 0, 3): ZERO,
    ("C", 0, 3): Z2,
    ("CI", 0, 2): ZERO,
    ("CI", 0, 3): ZERO,
    ("AI", 0, 3): ZERO,
    ("BDI", 0, 1): Z,
    ("BDI", 0, 2): ZERO,
    ("BDI", 0, 3): ZERO,
}

GRASSMANNIAN_CLASSES = ("A", "AI", "AII")
MAX_PARAMETER = 64


@dataclass(frozen=True)
class UnstableCase:
    cls: str
    s: int
    dx: int
    dk: int
    parameter: str
    values: tuple
    annotation: str = ""

    @property
    def condition(self):
        k = max(self.values)
        return f"{self.parameter}=1" if k == 1 else f"{self.parameter}<={k}"


def _is_unstable(name, dx, dk, value):
    dim_m, dim_fixed = dx + dk, dx
    if name in GRASSMANNIAN_CLASSES:
        b = band_addition_bounds(name, value)
        fixed = dim_fixed if name == "AI" else 0
        return not b.bijective(dim_m, fixed)
    c = parse_class(name)
    b = stability_bounds(c, c.multiplicity * value)
    fixed = dim_fixed if c.is_real else 0
    return not b.bijective(dim_m, fixed)


def unstable_cases(max_dk=3):
    """All (class, dx, dk) with dx < dk <= max_dk where the inclusion can fail to be bijective."""
    out = []
    for name in TABLE_CLASSES:
        c = parse_class(name)
        param = "q" if name in GRASSMANNIAN_CLASSES else "r"
        for dx in range(max_dk):
            for dk in range(dx + 1, max_dk + 1):
                vals = tuple(v for v in range(1, MAX_PARAMETER + 1) if _is_unstable(name, dx, dk, v))
                if not vals:
                    continue
                if vals[-1] == MAX_PARAMETER or vals != tuple(range(1, len(vals) + 1)):
                    raise RuntimeError(f"unexpected unstable set for {name} at ({dx}, {dk})")
                note = ""
                target = UNSTABLE_TARGETS.get((name, dx, dk))
                if target is not None:
                    note = f"{periodic_table_entry(c, dx, dk)} -> {target}"
                out.append(UnstableCase(name, c.s, dx, dk, param, vals, note))
    return out


# ---------------------------------------------------------------- renderers

FORMATS = ("txt", "csv", "json")


def _col_header(d):
    return f"dk-dx={d}"


def render_periodic_table(fmt="txt"):
    rows = periodic_table()
    if fmt == "txt":
        head = ["s", "class"] + [_col_header(d) for d in COLUMNS]
        body = [[str(s), name] + [str(x) for x in cells] for name, s, cells in rows]
        return _text_grid(head, body, sep_after=(1,))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "class"] + [_col_header(d) for d in COLUMNS])
        for name, s, cells in rows:
            w.writerow([s, name] + [str(x) for x in cells])
        return buf.getvalue()
    if fmt == "json":
        data = [{"class": name, "s": s, "entries": {str(d): str(x) for d, x in zip(COLUMNS, cells)}}
                for name, s, cells in rows]
        return json.dumps({"columns": "dk-dx", "rows": data}, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


UNSTABLE_CELLS = tuple((dx, dk) for dx in range(3) for dk in range(dx + 1, 4))


def render_unstable_table(fmt="txt", cases=None):
    cases = unstable_cases() if cases is None else cases
    lookup = {(c.cls, c.dx, c.dk): c for c in cases}
    head = ["s", "class"] + [f"dx={dx},dk={dk}" for dx, dk in UNSTABLE_CELLS]
    body = []
    for name in TABLE_CLASSES:
        s = parse_class(name).s
        cells = [lookup[(name, dx, dk)].condition if (name, dx, dk) in lookup else "" for dx, dk in UNSTABLE_CELLS]
        body.append([str(s), name] + cells)
    if fmt == "txt":
        return _text_grid(head, body, sep_after=(1,))
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows([head] + body)
        return buf.getvalue()
    if fmt == "json":
        data = [{"class": c.cls, "s": c.s, "dx": c.dx, "dk": c.dk, "condition": c.condition,
                 "annotation": c.annotation} for c in cases]
        return json.dumps({"cases": data}, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def render_unstable_changes(fmt="txt", cases=None):
    cases = unstable_cases() if cases is None else cases
    notes = {(c.cls, c.dk): c.annotation for c in cases if c.annotation and c.dx == 0}
    head = ["s", "class", "dk=1", "dk=2", "dk=3"]
    body = [[str(parse_class(n).s), n] + [notes.get((n, dk), "") for dk in (1, 2, 3)] for n in TABLE_CLASSES]
    if fmt == "txt":
        return _text_grid(head, body, sep_after=(1,))
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows([head] + body)
        return buf.getvalue()
    if fmt == "json":
        return json.dumps({"dx": 0, "changes": [dict(zip(head, row)) for row in body]}, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _text_grid(head, body, sep_after=()):
    widths = [max(len(r[i]) for r in [head] + body) for i in range(len(head))]

    def line(row):
        return " | ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()

    rule = "-+-".join("-" * w for w in widths)
    lines = [line(head), rule]
    for i, row in enumerate(body):
        lines.append(line(row))
        if i in sep_after:
            lines.append(rule)
    return "\n".join(lines) + "\n"


__all__ = [
    "AbGroupLabel", "m_s", "classifying_space", "periodic_table_entry", "periodic_table",
    "BoundsResult", "stability_bounds", "band_addition_bounds", "unstable_cases", "UnstableCase",
    "render_periodic_table", "render_unstable_table", "render_unstable_changes"
]
