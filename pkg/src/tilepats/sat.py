"""3-CNF formulas, DIMACS input and a small exact SAT oracle."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from tilepats.core import TileError

DEFAULT_GUARD = 26


class ParseError(TileError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ArityError(ParseError):
    pass


class MissingVariable(TileError):
    pass


class TooLarge(TileError):
    pass


class Literal(NamedTuple):
    var: str
    negated: bool = False

    def __str__(self):
        return ("~" if self.negated else "") + self.var

    def value(self, f: Mapping[str, int]) -> bool:
        return bool(f[self.var]) != self.negated


Clause3 = tuple[Literal, Literal, Literal]


@dataclass(frozen=True)
class Cnf3:
    variables: tuple[str, ...]
    clauses: tuple[Clause3, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(dict.fromkeys(self.variables)))
        object.__setattr__(self, "clauses", tuple(tuple(Literal(*l) for l in c) for c in self.clauses))
        known = set(self.variables)
        for c in self.clauses:
            if len(c) != 3:
                raise ValueError(f"clause {c} does not have exactly three literals")
            for lit in c:
                if lit.var not in known:
                    raise ValueError(f"literal {lit} uses undeclared variable")

    @classmethod
    def from_ints(cls, clauses: Iterable[Iterable[int]], num_vars: int | None = None) -> "Cnf3":
        """Build from DIMACS-style signed integers; short clauses are padded."""
        clauses = [list(c) for c in clauses]
        n = num_vars if num_vars is not None else max((abs(l) for c in clauses for l in c), default=0)
        out = []
        for c in clauses:
            if not c or len(c) > 3:
                raise ValueError(f"clause {c} cannot be made 3-literal")
            c = c + [c[-1]] * (3 - len(c))
            out.append(tuple(Literal(f"x{abs(l)}", l < 0) for l in c))
        return cls(tuple(f"x{i}" for i in range(1, n + 1)), tuple(out))

    def __str__(self):
        return " & ".join("(" + " | ".join(map(str, c)) + ")" for c in self.clauses)


def parse_dimacs(text: str) -> Cnf3:
    num_vars = num_clauses = None
    clauses: list[list[tuple[int, int]]] = []
    current: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("bad problem line, expected 'p cnf <vars> <clauses>'", lineno)
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("non-integer counts in problem line", lineno) from None
            if num_vars < 0 or num_clauses < 0:
                raise ParseError("negative counts in problem line", lineno)
            continue
        if num_vars is None:
            raise ParseError("clause before problem line", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise ParseError("empty clause", lineno)
                if len(current) > 3:
                    raise ArityError(f"clause with {len(current)} literals", lineno)
                clauses.append(current)
                current = []
            elif abs(lit) > num_vars:
                raise ParseError(f"literal {lit} exceeds declared {num_vars} variables", lineno)
            else:
                current.append((lit, lineno))
    if num_vars is None:
        raise ParseError("missing problem line", 1)
    if current:
        raise ParseError("last clause not terminated by 0", current[-1][1])
    if len(clauses) != num_clauses:
        raise ParseError(f"header declares {num_clauses} clauses, found {len(clauses)}", 1)
    return Cnf3.from_ints(([l for l, _ in c] for c in clauses), num_vars)


def dump_dimacs(f: Cnf3) -> str:
    index = {v: i for i, v in enumerate(f.variables, start=1)}
    out = [f"p cnf {len(f.variables)} {len(f.clauses)}"]
    for c in f.clauses:
        out.append(" ".join(str(-index[l.var] if l.negated else index[l.var]) for l in c) + " 0")
    return "\n".join(out) + "\n"


def evaluate(f: Cnf3, assignment: Mapping[str, int]) -> bool:
    missing = [v for v in f.variables if v not in assignment]
    if missing:
        raise MissingVariable(f"assignment lacks {missing}")
    return all(any(lit.value(assignment) for lit in c) for c in f.clauses)


def solve_sat(f: Cnf3, guard: int = DEFAULT_GUARD) -> dict[str, int] | None:
    """Satisfying assignment by DPLL, or None when the formula is unsatisfiable."""
    if len(f.variables) > guard:
        raise TooLarge(f"{len(f.variables)} variables exceed the guard of {guard}")
    clauses = [frozenset((l.var, not l.negated) for l in c) for c in f.clauses]
    result = _dpll(clauses, {})
    if result is None:
        return None
    return {v: int(result.get(v, False)) for v in f.variables}


def _dpll(clauses: list[frozenset], fixed: dict[str, bool]) -> dict[str, bool] | None:
    fixed = dict(fixed)
    while True:
        remaining = []
        unit = None
        for c in clauses:
            if any(fixed.get(v) == pol for v, pol in c):
                continue
            open_lits = [(v, pol) for v, pol in c if v not in fixed]
            if not open_lits:
                return None
            if len(open_lits) == 1 and unit is None:
                unit = open_lits[0]
            remaining.append(c)
        if unit is None:
            break
        fixed[unit[0]] = unit[1]
    if not remaining:
        return fixed
    var = next(v for v, _ in remaining[0] if v not in fixed)
    for value in (True, False):
        fixed[var] = value
        found = _dpll(remaining, fixed)
        if found is not None:
            return found
    return None
