"""Laurent polynomials over Z_N, Pauli exponent vectors and rule matrices.

A product of generalized Paulis ``prod_a Q_a^{i_a} P_a^{j_a}`` is stored (up to
phase) as a pair of Laurent polynomials ``(sum_a i_a q^a, sum_a j_a q^a)``.
Operator multiplication becomes vector addition and one time step of a
Clifford cellular automaton becomes a 2x2 matrix-vector product.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

MAX_MODULUS = 2**31


class ModulusMismatch(ValueError):
    """Raised when combining objects defined over different Z_N."""


class RuleError(ValueError):
    """Raised for rule matrices that cannot drive the dynamics."""


def _check_modulus(N: int) -> int:
    N = int(N)
    if not 2 <= N < MAX_MODULUS:
        raise ValueError(f"modulus must satisfy 2 <= N < 2**31, got {N}")
    return N


class LaurentPoly:
    """Finitely supported map ``exponent -> coefficient in Z_N``.

    Stored sparsely; zero coefficients are never kept, so two polynomials are
    equal exactly when their term dictionaries are.
    """

    __slots__ = ("_terms", "N")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = (), N: int = 2):
        self.N = _check_modulus(N)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, int] = {}
        for e, c in items:
            e = int(e)
            acc[e] = (acc.get(e, 0) + int(c)) % self.N
        self._terms = {e: c for e, c in sorted(acc.items()) if c}

    @classmethod
    def monomial(cls, exponent: int, coeff: int, N: int) -> "LaurentPoly":
        return cls({exponent: coeff}, N)

    @classmethod
    def zero(cls, N: int) -> "LaurentPoly":
        return cls((), N)

    @classmethod
    def from_dense(cls, coeffs, offset: int, N: int) -> "LaurentPoly":
        """Build from a dense array whose index 0 sits at exponent ``offset``."""
        coeffs = np.asarray(coeffs)
        nz = np.flatnonzero(coeffs % N)
        return cls(((int(k) + offset, int(coeffs[k])) for k in nz), N)

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def __getitem__(self, exponent: int) -> int:
        return self._terms.get(exponent, 0)

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def support(self) -> tuple[int, int] | None:
        """``(min_exponent, max_exponent)`` or None for the zero polynomial."""
        if not self._terms:
            return None
        keys = list(self._terms)
        return keys[0], keys[-1]

    def degree(self) -> int:
        """Largest absolute exponent; 0 for the zero polynomial."""
        return max((abs(e) for e in self._terms), default=0)

    def to_dense(self, lo: int, hi: int) -> np.ndarray:
        out = np.zeros(hi - lo + 1, dtype=np.int64)
        for e, c in self._terms.items():
            if lo <= e <= hi:
                out[e - lo] = c
        return out

    def reflect(self) -> "LaurentPoly":
        """Substitute ``q -> q^{-1}``."""
        return LaurentPoly({-e: c for e, c in self._terms.items()}, self.N)

    def is_palindromic(self) -> bool:
        return all(self._terms.get(-e) == c for e, c in self._terms.items())

    def scale(self, k: int) -> "LaurentPoly":
        return LaurentPoly({e: c * k for e, c in self._terms.items()}, self.N)

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly({e + k: c for e, c in self._terms.items()}, self.N)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        return poly_add(self, other)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return poly_add(self, -other)

    def __neg__(self) -> "LaurentPoly":
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return poly_mul(self, other)
        return self.scale(int(other))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.N == other.N and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.N, tuple(self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return f"LaurentPoly(0, N={self.N})"
        body = " + ".join(f"{c}*q^{e}" for e, c in self._terms.items())
        return f"LaurentPoly({body}, N={self.N})"


def poly_add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    if a.N != b.N:
        raise ModulusMismatch(f"cannot add polynomials mod {a.N} and mod {b.N}")
    terms = a.terms
    for e, c in b:
        terms[e] = terms.get(e, 0) + c
    return LaurentPoly(terms, a.N)


def poly_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    if a.N != b.N:
        raise ModulusMismatch(f"cannot multiply polynomials mod {a.N} and mod {b.N}")
    N = a.N
    out: dict[int, int] = {}
    for ea, ca in a:
        for eb, cb in b:
            # ca, cb < 2**31 so the product fits in 64 bits before reduction
            out[ea + eb] = (out.get(ea + eb, 0) + ca * cb) % N
    return LaurentPoly(out, N)


@dataclass(frozen=True)
class OperatorString:
    """Pauli string ``prod_a Q_a^{qpart[a]} P_a^{ppart[a]}`` modulo phase."""

    qpart: LaurentPoly
    ppart: LaurentPoly

    def __post_init__(self):
        if self.qpart.N != self.ppart.N:
            raise ModulusMismatch("qpart and ppart must share a modulus")

    @property
    def N(self) -> int:
        return self.qpart.N

    @classmethod
    def identity(cls, N: int) -> "OperatorString":
        return cls(LaurentPoly.zero(N), LaurentPoly.zero(N))

    @classmethod
    def local(cls, q_exp: int, p_exp: int, N: int, site: int = 0) -> "OperatorString":
        """Single-site operator ``Q^q_exp P^p_exp`` at ``site``."""
        return cls(LaurentPoly({site: q_exp}, N), LaurentPoly({site: p_exp}, N))

    def is_identity(self) -> bool:
        return self.qpart.is_zero() and self.ppart.is_zero()

    def at(self, site: int) -> tuple[int, int]:
        """Exponent pair ``(Q-exponent, P-exponent)`` on one site."""
        return self.qpart[site], self.ppart[site]

    @property
    def support(self) -> tuple[int, int] | None:
        spans = [s for s in (self.qpart.support, self.ppart.support) if s]
        if not spans:
            return None
        return min(s[0] for s in spans), max(s[1] for s in spans)

    def __add__(self, other: "OperatorString") -> "OperatorString":
        return OperatorString(self.qpart + other.qpart, self.ppart + other.ppart)


@dataclass(frozen=True)
class ValidationReport:
    reversible: bool
    palindromic: bool
    determinant: LaurentPoly

    @property
    def ok(self) -> bool:
        return self.reversible and self.palindromic


def _det(entries) -> LaurentPoly:
    (a, b), (c, d) = entries
    return a * d - b * c


def _is_unit(det: LaurentPoly) -> bool:
    if len(det) != 1:
        return False
    (_, c), = det
    return gcd(c, det.N) == 1


@dataclass(frozen=True, eq=False)
class RuleMatrix:
    """2x2 matrix of Laurent polynomials acting on ``(qpart, ppart)``.

    Non-reversible matrices are rejected unless ``check=False``, which exists so
    that arbitrary matrices can still be handed to :func:`validate_rule`.
    """

    entries: tuple[tuple[LaurentPoly, LaurentPoly], tuple[LaurentPoly, LaurentPoly]]
    name: str = "custom"
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValueError("rule matrix must be 2x2")
        moduli = {p.N for row in rows for p in row}
        if len(moduli) != 1:
            raise ModulusMismatch(f"rule entries use several moduli: {sorted(moduli)}")
        object.__setattr__(self, "entries", rows)
        if self.check and not _is_unit(_det(rows)):
            raise RuleError(
                f"rule {self.name!r} is not reversible: determinant {_det(rows)} is not a unit monomial"
            )

    @property
    def N(self) -> int:
        return self.entries[0][0].N

    @property
    def radius(self) -> int:
        """Maximum distance an exponent can move in one step."""
        return max(p.degree() for row in self.entries for p in row)

    def determinant(self) -> LaurentPoly:
        return _det(self.entries)

    def inverse(self) -> "RuleMatrix":
        """Adjugate times the inverse of the (monomial) determinant."""
        det = self.determinant()
        if not _is_unit(det):
            raise RuleError("matrix is not invertible over the Laurent ring")
        (e, c), = det
        inv_det = LaurentPoly.monomial(-e, pow(c, -1, self.N), self.N)
        (a, b), (cc, d) = self.entries
        adj = ((d * inv_det, -b * inv_det), (-cc * inv_det, a * inv_det))
        return RuleMatrix(adj, name=f"{self.name}^-1")

    def dense_kernels(self) -> list[list[np.ndarray]]:
        """Each entry as a dense array over exponents ``[-radius, radius]``."""
        r = self.radius
        return [[p.to_dense(-r, r) for p in row] for row in self.entries]


def validate_rule(M: RuleMatrix) -> ValidationReport:
    det = M.determinant()
    palin = all(p.is_palindromic() for row in M.entries for p in row)
    return ValidationReport(reversible=_is_unit(det), palindromic=palin, determinant=det)


def require_dynamics_rule(M: RuleMatrix) -> None:
    """Raise unless ``M`` is reversible and palindromic."""
    report = validate_rule(M)
    if not report.reversible:
        raise RuleError(f"rule {M.name!r} is not reversible")
    if not report.palindromic:
        raise RuleError(
            f"rule {M.name!r} is not palindromic (invariant under q -> 1/q); the "
            "squared commutator at offset alpha is obtained by translating and "
            "reflecting the insertions, which needs reflection symmetry"
        )


def paper_rule(N: int) -> RuleMatrix:
    """``Q_a -> Q_{a-1} Q_a P_a Q_{a+1}``, ``P_a -> Q_a^{N-1}``."""
    N = _check_modulus(N)
    return RuleMatrix(
        (
            (LaurentPoly({-1: 1, 0: 1, 1: 1}, N), LaurentPoly({0: N - 1}, N)),
            (LaurentPoly({0: 1}, N), LaurentPoly.zero(N)),
        ),
        name="paper",
    )


def apply_rule(M: RuleMatrix, op: OperatorString) -> OperatorString:
    if M.N != op.N:
        raise ModulusMismatch(f"rule is mod {M.N} but operator is mod {op.N}")
    (a, b), (c, d) = M.entries
    return OperatorString(a * op.qpart + b * op.ppart, c * op.qpart + d * op.ppart)


def evolve(M: RuleMatrix, op: OperatorString, t: int) -> OperatorString:
    if t < 0:
        raise ValueError("t must be non-negative")
    for _ in range(t):
        op = apply_rule(M, op)
    return op


class DenseEvolver:
    """Step an exponent vector on a fixed window of exponents ``[-width, width]``.

    The window is not periodic: coefficients pushed past the edge are dropped,
    so results are exact as long as ``width`` covers the light cone. Use
    :meth:`for_horizon` to size it from the horizon.
    """

    def __init__(self, M: RuleMatrix, op: OperatorString, width: int):
        if M.N != op.N:
            raise ModulusMismatch(f"rule is mod {M.N} but operator is mod {op.N}")
        sup = op.support
        if sup is not None and (sup[0] < -width or sup[1] > width):
            raise ValueError("initial operator does not fit in the window")
        self.M = M
        self.N = M.N
        self.width = width
        self.t = 0
        self._kernels = M.dense_kernels()
        self._r = M.radius
        self.q = op.qpart.to_dense(-width, width)
        self.p = op.ppart.to_dense(-width, width)

    @classmethod
    def for_horizon(cls, M: RuleMatrix, op: OperatorString, T: int, min_width: int = 0):
        sup = op.support or (0, 0)
        width = max(min_width, max(abs(sup[0]), abs(sup[1])) + M.radius * T)
        return cls(M, op, width)

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.width, self.width + 1)

    def _apply(self, kernel: np.ndarray, v: np.ndarray) -> np.ndarray:
        r, N = self._r, self.N
        out = np.zeros_like(v)
        n = len(v)
        for k, c in enumerate(kernel):
            if not c:
                continue
            s = k - r  # multiplication by q^s moves coefficients up by s
            if s >= 0:
                out[s:] += (c * v[: n - s]) % N
            else:
                out[: n + s] += (c * v[-s:]) % N
            out %= N
        return out

    def step(self) -> None:
        (kqq, kqp), (kpq, kpp) = self._kernels
        q, p = self.q, self.p
        self.q = (self._apply(kqq, q) + self._apply(kqp, p)) % self.N
        self.p = (self._apply(kpq, q) + self._apply(kpp, p)) % self.N
        self.t += 1

    def operator(self) -> OperatorString:
        return OperatorString(
            LaurentPoly.from_dense(self.q, -self.width, self.N),
            LaurentPoly.from_dense(self.p, -self.width, self.N),
        )


# -- rule files ---------------------------------------------------------------

def _poly_from_json(obj, N: int) -> LaurentPoly:
    if not isinstance(obj, list):
        raise ValueError(f"polynomial must be a list of [exponent, coefficient] pairs, got {obj!r}")
    pairs = []
    for pair in obj:
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, int) for x in pair)):
            raise ValueError(f"bad polynomial term {pair!r}")
        pairs.append((pair[0], pair[1]))
    return LaurentPoly(pairs, N)


def rule_from_dict(data: dict, name: str = "custom") -> RuleMatrix:
    try:
        N = data["N"]
        entries = data["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("rule file needs keys 'N' and 'entries'") from exc
    if entries == "paper":
        return paper_rule(N)
    if not (isinstance(entries, list) and len(entries) == 2 and all(len(r) == 2 for r in entries)):
        raise ValueError("'entries' must be a 2x2 list of polynomials or the string 'paper'")
    polys = tuple(tuple(_poly_from_json(p, N) for p in row) for row in entries)
    return RuleMatrix(polys, name=data.get("name", name))


def rule_to_dict(M: RuleMatrix) -> dict:
    return {
        "N": M.N,
        "name": M.name,
        "entries": [[[list(t) for t in p] for p in row] for row in M.entries],
    }


def load_rule(source: str | Path, N: int | None = None) -> RuleMatrix:
    """Resolve ``"paper"`` or a path to a JSON rule file.

    ``N`` is required for the built-in rule; for files it overrides nothing and
    must agree with the file when given.
    """
    if str(source) == "paper":
        if N is None:
            raise ValueError("the built-in rule needs a modulus N")
        return paper_rule(N)
    path = Path(source)
    with path.open(encoding="utf-8") as fh:
        data = json.load(fh)
    if N is not None and data.get("N") != N:
        raise ValueError(f"rule file {path} is mod {data.get('N')}, requested N={N}")
    return rule_from_dict(data, name=path.stem)
