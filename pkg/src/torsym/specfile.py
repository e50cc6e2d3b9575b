"""Symbol-spec documents (JSON).

A spec looks like::

    {
      "dim": 2,
      "order": -2,                      # or [re, im]
      "terms": [{"degree": -2, "profile": "xi1^2"}],
      "remainder": "(1+r^2)^(-2)",      # optional, expression in x, xi
      "value_at_zero": 0,               # optional, number or [re, im]
      "x_bandwidth": 0,                 # optional promise for the FFT path
      "su2": {"a_plus": 1, "a_minus": -1, "zero_weight": 0,
              "scalar": "(1+lam)^(-1/2)", "order": -1,
              "matrices": "spins.json"}
    }

Profiles are evaluated with ``xi`` set to the unit direction (so ``r`` is 1
there).  Any expression may be a pair ``[re, im]``.  In the su2 block,
``scalar`` is an expression in ``lam`` (Casimir j(j+1)) and ``j``; present
parts are added together.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .dsl import parse
from .errors import EvalError, ParseError, SpecError, UsageError
from .su2 import Su2Symbol, homogeneous_su2_symbol
from .symbols import ClassicalToroidalSymbol, HomogeneousTerm, LatticeSymbol


def _complex(v, what):
    if isinstance(v, bool):
        raise SpecError(f"{what}: expected a number")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(a, (int, float)) for a in v):
        return complex(v[0], v[1])
    raise SpecError(f"{what}: expected a number or [re, im]")


def _exprs(v, dim, what, extra=()):
    if isinstance(v, str):
        parts = [v]
    elif isinstance(v, list) and len(v) == 2 and all(isinstance(a, str) for a in v):
        parts = v
    else:
        raise SpecError(f"{what}: expected an expression or [re, im] pair of expressions")
    try:
        return [parse(p, dim, extra) for p in parts]
    except ParseError as e:
        raise SpecError(f"{what}: {e}") from e


def _combine(exprs):
    re_e = exprs[0]
    im_e = exprs[1] if len(exprs) > 1 else None

    def f(*args, **kw):
        out = np.asarray(re_e(*args, **kw), dtype=complex)
        if im_e is not None:
            out = out + 1j * np.asarray(im_e(*args, **kw))
        return out

    depends_x = any(e.depends_on_x for e in exprs)
    return f, depends_x


@dataclass
class SymbolSpec:
    dim: int
    order: complex
    symbol: Optional[ClassicalToroidalSymbol]
    su2: Optional[Su2Symbol]
    x_bandwidth: Optional[int] = None

    def lattice(self) -> LatticeSymbol:
        if self.symbol is None:
            raise SpecError("spec has no torus symbol")
        lat = self.symbol.lattice()
        lat.x_bandwidth = self.x_bandwidth
        return lat


def _torus_symbol(doc, dim, order):
    terms = []
    raw_terms = doc.get("terms", [])
    if not isinstance(raw_terms, list):
        raise SpecError("terms: expected a list")
    for k, t in enumerate(raw_terms):
        if not isinstance(t, dict) or "degree" not in t or "profile" not in t:
            raise SpecError(f"terms[{k}]: needs 'degree' and 'profile'")
        deg = _complex(t["degree"], f"terms[{k}].degree")
        if abs(deg - (order - k)) > 1e-12:
            raise SpecError(f"terms[{k}].degree = {deg}, expected order - {k} = {order - k}")
        f, dx = _combine(_exprs(t["profile"], dim, f"terms[{k}].profile"))
        terms.append(HomogeneousTerm(deg, lambda x, w, f=f: f(x, w), not dx))
    remainder = None
    if doc.get("remainder") is not None:
        f, dx = _combine(_exprs(doc["remainder"], dim, "remainder"))
        remainder = LatticeSymbol(dim, lambda x, l, f=f: f(x, l), not dx)
    if "value_at_zero" in doc:
        v0 = _complex(doc["value_at_zero"], "value_at_zero")
    elif remainder is not None:
        try:
            remainder(np.zeros(dim), np.zeros(dim))
        except EvalError as e:
            raise SpecError(f"remainder is singular at l = 0 ({e}); give value_at_zero") from e
        v0 = None   # the remainder supplies sigma(x, 0)
    else:
        v0 = 0j
    if not terms and remainder is None and "value_at_zero" not in doc:
        return None
    return ClassicalToroidalSymbol(dim, order, terms, remainder, v0)


def _su2_symbol(block, base: Path):
    if not isinstance(block, dict):
        raise SpecError("su2: expected an object")
    order = _complex(block.get("order", 0), "su2.order")
    parts = []
    if any(k in block for k in ("a_plus", "a_minus", "zero_weight")):
        if "a_plus" not in block or "a_minus" not in block:
            raise SpecError("su2: a_plus and a_minus go together")
        parts.append(homogeneous_su2_symbol(
            _complex(block["a_plus"], "su2.a_plus"),
            _complex(block["a_minus"], "su2.a_minus"),
            _complex(block.get("zero_weight", 0), "su2.zero_weight"),
        ))
    if "scalar" in block:
        f, _ = _combine(_exprs(block["scalar"], 1, "su2.scalar", extra=("lam", "j")))

        def scal(lam, j, f=f):
            try:
                return complex(f(lam=lam, j=j))
            except EvalError:
                # singular at the trivial representation: treat as 0 there
                if j == 0:
                    return 0j
                raise

        parts.append(Su2Symbol.scalar(scal))
    if "matrices" in block:
        path = base / block["matrices"]
        try:
            raw = json.loads(path.read_text())
            mats = {}
            for key, rows in raw.items():
                arr = np.array(rows, dtype=float)
                if arr.ndim == 3:
                    arr = arr[..., 0] + 1j * arr[..., 1]
                mats[int(key)] = arr
        except (OSError, ValueError, json.JSONDecodeError) as e:
            raise SpecError(f"su2.matrices: cannot read {path}: {e}") from e
        parts.append(Su2Symbol.from_matrices(mats))
    if not parts:
        raise SpecError("su2: give a_plus/a_minus, scalar, or matrices")
    if len(parts) == 1:
        sym = parts[0]
        sym.order = order
        return sym
    tops = [p.max_two_j for p in parts if p.max_two_j is not None]
    return Su2Symbol(lambda x, k: sum(p.at(k, x) for p in parts), order, False,
                     min(tops) if tops else None, lambda k: sum(p.trace(k) for p in parts))


def load_spec(doc, base: Path = Path(".")) -> SymbolSpec:
    """Build a SymbolSpec from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise SpecError("spec must be a JSON object")
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SpecError("dim: expected a positive integer")
    order = _complex(doc.get("order", 0), "order")
    bw = doc.get("x_bandwidth")
    if bw is not None and (not isinstance(bw, int) or bw < 0):
        raise SpecError("x_bandwidth: expected a non-negative integer")
    symbol = _torus_symbol(doc, dim, order)
    su2 = _su2_symbol(doc["su2"], base) if "su2" in doc else None
    return SymbolSpec(dim, order, symbol, su2, bw)


def read_spec(path) -> SymbolSpec:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}: invalid JSON at offset {e.pos}: {e.msg}") from e
    return load_spec(doc, path.parent)
