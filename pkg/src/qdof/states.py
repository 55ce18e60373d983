"""Pure states and density matrices of particles carrying several degrees of freedom.

A state of ``p`` particles is a sparse amplitude map over tuples of single-particle
kets.  Each ket carries a spatial-region label and one eigenvalue per degree of
freedom (DoF).  Three particle kinds are supported:

* bosons (``eta = +1``)  -- ket tuples are unordered, amplitudes symmetric,
* fermions (``eta = -1``) -- ket tuples are unordered, amplitude picks up the
  permutation sign and vanishes for doubly occupied kets (Pauli exclusion),
* distinguishable      -- the tuple slot *is* the particle label; no
  symmetrization, the inner product is the plain tensor product.

For the symmetrized kinds, tuples are stored in a canonical sorted order and the
exchange sign is absorbed into the amplitude, so ``|phi,psi> == eta |psi,phi>``
holds by construction.  The two-particle amplitude rule

    <a,b | c,d> = <a|c><b|d> + eta <a|d><b|c>

is extended to ``p`` particles as a permutation sum (a permanent for bosons, a
determinant for fermions) over the single-ket overlap matrix.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

BOSON = 1
FERMION = -1
DISTINGUISHABLE = 0

_ATOL = 1e-9


class DegenerateStateError(ValueError):
    """Raised when a state has zero norm (e.g. fully Pauli-excluded fermions)."""


class ShapeError(ValueError):
    """Raised when two states do not share DoF layout or statistics."""


@dataclass(frozen=True)
class DofSpec:
    """One degree of freedom: its index (1-based) and ordered eigenvalue labels."""

    index: int
    values: tuple

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValueError("a DoF needs at least two eigenvalues")
        if len(set(self.values)) != len(self.values):
            raise ValueError("eigenvalue labels must be distinct")

    @property
    def dim(self):
        return len(self.values)


@dataclass(frozen=True, order=True)
class Ket:
    """Single-particle basis ket: spatial region plus (dof_index, value) pairs."""

    region: str
    dofs: tuple = ()

    def value(self, index):
        for i, v in self.dofs:
            if i == index:
                return v
        return None

    def drop(self, index):
        """Copy of this ket without DoF `index` (the region label is kept)."""
        return Ket(self.region, tuple(p for p in self.dofs if p[0] != index))

    def with_value(self, index, value):
        pairs = tuple(sorted([p for p in self.dofs if p[0] != index] + [(index, value)]))
        return Ket(self.region, pairs)


def canonical(kets, eta):
    """Sort a ket tuple into canonical order.

    Returns ``(sorted_tuple, sign)`` where the sign is the fermionic parity of
    the sorting permutation (+1 for bosons / distinguishable).  Fermionic tuples
    with a repeated ket get sign 0 (Pauli exclusion).
    """
    kets = tuple(kets)
    if eta == DISTINGUISHABLE:
        return kets, 1
    order = sorted(range(len(kets)), key=lambda i: kets[i])
    sorted_kets = tuple(kets[i] for i in order)
    if eta == FERMION:
        if len(set(sorted_kets)) != len(sorted_kets):
            return sorted_kets, 0
        # parity via explicit inversion count (tuples are tiny)
        inv = sum(1 for a in range(len(order)) for b in range(a + 1, len(order))
                  if order[a] > order[b])
        return sorted_kets, -1 if inv % 2 else 1
    return sorted_kets, 1


def _overlap_matrix(s, t):
    n = len(s)
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            m[i, j] = 1.0 if s[i] == t[j] else 0.0
    return m


def tuple_overlap(s, t, eta):
    """<s|t> for canonical ket tuples: permanent (bosons) or determinant (fermions)."""
    if len(s) != len(t):
        return 0.0
    if eta == DISTINGUISHABLE:
        return 1.0 if s == t else 0.0
    m = _overlap_matrix(s, t)
    if eta == FERMION:
        return float(round(np.linalg.det(m)))
    total = 0.0
    for perm in itertools.permutations(range(len(s))):
        total += math.prod(m[i, perm[i]] for i in range(len(s)))
    return total


@dataclass
class SymState:
    """Sparse pure state: amplitude per canonical tuple of kets.

    `eta` is +1 (bosons), -1 (fermions) or 0 (distinguishable, slot = label).
    """

    eta: int
    terms: dict
    dof_specs: tuple = ()
    particle_labels: tuple = ()

    def __post_init__(self):
        merged = {}
        for kets, amp in self.terms.items():
            kets, sign = canonical(kets, self.eta)
            if sign == 0:
                continue
            amp = complex(amp) * sign
            if abs(amp) == 0.0:
                continue
            merged[kets] = merged.get(kets, 0.0) + amp
        self.terms = {k: v for k, v in merged.items() if abs(v) > 1e-15}

    @property
    def n_particles(self):
        for kets in self.terms:
            return len(kets)
        return 0

    @property
    def n_dofs(self):
        idx = {i for kets in self.terms for k in kets for i, _ in k.dofs}
        return len(idx)

    def amplitude(self, kets):
        kets, sign = canonical(kets, self.eta)
        if sign == 0:
            return 0.0
        return sign * self.terms.get(kets, 0.0)

    def map_terms(self, fn):
        return SymState(self.eta, {k: fn(k, v) for k, v in self.terms.items()},
                        self.dof_specs, self.particle_labels)

    def scaled(self, factor):
        return SymState(self.eta, {k: v * factor for k, v in self.terms.items()},
                        self.dof_specs, self.particle_labels)

    # -- serialization -------------------------------------------------------

    def to_json(self):
        def enc(kets):
            return [[k.region, [list(p) for p in k.dofs]] for k in kets]
        return json.dumps({
            "eta": {BOSON: "boson", FERMION: "fermion",
                    DISTINGUISHABLE: "distinguishable"}[self.eta],
            "dof_specs": [[d.index, list(d.values)] for d in self.dof_specs],
            "terms": [{"kets": enc(k), "re": v.real, "im": v.imag}
                      for k, v in sorted(self.terms.items())],
        })

    @staticmethod
    def from_json(doc):
        data = json.loads(doc) if isinstance(doc, str) else doc
        eta = {"boson": BOSON, "fermion": FERMION,
               "distinguishable": DISTINGUISHABLE}[data["eta"]]
        specs = tuple(DofSpec(i, tuple(v)) for i, v in data.get("dof_specs", []))
        terms = {}
        for t in data["terms"]:
            kets = tuple(Ket(r, tuple((int(i), v) for i, v in dofs))
                         for r, dofs in t["kets"])
            terms[kets] = complex(t["re"], t["im"])
        return SymState(eta, terms, specs)


def symmetric_inner(a, b):
    """Symmetric inner product <a|b> of two states over the same DoF layout."""
    if a.eta != b.eta:
        raise ShapeError("statistics flags differ")
    if a.dof_specs and b.dof_specs and a.dof_specs != b.dof_specs:
        raise ShapeError("DoF layouts differ")
    if a.n_particles and b.n_particles and a.n_particles != b.n_particles:
        raise ShapeError("particle numbers differ")
    total = 0.0 + 0.0j
    for s, amp_s in a.terms.items():
        for t, amp_t in b.terms.items():
            g = tuple_overlap(s, t, a.eta)
            if g:
                total += np.conj(amp_s) * amp_t * g
    return complex(total)


def norm_squared(s):
    return symmetric_inner(s, s).real


def normalize(s):
    """Rescale to unit norm under the symmetric inner product."""
    n2 = norm_squared(s)
    if n2 <= 1e-24:
        raise DegenerateStateError("state has zero norm")
    return s.scaled(1.0 / math.sqrt(n2))


@dataclass
class DensityMatrix:
    """Dense Hermitian matrix over an explicit ordered basis of ket tuples.

    Canonical tuples are treated as an orthonormal basis; amplitudes of bunched
    bosonic tuples are rescaled by sqrt(<S|S>) when a pure state is densified, so
    matrix traces coincide with physical norms.
    """

    basis: tuple
    data: np.ndarray
    eta: int
    dof_specs: tuple = ()
    n_dofs_orig: int = 0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (len(self.basis), len(self.basis)):
            raise ShapeError("matrix shape does not match basis size")

    @property
    def trace(self):
        return float(np.trace(self.data).real)

    @property
    def purity(self):
        return float(np.trace(self.data @ self.data).real)

    def renormalized(self):
        tr = np.trace(self.data).real
        if tr <= 1e-24:
            raise DegenerateStateError("zero-trace matrix")
        return DensityMatrix(self.basis, self.data / tr, self.eta,
                             self.dof_specs, self.n_dofs_orig)

    def check(self, atol=_ATOL):
        """Validate hermiticity, unit trace and positivity; returns self."""
        if not np.allclose(self.data, self.data.conj().T, atol=atol):
            raise ValueError("matrix is not Hermitian")
        if abs(self.trace - 1.0) > atol:
            raise ValueError("trace differs from 1")
        if np.linalg.eigvalsh(self.data).min() < -atol:
            raise ValueError("matrix has a negative eigenvalue")
        return self

    def value_order(self, dof_index):
        spec = {d.index: d for d in self.dof_specs}.get(dof_index)
        if spec is not None:
            return list(spec.values)
        vals = sorted({k.value(dof_index) for kets in self.basis for k in kets
                       if k.value(dof_index) is not None})
        return vals

    def to_array(self):
        return np.array(self.data)

    def to_json(self):
        def enc(kets):
            return [[k.region, [list(p) for p in k.dofs]] for k in kets]
        return json.dumps({
            "basis": [enc(k) for k in self.basis],
            "re": np.real(self.data).tolist(),
            "im": np.imag(self.data).tolist(),
        })

    def to_csv(self):
        """Row-major CSV with re/im interleaved."""
        lines = []
        for row in self.data:
            cells = []
            for z in row:
                cells.append(repr(float(z.real)))
                cells.append(repr(float(z.imag)))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def to_density(s):
    """Rank-1 density matrix of a normalized pure state."""
    basis = tuple(sorted(s.terms))
    v = np.array([s.terms[b] * math.sqrt(tuple_overlap(b, b, s.eta))
                  for b in basis], dtype=complex)
    data = np.outer(v, v.conj())
    return DensityMatrix(basis, data, s.eta, s.dof_specs, s.n_dofs)


def mix(states):
    """Convex combination of (weight, DensityMatrix) pairs on a merged basis."""
    if not states:
        raise ValueError("empty ensemble")
    weights = [w for w, _ in states]
    if any(w < -1e-12 for w in weights):
        raise ValueError("negative weight")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1")
    basis = sorted({b for _, dm in states for b in dm.basis})
    index = {b: i for i, b in enumerate(basis)}
    data = np.zeros((len(basis), len(basis)), dtype=complex)
    eta = states[0][1].eta
    specs = states[0][1].dof_specs
    ndof = max(dm.n_dofs_orig for _, dm in states)
    for w, dm in states:
        if dm.eta != eta:
            raise ShapeError("cannot mix different statistics")
        idx = [index[b] for b in dm.basis]
        data[np.ix_(idx, idx)] += w * dm.data
    return DensityMatrix(tuple(basis), data, eta, specs, ndof)
