"""Discrete markets with side information.

Markets are finite-support generators of joint (returns, side-info) pairs:
i.i.d. draws, stationary order-h Markov chains over joint atoms, and
mixtures of such components where one ergodic mode is drawn per path.
All sampling is bit-reproducible: a named integer-state generator (PCG64)
drives inverse-CDF lookups with a fixed tie rule at CDF boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import _fast
from .errors import (
    DimensionMismatch,
    GrowthLabError,
    HistoryTooShort,
    InvalidProbability,
    MissingTransitionRow,
    NonPositiveInput,
    NotConverged,
)
from .util import canonical_json, sha256_hex

PROB_TOL = 1e-12
STATIONARY_FLAG_TOL = 1e-9
POWER_TOL = 1e-12
POWER_RESIDUAL_TOL = 1e-10
POWER_MAX_ITER = 10**6

IID = "IID"
MARKOV = "MARKOV"
MIXTURE = "MIXTURE"


# ---------------------------------------------------------------------------
# domain types


def _as_vector(values, *, name: str, dtype=np.float64) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be a 1-D vector, got shape {arr.shape}")
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AssetReturns:
    """Strictly positive gross returns of the m assets for one period."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.values, name="returns")
        if arr.size < 2:
            raise DimensionMismatch("a market needs at least m=2 assets")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
            raise NonPositiveInput("gross returns must be finite and strictly positive")
        object.__setattr__(self, "values", arr)

    @property
    def m(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class SideInfo:
    """Real-valued side-information features; k=0 encodes 'no side info'."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(arr)):
            raise GrowthLabError("side information must be finite")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def k(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class JointOutcome:
    """One support atom: a (returns, side) pair with its index in the spec."""

    returns: AssetReturns
    side: SideInfo
    atom_id: int


def _normalize_support(support) -> tuple[JointOutcome, ...]:
    atoms = []
    for idx, entry in enumerate(support):
        if isinstance(entry, JointOutcome):
            x, y = entry.returns, entry.side
        elif isinstance(entry, (tuple, list)) and len(entry) == 2 and not np.isscalar(entry[0]):
            x = entry[0] if isinstance(entry[0], AssetReturns) else AssetReturns(np.asarray(entry[0], dtype=np.float64))
            y_raw = entry[1]
            if y_raw is None:
                y_raw = ()
            y = y_raw if isinstance(y_raw, SideInfo) else SideInfo(np.asarray(y_raw, dtype=np.float64).reshape(-1))
        else:
            x = AssetReturns(np.asarray(entry, dtype=np.float64))
            y = SideInfo(np.empty(0))
        if not isinstance(x, AssetReturns):
            x = AssetReturns(x)
        atoms.append(JointOutcome(returns=x, side=y, atom_id=idx))
    if not atoms:
        raise DimensionMismatch("support must contain at least one atom")
    m = atoms[0].returns.m
    k = atoms[0].side.k
    for a in atoms:
        if a.returns.m != m or a.side.k != k:
            raise DimensionMismatch("all support atoms must share the same m and k")
    return tuple(atoms)


def _check_prob_vector(p, length: int | None, what: str) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64).reshape(-1)
    if length is not None and arr.size != length:
        raise DimensionMismatch(f"{what}: expected length {length}, got {arr.size}")
    if arr.size == 0:
        raise InvalidProbability(f"{what}: empty probability vector")
    if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
        raise InvalidProbability(f"{what}: negative or non-finite entries")
    if abs(arr.sum() - 1.0) > PROB_TOL:
        raise InvalidProbability(f"{what}: entries sum to {arr.sum()!r}, not 1")
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


def _check_no_trash(atoms: Sequence[JointOutcome], bound: float) -> None:
    if not (0.0 < bound):
        raise GrowthLabError("no_trash_bound must be positive")
    for a in atoms:
        x = a.returns.values
        if x.min() / x.max() < bound:
            raise GrowthLabError(
                f"atom {a.atom_id} violates the no-trash bound: "
                f"min/max ratio {x.min() / x.max():.3g} < {bound:.3g}"
            )


@dataclass(frozen=True, eq=False)
class MarketSpec:
    """Immutable description of a market generator.

    kind is one of IID / MARKOV / MIXTURE.  Specs are safe to share across
    workers; all sampling state lives in per-path generators.
    """

    kind: str
    support: tuple[JointOutcome, ...] = ()
    marginal: np.ndarray | None = None
    order: int = 0
    transition: Mapping[tuple[int, ...], np.ndarray] | None = None
    initial_states: tuple[tuple[int, ...], ...] | None = None
    initial_probs: np.ndarray | None = None
    stationary_start: bool = True
    components: tuple["MarketSpec", ...] | None = None
    weights: np.ndarray | None = None
    no_trash_bound: float | None = None

    # -- dimensions ---------------------------------------------------------

    @property
    def m(self) -> int:
        if self.kind == MIXTURE:
            return self.components[0].m
        return self.support[0].returns.m

    @property
    def k(self) -> int:
        if self.kind == MIXTURE:
            return self.components[0].k
        return self.support[0].side.k

    @property
    def n_atoms(self) -> int:
        return len(self.support)

    # -- cached dense views --------------------------------------------------

    @cached_property
    def x_matrix(self) -> np.ndarray:
        mat = np.stack([a.returns.values for a in self.support])
        mat.setflags(write=False)
        return mat

    @cached_property
    def y_matrix(self) -> np.ndarray:
        mat = np.stack([a.side.values for a in self.support]).reshape(len(self.support), self.k)
        mat.setflags(write=False)
        return mat

    @cached_property
    def _atom_lookup(self) -> dict[bytes, int]:
        table = {}
        for a in self.support:
            key = a.returns.values.tobytes() + b"|" + a.side.values.tobytes()
            table.setdefault(key, a.atom_id)
        return table

    def atom_index(self, x, y) -> int:
        """Exact lookup of the atom matching a sampled (returns, side) pair."""
        xa = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
        ya = np.ascontiguousarray(np.asarray(y, dtype=np.float64).reshape(-1))
        key = xa.tobytes() + b"|" + ya.tobytes()
        try:
            return self._atom_lookup[key]
        except KeyError:
            raise GrowthLabError("(returns, side) pair is not an atom of this spec") from None

    @cached_property
    def x_group_of_atom(self) -> np.ndarray:
        """Map atom id -> index of its distinct returns vector."""
        seen: dict[bytes, int] = {}
        out = np.empty(self.n_atoms, dtype=np.int64)
        for a in self.support:
            key = a.returns.values.tobytes()
            if key not in seen:
                seen[key] = len(seen)
            out[a.atom_id] = seen[key]
        out.setflags(write=False)
        return out

    @cached_property
    def x_group_matrix(self) -> np.ndarray:
        groups = self.x_group_of_atom
        n_groups = int(groups.max()) + 1
        mat = np.empty((n_groups, self.m))
        for a in self.support:
            mat[groups[a.atom_id]] = a.returns.values
        mat.setflags(write=False)
        return mat

    # -- Markov dense machinery ----------------------------------------------

    @cached_property
    def markov_states(self) -> tuple[tuple[int, ...], ...]:
        if self.kind != MARKOV:
            raise GrowthLabError("markov_states is only defined for MARKOV specs")
        return tuple(sorted(self.transition.keys()))

    @cached_property
    def _state_index(self) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.markov_states)}

    @cached_property
    def _dense_rows(self) -> np.ndarray:
        rows = np.stack([np.asarray(self.transition[s], dtype=np.float64) for s in self.markov_states])
        rows.setflags(write=False)
        return rows

    @cached_property
    def _dense_succ(self) -> np.ndarray:
        states = self.markov_states
        index = self._state_index
        succ = np.full((len(states), self.n_atoms), -1, dtype=np.int64)
        for si, s in enumerate(states):
            for a in range(self.n_atoms):
                if self.transition[s][a] > 0.0:
                    succ[si, a] = index[s[1:] + (a,)]
        succ.setflags(write=False)
        return succ

    @cached_property
    def _dense_cdf(self) -> np.ndarray:
        cdf = np.cumsum(self._dense_rows, axis=1)
        cdf.setflags(write=False)
        return cdf

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        doc: dict = {"kind": self.kind, "m": self.m, "k": self.k}
        if self.no_trash_bound is not None:
            doc["no_trash_bound"] = float(self.no_trash_bound)
        if self.kind == MIXTURE:
            doc["components"] = [c.to_json() for c in self.components]
            doc["weights"] = [float(w) for w in self.weights]
            return doc
        doc["support"] = [
            {"x": [float(v) for v in a.returns.values], "y": [float(v) for v in a.side.values]}
            for a in self.support
        ]
        if self.kind == IID:
            doc["marginal"] = [float(p) for p in self.marginal]
        else:
            doc["order"] = int(self.order)
            doc["transition"] = {
                ",".join(str(i) for i in s): [float(p) for p in self.transition[s]]
                for s in self.markov_states
            }
            doc["initial"] = {
                ",".join(str(i) for i in s): float(p)
                for s, p in zip(self.initial_states, self.initial_probs)
            }
            doc["stationary_start"] = bool(self.stationary_start)
        return doc

    @cached_property
    def digest(self) -> str:
        """SHA-256 of the canonical (sorted-key) JSON serialization."""
        return sha256_hex(canonical_json(self.to_json()))


# ---------------------------------------------------------------------------
# builders


def build_iid(support, probs, *, no_trash_bound: float | None = None) -> MarketSpec:
    """I.i.d. joint draws of (returns, side) atoms."""
    atoms = _normalize_support(support)
    marginal = _check_prob_vector(probs, len(atoms), "marginal")
    if no_trash_bound is not None:
        _check_no_trash(atoms, no_trash_bound)
    return MarketSpec(kind=IID, support=atoms, marginal=marginal, no_trash_bound=no_trash_bound)


def _normalize_transition(transition, n_atoms: int, order: int) -> dict[tuple[int, ...], np.ndarray]:
    table: dict[tuple[int, ...], np.ndarray] = {}
    if isinstance(transition, Mapping):
        items = transition.items()
        for key, row in items:
            if np.isscalar(key):
                key = (int(key),)
            tup = tuple(int(v) for v in key)
            if len(tup) != order:
                raise DimensionMismatch(f"transition key {tup} does not have length h={order}")
            if any(not (0 <= v < n_atoms) for v in tup):
                raise DimensionMismatch(f"transition key {tup} indexes outside the support")
            table[tup] = _check_prob_vector(row, n_atoms, f"transition row {tup}")
    else:
        mat = np.asarray(transition, dtype=np.float64)
        if order != 1 or mat.shape != (n_atoms, n_atoms):
            raise DimensionMismatch(
                "matrix-form transitions are only valid for h=1 with shape (K, K)"
            )
        for i in range(n_atoms):
            table[(i,)] = _check_prob_vector(mat[i], n_atoms, f"transition row ({i},)")
    if not table:
        raise MissingTransitionRow("transition table is empty")
    return table


def _check_closure(table: Mapping[tuple[int, ...], np.ndarray]) -> None:
    for state, row in table.items():
        for a in np.nonzero(np.asarray(row) > 0.0)[0]:
            succ = state[1:] + (int(a),)
            if succ not in table:
                raise MissingTransitionRow(
                    f"reachable state {succ} (from {state} via atom {int(a)}) has no transition row"
                )


def build_markov(
    support,
    order: int,
    transition,
    initial=None,
    *,
    no_trash_bound: float | None = None,
) -> MarketSpec:
    """Stationary order-h Markov chain over joint atoms.

    `initial` is a distribution over h-tuples of atom ids (dict keyed by
    tuple, or a vector over atoms when h=1, or a vector aligned with the
    sorted state list).  When omitted the chain starts from its stationary
    distribution; an explicit non-stationary start is allowed and recorded
    in the `stationary_start` flag.
    """
    if order < 1:
        raise DimensionMismatch("MARKOV order must be h >= 1 (use build_iid for h=0)")
    atoms = _normalize_support(support)
    table = _normalize_transition(transition, len(atoms), order)
    _check_closure(table)
    if no_trash_bound is not None:
        _check_no_trash(atoms, no_trash_bound)

    states = tuple(sorted(table.keys()))
    probe = MarketSpec(kind=MARKOV, support=atoms, order=order, transition=table,
                       initial_states=states,
                       initial_probs=np.full(len(states), 1.0 / len(states)))
    try:
        pi = stationary_distribution(probe)
    except NotConverged:
        pi = None
        if initial is None:
            raise

    if initial is None:
        init_probs = pi
        flag = True
    else:
        if isinstance(initial, Mapping):
            vec = np.zeros(len(states))
            for key, p in initial.items():
                if np.isscalar(key):
                    key = (int(key),)
                tup = tuple(int(v) for v in key)
                if tup not in probe._state_index:
                    raise DimensionMismatch(f"initial state {tup} has no transition row")
                vec[probe._state_index[tup]] = float(p)
        else:
            arr = np.asarray(initial, dtype=np.float64).reshape(-1)
            if order == 1 and arr.size == len(atoms):
                vec = np.zeros(len(states))
                for a in range(len(atoms)):
                    if arr[a] > 0.0 and (a,) not in probe._state_index:
                        raise DimensionMismatch(f"initial state ({a},) has no transition row")
                    if (a,) in probe._state_index:
                        vec[probe._state_index[(a,)]] = arr[a]
            elif arr.size == len(states):
                vec = arr.copy()
            else:
                raise DimensionMismatch(
                    f"initial must have length {len(states)} (states) "
                    f"or {len(atoms)} (atoms, h=1 only)"
                )
        init_probs = _check_prob_vector(vec, len(states), "initial distribution")
        flag = pi is not None and float(np.abs(init_probs - pi).max()) <= STATIONARY_FLAG_TOL

    return MarketSpec(
        kind=MARKOV,
        support=atoms,
        order=order,
        transition=table,
        initial_states=states,
        initial_probs=init_probs,
        stationary_start=flag,
        no_trash_bound=no_trash_bound,
    )


def build_mixture(components: Sequence[MarketSpec], weights) -> MarketSpec:
    """Stationary non-ergodic mixture: one component (mode) drawn per path."""
    comps = tuple(components)
    if len(comps) < 2:
        raise DimensionMismatch("a mixture needs at least two components")
    for c in comps:
        if c.kind == MIXTURE:
            raise DimensionMismatch("nested mixtures are not supported")
        if c.m != comps[0].m or c.k != comps[0].k:
            raise DimensionMismatch("mixture components must share m and k")
    w = _check_prob_vector(weights, len(comps), "mixture weights")
    return MarketSpec(kind=MIXTURE, components=comps, weights=w)


# ---------------------------------------------------------------------------
# stationary distribution


def stationary_distribution(spec: MarketSpec) -> np.ndarray:
    """Stationary distribution over h-tuples, aligned with spec.markov_states.

    Power iteration from the uniform vector with tolerance 1e-12, capped at
    1e6 sweeps; raises NotConverged for reducible chains (non-unique pi) and
    for periodic chains that fail to settle.
    """
    if spec.kind != MARKOV:
        raise GrowthLabError("stationary_distribution requires a MARKOV spec")
    states = spec.markov_states
    S = len(states)
    rows = spec._dense_rows
    succ = spec._dense_succ

    # strong connectivity on the state graph => unique stationary distribution
    src, dst = [], []
    for si in range(S):
        for a in np.nonzero(rows[si] > 0.0)[0]:
            src.append(si)
            dst.append(succ[si, a])
    graph = csr_matrix((np.ones(len(src)), (src, dst)), shape=(S, S))
    n_comp, _ = connected_components(graph, directed=True, connection="strong")
    if n_comp > 1:
        raise NotConverged(
            f"chain is reducible ({n_comp} strongly connected components); "
            "stationary distribution is not unique"
        )

    # dense state-to-state operator
    P = np.zeros((S, S))
    for si in range(S):
        for a in np.nonzero(rows[si] > 0.0)[0]:
            P[si, succ[si, a]] += rows[si, a]

    pi = np.full(S, 1.0 / S)
    for _ in range(POWER_MAX_ITER):
        nxt = pi @ P
        if np.abs(nxt - pi).sum() <= POWER_TOL:
            pi = nxt
            break
        pi = nxt
    else:
        raise NotConverged("power iteration did not converge (periodic chain?)")
    pi = pi / pi.sum()
    if np.abs(pi @ P - pi).sum() > POWER_RESIDUAL_TOL:
        raise NotConverged("power iteration stalled away from a fixed point")
    pi.setflags(write=False)
    return pi


def stationary_atom_marginal(spec: MarketSpec) -> np.ndarray:
    """Stationary one-step distribution over atoms (IID: the marginal)."""
    if spec.kind == IID:
        return spec.marginal.copy()
    if spec.kind != MARKOV:
        raise GrowthLabError("stationary_atom_marginal needs an IID or MARKOV spec")
    if spec.stationary_start:
        pi = spec.initial_probs
    else:
        pi = stationary_distribution(spec)
    out = pi @ spec._dense_rows
    return out / out.sum()


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True, eq=False)
class MarketPath:
    """One realized path: atom ids plus the mode and seed that produced it."""

    spec: MarketSpec
    atom_ids: np.ndarray
    mode_id: int
    seed: int

    def __post_init__(self):
        ids = np.ascontiguousarray(np.asarray(self.atom_ids, dtype=np.int64))
        if ids.size == 0:
            raise DimensionMismatch("paths must have at least one step")
        ids.setflags(write=False)
        object.__setattr__(self, "atom_ids", ids)

    @property
    def n(self) -> int:
        return self.atom_ids.size

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def component_spec(self) -> MarketSpec:
        if self.spec.kind == MIXTURE:
            return self.spec.components[self.mode_id]
        return self.spec

    @property
    def spec_digest(self) -> str:
        return self.spec.digest

    @cached_property
    def x_matrix(self) -> np.ndarray:
        mat = self.component_spec.x_matrix[self.atom_ids]
        mat.setflags(write=False)
        return mat

    @cached_property
    def y_matrix(self) -> np.ndarray:
        mat = self.component_spec.y_matrix[self.atom_ids]
        mat.setflags(write=False)
        return mat

    @property
    def steps(self) -> tuple[JointOutcome, ...]:
        support = self.component_spec.support
        return tuple(support[a] for a in self.atom_ids)

    @cached_property
    def digest(self) -> str:
        head = canonical_json(
            {"spec": self.spec_digest, "seed": int(self.seed), "mode": int(self.mode_id), "n": int(self.n)}
        ).encode()
        return sha256_hex(head + self.atom_ids.tobytes())


def _sample_atoms(spec: MarketSpec, n: int, gen: np.random.Generator) -> np.ndarray:
    if spec.kind == IID:
        cdf = np.cumsum(spec.marginal)
        ids = np.searchsorted(cdf, gen.random(n), side="right")
        return np.minimum(ids, spec.n_atoms - 1).astype(np.int64)
    if spec.kind == MARKOV:
        init_cdf = np.cumsum(spec.initial_probs)
        u = gen.random(n + 1)
        out = np.empty(n, dtype=np.int64)
        _fast.markov_sample(spec._dense_cdf, spec._dense_succ, init_cdf, u, out)
        return out
    raise GrowthLabError(f"cannot sample atoms for kind {spec.kind}")


def sample_path(spec: MarketSpec, n: int, seed: int) -> MarketPath:
    """Sample a length-n path; identical (spec, seed, n) reproduce it bit-for-bit.

    MARKOV paths start from the spec's initial h-tuple distribution (the
    stationary one unless overridden) held as latent pre-history, so every
    recorded step is a transition draw.  MIXTURE paths draw the mode first,
    then delegate to the chosen component on the same stream.
    """
    if n < 1:
        raise DimensionMismatch("path length must be n >= 1")
    gen = np.random.default_rng(int(seed))
    if spec.kind == MIXTURE:
        cdf = np.cumsum(spec.weights)
        mode = int(min(np.searchsorted(cdf, gen.random(), side="right"), len(cdf) - 1))
        atoms = _sample_atoms(spec.components[mode], n, gen)
        return MarketPath(spec=spec, atom_ids=atoms, mode_id=mode, seed=int(seed))
    atoms = _sample_atoms(spec, n, gen)
    return MarketPath(spec=spec, atom_ids=atoms, mode_id=0, seed=int(seed))


# ---------------------------------------------------------------------------
# oracle conditionals


def conditional_next(
    spec: MarketSpec,
    history: Iterable[int],
    mode_id: int = 0,
    *,
    allow_partial: bool = False,
) -> np.ndarray:
    """Exact distribution of the next joint atom given the visible atom history.

    For MARKOV specs the history must contain at least h atoms; passing
    `allow_partial=True` instead filters over the latent initial h-tuple,
    which is what the oracle strategies use for the first h steps.
    """
    if spec.kind == MIXTURE:
        if not (0 <= mode_id < len(spec.components)):
            raise DimensionMismatch(f"mode_id {mode_id} is not a mixture component")
        return conditional_next(spec.components[mode_id], history, 0, allow_partial=allow_partial)
    hist = tuple(int(a) for a in history)
    if any(not (0 <= a < spec.n_atoms) for a in hist):
        raise DimensionMismatch("history contains ids outside the support")
    if spec.kind == IID:
        return spec.marginal.copy()
    h = spec.order
    if len(hist) >= h:
        key = hist[-h:]
        row = spec.transition.get(key)
        if row is None:
            raise MissingTransitionRow(f"no transition row for observed context {key}")
        return np.asarray(row, dtype=np.float64).copy()
    if not allow_partial:
        raise HistoryTooShort(
            f"need at least h={h} atoms of history, got {len(hist)} "
            "(allow_partial=True filters over the latent initial tuple)"
        )
    # forward-filter the latent initial h-tuple through the visible prefix
    rows = spec._dense_rows
    succ = spec._dense_succ
    w = np.array(spec.initial_probs, dtype=np.float64)
    cur = np.arange(len(spec.markov_states))
    for a in hist:
        for idx in range(w.size):
            if w[idx] <= 0.0:
                continue
            s = cur[idx]
            p = rows[s, a]
            w[idx] *= p
            if p > 0.0:
                cur[idx] = succ[s, a]
    total = w.sum()
    if total <= 0.0:
        raise GrowthLabError("observed history has probability zero under this spec")
    cond = np.zeros(spec.n_atoms)
    for idx in range(w.size):
        if w[idx] > 0.0:
            cond += (w[idx] / total) * rows[cur[idx]]
    return cond


# ---------------------------------------------------------------------------
# JSON round trip


def spec_to_json(spec: MarketSpec) -> dict:
    return spec.to_json()


def spec_from_json(doc: Mapping) -> MarketSpec:
    kind = doc["kind"]
    bound = doc.get("no_trash_bound")
    if kind == MIXTURE:
        comps = [spec_from_json(c) for c in doc["components"]]
        return build_mixture(comps, doc["weights"])
    support = [(np.asarray(a["x"], dtype=np.float64), np.asarray(a.get("y", ()), dtype=np.float64))
               for a in doc["support"]]
    if kind == IID:
        return build_iid(support, doc["marginal"], no_trash_bound=bound)
    if kind == MARKOV:
        transition = {
            tuple(int(v) for v in key.split(",")): row for key, row in doc["transition"].items()
        }
        initial = doc.get("initial")
        if initial is not None:
            initial = {tuple(int(v) for v in key.split(",")): p for key, p in initial.items()}
        return build_markov(support, int(doc["order"]), transition, initial, no_trash_bound=bound)
    raise GrowthLabError(f"unknown market kind {kind!r}")
