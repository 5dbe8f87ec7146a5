"""
Dense probability tables

Discrete sample ingestion plus joint, marginal and conditional tables over
ordered subsets of 1-based variables. Tables are numpy arrays whose axes follow
the scope order, so the flat (row-major) view is the mixed-radix layout.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from markov_ktree import config
from markov_ktree.constants import DEFAULT_PSEUDOCOUNT, NORMALIZATION_TOL
from markov_ktree.errors import DataError, ScopeError
from markov_ktree.formats import CardinalitySidecar, JointFile
from markov_ktree.logger import get_logger

logger = get_logger("tables")

Cardinalities = Mapping[int, int]


def _check_scope(scope: Sequence[int], cardinalities: Optional[Cardinalities] = None) -> Tuple[int, ...]:
    scope = tuple(int(v) for v in scope)
    if not scope:
        raise ScopeError("Scope must not be empty")
    if len(set(scope)) != len(scope):
        raise ScopeError(f"Scope has repeated variables: {scope}")
    if len(scope) > config.TABLE_CAP:
        raise ScopeError(f"Scope of {len(scope)} variables exceeds the table cap of {config.TABLE_CAP}")
    if cardinalities is not None:
        missing = [v for v in scope if v not in cardinalities]
        if missing:
            raise ScopeError(f"Variables {missing} have no cardinality")
    return scope


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class JointTable:
    """P over `scope`; `probs.shape[i]` is the cardinality of `scope[i]`."""
    scope: Tuple[int, ...]
    probs: np.ndarray

    def __post_init__(self):
        scope = _check_scope(self.scope)
        probs = _frozen(self.probs)
        if probs.ndim != len(scope):
            raise ScopeError(f"Table has {probs.ndim} axes for a scope of {len(scope)}")
        if np.any(probs < 0):
            raise DataError("Probabilities must be nonnegative")
        total = probs.sum()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise DataError(f"Probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "probs", probs)

    @property
    def cardinalities(self) -> Dict[int, int]:
        return dict(zip(self.scope, self.probs.shape))

    @property
    def flat(self) -> np.ndarray:
        return self.probs.reshape(-1)

    def axis(self, var: int) -> int:
        try:
            return self.scope.index(var)
        except ValueError:
            raise ScopeError(f"Variable {var} is not in scope {self.scope}")


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    """P(target | given); axes are (*given, target) and each target slice sums to 1."""
    target: int
    given: Tuple[int, ...]
    probs: np.ndarray

    def __post_init__(self):
        given = tuple(int(v) for v in self.given)
        probs = _frozen(self.probs)
        if probs.ndim != len(given) + 1:
            raise ScopeError("Conditional table axes must be (*given, target)")
        if not np.allclose(probs.sum(axis=-1), 1.0, rtol=0, atol=NORMALIZATION_TOL):
            raise DataError(f"Conditional slices of X{self.target} do not sum to 1")
        object.__setattr__(self, "given", given)
        object.__setattr__(self, "probs", probs)

    @property
    def scope(self) -> Tuple[int, ...]:
        return self.given + (self.target,)

    def slice(self, given_states: Sequence[int]) -> np.ndarray:
        return self.probs[tuple(given_states)]


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Full assignments, one row per sample; column j holds variable j + 1."""
    data: np.ndarray
    cardinalities: Dict[int, int]
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        data = np.array(self.data, dtype=np.int64)
        if data.ndim != 2:
            raise DataError("Samples must be a 2-d array of state indices")
        n = data.shape[1]
        cards = {int(v): int(c) for v, c in self.cardinalities.items()}
        if sorted(cards) != list(range(1, n + 1)):
            raise DataError(f"Cardinalities must cover variables 1..{n}")
        if len(data) and (data.min() < 0 or np.any(data.max(axis=0) >= [cards[v] for v in range(1, n + 1)])):
            raise DataError("Every sampled state must lie in [0, cardinality)")
        names = tuple(self.names) or tuple(f"X{v}" for v in range(1, n + 1))
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "cardinalities", cards)
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def count(self) -> int:
        return self.data.shape[0]

    @property
    def variables(self) -> Tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    def column(self, var: int) -> np.ndarray:
        return self.data[:, var - 1]


def empirical_joint(samples: SampleSet, scope: Sequence[int],
                    pseudocount: float = DEFAULT_PSEUDOCOUNT) -> JointTable:
    """Smoothed frequencies: (count(a) + pseudocount) / (N + pseudocount * |states|)."""
    scope = _check_scope(scope, samples.cardinalities)
    if pseudocount < 0:
        raise DataError("Pseudocount must be nonnegative")
    if samples.count == 0 and pseudocount == 0:
        raise DataError("Cannot estimate a table from zero samples without a pseudocount")

    dims = tuple(samples.cardinalities[v] for v in scope)
    size = int(np.prod(dims))
    if samples.count:
        flat_index = np.ravel_multi_index(tuple(samples.column(v) for v in scope), dims)
        counts = np.bincount(flat_index, minlength=size).astype(np.float64)
    else:
        counts = np.zeros(size)
    probs = (counts + pseudocount) / (samples.count + pseudocount * size)
    return JointTable(scope, probs.reshape(dims))


def marginalize(table: JointTable, keep: Iterable[int]) -> JointTable:
    """Sum out every variable not in `keep`; the result keeps the table's order."""
    keep = set(keep)
    outside = keep - set(table.scope)
    if outside:
        raise ScopeError(f"Cannot keep {sorted(outside)}: not in scope {table.scope}")
    drop = tuple(i for i, v in enumerate(table.scope) if v not in keep)
    scope = tuple(v for v in table.scope if v in keep)
    if not drop:
        return table
    return JointTable(scope, table.probs.sum(axis=drop))


def reorder(table: JointTable, scope: Sequence[int]) -> np.ndarray:
    """The table's array with axes permuted into `scope` order (same variable set)."""
    scope = tuple(scope)
    if sorted(scope) != sorted(table.scope):
        raise ScopeError(f"{scope} is not a permutation of {table.scope}")
    return np.transpose(table.probs, [table.axis(v) for v in scope])


def conditional(table: JointTable, target: int, given: Sequence[int]) -> ConditionalTable:
    """
    P(target | given) from a joint.

    Slices whose conditioning assignment has probability zero are uniform; the
    joint is unchanged by any convention on measure-zero slices.
    """
    given = tuple(given)
    if target in given:
        raise ScopeError(f"Target X{target} is also in the conditioning set")
    joint = reorder(marginalize(table, set(given) | {target}), given + (target,))
    denom = joint.sum(axis=-1, keepdims=True)
    uniform = np.full_like(joint, 1.0 / joint.shape[-1])
    probs = np.divide(joint, denom, out=uniform, where=denom > 0)
    return ConditionalTable(target, given, probs)


def broadcast_to_scope(array: np.ndarray, scope: Sequence[int], target_scope: Sequence[int]) -> np.ndarray:
    """View `array` (axes = scope) so it broadcasts against an array over target_scope."""
    scope = tuple(scope)
    target_scope = tuple(target_scope)
    missing = set(scope) - set(target_scope)
    if missing:
        raise ScopeError(f"Variables {sorted(missing)} are not in target scope {target_scope}")
    present = sorted(scope, key=target_scope.index)
    moved = np.transpose(array, [scope.index(v) for v in present])
    shape = [1] * len(target_scope)
    for v, size in zip(present, moved.shape):
        shape[target_scope.index(v)] = size
    return moved.reshape(shape)


def uniform_table(scope: Sequence[int], cardinalities: Cardinalities) -> JointTable:
    scope = _check_scope(scope, cardinalities)
    dims = tuple(cardinalities[v] for v in scope)
    return JointTable(scope, np.full(dims, 1.0 / np.prod(dims)))


def random_joint(scope: Sequence[int], cardinalities: Cardinalities,
                 rng: np.random.Generator, concentration: float = 1.0) -> JointTable:
    """A Dirichlet-distributed joint; strictly positive almost surely."""
    scope = _check_scope(scope, cardinalities)
    dims = tuple(cardinalities[v] for v in scope)
    probs = rng.dirichlet(np.full(int(np.prod(dims)), concentration))
    return JointTable(scope, probs.reshape(dims))


def product_table(tables: Sequence[JointTable]) -> JointTable:
    """Outer product of tables over disjoint scopes."""
    scope: Tuple[int, ...] = ()
    probs = np.ones(())
    for t in tables:
        if set(scope) & set(t.scope):
            raise ScopeError("Product tables must have disjoint scopes")
        probs = np.multiply.outer(probs, t.probs)
        scope += t.scope
    return JointTable(scope, probs)


def samples_from_rows(rows: Sequence[Sequence[int]], cardinalities: Optional[Cardinalities] = None,
                      names: Sequence[str] = ()) -> SampleSet:
    """Build a SampleSet, inferring cardinalities as max observed + 1 (at least 2)."""
    data = np.asarray(rows, dtype=np.int64)
    if data.ndim != 2 or data.shape[1] == 0:
        raise DataError("Samples must be a nonempty list of equal-length rows")
    n = data.shape[1]
    inferred = {v: max(2, int(data[:, v - 1].max()) + 1) for v in range(1, n + 1)}
    for v, c in (cardinalities or {}).items():
        if data[:, v - 1].max() >= c:
            raise DataError(f"Cardinality {c} of variable {v} is below an observed state")
        inferred[v] = int(c)
    return SampleSet(data, inferred, tuple(names))


def load_samples_csv(path: Path, sidecar: Optional[Path] = None) -> SampleSet:
    """
    Read `X1,X2,...,Xn` CSV samples of state indices.

    Cardinalities are max observed + 1 unless a sidecar JSON
    {"cardinalities": {"X1": 2, ...}} overrides them. When `sidecar` is None a
    file with the same stem and a .json suffix is used if it exists.
    """
    path = Path(path)
    try:
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            header = [h.strip() for h in next(reader)]
            rows = [[int(cell) for cell in row] for row in reader if row]
    except StopIteration:
        raise DataError(f"{path} is empty")
    except ValueError as e:
        raise DataError(f"{path} holds a non-integer state: {e}")

    if any(len(row) != len(header) for row in rows):
        raise DataError(f"{path} has rows of inconsistent width")
    if any(cell < 0 for row in rows for cell in row):
        raise DataError(f"{path} holds a negative state index")

    sidecar = Path(sidecar) if sidecar else path.with_suffix(".json")
    overrides = None
    if sidecar.exists():
        try:
            parsed = CardinalitySidecar(**json.loads(sidecar.read_text()))
        except (ValidationError, json.JSONDecodeError) as e:
            raise DataError(f"Invalid cardinality sidecar {sidecar}: {e}")
        unknown = set(parsed.cardinalities) - set(header)
        if unknown:
            raise DataError(f"Sidecar names unknown columns {sorted(unknown)}")
        overrides = {header.index(name) + 1: size for name, size in parsed.cardinalities.items()}

    samples = samples_from_rows(rows, overrides, header)
    logger.info(f"Loaded {samples.count} samples over {samples.n} variables from {path}")
    return samples


def load_joint_json(path: Path) -> Tuple[JointTable, Tuple[str, ...]]:
    """Read a JointFile; variables are numbered 1..n in file order."""
    path = Path(path)
    try:
        parsed = JointFile(**json.loads(Path(path).read_text()))
    except (ValidationError, json.JSONDecodeError, TypeError) as e:
        raise DataError(f"Invalid joint file {path}: {e}")
    scope = tuple(range(1, len(parsed.variables) + 1))
    table = JointTable(scope, np.asarray(parsed.probs).reshape(parsed.cardinalities))
    logger.info(f"Loaded joint over {len(scope)} variables from {path}")
    return table, tuple(parsed.variables)


def joint_to_json(table: JointTable, names: Optional[Sequence[str]] = None) -> dict:
    names = list(names) if names else [f"X{v}" for v in table.scope]
    return JointFile(
        variables=names,
        cardinalities=list(table.probs.shape),
        probs=[float(p) for p in table.flat],
    ).model_dump()


Distribution = Union[JointTable, SampleSet]


def local_table(source: Distribution, scope: Iterable[int],
                pseudocount: float = DEFAULT_PSEUDOCOUNT) -> JointTable:
    """The table over `scope`: exact marginal of a joint, or empirical from samples."""
    scope = tuple(scope)
    if isinstance(source, SampleSet):
        return empirical_joint(source, scope, pseudocount)
    return marginalize(source, scope)


def source_variables(source: Distribution) -> Tuple[int, ...]:
    if isinstance(source, SampleSet):
        return source.variables
    return tuple(sorted(source.scope))
