"""Bounded multiset of rules stored column-wise.

All per-rule quantities live in parallel numpy arrays so matching, updates
and deletion votes run as vectorized/compiled kernels. Rules are addressed
by row while the structure is stable; stable integer ids survive
insertions and deletions (rows move under swap-remove).
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .classifier import Classifier, Condition, DimensionalityError
from .params import LINEAR, Hyperparameters


class EmptyPopulationError(RuntimeError):
    """Deletion was requested from a population with no rules."""


class Population:
    def __init__(self, dim: int, hp: Hyperparameters):
        self.dim = int(dim)
        self.hp = hp
        self.linear = hp.prediction_kind == LINEAR
        self.n = 0
        self.num_sum = 0
        self._next_id = 0
        self._id_to_row: dict[int, int] = {}
        cap = 256
        self._grow_to(cap, init=True)

    # -- storage ------------------------------------------------------------

    def _grow_to(self, cap: int, init: bool = False) -> None:
        def resize(old, shape):
            new = np.empty(shape, dtype=old.dtype if not init else np.float64)
            if not init and self.n:
                new[:self.n] = old[:self.n]
            return new

        d = self.dim
        if init:
            self.lo = np.empty((cap, d))
            self.hi = np.empty((cap, d))
            self.action = np.empty(cap, dtype=np.int64)
            self.pred = np.empty(cap)
            self.eps = np.empty(cap)
            self.fit = np.empty(cap)
            self.asz = np.empty(cap)
            self.exp = np.empty(cap, dtype=np.int64)
            self.ts = np.empty(cap, dtype=np.int64)
            self.num = np.empty(cap, dtype=np.int64)
            self.vol = np.empty(cap)
            self.ids = np.empty(cap, dtype=np.int64)
            if self.linear:
                self.W = np.empty((cap, d + 1))
                self.V = np.empty((cap, d + 1, d + 1))
        else:
            self.lo = resize(self.lo, (cap, d))
            self.hi = resize(self.hi, (cap, d))
            for name in ("pred", "eps", "fit", "asz", "vol"):
                setattr(self, name, resize(getattr(self, name), cap))
            for name in ("action", "exp", "ts", "num", "ids"):
                setattr(self, name, resize(getattr(self, name), cap))
            if self.linear:
                self.W = resize(self.W, (cap, d + 1))
                self.V = resize(self.V, (cap, d + 1, d + 1))
        self._cap = cap

    # -- insertion / removal --------------------------------------------------

    def insert(self, cl: Classifier) -> int:
        """Append a rule as a new macroclassifier; returns its stable id."""
        if cl.condition.dim != self.dim:
            raise DimensionalityError(
                f"rule dim {cl.condition.dim} != population dim {self.dim}")
        if self.n == self._cap:
            self._grow_to(self._cap * 2)
        i = self.n
        self.lo[i] = cl.condition.lower
        self.hi[i] = cl.condition.upper
        self.action[i] = cl.action
        self.pred[i] = cl.prediction
        self.eps[i] = cl.error
        self.fit[i] = cl.fitness
        self.asz[i] = cl.action_set_size
        self.exp[i] = cl.experience
        self.ts[i] = cl.timestamp
        self.num[i] = cl.numerosity
        self.vol[i] = float(np.prod(self.hi[i] - self.lo[i]))
        if self.linear:
            if cl.weights is None or cl.gain is None:
                raise ValueError("linear population requires weights and gain")
            self.W[i] = cl.weights
            self.V[i] = cl.gain
        rid = self._next_id
        self._next_id += 1
        self.ids[i] = rid
        self._id_to_row[rid] = i
        self.n += 1
        self.num_sum += cl.numerosity
        return rid

    def absorb(self, row: int) -> None:
        """Account a subsumed/duplicate microclassifier to an existing rule."""
        self.num[row] += 1
        self.num_sum += 1

    def _remove_row(self, row: int) -> None:
        last = self.n - 1
        del self._id_to_row[int(self.ids[row])]
        if row != last:
            self.lo[row] = self.lo[last]
            self.hi[row] = self.hi[last]
            self.action[row] = self.action[last]
            self.pred[row] = self.pred[last]
            self.eps[row] = self.eps[last]
            self.fit[row] = self.fit[last]
            self.asz[row] = self.asz[last]
            self.exp[row] = self.exp[last]
            self.ts[row] = self.ts[last]
            self.num[row] = self.num[last]
            self.vol[row] = self.vol[last]
            self.ids[row] = self.ids[last]
            if self.linear:
                self.W[row] = self.W[last]
                self.V[row] = self.V[last]
            self._id_to_row[int(self.ids[row])] = row
        self.n = last

    # -- lookups --------------------------------------------------------------

    def match_rows(self, s: np.ndarray) -> np.ndarray:
        if self.n == 0:
            return np.empty(0, dtype=np.int64)
        mask = kernels.match_mask(self.lo[:self.n], self.hi[:self.n], s)
        return np.nonzero(mask)[0]

    def rows_for_ids(self, ids) -> np.ndarray:
        """Rows for the ids still alive, in the order given."""
        rows = [self._id_to_row[i] for i in ids if i in self._id_to_row]
        return np.asarray(rows, dtype=np.int64)

    def ids_for_rows(self, rows) -> list[int]:
        return [int(self.ids[r]) for r in rows]

    def find_identical(self, cl: Classifier) -> int:
        """Row with the same action and the exact same interval box, or -1."""
        if self.n == 0:
            return -1
        lo, hi = cl.condition.lower, cl.condition.upper
        cand = np.nonzero(self.action[:self.n] == cl.action)[0]
        if cand.size == 0:
            return -1
        same = (np.all(self.lo[cand] == lo, axis=1)
                & np.all(self.hi[cand] == hi, axis=1))
        hits = cand[same]
        return int(hits[0]) if hits.size else -1

    def extract(self, row: int) -> Classifier:
        """Copy a rule out of the store (used for GA cloning and inspection)."""
        cl = Classifier(
            condition=Condition(self.lo[row].copy(), self.hi[row].copy()),
            action=int(self.action[row]),
            prediction=float(self.pred[row]),
            error=float(self.eps[row]),
            fitness=float(self.fit[row]),
            experience=int(self.exp[row]),
            timestamp=int(self.ts[row]),
            action_set_size=float(self.asz[row]),
            numerosity=int(self.num[row]),
        )
        if self.linear:
            cl.weights = self.W[row].copy()
            cl.gain = self.V[row].copy()
        return cl

    def predictions_at(self, rows: np.ndarray, s: np.ndarray | None) -> np.ndarray:
        """Per-rule payoff predictions, evaluated at ``s`` for linear models."""
        if self.linear:
            x = np.concatenate(([1.0], s))
            return self.W[rows] @ x
        return self.pred[rows].copy()

    # -- deletion -------------------------------------------------------------

    def deletion_votes(self) -> np.ndarray:
        """Roulette weights: action-set-size * numerosity, scaled up for
        experienced rules whose per-micro fitness is below delta * mean."""
        n = self.n
        num = self.num[:n].astype(np.float64)
        votes = self.asz[:n] * num
        mean_fit = self.fit[:n].sum() / self.num_sum
        micro_fit = self.fit[:n] / num
        weak = (self.exp[:n] > self.hp.theta_del) & (micro_fit < self.hp.delta * mean_fit)
        votes = np.where(weak, votes * mean_fit / micro_fit, votes)
        return votes

    def delete_one(self, rng) -> None:
        if self.n == 0:
            raise EmptyPopulationError("cannot delete from an empty population")
        votes = self.deletion_votes()
        total = votes.sum()
        if total <= 0 or not np.isfinite(total):
            row = int(rng.integers(0, self.n))
        else:
            pick = rng.uniform(0.0, total)
            row = int(np.searchsorted(np.cumsum(votes), pick, side="right"))
            row = min(row, self.n - 1)
        self.num[row] -= 1
        self.num_sum -= 1
        if self.num[row] == 0:
            self._remove_row(row)

    def enforce_capacity(self, rng) -> int:
        removed = 0
        while self.num_sum > self.hp.N_max:
            self.delete_one(rng)
            removed += 1
        return removed

    # -- metrics ----------------------------------------------------------------

    def generality(self) -> float:
        """Numerosity-weighted mean condition volume."""
        if self.n == 0:
            return 0.0
        num = self.num[:self.n]
        return float((self.vol[:self.n] * num).sum() / num.sum())

    def __len__(self) -> int:
        return self.n
