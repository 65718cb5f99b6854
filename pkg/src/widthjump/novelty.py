"""Novelty tables over plain or abstracted atoms.

A state is novel when some atom tuple of size <= k, taken over the allowed
abstraction forms of its atoms, has not been seen by the table before.  Forms
under the type reduction keep one argument position concrete and replace the
others with their declared (most specific) type; the base reduction replaces
them with the universal root type.  Goal atoms are exempt and only ever count
in fully concrete form.

Seen-set membership is the hot kernel: a compiled extension provides it when
available, with a pure-Python fallback selected at import time.  Set the
WIDTHJUMP_PURE environment variable (any non-empty value) to force the
fallback.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .ground import AtomRegistry, State
from .pddl import ROOT_TYPE, Domain, Instance

from ._novelty_py import PySeenSet

try:
    from ._novelty_core import SeenSet as _CompiledSeenSet
except ImportError:  # pragma: no cover - depends on the build environment
    _CompiledSeenSet = None

if _CompiledSeenSet is not None and not os.environ.get("WIDTHJUMP_PURE"):
    DEFAULT_KERNEL: Callable[[], object] = _CompiledSeenSet
    KERNEL_NAME = "compiled"
else:
    DEFAULT_KERNEL = PySeenSet
    KERNEL_NAME = "python"

_MAX_FORM_ID = (1 << 32) - 2  # pair packing reserves the high word


class Reduction(enum.Enum):
    IDENTITY = "identity"
    TYPE = "type"
    BASE = "base"


@dataclass(frozen=True)
class AbstractAtom:
    """Predicate plus per-slot entries tagged as concrete object or type."""

    pred: str
    slots: tuple[tuple[str, str], ...]  # ("o", name) or ("t", type)

    def __str__(self) -> str:
        inner = ", ".join(n for _, n in self.slots)
        return f"{self.pred}({inner})"


def abstraction_forms(
    atom_id: int,
    red: Reduction,
    goal_atoms: frozenset[int],
    registry: AtomRegistry,
) -> list[AbstractAtom]:
    """Forms an atom may claim novelty through, ordered by kept position.

    Goal atoms and zero-arity atoms have exactly one fully concrete form.
    Otherwise one form per argument position keeps that argument concrete
    and reduces every other argument.
    """
    atom = registry.lookup(atom_id)
    pred, args = atom[0], atom[1:]
    concrete = AbstractAtom(pred, tuple(("o", a) for a in args))
    if red is Reduction.IDENTITY or atom_id in goal_atoms or not args:
        return [concrete]
    objects = registry.inst.objects
    if red is Reduction.TYPE:
        reduced = [("t", objects[a]) for a in args]
    else:
        reduced = [("t", ROOT_TYPE) for _ in args]
    forms = []
    for keep in range(len(args)):
        slots = list(reduced)
        slots[keep] = ("o", args[keep])
        forms.append(AbstractAtom(pred, tuple(slots)))
    return forms


class NoveltyTable:
    """Seen-form table answering and recording novelty queries for k in {1, 2}."""

    def __init__(
        self,
        k: int,
        reduction: Reduction,
        goal_atoms: Iterable[int],
        registry: AtomRegistry,
        kernel: Optional[Callable[[], object]] = None,
    ):
        if k not in (1, 2):
            raise ValueError("novelty tables support k=1 and k=2 only")
        self.k = k
        self.reduction = reduction
        self.goal_atoms = frozenset(goal_atoms)
        self.registry = registry
        self._seen = (kernel or DEFAULT_KERNEL)()
        self._form_ids: dict[AbstractAtom, int] = {}
        self._atom_forms: dict[int, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self._seen)

    @property
    def seen_size(self) -> int:
        return len(self._seen)

    def _forms_of(self, atom_id: int) -> np.ndarray:
        hit = self._atom_forms.get(atom_id)
        if hit is not None:
            return hit
        forms = abstraction_forms(atom_id, self.reduction, self.goal_atoms, self.registry)
        ids = []
        for f in forms:
            fid = self._form_ids.get(f)
            if fid is None:
                fid = len(self._form_ids)
                if fid > _MAX_FORM_ID:
                    raise OverflowError("abstraction form space exhausted")
                self._form_ids[f] = fid
            ids.append(fid)
        arr = np.asarray(ids, dtype=np.uint64)
        self._atom_forms[atom_id] = arr
        return arr

    def _state_keys(self, s: State) -> np.ndarray:
        parts = [self._forms_of(a) for a in s.ids]
        if not parts:
            return np.empty(0, dtype=np.uint64)
        return np.concatenate(parts)

    def _pair_layout(self, s: State) -> tuple[np.ndarray, np.ndarray]:
        parts = [self._forms_of(a) for a in s.ids]
        offsets = np.zeros(len(parts) + 1, dtype=np.int64)
        for i, p in enumerate(parts):
            offsets[i + 1] = offsets[i] + len(p)
        flat = np.concatenate(parts) if parts else np.empty(0, dtype=np.uint64)
        return flat, offsets

    def check_and_register(self, s: State) -> bool:
        """True iff the state carries an unseen form tuple; always records
        every form tuple of the state regardless of the answer."""
        keys = self._state_keys(s)
        novel = self._seen.add_all(keys)
        if self.k == 2:
            flat, offsets = self._pair_layout(s)
            if self._seen.add_pairs(flat, offsets):
                novel = True
        return novel

    def is_novel(self, s: State) -> bool:
        """Pure lookup; records nothing."""
        keys = self._state_keys(s)
        if self._seen.lookup_any_new(keys):
            return True
        if self.k == 2:
            flat, offsets = self._pair_layout(s)
            return self._seen.lookup_any_new_pairs(flat, offsets)
        return False

    def register(self, s: State) -> None:
        self._seen.add_all(self._state_keys(s))
        if self.k == 2:
            flat, offsets = self._pair_layout(s)
            self._seen.add_pairs(flat, offsets)


def table_for(
    inst: Instance,
    variant: str,
    k: int = 1,
    registry: Optional[AtomRegistry] = None,
    kernel: Optional[Callable[[], object]] = None,
) -> NoveltyTable:
    """Fresh table wired for a search variant: iw uses plain atoms, aiw and
    caiw reduce to declared types, baiw reduces to the universal root."""
    from .ground import grounder_for

    g = grounder_for(inst)
    reduction = {
        "iw": Reduction.IDENTITY,
        "aiw": Reduction.TYPE,
        "caiw": Reduction.TYPE,
        "baiw": Reduction.BASE,
    }.get(variant)
    if reduction is None:
        raise ValueError(f"unknown search variant '{variant}'")
    return NoveltyTable(
        k, reduction, g.goal_ids, registry or g.registry, kernel=kernel
    )


def novel_capacity_bound(domain: Domain, inst: Instance) -> int:
    """Upper bound on distinct seen forms for k=1 under the type reduction:
    each positive-arity predicate contributes at most arity * t^(arity-1) * |O|
    forms, goal atoms stay concrete, and zero-arity predicates add one each."""
    t = len(domain.types.names)
    n_objects = len(inst.objects)
    total = 0
    zero_arity = 0
    for p in domain.predicates.values():
        if p.arity == 0:
            zero_arity += 1
        else:
            total += p.arity * (t ** (p.arity - 1)) * n_objects
    return total + len(inst.goal) + zero_arity
