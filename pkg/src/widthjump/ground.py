"""Ground model: atom interning, immutable states, lazy action grounding.

Applicable actions are found by backtracking over the precondition atoms of
each schema against an index of the current state, so the set of ground
actions is never enumerated up front.  Atom ids are handed out on first use
and are stable for the lifetime of a registry.
"""

from __future__ import annotations

import threading
import weakref
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .pddl import ActionSchema, Domain, Instance, Lifted, ValidationError, is_subtype


class GroundError(Exception):
    pass


class PreconditionError(GroundError):
    """Raised when apply() is handed an action whose precondition fails."""


class AtomRegistry:
    """Thread-safe append-only interner from ground atoms to dense ids."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self._lock = threading.Lock()
        self._ids: dict[tuple, int] = {}
        self._atoms: list[tuple] = []

    def __len__(self) -> int:
        return len(self._atoms)

    def intern(self, pred: str, args: Sequence[str]) -> int:
        key = (pred, *args)
        hit = self._ids.get(key)
        if hit is not None:
            return hit
        with self._lock:
            hit = self._ids.get(key)
            if hit is not None:
                return hit
            self._validate(pred, args)
            idx = len(self._atoms)
            self._atoms.append(key)
            self._ids[key] = idx
            return idx

    def _validate(self, pred: str, args: Sequence[str]) -> None:
        domain = self.inst.domain
        pdef = domain.predicates.get(pred)
        if pdef is None:
            raise ValidationError(f"undeclared predicate '{pred}'")
        if len(args) != pdef.arity:
            raise ValidationError(
                f"predicate '{pred}' expects {pdef.arity} arguments, got {len(args)}"
            )
        for slot, a in enumerate(args):
            oty = self.inst.objects.get(a)
            if oty is None:
                raise ValidationError(f"unknown object '{a}'")
            if not is_subtype(oty, pdef.arg_types[slot], domain.types):
                raise ValidationError(
                    f"object '{a}' of type '{oty}' cannot fill slot {slot + 1} "
                    f"of '{pred}' (expects '{pdef.arg_types[slot]}')"
                )

    def lookup(self, atom_id: int) -> tuple:
        return self._atoms[atom_id]

    def find(self, pred: str, args: Sequence[str]) -> Optional[int]:
        return self._ids.get((pred, *args))


class State:
    """Immutable set of atom ids with deterministic (sorted) iteration."""

    __slots__ = ("ids", "_set", "_hash")

    def __init__(self, ids: Iterable[int]):
        object.__setattr__(self, "ids", tuple(sorted(set(ids))))
        object.__setattr__(self, "_set", frozenset(self.ids))
        object.__setattr__(self, "_hash", hash(self.ids))

    @property
    def as_set(self) -> frozenset:
        return self._set

    def __contains__(self, atom_id: int) -> bool:
        return atom_id in self._set

    def __iter__(self) -> Iterator[int]:
        return iter(self.ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __eq__(self, other) -> bool:
        return isinstance(other, State) and self.ids == other.ids

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"State({len(self.ids)} atoms)"

    def __setattr__(self, *_):
        raise AttributeError("State is immutable")


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[str, ...]
    pre: frozenset[int]
    add: frozenset[int]
    delete: frozenset[int]

    @property
    def key(self) -> tuple:
        return (self.name, self.args)

    def __repr__(self) -> str:
        return f"{self.name}({', '.join(self.args)})"


class Grounder:
    """Per-instance grounding context: registry, static atoms, matcher."""

    def __init__(self, inst: Instance, registry: Optional[AtomRegistry] = None):
        self.inst = inst
        self.registry = registry or AtomRegistry(inst)
        domain = inst.domain

        fluent = set()
        for s in domain.schemas:
            fluent.update(a.pred for a in s.add)
            fluent.update(a.pred for a in s.delete)
        self.static_predicates = frozenset(domain.predicates) - fluent

        self.objects_by_type: dict[str, tuple[str, ...]] = {}
        for t in domain.types.names:
            self.objects_by_type[t] = tuple(
                o for o, ot in inst.objects.items() if is_subtype(ot, t, domain.types)
            )

        self.initial_state = State(
            self.registry.intern(a[0], a[1:]) for a in inst.init
        )
        self.goal_ids = frozenset(self.registry.intern(a[0], a[1:]) for a in inst.goal)

        # static atoms never change, so their matcher index is built once
        self._static_index: dict[str, list[tuple[str, ...]]] = {}
        for a in sorted(inst.init):
            if a[0] in self.static_predicates:
                self._static_index.setdefault(a[0], []).append(a[1:])

    # -- matching ----------------------------------------------------------

    def _fluent_index(self, s: State) -> dict[str, list[tuple[str, ...]]]:
        index: dict[str, list[tuple[str, ...]]] = {}
        lookup = self.registry.lookup
        for atom_id in s.ids:
            atom = lookup(atom_id)
            if atom[0] not in self.static_predicates:
                index.setdefault(atom[0], []).append(atom[1:])
        return index

    def applicable(self, s: State) -> list[GroundAction]:
        """All ground actions applicable in s, sorted by (schema, args)."""
        fluent_index = self._fluent_index(s)

        def candidates(pred: str) -> list[tuple[str, ...]]:
            if pred in self.static_predicates:
                return self._static_index.get(pred, [])
            return fluent_index.get(pred, [])

        found: dict[tuple, GroundAction] = {}
        for schema in self.inst.domain.schemas:
            pre = sorted(schema.pre, key=lambda a: (len(candidates(a.pred)), a.pred, a.args))

            def extend(i: int, binding: dict[str, str], schema=schema, pre=pre) -> None:
                if i == len(pre):
                    self._complete(schema, binding, found)
                    return
                lifted = pre[i]
                for tup in candidates(lifted.pred):
                    nb = self._unify(lifted.args, tup, binding)
                    if nb is not None:
                        extend(i + 1, nb)

            extend(0, {})
        return [found[k] for k in sorted(found)]

    @staticmethod
    def _unify(
        args: tuple[str, ...],
        values: tuple[str, ...],
        binding: dict[str, str],
    ) -> Optional[dict[str, str]]:
        new: Optional[dict[str, str]] = None
        for a, v in zip(args, values):
            if a.startswith("?"):
                cur = (new if new is not None else binding).get(a)
                if cur is None:
                    if new is None:
                        new = dict(binding)
                    new[a] = v
                elif cur != v:
                    return None
            elif a != v:
                return None
        return new if new is not None else dict(binding)

    def _complete(
        self,
        schema: ActionSchema,
        binding: dict[str, str],
        found: dict[tuple, GroundAction],
    ) -> None:
        tree = self.inst.domain.types
        free = [(v, t) for v, t in schema.params if v not in binding]
        # bound values must respect the declared parameter types
        for v, t in schema.params:
            if v in binding and not is_subtype(self.inst.objects[binding[v]], t, tree):
                return

        def enumerate_free(i: int, b: dict[str, str]) -> None:
            if i == len(free):
                args = tuple(b[v] for v, _ in schema.params)
                key = (schema.name, args)
                if key not in found:
                    found[key] = self._ground(schema, b, args)
                return
            v, t = free[i]
            for obj in self.objects_by_type[t]:
                b[v] = obj
                enumerate_free(i + 1, b)
            del b[v]

        enumerate_free(0, dict(binding))

    def _ground(
        self, schema: ActionSchema, binding: Mapping[str, str], args: tuple[str, ...]
    ) -> GroundAction:
        intern = self.registry.intern

        def ground_set(atoms: frozenset[Lifted]) -> frozenset[int]:
            out = set()
            for a in atoms:
                g = a.ground_with(binding)
                out.add(intern(g[0], g[1:]))
            return frozenset(out)

        add = ground_set(schema.add)
        delete = ground_set(schema.delete) - add  # add wins when a binding collides
        return GroundAction(schema.name, args, ground_set(schema.pre), add, delete)

    # -- transitions ---------------------------------------------------------

    def apply(self, s: State, a: GroundAction) -> State:
        if not a.pre <= s.as_set:
            missing = next(iter(a.pre - s.as_set))
            raise PreconditionError(
                f"{a!r} is not applicable: missing {self.registry.lookup(missing)}"
            )
        return State((s.as_set - a.delete) | a.add)

    def is_goal(self, s: State) -> bool:
        return self.goal_ids <= s.as_set

    def goal_count(self, s: State) -> int:
        return len(self.goal_ids & s.as_set)


_GROUNDER_LOCK = threading.Lock()
_KEYS: dict[int, tuple] = {}


def grounder_for(inst: Instance) -> Grounder:
    """Return the grounding context for this instance, building it on first use."""
    key = id(inst)
    with _GROUNDER_LOCK:
        hit = _KEYS.get(key)
        if hit is not None and hit[0]() is inst:
            return hit[1]
        g = Grounder(inst)
        # keys is passed in so the callback stays valid during interpreter shutdown
        ref = weakref.ref(inst, lambda _r, k=key, keys=_KEYS: keys.pop(k, None))
        _KEYS[key] = (ref, g)
        return g


# -- module-level operations over an instance ---------------------------------


def initial_state(inst: Instance) -> State:
    return grounder_for(inst).initial_state


def intern(pred: str, args: Sequence[str], registry: AtomRegistry) -> int:
    return registry.intern(pred, args)


def applicable_actions(s: State, inst: Instance) -> list[GroundAction]:
    return grounder_for(inst).applicable(s)


def apply(s: State, a: GroundAction, inst: Instance) -> State:
    return grounder_for(inst).apply(s, a)


def is_goal(s: State, inst: Instance) -> bool:
    return grounder_for(inst).is_goal(s)
