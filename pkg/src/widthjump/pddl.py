"""Typed STRIPS fragment of PDDL: domain/instance model, parser, printers.

Supported requirements are :strips and :typing.  Everything outside the
positive-STRIPS fragment (negative preconditions, conditional effects,
quantifiers, equality, numeric fluents) is rejected with an explicit error
rather than silently mis-handled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

ROOT_TYPE = "object"

SUPPORTED_REQUIREMENTS = frozenset({":strips", ":typing"})


class PddlError(Exception):
    """Base error for model construction; carries source position when known."""

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        self.message = message
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)


class PddlSyntaxError(PddlError):
    pass


class UnsupportedFeatureError(PddlError):
    pass


class ValidationError(PddlError):
    pass


# ---------------------------------------------------------------------------
# tokenizer / s-expression reader


@dataclass(frozen=True)
class _Tok:
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            i += 1
            col += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            toks.append(_Tok(c, line, col))
            i += 1
            col += 1
        else:
            start = i
            start_col = col
            while i < n and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            toks.append(_Tok(text[start:i].lower(), line, start_col))
    return toks


_SExpr = Union[_Tok, list]


def _read_sexpr(toks: list[_Tok], pos: int) -> tuple[_SExpr, int]:
    if pos >= len(toks):
        raise PddlSyntaxError("unexpected end of input")
    tok = toks[pos]
    if tok.text == "(":
        items: list[_SExpr] = []
        pos += 1
        while True:
            if pos >= len(toks):
                raise PddlSyntaxError("unbalanced '('", tok.line, tok.col)
            if toks[pos].text == ")":
                return items, pos + 1
            item, pos = _read_sexpr(toks, pos)
            items.append(item)
    if tok.text == ")":
        raise PddlSyntaxError("unexpected ')'", tok.line, tok.col)
    return tok, pos + 1


def _parse_top(text: str) -> list:
    toks = _tokenize(text)
    expr, pos = _read_sexpr(toks, 0)
    if pos != len(toks):
        t = toks[pos]
        raise PddlSyntaxError("trailing tokens after top-level form", t.line, t.col)
    if not isinstance(expr, list):
        raise PddlSyntaxError("expected a parenthesized form", expr.line, expr.col)
    return expr


def _head(expr: _SExpr) -> str:
    if isinstance(expr, list):
        if expr and isinstance(expr[0], _Tok):
            return expr[0].text
        return ""
    return expr.text


def _pos_of(expr: _SExpr) -> tuple[Optional[int], Optional[int]]:
    if isinstance(expr, _Tok):
        return expr.line, expr.col
    for item in expr:
        return _pos_of(item)
    return None, None


def _as_name(expr: _SExpr, what: str) -> _Tok:
    if not isinstance(expr, _Tok):
        line, col = _pos_of(expr)
        raise PddlSyntaxError(f"expected {what}, found a list", line, col)
    return expr


# ---------------------------------------------------------------------------
# model


@dataclass(frozen=True)
class TypeTree:
    """Type names with a parent map whose single root is ``object``."""

    names: tuple[str, ...]
    parent: Mapping[str, str]  # root has no entry

    def ancestors(self, t: str) -> Iterator[str]:
        while True:
            yield t
            nxt = self.parent.get(t)
            if nxt is None:
                return
            t = nxt


def is_subtype(t1: str, t2: str, tree: TypeTree) -> bool:
    """Reflexive-transitive subtype test over the declared tree."""
    if t1 not in tree.parent and t1 != ROOT_TYPE and t1 not in tree.names:
        raise ValidationError(f"unknown type '{t1}'")
    if t2 not in tree.names:
        raise ValidationError(f"unknown type '{t2}'")
    if t1 not in tree.names:
        raise ValidationError(f"unknown type '{t1}'")
    return any(a == t2 for a in tree.ancestors(t1))


@dataclass(frozen=True)
class PredicateDef:
    name: str
    arg_types: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.arg_types)


@dataclass(frozen=True)
class Lifted:
    """Lifted atom: arguments are ``?variables`` or constant object names."""

    pred: str
    args: tuple[str, ...]

    def ground_with(self, binding: Mapping[str, str]) -> tuple[str, ...]:
        return (self.pred,) + tuple(binding.get(a, a) for a in self.args)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[tuple[str, str], ...]  # (?var, type)
    pre: frozenset[Lifted]
    add: frozenset[Lifted]
    delete: frozenset[Lifted]

    @property
    def param_types(self) -> Mapping[str, str]:
        return dict(self.params)


@dataclass(frozen=True, eq=True)
class Domain:
    name: str
    types: TypeTree
    predicates: Mapping[str, PredicateDef]
    schemas: tuple[ActionSchema, ...]
    constants: Mapping[str, str]  # name -> type
    typed: bool = True


GroundAtom = tuple  # (pred, arg1, ..., argN), all strings


@dataclass(frozen=True, eq=True)
class Instance:
    name: str
    domain: Domain
    objects: Mapping[str, str]  # name -> type, domain constants included
    init: frozenset
    goal: frozenset


# ---------------------------------------------------------------------------
# typed-list helper: names optionally grouped as  a b - t c d - u e


def _parse_typed_list(items: Sequence[_SExpr], typed: bool, what: str) -> list[tuple[str, int, int, str]]:
    """Flatten a typed list into (name, line, col, type) entries."""
    out: list[tuple[str, int, int, str]] = []
    pending: list[_Tok] = []
    i = 0
    while i < len(items):
        tok = _as_name(items[i], f"{what} name")
        if tok.text == "-":
            if not pending:
                raise PddlSyntaxError("dangling '-' in typed list", tok.line, tok.col)
            if i + 1 >= len(items):
                raise PddlSyntaxError("missing type after '-'", tok.line, tok.col)
            ty = _as_name(items[i + 1], "type name")
            if not typed:
                raise UnsupportedFeatureError(
                    "type annotation requires the :typing requirement", ty.line, ty.col
                )
            for p in pending:
                out.append((p.text, p.line, p.col, ty.text))
            pending = []
            i += 2
        else:
            pending.append(tok)
            i += 1
    for p in pending:
        out.append((p.text, p.line, p.col, ROOT_TYPE))
    return out


def _build_type_tree(entries: list[tuple[str, int, int, str]]) -> TypeTree:
    parent: dict[str, str] = {}
    names: list[str] = [ROOT_TYPE]
    for name, line, col, ty in entries:
        if name == ROOT_TYPE:
            if ty != ROOT_TYPE:
                raise ValidationError("'object' must remain the root type", line, col)
            continue
        if name in parent and parent[name] != ty:
            raise ValidationError(f"type '{name}' declared with two parents", line, col)
        parent[name] = ty
        if name not in names:
            names.append(name)
    # parents mentioned but never declared become children of the root
    for ty in list(parent.values()):
        if ty != ROOT_TYPE and ty not in parent:
            parent[ty] = ROOT_TYPE
            if ty not in names:
                names.append(ty)
    # cycle check: every chain must reach the root
    for name in names:
        seen = set()
        t = name
        while t != ROOT_TYPE:
            if t in seen:
                raise ValidationError(f"type cycle involving '{t}'")
            seen.add(t)
            t = parent.get(t, ROOT_TYPE)
    order = [ROOT_TYPE] + sorted(n for n in names if n != ROOT_TYPE)
    return TypeTree(tuple(order), parent)


# ---------------------------------------------------------------------------
# domain parsing


def _parse_atom_expr(expr: _SExpr, what: str) -> tuple[_Tok, list[_Tok]]:
    if not isinstance(expr, list) or not expr:
        line, col = _pos_of(expr)
        raise PddlSyntaxError(f"expected an atom in {what}", line, col)
    head = _as_name(expr[0], "predicate name")
    args = [_as_name(a, "argument") for a in expr[1:]]
    return head, args


_REJECTED_CONNECTIVES = frozenset(
    {"or", "imply", "exists", "forall", "when", "increase", "decrease", "assign", "=", "not"}
)


def _check_atom(
    head: _Tok,
    args: Sequence[_Tok],
    domain_predicates: Mapping[str, PredicateDef],
    where: str,
) -> None:
    if head.text in _REJECTED_CONNECTIVES:
        raise UnsupportedFeatureError(
            f"'{head.text}' is outside the positive STRIPS fragment ({where})", head.line, head.col
        )
    pred = domain_predicates.get(head.text)
    if pred is None:
        raise ValidationError(f"undeclared predicate '{head.text}'", head.line, head.col)
    if len(args) != pred.arity:
        raise ValidationError(
            f"predicate '{head.text}' expects {pred.arity} arguments, got {len(args)}",
            head.line,
            head.col,
        )


def parse_domain(text: str) -> Domain:
    """Parse a PDDL domain from a character string."""
    top = _parse_top(text)
    if _head(top) != "define":
        line, col = _pos_of(top)
        raise PddlSyntaxError("expected (define (domain ...) ...)", line, col)
    sections = top[1:]
    if not sections or _head(sections[0]) != "domain" or len(sections[0]) != 2:
        line, col = _pos_of(top)
        raise PddlSyntaxError("missing (domain NAME)", line, col)
    name = _as_name(sections[0][1], "domain name").text

    typed = False
    requirements: list[str] = []
    type_entries: list[tuple[str, int, int, str]] = []
    predicates: dict[str, PredicateDef] = {}
    constants: dict[str, str] = {}
    schema_exprs: list[list] = []
    seen_types_section = False

    for sec in sections[1:]:
        if not isinstance(sec, list) or not sec:
            line, col = _pos_of(sec)
            raise PddlSyntaxError("expected a (:section ...) form", line, col)
        kind = _head(sec)
        if kind == ":requirements":
            for r in sec[1:]:
                tok = _as_name(r, "requirement")
                if tok.text not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeatureError(
                        f"unsupported requirement '{tok.text}'", tok.line, tok.col
                    )
                requirements.append(tok.text)
            typed = ":typing" in requirements
        elif kind == ":types":
            seen_types_section = True
            if not typed:
                line, col = _pos_of(sec)
                raise UnsupportedFeatureError(
                    "a :types section requires the :typing requirement", line, col
                )
            type_entries = _parse_typed_list(sec[1:], typed, "type")
        elif kind == ":constants":
            pass  # handled after the type tree exists
        elif kind == ":predicates":
            pass
        elif kind == ":action":
            schema_exprs.append(sec)
        elif kind in (":functions", ":derived", ":axiom"):
            line, col = _pos_of(sec)
            raise UnsupportedFeatureError(f"section '{kind}' is not supported", line, col)
        else:
            line, col = _pos_of(sec)
            raise PddlSyntaxError(f"unknown domain section '{kind}'", line, col)

    tree = _build_type_tree(type_entries) if seen_types_section else TypeTree((ROOT_TYPE,), {})

    def check_type(tok_text: str, line: int, col: int) -> None:
        if tok_text not in tree.names:
            raise ValidationError(f"undeclared type '{tok_text}'", line, col)

    # second pass for sections that need the type tree
    for sec in sections[1:]:
        kind = _head(sec)
        if kind == ":constants":
            for cname, line, col, ty in _parse_typed_list(sec[1:], typed, "constant"):
                check_type(ty, line, col)
                if cname in constants:
                    raise ValidationError(f"constant '{cname}' declared twice", line, col)
                constants[cname] = ty
        elif kind == ":predicates":
            for p in sec[1:]:
                if not isinstance(p, list) or not p:
                    line, col = _pos_of(p)
                    raise PddlSyntaxError("expected (name ?args...) in :predicates", line, col)
                pname = _as_name(p[0], "predicate name")
                entries = _parse_typed_list(p[1:], typed, "parameter")
                for vname, line, col, ty in entries:
                    if not vname.startswith("?"):
                        raise PddlSyntaxError(
                            f"predicate parameter '{vname}' must start with '?'", line, col
                        )
                    check_type(ty, line, col)
                if pname.text in predicates:
                    raise ValidationError(
                        f"predicate '{pname.text}' declared twice", pname.line, pname.col
                    )
                predicates[pname.text] = PredicateDef(
                    pname.text, tuple(e[3] for e in entries)
                )

    schemas = tuple(
        _parse_schema(expr, tree, predicates, constants, typed) for expr in schema_exprs
    )
    seen_schema_names = set()
    for s in schemas:
        if s.name in seen_schema_names:
            raise ValidationError(f"action '{s.name}' declared twice")
        seen_schema_names.add(s.name)

    return Domain(
        name=name,
        types=tree,
        predicates=predicates,
        schemas=schemas,
        constants=constants,
        typed=typed,
    )


def _parse_schema(
    expr: list,
    tree: TypeTree,
    predicates: Mapping[str, PredicateDef],
    constants: Mapping[str, str],
    typed: bool,
) -> ActionSchema:
    name_tok = _as_name(expr[1], "action name") if len(expr) > 1 else None
    if name_tok is None:
        line, col = _pos_of(expr)
        raise PddlSyntaxError("action without a name", line, col)
    body = expr[2:]
    params: list[tuple[str, str]] = []
    pre: set[Lifted] = set()
    add: set[Lifted] = set()
    delete: set[Lifted] = set()
    i = 0
    saw = set()
    while i < len(body):
        key = _as_name(body[i], "action keyword")
        if key.text not in (":parameters", ":precondition", ":effect"):
            raise PddlSyntaxError(f"unknown action keyword '{key.text}'", key.line, key.col)
        if key.text in saw:
            raise PddlSyntaxError(f"duplicate '{key.text}'", key.line, key.col)
        saw.add(key.text)
        if i + 1 >= len(body):
            raise PddlSyntaxError(f"missing body after '{key.text}'", key.line, key.col)
        val = body[i + 1]
        i += 2
        if key.text == ":parameters":
            if not isinstance(val, list):
                raise PddlSyntaxError("parameters must be a list", key.line, key.col)
            for vname, line, col, ty in _parse_typed_list(val, typed, "parameter"):
                if not vname.startswith("?"):
                    raise PddlSyntaxError(f"parameter '{vname}' must start with '?'", line, col)
                if ty not in tree.names:
                    raise ValidationError(f"undeclared type '{ty}'", line, col)
                if any(v == vname for v, _ in params):
                    raise ValidationError(f"parameter '{vname}' repeated", line, col)
                params.append((vname, ty))
        elif key.text == ":precondition":
            for atom in _conjunct_atoms(val, "precondition"):
                pre.add(_lift(atom, predicates, "precondition"))
        else:
            for atom, negated in _effect_atoms(val):
                lifted = _lift(atom, predicates, "effect")
                (delete if negated else add).add(lifted)

    if ":parameters" not in saw:
        raise PddlSyntaxError(f"action '{name_tok.text}' lacks :parameters", name_tok.line, name_tok.col)
    param_types = dict(params)
    for group, where in ((pre, "precondition"), (add, "add effect"), (delete, "delete effect")):
        for lifted in group:
            pdef = predicates[lifted.pred]
            for slot, arg in enumerate(lifted.args):
                if arg.startswith("?"):
                    if arg not in param_types:
                        raise ValidationError(
                            f"variable '{arg}' in {where} of '{name_tok.text}' is not a parameter"
                        )
                    argty = param_types[arg]
                else:
                    if arg not in constants:
                        raise ValidationError(
                            f"constant '{arg}' in {where} of '{name_tok.text}' is not declared"
                        )
                    argty = constants[arg]
                if not is_subtype(argty, pdef.arg_types[slot], tree):
                    raise ValidationError(
                        f"argument '{arg}' of '{lifted.pred}' in {where} of action "
                        f"'{name_tok.text}' has type '{argty}', expected '{pdef.arg_types[slot]}'"
                    )
    overlap = add & delete
    if overlap:
        atom = next(iter(overlap))
        raise ValidationError(
            f"action '{name_tok.text}' both adds and deletes '{atom.pred}'"
        )
    return ActionSchema(
        name=name_tok.text,
        params=tuple(params),
        pre=frozenset(pre),
        add=frozenset(add),
        delete=frozenset(delete),
    )


def _conjunct_atoms(expr: _SExpr, where: str) -> list[list]:
    """Flatten a goal/precondition body into plain atoms; conjunction only."""
    if not isinstance(expr, list) or not expr:
        line, col = _pos_of(expr)
        raise PddlSyntaxError(f"expected an atom or (and ...) in {where}", line, col)
    if _head(expr) == "and":
        out: list[list] = []
        for item in expr[1:]:
            out.extend(_conjunct_atoms(item, where))
        return out
    if _head(expr) in _REJECTED_CONNECTIVES:
        tok = expr[0]
        raise UnsupportedFeatureError(
            f"'{tok.text}' is outside the positive STRIPS fragment ({where})", tok.line, tok.col
        )
    return [expr]


def _effect_atoms(expr: _SExpr) -> list[tuple[list, bool]]:
    if not isinstance(expr, list) or not expr:
        line, col = _pos_of(expr)
        raise PddlSyntaxError("expected an atom, (not ...), or (and ...) in effect", line, col)
    head = _head(expr)
    if head == "and":
        out: list[tuple[list, bool]] = []
        for item in expr[1:]:
            out.extend(_effect_atoms(item))
        return out
    if head == "not":
        if len(expr) != 2 or not isinstance(expr[1], list):
            line, col = _pos_of(expr)
            raise PddlSyntaxError("(not ...) must wrap a single atom", line, col)
        inner = expr[1]
        if _head(inner) in _REJECTED_CONNECTIVES:
            line, col = _pos_of(inner)
            raise UnsupportedFeatureError("nested connective under (not ...)", line, col)
        return [(inner, True)]
    if head in _REJECTED_CONNECTIVES:
        tok = expr[0]
        raise UnsupportedFeatureError(
            f"'{tok.text}' is outside the positive STRIPS fragment (effect)", tok.line, tok.col
        )
    return [(expr, False)]


def _lift(expr: list, predicates: Mapping[str, PredicateDef], where: str) -> Lifted:
    head, args = _parse_atom_expr(expr, where)
    _check_atom(head, args, predicates, where)
    return Lifted(head.text, tuple(a.text for a in args))


# ---------------------------------------------------------------------------
# instance parsing


def parse_instance(text: str, domain: Domain) -> Instance:
    """Parse a PDDL problem against an already parsed domain."""
    top = _parse_top(text)
    if _head(top) != "define":
        line, col = _pos_of(top)
        raise PddlSyntaxError("expected (define (problem ...) ...)", line, col)
    sections = top[1:]
    if not sections or _head(sections[0]) != "problem" or len(sections[0]) != 2:
        line, col = _pos_of(top)
        raise PddlSyntaxError("missing (problem NAME)", line, col)
    name = _as_name(sections[0][1], "problem name").text

    objects: dict[str, str] = dict(domain.constants)
    init: set[GroundAtom] = set()
    goal: set[GroundAtom] = set()
    saw_domain = False

    def check_ground_atom(expr: _SExpr, where: str) -> GroundAtom:
        head, args = _parse_atom_expr(expr, where)
        _check_atom(head, args, domain.predicates, where)
        pdef = domain.predicates[head.text]
        vals = []
        for slot, a in enumerate(args):
            if a.text.startswith("?"):
                raise ValidationError(f"variable '{a.text}' in {where}", a.line, a.col)
            oty = objects.get(a.text)
            if oty is None:
                raise ValidationError(f"unknown object '{a.text}'", a.line, a.col)
            if not is_subtype(oty, pdef.arg_types[slot], domain.types):
                raise ValidationError(
                    f"object '{a.text}' has type '{oty}', but slot {slot + 1} of "
                    f"'{head.text}' expects '{pdef.arg_types[slot]}'",
                    a.line,
                    a.col,
                )
            vals.append(a.text)
        return (head.text, *vals)

    for sec in sections[1:]:
        if not isinstance(sec, list) or not sec:
            line, col = _pos_of(sec)
            raise PddlSyntaxError("expected a (:section ...) form", line, col)
        kind = _head(sec)
        if kind == ":domain":
            dn = _as_name(sec[1], "domain name").text if len(sec) == 2 else None
            if dn != domain.name:
                line, col = _pos_of(sec)
                raise ValidationError(
                    f"problem references domain '{dn}', parsed domain is '{domain.name}'",
                    line,
                    col,
                )
            saw_domain = True
        elif kind == ":objects":
            for oname, line, col, ty in _parse_typed_list(sec[1:], domain.typed, "object"):
                if ty not in domain.types.names:
                    raise ValidationError(f"undeclared type '{ty}'", line, col)
                if oname in objects:
                    raise ValidationError(f"object '{oname}' declared twice", line, col)
                objects[oname] = ty
        elif kind == ":init":
            for item in sec[1:]:
                init.add(check_ground_atom(item, "init"))
        elif kind == ":goal":
            if len(sec) != 2:
                line, col = _pos_of(sec)
                raise PddlSyntaxError(":goal takes a single formula", line, col)
            for atom in _conjunct_atoms(sec[1], "goal"):
                goal.add(check_ground_atom(atom, "goal"))
        elif kind in (":metric", ":length"):
            line, col = _pos_of(sec)
            raise UnsupportedFeatureError(f"section '{kind}' is not supported", line, col)
        else:
            line, col = _pos_of(sec)
            raise PddlSyntaxError(f"unknown problem section '{kind}'", line, col)

    if not saw_domain:
        raise PddlSyntaxError("problem lacks a (:domain NAME) section")

    return Instance(
        name=name,
        domain=domain,
        objects=dict(sorted(objects.items())),
        init=frozenset(init),
        goal=frozenset(goal),
    )


# ---------------------------------------------------------------------------
# printers (inverse of the parsers, used for round-trip checks)


def _typed_list_str(pairs: Iterable[tuple[str, str]], typed: bool) -> str:
    if not typed:
        return " ".join(n for n, _ in pairs)
    return " ".join(f"{n} - {t}" for n, t in pairs)


def _atom_str(a: Lifted) -> str:
    return "(" + " ".join((a.pred,) + a.args) + ")"


def domain_to_pddl(domain: Domain) -> str:
    lines = [f"(define (domain {domain.name})"]
    reqs = [":strips"] + ([":typing"] if domain.typed else [])
    lines.append(f"  (:requirements {' '.join(reqs)})")
    if domain.typed and len(domain.types.names) > 1:
        decls = " ".join(
            f"{t} - {domain.types.parent[t]}" for t in domain.types.names if t != ROOT_TYPE
        )
        lines.append(f"  (:types {decls})")
    if domain.constants:
        lines.append(
            "  (:constants "
            + _typed_list_str(sorted(domain.constants.items()), domain.typed)
            + ")"
        )
    preds = []
    for p in sorted(domain.predicates.values(), key=lambda p: p.name):
        args = " ".join(
            f"?x{i} - {t}" if domain.typed else f"?x{i}"
            for i, t in enumerate(p.arg_types)
        )
        preds.append(f"({p.name}{' ' + args if args else ''})")
    lines.append(f"  (:predicates {' '.join(preds)})")
    for s in domain.schemas:
        lines.append(f"  (:action {s.name}")
        lines.append(f"    :parameters ({_typed_list_str(s.params, domain.typed)})")
        pre = " ".join(_atom_str(a) for a in sorted(s.pre, key=lambda a: (a.pred, a.args)))
        lines.append(f"    :precondition (and {pre})")
        effs = [_atom_str(a) for a in sorted(s.add, key=lambda a: (a.pred, a.args))]
        effs += [
            f"(not {_atom_str(a)})" for a in sorted(s.delete, key=lambda a: (a.pred, a.args))
        ]
        lines.append(f"    :effect (and {' '.join(effs)}))")
    lines.append(")")
    return "\n".join(lines)


def instance_to_pddl(inst: Instance) -> str:
    lines = [f"(define (problem {inst.name})", f"  (:domain {inst.domain.name})"]
    own = [(n, t) for n, t in sorted(inst.objects.items()) if n not in inst.domain.constants]
    if own:
        lines.append(f"  (:objects {_typed_list_str(own, inst.domain.typed)})")
    init = " ".join("(" + " ".join(a) + ")" for a in sorted(inst.init))
    lines.append(f"  (:init {init})")
    goal = " ".join("(" + " ".join(a) + ")" for a in sorted(inst.goal))
    lines.append(f"  (:goal (and {goal}))")
    lines.append(")")
    return "\n".join(lines)
