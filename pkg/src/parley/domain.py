"""Problem-domain formalism: entities, typed predicates, action schemas, desires.

A domain is declared in a single JSON document (see docs/domain-spec.md) and is
immutable after loading, so one DomainSpec can be shared read-only by every
agent in a simulation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping

FORMAT_VERSION = 1

VALUE_KINDS = ("string", "number", "entity-ref")

CONTROLLERS = ("move_to", "utter", "interact", "wait")


class SpecError(ValueError):
    """Domain-spec validation failure, with a source position when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)


class PredicateKind(Enum):
    KNOWLEDGE = "knowledge"
    FLUENT = "fluent"


@dataclass(frozen=True)
class EntityType:
    name: str
    # (attribute name, value kind) pairs; kinds limited to VALUE_KINDS
    attribute_defs: tuple[tuple[str, str], ...] = ()

    def attr_kind(self, attr: str) -> str | None:
        for name, kind in self.attribute_defs:
            if name == attr:
                return kind
        return None


@dataclass(frozen=True)
class Entity:
    id: str
    type: EntityType
    attributes: tuple[tuple[str, Any], ...] = ()
    position: tuple[float, float] | None = None
    region: tuple[tuple[float, float], ...] | None = None

    def attribute(self, name: str) -> Any | None:
        for key, value in self.attributes:
            if key == name:
                return value
        return None


@dataclass(frozen=True)
class Slot:
    name: str
    types: frozenset[str]  # empty set = unconstrained


@dataclass(frozen=True)
class PredicateSchema:
    name: str
    slots: tuple[Slot, ...]
    kind: PredicateKind
    functional_slot: int | None = None  # see docs: one-value-per-key slots
    observable: bool = False

    @property
    def arity(self) -> int:
        return len(self.slots)


@dataclass(frozen=True)
class Hole:
    """An unfilled argument position, named after the param or slot it stands for."""

    name: str

    def __repr__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True)
class Literal:
    """A possibly-negated predicate instance; partial if any arg is a Hole."""

    schema: PredicateSchema
    args: tuple[Any, ...]  # entity ids (str) or Holes
    positive: bool = True

    def __post_init__(self):
        if len(self.args) != self.schema.arity:
            raise SpecError(
                f"{self.schema.name} expects {self.schema.arity} args, got {len(self.args)}"
            )

    @property
    def grounded(self) -> bool:
        return not any(isinstance(a, Hole) for a in self.args)

    def holes(self) -> list[tuple[int, Hole]]:
        return [(i, a) for i, a in enumerate(self.args) if isinstance(a, Hole)]

    def negated(self) -> "Literal":
        return Literal(self.schema, self.args, not self.positive)

    def substitute(self, binding: Mapping[str, str]) -> "Literal":
        """Replace Holes whose name appears in the binding; others survive."""
        args = tuple(
            binding.get(a.name, a) if isinstance(a, Hole) else a for a in self.args
        )
        return Literal(self.schema, args, self.positive)

    def key(self) -> tuple:
        """Hashable identity of the atom, ignoring polarity."""
        return (self.schema.name, self.args)

    def __repr__(self) -> str:
        inner = ", ".join(repr(a) if isinstance(a, Hole) else str(a) for a in self.args)
        sign = "" if self.positive else "¬"
        return f"{sign}{self.schema.name}({inner})"


@dataclass(frozen=True)
class ActionSchema:
    """An operator: typed params, precondition/effect literals, and the sim
    controller that executes it."""

    name: str
    params: tuple[tuple[str, frozenset[str]], ...]
    preconditions: tuple[Literal, ...]
    effects: tuple[Literal, ...]
    controller: str = "interact"
    duration: float = 1.0
    # for utter-controller actions: the statement to speak, over params
    utterance: Literal | None = None
    # param whose entity the controller targets (move/interact destination)
    target_param: str | None = None

    def param_types(self, name: str) -> frozenset[str] | None:
        for pname, types in self.params:
            if pname == name:
                return types
        return None


@dataclass(frozen=True)
class DesireSet:
    desires: tuple[Literal, ...]

    def __post_init__(self):
        for lit in self.desires:
            if not lit.grounded:
                raise SpecError(f"desire {lit!r} is not grounded")

    def __iter__(self):
        return iter(self.desires)

    def __len__(self):
        return len(self.desires)


@dataclass(frozen=True)
class AgentSpec:
    """Per-agent seed data: starting beliefs, desires, and optional scripted
    warning behavior (used by the evacuation first-responder)."""

    id: str
    beliefs: tuple[Literal, ...] = ()
    attribute_beliefs: tuple[tuple[str, str, Any], ...] = ()  # (entity, attr, value)
    desires: DesireSet = field(default_factory=lambda: DesireSet(()))
    warn_literal: Literal | None = None
    warn_cooldown: float = 5.0


@dataclass(frozen=True)
class WorldGeometry:
    bounds: tuple[float, float, float, float] = (0.0, 0.0, 50.0, 50.0)
    obstacles: tuple[tuple[tuple[float, float], ...], ...] = ()


@dataclass(frozen=True)
class DomainSpec:
    """A fully validated, referentially closed problem domain."""

    entity_types: tuple[EntityType, ...]
    entities: tuple[Entity, ...]
    predicates: tuple[PredicateSchema, ...]
    actions: tuple[ActionSchema, ...]
    agents: tuple[AgentSpec, ...]
    world: WorldGeometry = WorldGeometry()
    ground_facts: tuple[Literal, ...] = ()  # world-truth seed literals
    lexicon: Any = None  # parsed lexicon document (dict) or None
    config: tuple[tuple[str, Any], ...] = ()

    def entity(self, entity_id: str) -> Entity:
        ent = self._entity_index().get(entity_id)
        if ent is None:
            raise SpecError(f"unknown entity {entity_id!r}")
        return ent

    def has_entity(self, entity_id: str) -> bool:
        return entity_id in self._entity_index()

    def entity_type(self, name: str) -> EntityType:
        for et in self.entity_types:
            if et.name == name:
                return et
        raise SpecError(f"unknown entity type {name!r}")

    def schema(self, name: str) -> PredicateSchema:
        for p in self.predicates:
            if p.name == name:
                return p
        raise SpecError(f"unknown predicate {name!r}")

    def action(self, name: str) -> ActionSchema:
        for a in self.actions:
            if a.name == name:
                return a
        raise SpecError(f"unknown action {name!r}")

    def agent_spec(self, agent_id: str) -> AgentSpec:
        for a in self.agents:
            if a.id == agent_id:
                return a
        raise SpecError(f"unknown agent {agent_id!r}")

    def config_value(self, key: str, default: Any = None) -> Any:
        for k, v in self.config:
            if k == key:
                return v
        return default

    def _entity_index(self) -> dict[str, Entity]:
        idx = getattr(self, "_ent_idx", None)
        if idx is None:
            idx = {e.id: e for e in self.entities}
            object.__setattr__(self, "_ent_idx", idx)
        return idx

    def literal(
        self, pred: str, args: Iterable[Any], positive: bool = True
    ) -> Literal:
        """Build a Literal, type-checking every bound arg against the schema."""
        schema = self.schema(pred)
        lit = Literal(schema, tuple(args), positive)
        violations = check_literal_types(self, lit)
        if violations:
            raise SpecError("; ".join(violations))
        return lit

    def entities_of_types(self, types: frozenset[str]) -> list[Entity]:
        """Entities whose type matches, sorted by id for determinism."""
        cache = getattr(self, "_type_pool_cache", None)
        if cache is None:
            cache = {}
            object.__setattr__(self, "_type_pool_cache", cache)
        pool = cache.get(types)
        if pool is None:
            pool = sorted(
                (e for e in self.entities if not types or e.type.name in types),
                key=lambda e: e.id,
            )
            cache[types] = pool
        return pool


def check_literal_types(spec: DomainSpec, lit: Literal) -> list[str]:
    """Type violations for every bound arg of `lit`; empty list when clean."""
    problems = []
    for slot, arg in zip(lit.schema.slots, lit.args):
        if isinstance(arg, Hole):
            continue
        if not spec.has_entity(arg):
            problems.append(f"{lit.schema.name}: unknown entity {arg!r}")
            continue
        ent = spec.entity(arg)
        if slot.types and ent.type.name not in slot.types:
            problems.append(
                f"{arg} not of type {'/'.join(sorted(slot.types))} "
                f"for slot {slot.name} of {lit.schema.name}"
            )
    return problems


def validate_binding(
    schema: PredicateSchema | ActionSchema,
    binding: Mapping[str, Entity],
) -> list[str]:
    """Type violations for a (possibly partial) slot/param binding."""
    if isinstance(schema, PredicateSchema):
        slots = {s.name: s.types for s in schema.slots}
    else:
        slots = {name: types for name, types in schema.params}
    problems = []
    for name, ent in binding.items():
        if name not in slots:
            problems.append(f"{schema.name} has no slot {name!r}")
            continue
        allowed = slots[name]
        if allowed and ent.type.name not in allowed:
            problems.append(f"{ent.id} not of type {'/'.join(sorted(allowed))}")
    return problems


def instantiate(template: Literal, binding: Mapping[str, str | Entity]) -> Literal:
    """Fill named Holes from the binding; unfilled Holes are preserved."""
    resolved = {
        k: (v.id if isinstance(v, Entity) else v) for k, v in binding.items()
    }
    return template.substitute(resolved)


# ---------------------------------------------------------------------------
# Spec document parsing
# ---------------------------------------------------------------------------


def _locate(text: str, token: str) -> tuple[int | None, int | None]:
    """Best-effort source position of a token's first occurrence."""
    pos = text.find(f'"{token}"')
    if pos < 0:
        pos = text.find(token)
    if pos < 0:
        return None, None
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _err(text: str, message: str, token: str | None = None) -> SpecError:
    line = col = None
    if token:
        line, col = _locate(text, token)
    return SpecError(message, line, col)


def parse_domain_spec(text: str) -> DomainSpec:
    """Parse and fully validate a domain document; raises SpecError."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"syntax error: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(doc, dict):
        raise SpecError("document root must be an object")
    fmt = doc.get("format")
    if fmt != FORMAT_VERSION:
        raise SpecError(f"unsupported format {fmt!r}, expected {FORMAT_VERSION}")
    return spec_from_dict(doc, source=text)


def spec_from_dict(doc: dict, source: str = "") -> DomainSpec:
    # entity types
    types: list[EntityType] = []
    seen = set()
    for raw in doc.get("entity_types", []):
        name = raw["name"]
        if name in seen:
            raise _err(source, f"duplicate entity type {name!r}", name)
        seen.add(name)
        attrs = []
        attr_seen = set()
        for a in raw.get("attributes", []):
            if a["name"] in attr_seen:
                raise _err(source, f"duplicate attribute {a['name']!r} on {name}", a["name"])
            attr_seen.add(a["name"])
            kind = a.get("kind", "string")
            if kind not in VALUE_KINDS:
                raise _err(source, f"bad attribute kind {kind!r} on {name}.{a['name']}", kind)
            attrs.append((a["name"], kind))
        types.append(EntityType(name, tuple(attrs)))
    type_index = {t.name: t for t in types}

    # entities
    entities: list[Entity] = []
    seen = set()
    raw_entities = doc.get("entities", [])
    if not raw_entities:
        raise SpecError("no entities declared")
    for raw in raw_entities:
        eid = raw["id"]
        if eid in seen:
            raise _err(source, f"duplicate entity {eid!r}", eid)
        seen.add(eid)
        tname = raw["type"]
        if tname not in type_index:
            raise _err(source, f"entity {eid}: unknown type {tname!r}", tname)
        etype = type_index[tname]
        attrs = []
        for key, value in sorted(raw.get("attributes", {}).items()):
            kind = etype.attr_kind(key)
            if kind is None:
                raise _err(source, f"entity {eid}: attribute {key!r} not declared on type {tname}", key)
            attrs.append((key, value))
        pos = raw.get("position")
        region = raw.get("region")
        entities.append(
            Entity(
                eid,
                etype,
                tuple(attrs),
                tuple(pos) if pos else None,
                tuple(tuple(p) for p in region) if region else None,
            )
        )
    entity_index = {e.id: e for e in entities}

    # predicate schemas
    predicates: list[PredicateSchema] = []
    seen = set()
    for raw in doc.get("predicates", []):
        name = raw["name"]
        if name in seen:
            raise _err(source, f"duplicate predicate {name!r}", name)
        seen.add(name)
        slots = []
        slot_seen = set()
        for s in raw.get("slots", []):
            if s["name"] in slot_seen:
                raise _err(source, f"duplicate slot {s['name']!r} on {name}", s["name"])
            slot_seen.add(s["name"])
            for t in s.get("types", []):
                if t not in type_index:
                    raise _err(source, f"predicate {name}: unknown type {t!r}", t)
            slots.append(Slot(s["name"], frozenset(s.get("types", []))))
        if not slots:
            raise _err(source, f"predicate {name} must have arity >= 1", name)
        kind = PredicateKind(raw.get("kind", "knowledge"))
        functional = raw.get("functional_slot")
        if functional is not None:
            names = [s.name for s in slots]
            if functional not in names:
                raise _err(source, f"predicate {name}: functional_slot {functional!r} is not a slot", name)
            functional = names.index(functional)
        predicates.append(
            PredicateSchema(name, tuple(slots), kind, functional, raw.get("observable", False))
        )
    pred_index = {p.name: p for p in predicates}

    def parse_literal(raw: dict, params: dict[str, frozenset[str]] | None, ctx: str) -> Literal:
        pname = raw["pred"]
        schema = pred_index.get(pname)
        if schema is None:
            raise _err(source, f"{ctx}: unknown predicate {pname!r}", pname)
        args: list[Any] = []
        raw_args = raw.get("args", [])
        if len(raw_args) != schema.arity:
            raise _err(source, f"{ctx}: {pname} expects {schema.arity} args, got {len(raw_args)}", pname)
        for slot, a in zip(schema.slots, raw_args):
            if params is not None and a in params:
                ptypes = params[a]
                if slot.types and ptypes and not (ptypes & slot.types):
                    raise _err(source, f"{ctx}: param {a!r} can never satisfy slot {slot.name} of {pname}", a)
                args.append(Hole(a))
                continue
            if a in entity_index:
                ent = entity_index[a]
                if slot.types and ent.type.name not in slot.types:
                    raise _err(source, f"{ctx}: {a} not of type {'/'.join(sorted(slot.types))}", a)
                args.append(a)
                continue
            if params is not None:
                raise _err(source, f"{ctx}: {a!r} is neither a declared param nor an entity", a)
            raise _err(source, f"{ctx}: unknown entity {a!r}", a)
        return Literal(schema, tuple(args), not raw.get("negated", False))

    # actions
    actions: list[ActionSchema] = []
    seen = set()
    for raw in doc.get("actions", []):
        name = raw["name"]
        if name in seen:
            raise _err(source, f"duplicate action {name!r}", name)
        seen.add(name)
        params: dict[str, frozenset[str]] = {}
        for p in raw.get("params", []):
            if p["name"] in params:
                raise _err(source, f"duplicate param {p['name']!r} on action {name}", p["name"])
            for t in p.get("types", []):
                if t not in type_index:
                    raise _err(source, f"action {name}: unknown type {t!r}", t)
            params[p["name"]] = frozenset(p.get("types", []))
        pre = tuple(
            parse_literal(r, params, f"action {name} precondition") for r in raw.get("preconditions", [])
        )
        eff = tuple(
            parse_literal(r, params, f"action {name} effect") for r in raw.get("effects", [])
        )
        controller = raw.get("controller", "interact")
        if controller not in CONTROLLERS:
            raise _err(source, f"action {name}: unknown controller {controller!r}", controller)
        utter = raw.get("utterance")
        target = raw.get("target_param")
        if target is not None and target not in params:
            raise _err(source, f"action {name}: target_param {target!r} not declared", name)
        actions.append(
            ActionSchema(
                name,
                tuple(params.items()),
                pre,
                eff,
                controller,
                float(raw.get("duration", 1.0)),
                parse_literal(utter, params, f"action {name} utterance") if utter else None,
                target,
            )
        )

    # agents
    agents: list[AgentSpec] = []
    seen = set()
    for raw in doc.get("agents", []):
        aid = raw["id"]
        if aid in seen:
            raise _err(source, f"duplicate agent {aid!r}", aid)
        seen.add(aid)
        if aid not in entity_index:
            raise _err(source, f"agent {aid!r} has no matching entity", aid)
        beliefs = tuple(parse_literal(r, None, f"agent {aid} belief") for r in raw.get("beliefs", []))
        attr_beliefs = []
        for eid, pairs in sorted(raw.get("attribute_beliefs", {}).items()):
            if eid not in entity_index:
                raise _err(source, f"agent {aid}: unknown entity {eid!r}", eid)
            for attr, value in sorted(pairs.items()):
                if entity_index[eid].type.attr_kind(attr) is None:
                    raise _err(source, f"agent {aid}: attribute {attr!r} not declared on {eid}", attr)
                attr_beliefs.append((eid, attr, value))
        desires = DesireSet(
            tuple(parse_literal(r, None, f"agent {aid} desire") for r in raw.get("desires", []))
        )
        warn = raw.get("warn")
        agents.append(
            AgentSpec(
                aid,
                beliefs,
                tuple(attr_beliefs),
                desires,
                parse_literal(warn["literal"], None, f"agent {aid} warn") if warn else None,
                float(warn.get("cooldown", 5.0)) if warn else 5.0,
            )
        )

    world_raw = doc.get("world", {})
    world = WorldGeometry(
        tuple(world_raw.get("bounds", (0.0, 0.0, 50.0, 50.0))),
        tuple(tuple(tuple(p) for p in poly) for poly in world_raw.get("obstacles", [])),
    )
    facts = tuple(
        parse_literal(r, None, "world fact") for r in world_raw.get("facts", [])
    )

    return DomainSpec(
        tuple(types),
        tuple(entities),
        tuple(predicates),
        tuple(actions),
        tuple(agents),
        world,
        facts,
        doc.get("lexicon"),
        tuple(sorted(doc.get("config", {}).items())),
    )


# ---------------------------------------------------------------------------
# Serialization (round-trips through parse_domain_spec)
# ---------------------------------------------------------------------------


def _literal_to_dict(lit: Literal) -> dict:
    args = [a.name if isinstance(a, Hole) else a for a in lit.args]
    out = {"pred": lit.schema.name, "args": args}
    if not lit.positive:
        out["negated"] = True
    return out


def spec_to_dict(spec: DomainSpec) -> dict:
    doc: dict[str, Any] = {"format": FORMAT_VERSION}
    doc["entity_types"] = [
        {
            "name": t.name,
            "attributes": [{"name": n, "kind": k} for n, k in t.attribute_defs],
        }
        for t in spec.entity_types
    ]
    doc["entities"] = []
    for e in spec.entities:
        raw: dict[str, Any] = {"id": e.id, "type": e.type.name}
        if e.attributes:
            raw["attributes"] = {k: v for k, v in e.attributes}
        if e.position is not None:
            raw["position"] = list(e.position)
        if e.region is not None:
            raw["region"] = [list(p) for p in e.region]
        doc["entities"].append(raw)
    doc["predicates"] = []
    for p in spec.predicates:
        raw = {
            "name": p.name,
            "kind": p.kind.value,
            "slots": [{"name": s.name, "types": sorted(s.types)} for s in p.slots],
        }
        if p.functional_slot is not None:
            raw["functional_slot"] = p.slots[p.functional_slot].name
        if p.observable:
            raw["observable"] = True
        doc["predicates"].append(raw)
    doc["actions"] = []
    for a in spec.actions:
        raw = {
            "name": a.name,
            "params": [{"name": n, "types": sorted(t)} for n, t in a.params],
            "preconditions": [_literal_to_dict(l) for l in a.preconditions],
            "effects": [_literal_to_dict(l) for l in a.effects],
            "controller": a.controller,
            "duration": a.duration,
        }
        if a.utterance is not None:
            raw["utterance"] = _literal_to_dict(a.utterance)
        if a.target_param is not None:
            raw["target_param"] = a.target_param
        doc["actions"].append(raw)
    doc["agents"] = []
    for ag in spec.agents:
        raw = {"id": ag.id}
        if ag.beliefs:
            raw["beliefs"] = [_literal_to_dict(l) for l in ag.beliefs]
        if ag.attribute_beliefs:
            attr: dict[str, dict[str, Any]] = {}
            for eid, name, value in ag.attribute_beliefs:
                attr.setdefault(eid, {})[name] = value
            raw["attribute_beliefs"] = attr
        if len(ag.desires):
            raw["desires"] = [_literal_to_dict(l) for l in ag.desires]
        if ag.warn_literal is not None:
            raw["warn"] = {
                "literal": _literal_to_dict(ag.warn_literal),
                "cooldown": ag.warn_cooldown,
            }
        doc["agents"].append(raw)
    doc["world"] = {
        "bounds": list(spec.world.bounds),
        "obstacles": [[list(p) for p in poly] for poly in spec.world.obstacles],
    }
    if spec.ground_facts:
        doc["world"]["facts"] = [_literal_to_dict(l) for l in spec.ground_facts]
    if spec.lexicon is not None:
        doc["lexicon"] = spec.lexicon
    if spec.config:
        doc["config"] = {k: v for k, v in spec.config}
    return doc


def serialize_domain_spec(spec: DomainSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2, sort_keys=False)
