"""Template-based generation of questions and statements.

Production templates live on the lexicon entries of predicates and
attributes; generation picks a seeded-random template among those whose
entity slots exactly cover the bound arguments, so a literal with a hole
comes out as an information question and a complete one as a confirmation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .domain import Hole, Literal, SpecError
from .nlu import Lexicon, LexEntry, ProductionTemplate, Slot, _assign_entity_slots

PHONETIC_NAMES = (
    "Alpha", "Bravo", "Charlie", "Delta", "Echo", "Foxtrot", "Golf", "Hotel",
    "India", "Juliett", "Kilo", "Lima", "Mike", "November", "Oscar", "Papa",
    "Quebec", "Romeo", "Sierra", "Tango", "Uniform", "Victor", "Whiskey",
    "X-ray", "Yankee", "Zulu",
)


@dataclass
class PhoneticNameRegistry:
    assignments: dict[str, str] = field(default_factory=dict)

    def names(self) -> dict[str, str]:
        return dict(self.assignments)


def assign_phonetic_name(registry: PhoneticNameRegistry, agent_id: str) -> str:
    """Stable unique name per agent; wraps with a numeric suffix past Zulu."""
    if agent_id in registry.assignments:
        return registry.assignments[agent_id]
    n = len(registry.assignments)
    base = PHONETIC_NAMES[n % len(PHONETIC_NAMES)]
    round_no = n // len(PHONETIC_NAMES)
    name = base if round_no == 0 else f"{base}-{round_no + 1}"
    registry.assignments[agent_id] = name
    return name


def _entity_surface(lexicon: Lexicon, entity_id: str, with_article: bool) -> str:
    entry = lexicon.entity_entry(entity_id)
    if entry is None:
        raise SpecError(f"no lexicon entry for entity {entity_id}")
    if with_article and entry.def_article:
        return f"the {entry.surface}"
    return entry.surface


def _finish(text: str) -> str:
    text = " ".join(text.split())
    if not text:
        return text
    if "[" in text:
        raise SpecError(f"unresolved slot marker in generated text: {text!r}")
    return text[0].upper() + text[1:]


def _realize_production(
    template: ProductionTemplate,
    entry: LexEntry,
    lexicon: Lexicon,
    slot_args: list[str],
    addressee_name: str | None,
    value_text: str | None = None,
) -> str:
    out = []
    entity_i = 0
    for piece in template.parts():
        if isinstance(piece, str):
            out.append(piece)
            continue
        if piece.kind in ("PREDICATE", "ATTRIBUTE"):
            if piece.is_value:
                if value_text is None:
                    raise SpecError(f"template {template.text!r} needs a value")
                out.append(value_text)
            else:
                out.append(entry.surface)
        elif piece.kind in ("PREDICATE-ENTITY", "ATTRIBUTE-ENTITY"):
            out.append(_entity_surface(lexicon, slot_args[entity_i], piece.wants_article))
            entity_i += 1
        else:  # ADDRESSEE
            if addressee_name is None:
                raise SpecError("template has an addressee slot but no addressee given")
            out.append(addressee_name)
    return _finish("".join(out))


def _matching_templates(
    entry: LexEntry,
    nl_i: str,
    lit: Literal,
    lexicon: Lexicon,
    need_bound: list[int],
    positive: bool,
    want_addressee: bool,
) -> list[tuple[ProductionTemplate, list[str]]]:
    """Templates whose entity slots realize exactly the bound args, with the
    argument list each one should be filled with."""
    matches = []
    for template in entry.templates:
        if template.nl_i != nl_i or template.positive != positive:
            continue
        has_addressee = any(
            isinstance(p, Slot) and p.kind == "ADDRESSEE" for p in template.parts()
        )
        if has_addressee and not want_addressee:
            continue
        slots = template.entity_slots()
        assignment = _assign_entity_slots(slots, lit.schema, None)
        if assignment is None or assignment != need_bound:
            continue
        args = []
        ok = True
        for slot, idx in zip(slots, assignment):
            arg = lit.args[idx]
            if isinstance(arg, Hole):
                ok = False
                break
            if slot.type_filter is not None:
                entry_arg = lexicon.entity_entry(arg)
                if entry_arg is None:
                    ok = False
                    break
            args.append(arg)
        if ok:
            matches.append((template, args))
    return matches


def generate_question(
    target,
    lexicon: Lexicon,
    rng: random.Random | None = None,
    addressee_name: str | None = None,
) -> str:
    """Question text for a literal with holes (information question), a
    grounded literal (confirmation), or an (entity, attribute) pair."""
    rng = rng or random.Random(0)
    if isinstance(target, tuple):
        entity_id, attribute = target
        entry = lexicon.entry_for("attribute", attribute)
        if entry is None:
            raise SpecError(f"no lexicon entry for attribute {attribute}")
        candidates = [
            t for t in entry.templates if t.nl_i == "attribute_question"
        ]
        candidates = _prefer_addressee(candidates, addressee_name)
        if not candidates:
            raise SpecError(f"no question template for attribute {attribute}")
        template = rng.choice(candidates)
        n_slots = len(template.entity_slots())
        return _realize_production(
            template, entry, lexicon, [entity_id] * n_slots, addressee_name
        )
    lit: Literal = target
    entry = lexicon.entry_for("predicate", lit.schema.name)
    if entry is None:
        raise SpecError(f"no lexicon entry for predicate {lit.schema.name}")
    bound = [i for i, a in enumerate(lit.args) if not isinstance(a, Hole)]
    with_addr = _matching_templates(
        entry, "predicate_question", lit, lexicon, bound, lit.positive, True
    ) if addressee_name else []
    with_addr = [
        (t, a)
        for t, a in with_addr
        if any(isinstance(p, Slot) and p.kind == "ADDRESSEE" for p in t.parts())
    ]
    plain = _matching_templates(
        entry, "predicate_question", lit, lexicon, bound, lit.positive, False
    )
    pool = with_addr or plain
    if not pool:
        raise SpecError(f"no question template fits {lit!r} on {lit.schema.name}")
    template, args = pool[rng.randrange(len(pool))]
    text = _realize_production(template, entry, lexicon, args, addressee_name)
    if addressee_name and not with_addr:
        text = f"{addressee_name}, {text[0].lower()}{text[1:]}"
    return text


def _prefer_addressee(templates, addressee_name):
    with_addr = [
        t
        for t in templates
        if any(isinstance(p, Slot) and p.kind == "ADDRESSEE" for p in t.parts())
    ]
    without = [t for t in templates if t not in with_addr]
    if addressee_name and with_addr:
        return with_addr
    return without


def generate_statement(
    target,
    lexicon: Lexicon,
    rng: random.Random | None = None,
) -> str:
    """Statement text for a grounded literal or an (entity, attr, value)."""
    rng = rng or random.Random(0)
    if isinstance(target, tuple):
        entity_id, attribute, value = target
        entry = lexicon.entry_for("attribute", attribute)
        if entry is None:
            raise SpecError(f"no lexicon entry for attribute {attribute}")
        candidates = [t for t in entry.templates if t.nl_i == "attribute_answer"]
        candidates = _prefer_addressee(candidates, None)
        if not candidates:
            raise SpecError(f"no statement template for attribute {attribute}")
        value_entry = next(
            (e for e in lexicon.value_entries(attribute) if e.value == value), None
        )
        value_text = value_entry.surface if value_entry else str(value)
        template = rng.choice(candidates)
        n_slots = len(template.entity_slots())
        return _realize_production(
            template, entry, lexicon, [entity_id] * n_slots, None, value_text
        )
    lit: Literal = target
    if not lit.grounded:
        raise SpecError(f"cannot state a partial literal {lit!r}")
    entry = lexicon.entry_for("predicate", lit.schema.name)
    if entry is None:
        raise SpecError(f"no lexicon entry for predicate {lit.schema.name}")
    all_idx = list(range(lit.schema.arity))
    pool = _matching_templates(
        entry, "predicate_answer", lit, lexicon, all_idx, lit.positive, False
    )
    # bare statements only: confirmation-shaped texts ("yes, ...") belong to
    # the reply composer, which adds its own prefix
    pool = [(t, a) for t, a in pool if not t.text.lower().startswith(("yes", "no"))]
    if not pool:
        raise SpecError(f"no statement template fits {lit!r} on {lit.schema.name}")
    template, args = pool[rng.randrange(len(pool))]
    return _realize_production(template, entry, lexicon, args, None)
