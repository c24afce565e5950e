"""Mapping parsed utterances onto the knowledge base, and composing replies.

An utterance becomes one of: an information question (a query literal with a
hole), a confirmation question (complete literal), a statement to absorb, an
attribute question, out-of-domain chat, or noise. Replies re-use the
generation templates so everything an agent says can be understood by every
other agent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any

from .domain import DomainSpec, Hole, Literal
from .kb import BeliefState, ChangeReport, Truth
from .nlg import generate_statement
from .nlu import IN_DOMAIN_LABELS, Lexicon, ParsedUtterance


@dataclass(frozen=True)
class UtteranceMeaning:
    kind: str  # info_question | confirm_question | statement | attr_question |
    #            attr_statement | out_of_domain | unintelligible
    literal: Literal | None = None
    entity: str | None = None
    attribute: str | None = None
    value: Any = None
    nl_i: str | None = None
    addressee: str | None = None


def _fill_slots(
    domain: DomainSpec, pred: str, entities: list[str]
) -> Literal | None:
    """Entities in utterance order fill the schema's slots in order; the
    first type-compatible open slot wins. Unfilled slots become holes."""
    schema = domain.schema(pred)
    args: list[Any] = [None] * schema.arity
    for eid in entities:
        etype = domain.entity(eid).type.name
        for i, slot in enumerate(schema.slots):
            if args[i] is not None:
                continue
            if slot.types and etype not in slot.types:
                continue
            args[i] = eid
            break
        else:
            return None  # an entity that fits nowhere: not this predicate
    final = [
        a if a is not None else Hole(schema.slots[i].name) for i, a in enumerate(args)
    ]
    return Literal(schema, tuple(final), True)


def _infer_predicate(domain: DomainSpec, entities: list[str]) -> Literal | None:
    """The unique schema accepting all named entities, if there is one."""
    candidates = []
    for schema in domain.predicates:
        lit = _fill_slots(domain, schema.name, entities)
        if lit is not None and len(entities) == schema.arity:
            candidates.append(lit)
    if len(candidates) == 1:
        return candidates[0]
    return None


def interpret(
    parsed: ParsedUtterance, domain: DomainSpec, kb: BeliefState
) -> UtteranceMeaning:
    addressee = next((m.ref for m in parsed.nles if m.nle_type == "addressee"), None)
    if parsed.nl_i not in IN_DOMAIN_LABELS:
        return UtteranceMeaning("out_of_domain", nl_i=parsed.nl_i, addressee=addressee)

    entities = [m.ref for m in parsed.nles if m.nle_type == "knowledge_entity"]
    predicates = [m.ref for m in parsed.nles if m.nle_type == "predicate_type"]
    attributes = [m.ref for m in parsed.nles if m.nle_type == "attribute_type"]
    values = [m.ref for m in parsed.nles if m.nle_type == "attribute_instance"]

    if parsed.nl_i == "attribute_question":
        if attributes and entities:
            attr = attributes[0]
            holder = next(
                (e for e in entities if domain.entity(e).type.attr_kind(attr)), None
            )
            if holder is not None:
                return UtteranceMeaning(
                    "attr_question", entity=holder, attribute=attr, addressee=addressee
                )
        return UtteranceMeaning("unintelligible", nl_i=parsed.nl_i, addressee=addressee)

    if parsed.nl_i == "attribute_answer":
        if entities and (attributes or values):
            attr = attributes[0] if attributes else values[0].split("=", 1)[0]
            holder = next(
                (e for e in entities if domain.entity(e).type.attr_kind(attr)), None
            )
            value = values[0].split("=", 1)[1] if values else None
            if holder is not None and value is not None:
                return UtteranceMeaning(
                    "attr_statement",
                    entity=holder,
                    attribute=attr,
                    value=value,
                    addressee=addressee,
                )
        return UtteranceMeaning("unintelligible", nl_i=parsed.nl_i, addressee=addressee)

    # predicate question / answer
    literal = None
    if predicates:
        literal = _fill_slots(domain, predicates[0], entities)
    elif entities:
        literal = _infer_predicate(domain, entities)
    if literal is None:
        return UtteranceMeaning("unintelligible", nl_i=parsed.nl_i, addressee=addressee)
    if parsed.negated:
        literal = literal.negated()
    if parsed.nl_i == "predicate_question":
        if literal.grounded:
            return UtteranceMeaning("confirm_question", literal=literal, addressee=addressee)
        return UtteranceMeaning("info_question", literal=literal, addressee=addressee)
    if literal.grounded:
        return UtteranceMeaning("statement", literal=literal, addressee=addressee)
    return UtteranceMeaning("unintelligible", nl_i=parsed.nl_i, addressee=addressee)


@dataclass
class Response:
    texts: list[str] = field(default_factory=list)
    changes: ChangeReport = field(default_factory=ChangeReport)
    answered_question: bool = False


def absorb(meaning: UtteranceMeaning, kb: BeliefState) -> ChangeReport:
    """Store a statement's content; the caller forwards changes to the
    planner as new-belief events."""
    if meaning.kind == "statement":
        return kb.assert_belief(meaning.literal)
    if meaning.kind == "attr_statement":
        changed = kb.set_attribute(meaning.entity, meaning.attribute, meaning.value)
        report = ChangeReport()
        if changed:
            report.added.append(None)  # attribute change carries no literal
        return report
    return ChangeReport()


def respond(
    meaning: UtteranceMeaning,
    kb: BeliefState,
    lexicon: Lexicon,
    rng: random.Random | None = None,
) -> Response:
    """Reply texts plus any knowledge-base changes the utterance caused."""
    rng = rng or random.Random(0)
    out = Response()
    if meaning.kind == "confirm_question":
        truth = kb.truth(meaning.literal)
        if truth is Truth.UNKNOWN:
            out.texts.append(rng.choice(lexicon.no_knowledge))
        else:
            confirmed = meaning.literal if truth is Truth.TRUE else meaning.literal.negated()
            prefix = "Yes, " if truth is Truth.TRUE else "No, "
            sentence = generate_statement(confirmed, lexicon, rng)
            out.texts.append(prefix + sentence[0].lower() + sentence[1:])
            out.answered_question = True
    elif meaning.kind == "info_question":
        bindings = kb.query(meaning.literal)
        if not bindings:
            out.texts.append(rng.choice(lexicon.no_knowledge))
        else:
            for binding in bindings:
                grounded = meaning.literal.substitute(binding)
                out.texts.append(generate_statement(grounded, lexicon, rng))
            out.answered_question = True
    elif meaning.kind == "attr_question":
        value = kb.query_attribute(meaning.entity, meaning.attribute)
        if value is Truth.UNKNOWN:
            out.texts.append(rng.choice(lexicon.no_knowledge))
        else:
            out.texts.append(
                generate_statement(
                    (meaning.entity, meaning.attribute, value), lexicon, rng
                )
            )
            out.answered_question = True
    elif meaning.kind in ("statement", "attr_statement"):
        out.changes = absorb(meaning, kb)
    elif meaning.kind == "out_of_domain":
        canned = lexicon.out_of_domain_responses.get(meaning.nl_i or "fallback") or (
            lexicon.out_of_domain_responses.get("fallback") or ["I'm sorry. I don't know."]
        )
        out.texts.append(rng.choice(canned))
    else:  # unintelligible
        canned = lexicon.out_of_domain_responses.get("fallback") or [
            "I'm sorry. I don't know."
        ]
        out.texts.append(rng.choice(canned))
    return out
