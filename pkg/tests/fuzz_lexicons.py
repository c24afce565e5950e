"""Generic lexicon synthesis for random micro domains, used by the
generation/parsing round-trip fuzz."""

from __future__ import annotations

from parley.domain import DomainSpec
from parley.scenarios import _OOD_SECTIONS, _number_word

_PRED_SURFACES = ["foo", "bar", "baz"]


def fuzz_lexicon_doc(domain: DomainSpec) -> dict:
    entries = []
    for ent in domain.entities:
        idx = int(ent.id[1:]) if ent.id[1:].isdigit() else 0
        entries.append(
            {
                "surface": f"item {_number_word(idx)}",
                "refers_to": {"kind": "entity", "name": ent.id},
            }
        )
    for i, pred in enumerate(domain.predicates):
        surface = _PRED_SURFACES[i % len(_PRED_SURFACES)]
        if pred.arity == 1:
            templates = [
                {"text": f"is [PREDICATE-ENTITY] {surface}?", "nl_i": "predicate_question"},
                {"text": f"which item is [PREDICATE:NAME]?", "nl_i": "predicate_question"},
                {"text": f"[PREDICATE-ENTITY] is [PREDICATE:NAME].", "nl_i": "predicate_answer"},
                {
                    "text": f"[PREDICATE-ENTITY] is not [PREDICATE:NAME].",
                    "nl_i": "predicate_answer",
                    "negated": True,
                },
            ]
        else:
            templates = [
                {
                    "text": f"does [PREDICATE-ENTITY] {surface} [PREDICATE-ENTITY]?",
                    "nl_i": "predicate_question",
                },
                {
                    "text": f"what does {surface} [PREDICATE-ENTITY]?",
                    "nl_i": "predicate_question",
                },
                {
                    "text": f"[PREDICATE-ENTITY] [PREDICATE:NAME] [PREDICATE-ENTITY].",
                    "nl_i": "predicate_answer",
                },
                {
                    "text": f"[PREDICATE-ENTITY] does not {surface} [PREDICATE-ENTITY].",
                    "nl_i": "predicate_answer",
                    "negated": True,
                },
            ]
        entries.append(
            {
                "surface": f"{surface}s",
                "pos": "verb",
                "hints": [surface],
                "refers_to": {"kind": "predicate", "name": pred.name},
                "templates": templates,
            }
        )
    return {
        "format": 1,
        "entries": entries,
        "out_of_domain": _OOD_SECTIONS,
        "examples": [
            {"text": "what kind is it", "nl_i": "attribute_question"},
            {"text": "what sort is that", "nl_i": "attribute_question"},
            {"text": "it is some kind", "nl_i": "attribute_answer"},
            {"text": "that is the sort", "nl_i": "attribute_answer"},
        ],
    }
