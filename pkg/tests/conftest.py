import json

import pytest

from parley.domain import parse_domain_spec


def keys_spec_dict(extra_keys=(), agents=None):
    """The keys-and-safes micro domain used across planner and kb tests."""
    entities = [
        {"id": "Key_1", "type": "key"},
        {"id": "Key_2", "type": "key"},
        {"id": "Safe_1", "type": "safe"},
        {"id": "Safe_2", "type": "safe"},
    ]
    for key in extra_keys:
        entities.append({"id": key, "type": "key"})
    return {
        "format": 1,
        "entity_types": [{"name": "key"}, {"name": "safe"}],
        "entities": entities,
        "predicates": [
            {"name": "Have", "kind": "fluent", "slots": [{"name": "item", "types": ["key"]}]},
            {
                "name": "Opens",
                "kind": "knowledge",
                "slots": [
                    {"name": "key", "types": ["key"]},
                    {"name": "safe", "types": ["safe"]},
                ],
            },
            {"name": "Locked", "kind": "fluent", "slots": [{"name": "safe", "types": ["safe"]}]},
        ],
        "actions": [
            {
                "name": "Open",
                "params": [{"name": "X", "types": ["key"]}, {"name": "Y", "types": ["safe"]}],
                "preconditions": [
                    {"pred": "Locked", "args": ["Y"]},
                    {"pred": "Opens", "args": ["X", "Y"]},
                    {"pred": "Have", "args": ["X"]},
                ],
                "effects": [{"pred": "Locked", "args": ["Y"], "negated": True}],
                "controller": "interact",
            }
        ],
        "agents": agents or [],
    }


@pytest.fixture
def keys_domain():
    return parse_domain_spec(json.dumps(keys_spec_dict()))


def museum_spec_dict():
    return {
        "format": 1,
        "entity_types": [
            {"name": "statue", "attributes": [{"name": "material", "kind": "string"}]},
            {"name": "gallery"},
            {"name": "person"},
        ],
        "entities": [
            {"id": "Venus", "type": "statue", "attributes": {"material": "marble"}},
            {"id": "Lucy", "type": "statue", "attributes": {"material": "bronze"}},
            {"id": "GalleryA", "type": "gallery", "region": [[0, 0], [10, 0], [10, 10], [0, 10]]},
            {"id": "GalleryB", "type": "gallery", "region": [[12, 0], [22, 0], [22, 10], [12, 10]]},
            {"id": "agent_a", "type": "person", "position": [5, 5]},
        ],
        "predicates": [
            {
                "name": "InSpace",
                "kind": "knowledge",
                "observable": True,
                "functional_slot": "place",
                "slots": [
                    {"name": "thing", "types": ["statue"]},
                    {"name": "place", "types": ["gallery"]},
                ],
            },
            {
                "name": "Visited",
                "kind": "fluent",
                "slots": [
                    {"name": "who", "types": ["person"]},
                    {"name": "thing", "types": ["statue"]},
                ],
            },
        ],
        "actions": [
            {
                "name": "Visit",
                "params": [
                    {"name": "a", "types": ["person"]},
                    {"name": "s", "types": ["statue"]},
                    {"name": "g", "types": ["gallery"]},
                ],
                "preconditions": [{"pred": "InSpace", "args": ["s", "g"]}],
                "effects": [{"pred": "Visited", "args": ["a", "s"]}],
                "controller": "move_to",
                "target_param": "g",
            }
        ],
        "agents": [{"id": "agent_a"}],
    }


@pytest.fixture
def museum_domain():
    return parse_domain_spec(json.dumps(museum_spec_dict()))


def keys_lexicon_dict():
    """Surface forms for the keys-and-safes fixture conversations."""
    return {
        "format": 1,
        "entries": [
            {"surface": "key one", "refers_to": {"kind": "entity", "name": "Key_1"}},
            {"surface": "key two", "refers_to": {"kind": "entity", "name": "Key_2"}},
            {
                "surface": "master key",
                "def_article": True,
                "refers_to": {"kind": "entity", "name": "MasterKey"},
            },
            {"surface": "safe one", "refers_to": {"kind": "entity", "name": "Safe_1"}},
            {"surface": "safe two", "refers_to": {"kind": "entity", "name": "Safe_2"}},
            {
                "surface": "opens",
                "pos": "verb",
                "hints": ["open", "unlocks"],
                "refers_to": {"kind": "predicate", "name": "Opens"},
                "templates": [
                    {
                        "text": "does [PREDICATE-ENTITY:DEF-ARTICLE-NAME] open [PREDICATE-ENTITY:DEF-ARTICLE-NAME:safe]?",
                        "nl_i": "predicate_question",
                    },
                    {
                        "text": "which key [PREDICATE:NAME] [PREDICATE-ENTITY:DEF-ARTICLE-NAME:safe]?",
                        "nl_i": "predicate_question",
                    },
                    {
                        "text": "what [PREDICATE:NAME] [PREDICATE-ENTITY:DEF-ARTICLE-NAME:safe]?",
                        "nl_i": "predicate_question",
                    },
                    {
                        "text": "[PREDICATE-ENTITY:DEF-ARTICLE-NAME] [PREDICATE:NAME] [PREDICATE-ENTITY:DEF-ARTICLE-NAME:safe].",
                        "nl_i": "predicate_answer",
                    },
                    {
                        "text": "yes, [PREDICATE-ENTITY:DEF-ARTICLE-NAME] [PREDICATE:NAME] [PREDICATE-ENTITY:DEF-ARTICLE-NAME:safe].",
                        "nl_i": "predicate_answer",
                    },
                    {
                        "text": "[PREDICATE-ENTITY:DEF-ARTICLE-NAME] does not open [PREDICATE-ENTITY:DEF-ARTICLE-NAME:safe].",
                        "nl_i": "predicate_answer",
                        "negated": True,
                    },
                    {
                        "text": "no, [PREDICATE-ENTITY:DEF-ARTICLE-NAME] does not open [PREDICATE-ENTITY:DEF-ARTICLE-NAME:safe].",
                        "nl_i": "predicate_answer",
                        "negated": True,
                    },
                ],
            },
            {
                "surface": "locked",
                "pos": "adjective",
                "refers_to": {"kind": "predicate", "name": "Locked"},
                "templates": [
                    {
                        "text": "is [PREDICATE-ENTITY:DEF-ARTICLE-NAME] [PREDICATE:NAME]?",
                        "nl_i": "predicate_question",
                    },
                    {
                        "text": "[PREDICATE-ENTITY:DEF-ARTICLE-NAME] is [PREDICATE:NAME].",
                        "nl_i": "predicate_answer",
                    },
                    {
                        "text": "[PREDICATE-ENTITY:DEF-ARTICLE-NAME] is not [PREDICATE:NAME].",
                        "nl_i": "predicate_answer",
                        "negated": True,
                    },
                ],
            },
        ],
        "out_of_domain": {
            label: {"examples": [f"{label} filler {i}" for i in range(3)], "responses": ["Hm."]}
            for label in ("greeting", "thanks", "farewell", "affirmation")
        }
        | {
            "fallback": {
                "examples": ["blah blah", "blah blah blah", "mumble blah"],
                "responses": ["I'm sorry. I don't know."],
            }
        },
        # nothing in this domain has attributes; filler keeps label coverage
        "examples": [
            {"text": "what kind is it", "nl_i": "attribute_question"},
            {"text": "what sort is that", "nl_i": "attribute_question"},
            {"text": "it is some kind", "nl_i": "attribute_answer"},
            {"text": "that is the sort", "nl_i": "attribute_answer"},
        ],
    }


@pytest.fixture
def keys_nlu():
    """(domain-with-MasterKey, lexicon, model) for dialogue tests."""
    from parley.nlu import generate_training_data, parse_lexicon, train

    domain = parse_domain_spec(json.dumps(keys_spec_dict(extra_keys=["MasterKey"])))
    lexicon = parse_lexicon(keys_lexicon_dict())
    model = train(generate_training_data(lexicon, domain, rng_seed=0))
    return domain, lexicon, model
