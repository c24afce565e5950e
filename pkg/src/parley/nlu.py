"""Lexicon-driven shallow parsing: intent labels plus gazetteer entity spans.

The lexicon (see docs/lexicon-format.md) couples every domain object to its
surface forms and carries slot-markup sentence templates. Training sentences
are generated by binding template slots to compatible entities, a small
bag-of-words classifier assigns one of the nine intent labels, and entity
mentions are recovered by leftmost-longest gazetteer matching over surfaces
and hints.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from typing import Any, Iterable

from .domain import DomainSpec, SpecError

IN_DOMAIN_LABELS = (
    "predicate_question",
    "predicate_answer",
    "attribute_question",
    "attribute_answer",
)
OUT_OF_DOMAIN_LABELS = ("greeting", "thanks", "farewell", "affirmation", "fallback")
ALL_LABELS = IN_DOMAIN_LABELS + OUT_OF_DOMAIN_LABELS

SLOT_KINDS = (
    "PREDICATE",
    "PREDICATE-ENTITY",
    "ATTRIBUTE",
    "ATTRIBUTE-ENTITY",
    "ADDRESSEE",
)

_SLOT_RE = re.compile(r"\[([A-Z][A-Z0-9-]*(?::[A-Za-z0-9_-]+)*)\]")
_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class Slot:
    kind: str
    qualifiers: tuple[str, ...]

    @property
    def wants_article(self) -> bool:
        return "DEF-ARTICLE-NAME" in self.qualifiers

    @property
    def is_value(self) -> bool:
        return "VALUE" in self.qualifiers

    @property
    def type_filter(self) -> str | None:
        for q in self.qualifiers:
            if q not in ("NAME", "DEF-ARTICLE-NAME", "VALUE"):
                return q
        return None


@dataclass(frozen=True)
class ProductionTemplate:
    text: str
    nl_i: str
    positive: bool = True

    def parts(self) -> list[str | Slot]:
        """Alternating literal text and Slot pieces, validated."""
        pieces: list[str | Slot] = []
        pos = 0
        for m in _SLOT_RE.finditer(self.text):
            if m.start() > pos:
                pieces.append(self.text[pos : m.start()])
            fields = m.group(1).split(":")
            kind, quals = fields[0], tuple(fields[1:])
            if kind not in SLOT_KINDS:
                raise SpecError(f"unknown slot kind {kind!r} in template {self.text!r}")
            pieces.append(Slot(kind, quals))
            pos = m.end()
        if pos < len(self.text):
            pieces.append(self.text[pos:])
        return pieces

    def entity_slots(self) -> list[Slot]:
        return [
            p
            for p in self.parts()
            if isinstance(p, Slot) and p.kind in ("PREDICATE-ENTITY", "ATTRIBUTE-ENTITY")
        ]


@dataclass(frozen=True)
class LexEntry:
    surface: str
    refers_kind: str  # entity | predicate | attribute | value
    refers_to: str
    part_of_speech: str = "noun"
    hints: tuple[str, ...] = ()
    def_article: bool = False
    agent: bool = False  # entity entries naming agents double as addressees
    value: Any = None  # for refers_kind == "value": the attribute value
    templates: tuple[ProductionTemplate, ...] = ()

    def surfaces(self) -> tuple[str, ...]:
        return (self.surface,) + self.hints


@dataclass
class Lexicon:
    entries: list[LexEntry]
    out_of_domain_examples: dict[str, list[str]]
    out_of_domain_responses: dict[str, list[str]]
    no_knowledge: list[str] = field(default_factory=lambda: ["I'm sorry. I don't know."])
    # annotated sample sentences shipped verbatim with the lexicon
    extra_examples: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        self._by_ref: dict[tuple[str, str], LexEntry] = {}
        for e in self.entries:
            self._by_ref.setdefault((e.refers_kind, e.refers_to), e)
        self._gazetteer: list[tuple[tuple[str, ...], LexEntry]] = []
        for e in self.entries:
            for s in e.surfaces():
                toks = tuple(_TOKEN_RE.findall(s.lower()))
                if toks:
                    self._gazetteer.append((toks, e))
        # leftmost-longest matching wants longer token sequences first
        self._gazetteer.sort(key=lambda item: (-len(item[0]), item[0]))

    def entry_for(self, kind: str, name: str) -> LexEntry | None:
        return self._by_ref.get((kind, name))

    def entity_entry(self, entity_id: str) -> LexEntry | None:
        return self.entry_for("entity", entity_id)

    def templates_for(self, kind: str, name: str, nl_i: str) -> list[ProductionTemplate]:
        entry = self.entry_for(kind, name)
        if entry is None:
            return []
        return [t for t in entry.templates if t.nl_i == nl_i]

    def value_entries(self, attribute: str) -> list[LexEntry]:
        return [
            e for e in self.entries if e.refers_kind == "value" and e.refers_to == attribute
        ]


def parse_lexicon(doc: dict) -> Lexicon:
    if doc.get("format") != 1:
        raise SpecError(f"unsupported lexicon format {doc.get('format')!r}")
    entries = []
    for raw in doc.get("entries", []):
        ref = raw["refers_to"]
        kind = ref["kind"]
        if kind not in ("entity", "predicate", "attribute", "value"):
            raise SpecError(f"bad refers_to kind {kind!r} for {raw.get('surface')!r}")
        templates = tuple(
            ProductionTemplate(t["text"], t["nl_i"], not t.get("negated", False))
            for t in raw.get("templates", [])
        )
        for t in templates:
            if t.nl_i not in ALL_LABELS:
                raise SpecError(f"unknown intent label {t.nl_i!r} in lexicon")
            t.parts()  # validates the slot markup
        entries.append(
            LexEntry(
                surface=raw["surface"],
                refers_kind=kind,
                refers_to=ref.get("name", ref.get("attribute", "")),
                part_of_speech=raw.get("pos", "noun"),
                hints=tuple(raw.get("hints", [])),
                def_article=raw.get("def_article", False),
                agent=raw.get("agent", False),
                value=ref.get("value"),
                templates=templates,
            )
        )
    ood = doc.get("out_of_domain", {})
    examples = {}
    responses = {}
    for label in OUT_OF_DOMAIN_LABELS:
        section = ood.get(label, {})
        examples[label] = list(section.get("examples", []))
        responses[label] = list(section.get("responses", []))
    extra = []
    for raw in doc.get("examples", []):
        if raw["nl_i"] not in ALL_LABELS:
            raise SpecError(f"unknown intent label {raw['nl_i']!r} in lexicon examples")
        extra.append((raw["text"], raw["nl_i"]))
    return Lexicon(
        entries,
        examples,
        responses,
        list(doc.get("no_knowledge", ["I'm sorry. I don't know."])),
        extra,
    )


def validate_lexicon(lexicon: Lexicon, domain: DomainSpec) -> list[str]:
    """Coverage problems; every entity in the domain needs a surface form."""
    problems = []
    for ent in domain.entities:
        if lexicon.entity_entry(ent.id) is None:
            problems.append(f"entity {ent.id} has no lexicon entry")
    for label in OUT_OF_DOMAIN_LABELS:
        if not lexicon.out_of_domain_examples.get(label):
            problems.append(f"no out-of-domain examples for {label!r}")
    return problems


# ---------------------------------------------------------------------------
# Surface realization (shared with the generation module)
# ---------------------------------------------------------------------------


def entity_surface(lexicon: Lexicon, entity_id: str, with_article: bool) -> str:
    entry = lexicon.entity_entry(entity_id)
    if entry is None:
        raise SpecError(f"no lexicon entry for entity {entity_id}")
    if with_article and entry.def_article:
        return f"the {entry.surface}"
    return entry.surface


def _assign_entity_slots(slots: list[Slot], schema, domain: DomainSpec) -> list[int] | None:
    """Map template entity slots to schema slot indices, in order, honoring
    type filters; None when the template cannot fit the schema."""
    assignment = []
    pointer = 0
    for slot in slots:
        found = None
        for idx in range(pointer, len(schema.slots)):
            allowed = schema.slots[idx].types
            if slot.type_filter is not None:
                if slot.type_filter.lower() not in {t.lower() for t in allowed}:
                    continue
            found = idx
            break
        if found is None:
            return None
        assignment.append(found)
        pointer = found + 1
    return assignment


# ---------------------------------------------------------------------------
# Training data generation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NLESpan:
    start: int
    end: int
    nle_type: str  # knowledge_entity | predicate_type | attribute_type | attribute_instance | addressee
    ref: str


@dataclass(frozen=True)
class TrainingExample:
    text: str
    nl_i: str
    spans: tuple[NLESpan, ...] = ()


def _realize(
    template: ProductionTemplate,
    lexicon: Lexicon,
    owner: LexEntry,
    fillers: dict,
) -> TrainingExample | None:
    """Render a template; fillers supply entity ids/values per slot index.

    Fixed template text mentioning one of the owning entry's surface forms
    ("where", "made of") is annotated too; those words are the trigger that
    names the predicate or attribute."""
    owner_type = "predicate_type" if owner.refers_kind == "predicate" else "attribute_type"
    owner_forms = sorted(owner.surfaces(), key=len, reverse=True)
    pieces = template.parts()
    out = []
    spans = []
    length = 0
    entity_i = 0
    for piece in pieces:
        if isinstance(piece, str):
            taken: list[tuple[int, int]] = []
            for form in owner_forms:
                for m in re.finditer(rf"(?<![a-z0-9]){re.escape(form.lower())}(?![a-z0-9])", piece.lower()):
                    if any(m.start() < e and s < m.end() for s, e in taken):
                        continue
                    taken.append((m.start(), m.end()))
                    spans.append(
                        NLESpan(length + m.start(), length + m.end(), owner_type, owner.refers_to)
                    )
            out.append(piece)
            length += len(piece)
            continue
        if piece.kind in ("PREDICATE", "ATTRIBUTE"):
            if piece.is_value:
                value_entry = fillers.get("value")
                if value_entry is None:
                    return None
                text = value_entry.surface
                nle = ("attribute_instance", f"{value_entry.refers_to}={value_entry.value}")
            else:
                text = owner.surface
                nle = (
                    "predicate_type" if piece.kind == "PREDICATE" else "attribute_type",
                    owner.refers_to,
                )
        elif piece.kind in ("PREDICATE-ENTITY", "ATTRIBUTE-ENTITY"):
            entity_id = fillers["entities"][entity_i]
            entity_i += 1
            text = entity_surface(lexicon, entity_id, piece.wants_article)
            nle = ("knowledge_entity", entity_id)
        else:  # ADDRESSEE
            name_entry = fillers.get("addressee")
            if name_entry is None:
                return None
            text = name_entry.surface
            nle = ("addressee", name_entry.refers_to)
        spans.append(NLESpan(length, length + len(text), nle[0], nle[1]))
        out.append(text)
        length += len(text)
    return TrainingExample("".join(out), template.nl_i, tuple(spans))


def generate_training_data(
    lexicon: Lexicon,
    domain: DomainSpec,
    rng_seed: int = 0,
    cap_per_label: int = 40,
) -> list[TrainingExample]:
    """Every template crossed with compatible entity bindings, capped per
    intent label with seed-stable sampling."""
    import itertools

    rng = random.Random(rng_seed)
    # candidates grouped per template so the cap keeps every surface
    # pattern represented instead of drowning rare ones
    by_label: dict[str, list[list[TrainingExample]]] = {label: [] for label in ALL_LABELS}
    agent_entries = [e for e in lexicon.entries if e.agent]
    for entry in lexicon.entries:
        for template in entry.templates:
            group: list[TrainingExample] = []
            by_label[template.nl_i].append(group)
            ent_slots = template.entity_slots()
            if entry.refers_kind == "predicate":
                schema = domain.schema(entry.refers_to)
                assignment = _assign_entity_slots(ent_slots, schema, domain)
                if assignment is None:
                    continue
                pools = []
                viable = True
                for slot, idx in zip(ent_slots, assignment):
                    allowed = schema.slots[idx].types
                    pool = [e.id for e in domain.entities_of_types(allowed)]
                    if slot.type_filter:
                        pool = [
                            eid
                            for eid in pool
                            if domain.entity(eid).type.name.lower() == slot.type_filter.lower()
                        ]
                    pool = [eid for eid in pool if lexicon.entity_entry(eid)]
                    if not pool:
                        viable = False
                        break
                    pools.append(pool)
                if not viable:
                    continue
                for combo in itertools.product(*pools):
                    example = _realize(template, lexicon, entry, {"entities": list(combo)})
                    if example is not None:
                        group.append(example)
            elif entry.refers_kind == "attribute":
                attr = entry.refers_to
                holders = [
                    e.id
                    for e in domain.entities
                    if e.type.attr_kind(attr) is not None and lexicon.entity_entry(e.id)
                ]
                holders.sort()
                values = lexicon.value_entries(attr) or [None]
                for holder in holders:
                    for value_entry in values:
                        fillers = {"entities": [holder] * max(1, len(ent_slots))}
                        if value_entry is not None:
                            fillers["value"] = value_entry
                        example = _realize(template, lexicon, entry, fillers)
                        if example is not None:
                            group.append(example)
    # vocative prefixes teach the addressee position, two per sentence shape
    for label in IN_DOMAIN_LABELS:
        if not agent_entries:
            continue
        vocatives: list[TrainingExample] = []
        for group in list(by_label[label]):
            for example in group[:2]:
                if example.spans and example.spans[0].nle_type == "addressee":
                    continue  # template already carries its own vocative
                name = rng.choice(agent_entries)
                shift = len(name.surface) + 2
                spans = (NLESpan(0, len(name.surface), "addressee", name.refers_to),) + tuple(
                    NLESpan(s.start + shift, s.end + shift, s.nle_type, s.ref)
                    for s in example.spans
                )
                vocatives.append(
                    TrainingExample(f"{name.surface}, {example.text}", label, spans)
                )
        if vocatives:
            by_label[label].append(vocatives)
    for label in OUT_OF_DOMAIN_LABELS:
        by_label[label].append(
            [TrainingExample(t, label) for t in lexicon.out_of_domain_examples.get(label, [])]
        )
    for text, label in lexicon.extra_examples:
        by_label[label].append([TrainingExample(text, label)])
    result = []
    for label in ALL_LABELS:
        groups = [list(g) for g in by_label[label] if g]
        total = sum(len(g) for g in groups)
        if total <= cap_per_label:
            for g in groups:
                result.extend(g)
            continue
        for g in groups:
            rng.shuffle(g)
        picked: list[TrainingExample] = []
        gi = 0
        while len(picked) < cap_per_label and groups:
            group = groups[gi % len(groups)]
            picked.append(group.pop())
            if not group:
                groups.remove(group)
            else:
                gi += 1
        result.extend(picked)
    return result


def split_examples(
    examples: list[TrainingExample], seed: int, fraction: float = 0.5
) -> tuple[list[TrainingExample], list[TrainingExample]]:
    """Seed-stable 50/50 split, stratified by label and sentence shape.

    Shape stratification keeps each delexicalized pattern represented on
    both sides (with different entities bound), so the held-out half
    exercises entity extraction and slot filling rather than punishing the
    classifier for sentence shapes it was never allowed to see."""
    rng = random.Random(seed)
    by_shape: dict[tuple[str, str], list[TrainingExample]] = {}
    for e in examples:
        key = (e.nl_i, " ".join(tokenize(_mask_training_text(e))))
        by_shape.setdefault(key, []).append(e)
    train_half: list[TrainingExample] = []
    held_out: list[TrainingExample] = []
    for key in sorted(by_shape):
        group = list(by_shape[key])
        rng.shuffle(group)
        cut = max(1, int(round(len(group) * fraction)))
        train_half.extend(group[:cut])
        held_out.extend(group[cut:])
    return train_half, held_out


# ---------------------------------------------------------------------------
# Intent classification: multinomial bag of words, add-one smoothing
# ---------------------------------------------------------------------------


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


# entity, value, and addressee mentions carry no intent signal; both the
# trainer and the parser replace them with placeholder tokens so the model
# learns sentence shapes instead of proper names
_MASKED_NLE_TYPES = {
    "knowledge_entity": "xent",
    "attribute_instance": "xval",
    "addressee": "xaddr",
}


def _mask_training_text(example: "TrainingExample") -> str:
    spans = sorted(
        (s for s in example.spans if s.nle_type in _MASKED_NLE_TYPES),
        key=lambda s: s.start,
        reverse=True,
    )
    text = example.text
    for s in spans:
        text = text[: s.start] + f" {_MASKED_NLE_TYPES[s.nle_type]} " + text[s.end :]
    return text


def _masked_tokens(text: str, nles: tuple["NLEMatch", ...]) -> list[str]:
    tokens = tokenize(text)
    replaced: dict[int, str | None] = {}
    for m in nles:
        if m.nle_type not in _MASKED_NLE_TYPES:
            continue
        replaced[m.start] = _MASKED_NLE_TYPES[m.nle_type]
        for i in range(m.start + 1, m.end):
            replaced[i] = None
    out = []
    for i, tok in enumerate(tokens):
        if i in replaced:
            if replaced[i] is not None:
                out.append(replaced[i])
        else:
            out.append(tok)
    return out


def _features(tokens: list[str]) -> list[str]:
    """Unigrams, bigrams, and sentence-boundary markers; the boundary
    features separate question word order from statement word order."""
    feats = tokens + [f"{a}_{b}" for a, b in zip(tokens, tokens[1:])]
    if tokens:
        feats.append(f"^{tokens[0]}")
        feats.append(f"{tokens[-1]}$")
    if len(tokens) >= 2:
        feats.append(f"^{tokens[0]}_{tokens[1]}")
    return feats


@dataclass
class IntentModel:
    labels: tuple[str, ...]
    log_prior: dict[str, float]
    log_likelihood: dict[str, dict[str, float]]  # label -> feature -> logp
    default_loglik: dict[str, float]  # unseen-feature smoothing per label
    vocabulary: frozenset[str]

    def scores(self, tokens: list[str]) -> dict[str, float]:
        feats = [f for f in _features(tokens) if f in self.vocabulary]
        scores = {}
        for label in self.labels:
            s = self.log_prior[label]
            table = self.log_likelihood[label]
            fallback = self.default_loglik[label]
            for f in feats:
                s += table.get(f, fallback)
            scores[label] = s
        return scores

    def classify(
        self, tokens: list[str], allowed: tuple[str, ...] | None = None
    ) -> tuple[str, float]:
        allowed = allowed or self.labels
        scores = {l: s for l, s in self.scores(tokens).items() if l in allowed}
        best = max(allowed, key=lambda l: (scores[l], l))
        m = max(scores.values())
        total = sum(math.exp(s - m) for s in scores.values())
        confidence = math.exp(scores[best] - m) / total
        return best, confidence


def train(examples: Iterable[TrainingExample]) -> IntentModel:
    """Fit the classifier; every one of the nine labels must be covered."""
    examples = list(examples)
    present = {e.nl_i for e in examples}
    missing = [label for label in ALL_LABELS if label not in present]
    if missing:
        raise SpecError(f"missing training coverage for labels: {', '.join(missing)}")
    counts: dict[str, dict[str, int]] = {label: {} for label in ALL_LABELS}
    label_examples = {label: 0 for label in ALL_LABELS}
    vocabulary = set()
    for example in examples:
        label_examples[example.nl_i] += 1
        for f in _features(tokenize(_mask_training_text(example))):
            vocabulary.add(f)
            counts[example.nl_i][f] = counts[example.nl_i].get(f, 0) + 1
    v = len(vocabulary) or 1
    # class-balanced prior: per-label example counts reflect template
    # combinatorics, not how often each intent occurs in conversation
    log_prior = {label: math.log(1.0 / len(ALL_LABELS)) for label in ALL_LABELS}
    log_likelihood = {}
    default_loglik = {}
    for label in ALL_LABELS:
        n = sum(counts[label].values())
        log_likelihood[label] = {
            f: math.log((c + 1) / (n + v)) for f, c in counts[label].items()
        }
        default_loglik[label] = math.log(1 / (n + v))
    return IntentModel(ALL_LABELS, log_prior, log_likelihood, default_loglik, frozenset(vocabulary))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NLEMatch:
    nle_type: str
    ref: str
    surface: str
    start: int  # token index
    end: int


@dataclass(frozen=True)
class ParsedUtterance:
    nl_i: str
    confidence: float
    nles: tuple[NLEMatch, ...]
    negated: bool = False
    text: str = ""


def extract_entities(
    lexicon: Lexicon, text: str, extra_names: dict[str, str] | None = None
) -> tuple[NLEMatch, ...]:
    """Leftmost-longest, non-overlapping gazetteer scan over surface forms."""
    tokens = tokenize(text)
    extra = []
    if extra_names:
        for name, ref in extra_names.items():
            toks = tuple(tokenize(name))
            if toks:
                entry = LexEntry(name, "entity", ref, agent=True)
                extra.append((toks, entry))
    gazetteer = sorted(
        list(lexicon._gazetteer) + extra, key=lambda item: (-len(item[0]), item[0])
    )
    matches = []
    i = 0
    n = len(tokens)
    while i < n:
        hit = None
        for toks, entry in gazetteer:
            if tuple(tokens[i : i + len(toks)]) == toks:
                hit = (toks, entry)
                break
        if hit is None:
            i += 1
            continue
        toks, entry = hit
        end = i + len(toks)
        if entry.refers_kind == "entity":
            vocative = entry.agent and (i == 0 or end == n)
            nle_type = "addressee" if vocative else "knowledge_entity"
            ref = entry.refers_to
        elif entry.refers_kind == "predicate":
            nle_type, ref = "predicate_type", entry.refers_to
        elif entry.refers_kind == "attribute":
            nle_type, ref = "attribute_type", entry.refers_to
        else:
            nle_type, ref = "attribute_instance", f"{entry.refers_to}={entry.value}"
        matches.append(NLEMatch(nle_type, ref, " ".join(toks), i, end))
        i = end
    return tuple(matches)


def parse(
    model: IntentModel,
    lexicon: Lexicon,
    text: str,
    threshold: float = 0.4,
    extra_names: dict[str, str] | None = None,
) -> ParsedUtterance:
    tokens = tokenize(text)
    if not tokens:
        return ParsedUtterance("fallback", 1.0, (), text=text)
    nles = extract_entities(lexicon, text, extra_names)
    masked = _masked_tokens(text, nles)
    # an utterance naming no domain object cannot be an in-domain intent,
    # whatever the word statistics suggest
    if any(m.nle_type != "addressee" for m in nles):
        label, confidence = model.classify(masked)
    else:
        label, confidence = model.classify(masked, allowed=OUT_OF_DOMAIN_LABELS)
    if confidence < threshold:
        label = "fallback"
    negated = "not" in tokens or tokens[0] == "no"
    return ParsedUtterance(label, confidence, nles, negated, text)
