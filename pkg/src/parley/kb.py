"""Per-agent belief store: three-valued truth, pattern queries, contradiction
handling, and asked-question bookkeeping.

Missing facts are UNKNOWN, never false. Asserting a fact retracts its direct
negation; for predicates with a functional slot it also retracts the previous
value (an exhibit is in one gallery at a time, so learning a new gallery
replaces the old one). A known value of a functional predicate additionally
implies FALSE for every other value of that slot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator

from .domain import DomainSpec, Hole, Literal, SpecError


class Truth(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


UNKNOWN = Truth.UNKNOWN


@dataclass
class ChangeReport:
    added: list[Literal] = field(default_factory=list)
    retracted: list[Literal] = field(default_factory=list)

    @property
    def changed(self) -> bool:
        return bool(self.added or self.retracted)


def _functional_key(lit: Literal) -> tuple | None:
    """Identity of a positive functional literal with the functional slot blanked."""
    f = lit.schema.functional_slot
    if f is None or not lit.positive:
        return None
    fixed = tuple(a for i, a in enumerate(lit.args) if i != f)
    if any(isinstance(a, Hole) for a in fixed):
        return None
    return (lit.schema.name, fixed)


class BeliefState:
    """All literals an agent knows to be true or false, plus attribute values."""

    def __init__(self, domain: DomainSpec):
        self.domain = domain
        # atom key -> (Literal, polarity); one entry per atom keeps a literal
        # and its negation from coexisting
        self._facts: dict[tuple, Literal] = {}
        # functional uniqueness index: blanked key -> stored positive literal
        self._functional: dict[tuple, Literal] = {}
        self._attributes: dict[tuple[str, str], Any] = {}
        self._asked: dict[tuple[str, str], float] = {}

    # -- truth ------------------------------------------------------------

    def truth(self, lit: Literal) -> Truth:
        if not lit.grounded:
            raise SpecError(f"truth() needs a grounded literal, got {lit!r}")
        stored = self._facts.get(lit.key())
        if stored is not None:
            return Truth.TRUE if stored.positive == lit.positive else Truth.FALSE
        fkey = _functional_key(lit if lit.positive else lit.negated())
        if fkey is not None:
            current = self._functional.get(fkey)
            if current is not None and current.args != lit.args:
                # a different value is known for this functional slot
                return Truth.FALSE if lit.positive else Truth.TRUE
        return Truth.UNKNOWN

    def holds(self, lit: Literal) -> bool:
        return self.truth(lit) is Truth.TRUE

    def falsity_blocker(self, lit: Literal) -> Literal | None:
        """The stored functional sibling that makes `lit` false by implication
        (rather than by an explicitly stored opposite), if there is one."""
        if lit.key() in self._facts:
            return None
        probe = lit if lit.positive else lit.negated()
        fkey = _functional_key(probe)
        if fkey is None:
            return None
        current = self._functional.get(fkey)
        if current is not None and current.args != lit.args:
            return current
        return None

    # -- assertion ----------------------------------------------------------

    def assert_belief(self, lit: Literal) -> ChangeReport:
        if not lit.grounded:
            raise SpecError(f"cannot assert partial literal {lit!r}")
        report = ChangeReport()
        key = lit.key()
        stored = self._facts.get(key)
        if stored is not None and stored.positive == lit.positive:
            return report  # idempotent
        if stored is not None:
            self._retract(stored, report)
        fkey = _functional_key(lit)
        if fkey is not None:
            conflict = self._functional.get(fkey)
            if conflict is not None and conflict.args != lit.args:
                self._retract(conflict, report)
        self._facts[key] = lit
        if fkey is not None:
            self._functional[fkey] = lit
        report.added.append(lit)
        return report

    def retract(self, lit: Literal) -> ChangeReport:
        report = ChangeReport()
        stored = self._facts.get(lit.key())
        if stored is not None and stored.positive == lit.positive:
            self._retract(stored, report)
        return report

    def _retract(self, stored: Literal, report: ChangeReport) -> None:
        del self._facts[stored.key()]
        fkey = _functional_key(stored)
        if fkey is not None and self._functional.get(fkey) is stored:
            del self._functional[fkey]
        report.retracted.append(stored)

    # -- queries -------------------------------------------------------------

    def query(self, pattern: Literal) -> list[dict[str, str]]:
        """Bindings whose instantiation matches the pattern's polarity.

        Positive patterns enumerate stored-true literals, negative ones
        stored-false; order is lexicographic by bound entity ids.
        """
        holes = pattern.holes()
        if not holes:
            return [{}] if self.truth(pattern) is Truth.TRUE else []
        results = []
        for stored in self._facts.values():
            if stored.schema.name != pattern.schema.name:
                continue
            if stored.positive != pattern.positive:
                continue
            binding: dict[str, str] = {}
            ok = True
            for pat_arg, arg in zip(pattern.args, stored.args):
                if isinstance(pat_arg, Hole):
                    if pat_arg.name in binding and binding[pat_arg.name] != arg:
                        ok = False
                        break
                    binding[pat_arg.name] = arg
                elif pat_arg != arg:
                    ok = False
                    break
            if ok:
                results.append(binding)
        results.sort(key=lambda b: tuple(b[h.name] for _, h in holes))
        return results

    def query_attribute(self, entity_id: str, attr: str) -> Any:
        ent = self.domain.entity(entity_id)
        if ent.type.attr_kind(attr) is None:
            raise SpecError(f"attribute {attr!r} not declared on type {ent.type.name}")
        return self._attributes.get((entity_id, attr), UNKNOWN)

    def set_attribute(self, entity_id: str, attr: str, value: Any) -> bool:
        """Store an attribute value; True if this changed the store."""
        ent = self.domain.entity(entity_id)
        if ent.type.attr_kind(attr) is None:
            raise SpecError(f"attribute {attr!r} not declared on type {ent.type.name}")
        key = (entity_id, attr)
        if self._attributes.get(key) == value:
            return False
        self._attributes[key] = value
        return True

    def literals(self) -> Iterator[Literal]:
        return iter(self._facts.values())

    def __len__(self) -> int:
        return len(self._facts)

    # -- asked-question bookkeeping -------------------------------------------

    def record_asked(self, question_key: str, addressee: str, now: float) -> None:
        self._asked[(question_key, addressee)] = now

    def was_recently_asked(
        self, question_key: str, addressee: str, now: float, cooldown: float
    ) -> bool:
        t = self._asked.get((question_key, addressee))
        return t is not None and (now - t) < cooldown

    # -- snapshots ---------------------------------------------------------------

    def to_snapshot(self) -> dict:
        from .domain import _literal_to_dict

        return {
            "beliefs": [_literal_to_dict(l) for l in sorted(self._facts.values(), key=repr)],
            "attributes": [
                {"entity": e, "attr": a, "value": v}
                for (e, a), v in sorted(self._attributes.items())
            ],
            "asked_log": [
                {"question": q, "addressee": a, "at": t}
                for (q, a), t in sorted(self._asked.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_snapshot(), indent=2)

    @classmethod
    def from_snapshot(cls, domain: DomainSpec, doc: dict) -> "BeliefState":
        kb = cls(domain)
        for raw in doc.get("beliefs", []):
            kb.assert_belief(
                domain.literal(raw["pred"], raw["args"], not raw.get("negated", False))
            )
        for raw in doc.get("attributes", []):
            kb.set_attribute(raw["entity"], raw["attr"], raw["value"])
        for raw in doc.get("asked_log", []):
            kb.record_asked(raw["question"], raw["addressee"], raw["at"])
        return kb

    def copy(self) -> "BeliefState":
        clone = BeliefState(self.domain)
        clone._facts = dict(self._facts)
        clone._functional = dict(self._functional)
        clone._attributes = dict(self._attributes)
        clone._asked = dict(self._asked)
        return clone
