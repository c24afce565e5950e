"""Two-stage action planning under incomplete knowledge.

Stage 1 runs a least-commitment backward search from the agent's desires,
producing a plan template: an ordered action skeleton, candidate sets for
any arguments left unbound, and an uncertainty set of knowledge literals the
agent cannot currently decide. Stage 2 grounds the template into candidate
plans ranked by how much uncertainty each binding leaves, inserting one
resolution step (ask someone, or go look) per still-unknown literal.

Execution feedback re-enters through `advance`, which switches bindings on
failure, absorbs new beliefs by re-ranking the remaining bindings, and backs
off to earlier search branches when a template is exhausted.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from typing import Any, Iterator

from .domain import ActionSchema, DomainSpec, Hole, Literal
from .kb import BeliefState, Truth


@dataclass
class PlannerConfig:
    depth_limit: int = 32
    binding_cap: int = 10_000
    retry_wait: float = 5.0
    # search expansions per stage-1 invocation; proofs of unsolvability on
    # adversarial domains are cut off rather than left to run for seconds
    node_budget: int = 30_000


@dataclass(frozen=True)
class NoPlan:
    reason: str
    desire: Literal | None = None


@dataclass
class TemplateStep:
    action: ActionSchema
    binding: dict[str, str]  # param -> entity id
    unbound: dict[str, str]  # param -> k-var key


@dataclass
class PlanTemplate:
    steps: list[TemplateStep]  # execution order
    desires: list[Literal]
    kvars: list[str]
    kvar_origin: dict[str, tuple[int, str]]  # kvar -> (step index, param)
    candidates: dict[str, list[str]]
    # (literal over kvars, indices of the steps needing it); an empty index
    # tuple marks a desire-level unknown, needed before anything runs
    uncertainty: list[tuple[Literal, tuple[int, ...]]]
    truncated: bool = False

    @property
    def unbound_args(self) -> list[tuple[int, str]]:
        return [self.kvar_origin[k] for k in self.kvars]


@dataclass
class ResolutionAction:
    """Inserted step that resolves one unknown literal before it is needed."""

    target: Literal  # grounded under the plan's binding
    question_form: Literal  # slot-named holes at the formerly unbound args
    strategy: str | None = None  # "ask" | "explore", chosen at execution
    resolved: bool = False


@dataclass
class BoundStep:
    action: ActionSchema
    binding: dict[str, str]

    def precondition_literals(self) -> list[Literal]:
        return [p.substitute(self.binding) for p in self.action.preconditions]

    def effect_literals(self) -> list[Literal]:
        return [e.substitute(self.binding) for e in self.action.effects]


@dataclass
class GroundedPlan:
    binding: dict[str, str]  # kvar -> entity id
    uncertainty_count: int
    steps: list[Any]  # BoundStep | ResolutionAction, execution order

    @property
    def key(self) -> tuple[str, ...]:
        return tuple(self.binding[k] for k in sorted(self.binding))


@dataclass
class Directive:
    kind: str  # continue | rebind | backtrack | fail_and_wait | done
    plan: GroundedPlan | None = None


@dataclass
class PlanTrace:
    """One planning event, exportable as a newline-delimited JSON record."""

    stage1_us: float = 0.0
    stage2_us: float = 0.0
    template_size: int = 0
    unbound: int = 0
    uncertainty: int = 0
    bindings: int = 0
    chosen: tuple[str, ...] = ()
    kind: str = "plan"  # plan | replan | rescore

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "stage1_us": round(self.stage1_us, 3),
                "stage2_us": round(self.stage2_us, 3),
                "template_size": self.template_size,
                "unbound": self.unbound,
                "uncertainty": self.uncertainty,
                "bindings": self.bindings,
                "chosen": list(self.chosen),
            }
        )


# ---------------------------------------------------------------------------
# Stage 1: backward search for plan templates
# ---------------------------------------------------------------------------


def _unify(effect: Literal, goal: Literal) -> dict[str, str] | None:
    """Bind effect params against a grounded goal literal, or None."""
    if effect.schema.name != goal.schema.name or effect.positive != goal.positive:
        return None
    binding: dict[str, str] = {}
    for earg, garg in zip(effect.args, goal.args):
        if isinstance(earg, Hole):
            if binding.get(earg.name, garg) != garg:
                return None
            binding[earg.name] = garg
        elif earg != garg:
            return None
    return binding


def _unifiers(effect: Literal, goal: Literal):
    """All ways `effect` can achieve `goal`, as (binding, exclusions) pairs.

    Besides literal unification, a positive effect on a functional predicate
    achieves the negation of a different value of that slot: asserting
    InSpace(x, A) makes InSpace(x, B) false. The exclusion map records params
    that must not bind the negated value.
    """
    direct = _unify(effect, goal)
    if direct is not None:
        yield direct, {}
    if goal.positive or not effect.positive:
        return
    if effect.schema.name != goal.schema.name:
        return
    f = goal.schema.functional_slot
    if f is None:
        return
    binding: dict[str, str] = {}
    exclusions: dict[str, str] = {}
    for i, (earg, garg) in enumerate(zip(effect.args, goal.args)):
        if i == f:
            if isinstance(earg, Hole):
                exclusions[earg.name] = garg
            elif earg == garg:
                return
        elif isinstance(earg, Hole):
            if binding.get(earg.name, garg) != garg:
                return
            binding[earg.name] = garg
        elif earg != garg:
            return
    for param, forbidden in list(exclusions.items()):
        if param in binding:
            if binding[param] == forbidden:
                return
            del exclusions[param]
    yield binding, exclusions


class _Searcher:
    """Backward-search state shared across one stage-1 invocation.

    Internal step records travel in reverse execution order as tuples of
    (uid, action, binding) where binding maps every param to an entity id or
    a k-var key; k-var keys are disambiguated by membership in the kvar map,
    never by their spelling.
    """

    def __init__(
        self,
        beliefs: BeliefState,
        actions: list[ActionSchema],
        domain: DomainSpec,
        config: PlannerConfig,
    ):
        self.beliefs = beliefs
        self.actions = sorted(actions, key=lambda a: (a.name, len(a.params)))
        self.domain = domain
        self.config = config
        self.kvar_counter = 0
        self.expansions = 0
        self.first_failure: Literal | None = None

    def search(self, desires: list[Literal], force: bool = False) -> Iterator[PlanTemplate]:
        """Plan templates for the desires. With `force`, desires already true
        are re-achieved anyway, which recovers plans where one goal chain
        tramples another goal that held at the start."""
        pending = tuple((d, 0, frozenset(), force) for d in desires)
        for steps_rev, uncertainty, kvars in self._solve(pending, (), (), {}):
            template = self._finalize(desires, steps_rev, uncertainty, kvars)
            if template is not None:
                yield template

    def _solve(self, pending, steps_rev, uncertainty, kvars):
        uncertainty = list(uncertainty)
        remaining = []
        for lit, depth, ancestry, force in pending:
            truth = self.beliefs.truth(lit)
            if truth is Truth.TRUE and not force:
                continue
            if lit.schema.kind.value == "knowledge" and truth is Truth.UNKNOWN:
                # unknowable by acting; defer to a resolution action
                if all(u.key() != lit.key() or u.positive != lit.positive for u, _ in uncertainty):
                    uncertainty.append((lit, None))
                continue
            remaining.append((lit, depth, ancestry))
        if not remaining:
            yield (steps_rev, tuple(uncertainty), dict(kvars))
            return
        d0, depth, ancestry = remaining[0]
        if depth >= self.config.depth_limit:
            return
        rest = tuple((lit, dep, anc, False) for lit, dep, anc in remaining[1:])
        yield from self._achieve(
            d0, depth, ancestry, rest, steps_rev, tuple(uncertainty), kvars
        )

    def _achieve(self, d0, depth, ancestry, rest, steps_rev, uncertainty, kvars):
        produced = False
        for action in self.actions:
            for effect in action.effects:
                for seed, exclusions in _unifiers(effect, d0):
                    for variant in self._variants(action, seed, exclusions):
                        for outcome in self._apply(
                            action,
                            variant,
                            exclusions,
                            d0,
                            depth,
                            ancestry,
                            rest,
                            steps_rev,
                            uncertainty,
                            kvars,
                        ):
                            produced = True
                            yield outcome
        if not produced and self.first_failure is None:
            self.first_failure = d0

    def _variants(self, action: ActionSchema, seed: dict[str, str], exclusions):
        """Least-commitment binding first, then full groundings as fallback
        branches (used when candidate filtering leaves nothing viable)."""
        yield dict(seed)
        open_params = [(n, t) for n, t in action.params if n not in seed]
        if not open_params:
            return
        pools = [
            [
                e.id
                for e in self.domain.entities_of_types(types)
                if e.id != exclusions.get(name)
            ]
            for name, types in open_params
        ]
        for combo in itertools.product(*pools):
            full = dict(seed)
            full.update({n: v for (n, _), v in zip(open_params, combo)})
            yield full

    def _apply(
        self, action, binding, exclusions, d0, depth, ancestry, rest, steps_rev, uncertainty, kvars
    ):
        if self.expansions >= self.config.node_budget:
            return
        self.expansions += 1
        binding = dict(binding)
        # filtering can collapse a candidate set to a single entity, which
        # commits the binding and re-grounds preconditions, so iterate
        while True:
            grounded_pre: list[Literal] = []
            partial_pre: list[Literal] = []
            for pre in action.preconditions:
                lit = pre.substitute(binding)
                (grounded_pre if lit.grounded else partial_pre).append(lit)
            subgoal_options: list[list[Literal]] = []
            local_unknowns: list[Literal] = []
            for lit in grounded_pre:
                truth = self.beliefs.truth(lit)
                if truth is Truth.TRUE:
                    continue
                if lit.schema.kind.value == "knowledge" and truth is Truth.UNKNOWN:
                    local_unknowns.append(lit)
                elif truth is Truth.FALSE:
                    options = [lit]
                    blocker = self.beliefs.falsity_blocker(lit)
                    if blocker is not None:
                        # retracting the blocking value also unblocks the
                        # precondition, without achieving it outright
                        options.append(blocker.negated())
                    subgoal_options.append(options)
                # unknown fluents are left to execution-time failover
            candidates: dict[str, list[str]] = {}
            dead = False
            for param, types in action.params:
                if param in binding:
                    continue
                pool = [
                    ent.id
                    for ent in self.domain.entities_of_types(types)
                    if ent.id != exclusions.get(param)
                    and self._candidate_ok(param, ent.id, binding, partial_pre)
                ]
                if not pool:
                    dead = True
                    break
                candidates[param] = pool
            if dead:
                return
            committed = False
            for param, pool in list(candidates.items()):
                if len(pool) == 1:
                    binding[param] = pool[0]
                    del candidates[param]
                    committed = True
            if not committed:
                break
        uid = len(steps_rev)
        step_binding = dict(binding)
        new_kvars = dict(kvars)
        for param, pool in sorted(candidates.items()):
            key = f"k{self.kvar_counter}"
            self.kvar_counter += 1
            step_binding[param] = key
            new_kvars[key] = (uid, param, pool)
        new_uncertainty = list(uncertainty)
        for lit in local_unknowns:
            new_uncertainty.append((lit, uid))
        for lit in partial_pre:
            if lit.schema.kind.value == "knowledge":
                new_uncertainty.append((self._rename_holes(lit, step_binding, new_kvars), uid))
        child_ancestry = ancestry | {d0.key()}
        new_steps = steps_rev + ((uid, action, step_binding),)
        for combo in itertools.product(*subgoal_options):
            if any(lit.key() in ancestry for lit in combo):
                continue  # cyclic subgoal
            new_pending = list(rest)
            for lit in combo:
                if all(p[0] != lit for p in new_pending):
                    new_pending.append((lit, depth + 1, child_ancestry, False))
            yield from self._solve(tuple(new_pending), new_steps, new_uncertainty, new_kvars)

    def _candidate_ok(self, param, entity_id, binding, partial_pre) -> bool:
        """Entity passes every precondition in which it is the only open arg:
        the instantiated literal must hold or be absent, never known-false."""
        trial = dict(binding)
        trial[param] = entity_id
        for pre in partial_pre:
            lit = pre.substitute(trial)
            if lit.grounded and self.beliefs.truth(lit) is Truth.FALSE:
                return False
        return True

    @staticmethod
    def _rename_holes(lit: Literal, step_binding: dict[str, str], kvars: dict) -> Literal:
        """Param-named holes become k-var holes (or entities, once bound)."""
        args = []
        for a in lit.args:
            if isinstance(a, Hole):
                mapped = step_binding.get(a.name, a.name)
                args.append(Hole(mapped) if mapped in kvars else mapped)
            else:
                args.append(a)
        return Literal(lit.schema, tuple(args), lit.positive)

    def _finalize(self, desires, steps_rev, uncertainty, kvars) -> PlanTemplate | None:
        steps: list[TemplateStep] = []
        uid_to_index = {}
        for exec_idx, (uid, action, raw_binding) in enumerate(reversed(steps_rev)):
            uid_to_index[uid] = exec_idx
            bound, unbound = {}, {}
            for param, value in raw_binding.items():
                (unbound if value in kvars else bound)[param] = value
            steps.append(TemplateStep(action, bound, unbound))
        # one uncertainty entry per distinct literal, tagged with every step
        # that needs it; desire-level unknowns carry no step indices
        merged: dict[tuple, tuple[Literal, set[int] | None]] = {}
        for lit, uid in uncertainty:
            ident = (lit.key(), lit.positive)
            prev = merged.get(ident)
            if uid is None:
                merged[ident] = (lit, None)
            elif prev is None:
                merged[ident] = (lit, {uid_to_index[uid]})
            elif prev[1] is not None:
                prev[1].add(uid_to_index[uid])
        entries = [
            (lit, () if idxs is None else tuple(sorted(idxs))) for lit, idxs in merged.values()
        ]
        kvar_keys = sorted(kvars, key=lambda k: int(k[1:]))
        template = PlanTemplate(
            steps=steps,
            desires=list(desires),
            kvars=kvar_keys,
            kvar_origin={k: (uid_to_index[kvars[k][0]], kvars[k][1]) for k in kvar_keys},
            candidates={k: list(kvars[k][2]) for k in kvar_keys},
            uncertainty=sorted(entries, key=lambda e: (e[1] or (0,), repr(e[0]))),
        )
        if not self._replay_ok(template, desires):
            return None
        return template

    def _replay_ok(self, template: PlanTemplate, desires) -> bool:
        """Applying each step's grounded effects in order must satisfy every
        desire not deferred to the uncertainty set. Steps with unbound args
        get re-checked per grounded binding in stage 2."""
        state = self.beliefs.copy()
        for step in template.steps:
            for eff in step.action.effects:
                lit = eff.substitute(step.binding)
                if lit.grounded:
                    state.assert_belief(lit)
        deferred = {
            (lit.key(), lit.positive) for lit, _ in template.uncertainty if lit.grounded
        }
        for desire in desires:
            if (desire.key(), desire.positive) in deferred:
                continue
            if state.truth(desire) is Truth.TRUE:
                continue
            if not self._maybe_satisfied_by_unbound(template, desire):
                return False
        return True

    @staticmethod
    def _maybe_satisfied_by_unbound(template: PlanTemplate, desire: Literal) -> bool:
        for step in template.steps:
            if not step.unbound:
                continue
            for eff in step.action.effects:
                if eff.schema.name == desire.schema.name and eff.positive == desire.positive:
                    return True
        return False


def search_templates(
    beliefs: BeliefState,
    desires: list[Literal],
    actions: list[ActionSchema],
    domain: DomainSpec,
    config: PlannerConfig | None = None,
) -> tuple[Iterator[PlanTemplate], _Searcher]:
    """Lazy stream of plan templates; the searcher is returned for failure
    reporting. Desire permutations are appended as a completeness fallback
    for goal chains that clobber one another in the written order."""
    searcher = _Searcher(beliefs, actions, domain, config or PlannerConfig())
    ordered = list(desires)

    def signature(template: PlanTemplate) -> tuple:
        return tuple(
            (s.action.name, tuple(sorted(s.binding.items())), tuple(sorted(s.unbound)))
            for s in template.steps
        )

    def orders() -> Iterator[list[Literal]]:
        yield ordered
        if 1 < len(ordered) <= 6:  # factorial fallback only at small sizes
            for p in itertools.permutations(ordered):
                perm = list(p)
                if perm != ordered:
                    yield perm

    def run() -> Iterator[PlanTemplate]:
        seen: set[tuple] = set()
        for force in (False, True):
            for order in orders():
                for template in searcher.search(order, force=force):
                    sig = signature(template)
                    if sig in seen:
                        continue
                    seen.add(sig)
                    yield template
            if not any(self_true for self_true in _initially_true(beliefs, ordered)):
                break  # nothing to re-achieve, the force pass adds nothing

    return run(), searcher


def _initially_true(beliefs: BeliefState, desires: list[Literal]):
    for d in desires:
        yield beliefs.truth(d) is Truth.TRUE


def plan_stage1(
    beliefs: BeliefState,
    desires,
    actions: list[ActionSchema],
    domain: DomainSpec,
    config: PlannerConfig | None = None,
) -> PlanTemplate | NoPlan:
    """First productive plan template from the backward search, or NoPlan."""
    config = config or PlannerConfig()
    gen, searcher = search_templates(beliefs, list(desires), actions, domain, config)
    for template in gen:
        if plan_stage2(template, beliefs, config):
            return template
    failed = searcher.first_failure
    return NoPlan(
        f"no action chain achieves {failed!r}" if failed else "no consistent plan",
        failed,
    )


# ---------------------------------------------------------------------------
# Stage 2: candidate binding enumeration and ranking
# ---------------------------------------------------------------------------


def plan_stage2(
    template: PlanTemplate,
    beliefs: BeliefState,
    config: PlannerConfig | None = None,
) -> list[GroundedPlan]:
    """All viable grounded plans for the template, least uncertainty first;
    ties break lexicographically on the bound entity ids."""
    config = config or PlannerConfig()
    pools = [template.candidates[k] for k in template.kvars]
    plans: list[GroundedPlan] = []
    seen: set[tuple[str, ...]] = set()
    for i, combo in enumerate(itertools.product(*pools)):
        if i >= config.binding_cap:
            template.truncated = True
            break
        if combo in seen:
            continue
        seen.add(combo)
        plan = _ground(template, dict(zip(template.kvars, combo)), beliefs)
        if plan is not None:
            plans.append(plan)
    plans.sort(key=lambda p: (p.uncertainty_count, tuple(p.binding[k] for k in template.kvars)))
    return plans


def _ground(
    template: PlanTemplate, binding: dict[str, str], beliefs: BeliefState
) -> GroundedPlan | None:
    all_steps: list[BoundStep] = []
    for step in template.steps:
        full = dict(step.binding)
        for param, kvar in step.unbound.items():
            full[param] = binding[kvar]
        all_steps.append(BoundStep(step.action, full))
    # evolving-state re-check: steps whose effects already hold are redundant
    # and dropped (goal chains can duplicate one another's work); every kept
    # step's preconditions must not be known-false at the point it executes
    state = beliefs.copy()
    kept: list[BoundStep] = []
    new_index: dict[int, int] = {}
    for old_idx, step in enumerate(all_steps):
        effects = step.effect_literals()
        if effects and all(state.truth(e) is Truth.TRUE for e in effects):
            continue
        for lit in step.precondition_literals():
            if state.truth(lit) is Truth.FALSE:
                return None
        new_index[old_idx] = len(kept)
        kept.append(step)
        for lit in effects:
            state.assert_belief(lit)
    unresolved: list[tuple[int, Literal, Literal]] = []
    uncertainty_count = 0
    assumed_true: set[tuple] = set()
    for lit, step_idxs in template.uncertainty:
        kept_at = [new_index[i] for i in step_idxs if i in new_index]
        if step_idxs and not kept_at:
            continue  # every step needing this literal was dropped
        grounded = lit.substitute(binding)
        truth = beliefs.truth(grounded)
        if truth is Truth.FALSE:
            return None
        if truth is Truth.UNKNOWN:
            uncertainty_count += 1
            earliest = min(kept_at) if kept_at else 0
            unresolved.append((earliest, grounded, _question_form(lit)))
            assumed_true.add((grounded.key(), grounded.positive))
    for desire in template.desires:
        if state.truth(desire) is Truth.TRUE:
            continue
        if (desire.key(), desire.positive) in assumed_true:
            continue
        return None
    unresolved.sort(key=lambda item: (item[0], repr(item[1])))
    steps: list[Any] = list(kept)
    for earliest, grounded, question in reversed(unresolved):
        steps.insert(earliest, ResolutionAction(grounded, question))
    return GroundedPlan(binding, uncertainty_count, steps)


def _question_form(lit: Literal) -> Literal:
    """Template literal with its k-var holes renamed to the schema's slot
    names: the shape the language generator turns into a question."""
    args = []
    for slot, a in zip(lit.schema.slots, lit.args):
        args.append(Hole(slot.name) if isinstance(a, Hole) else a)
    return Literal(lit.schema, tuple(args), lit.positive)


# ---------------------------------------------------------------------------
# Execution-time state machine
# ---------------------------------------------------------------------------


@dataclass
class PlannerState:
    template: PlanTemplate | None = None
    plans: list[GroundedPlan] = field(default_factory=list)
    active: GroundedPlan | None = None
    step_index: int = 0
    branches: Iterator[PlanTemplate] | None = None
    failed_bindings: set[tuple[str, ...]] = field(default_factory=set)
    retry_wait_until: float = 0.0
    # new beliefs mark the ranking stale; it is rebuilt when a binding is
    # actually re-chosen, keeping belief absorption O(active plan)
    needs_rescore: bool = False

    def current_step(self) -> Any | None:
        if self.active is None:
            return None
        while self.step_index < len(self.active.steps):
            step = self.active.steps[self.step_index]
            if isinstance(step, ResolutionAction) and step.resolved:
                self.step_index += 1
                continue
            return step
        return None


def plan(
    beliefs: BeliefState,
    desires,
    actions: list[ActionSchema],
    domain: DomainSpec,
    config: PlannerConfig | None = None,
    trace: PlanTrace | None = None,
) -> PlannerState:
    """Full stage-1 + stage-2 planning; the returned state keeps the live
    search generator so later failures can backtrack into it."""
    config = config or PlannerConfig()
    state = PlannerState()
    t0 = time.perf_counter()
    gen, _ = search_templates(beliefs, list(desires), actions, domain, config)
    state.branches = gen
    for template in gen:
        t1 = time.perf_counter()
        plans = plan_stage2(template, beliefs, config)
        t2 = time.perf_counter()
        if trace is not None:
            trace.stage1_us += (t1 - t0) * 1e6
            trace.stage2_us += (t2 - t1) * 1e6
        if plans:
            state.template = template
            state.plans = plans
            state.active = plans[0]
            state.step_index = 0
            if trace is not None:
                trace.template_size = len(template.steps)
                trace.unbound = len(template.kvars)
                trace.uncertainty = len(template.uncertainty)
                trace.bindings = len(plans)
                trace.chosen = state.active.key
            return state
        t0 = time.perf_counter()
    if trace is not None:
        trace.stage1_us += (time.perf_counter() - t0) * 1e6
    return state  # active is None: no plan found


def replan(
    beliefs: BeliefState,
    desires,
    actions: list[ActionSchema],
    domain: DomainSpec,
    cached_template: PlanTemplate | None = None,
    config: PlannerConfig | None = None,
    trace: PlanTrace | None = None,
) -> PlannerState:
    """Re-plan after new information; reuses the cached template when its
    candidate structure still fits the beliefs, running only stage 2."""
    config = config or PlannerConfig()
    if cached_template is not None and list(cached_template.desires) == list(desires):
        t0 = time.perf_counter()
        plans = plan_stage2(cached_template, beliefs, config)
        if trace is not None:
            trace.kind = "replan"
            trace.stage2_us += (time.perf_counter() - t0) * 1e6
            trace.template_size = len(cached_template.steps)
            trace.unbound = len(cached_template.kvars)
            trace.uncertainty = len(cached_template.uncertainty)
            trace.bindings = len(plans)
        if plans:
            state = PlannerState(template=cached_template, plans=plans, active=plans[0])
            if trace is not None:
                trace.chosen = plans[0].key
            return state
    return plan(beliefs, desires, actions, domain, config, trace)


def resume(state: PlannerState, beliefs: BeliefState, config: PlannerConfig) -> bool:
    """Re-activate a retained plan set after a wait: re-rank the surviving
    bindings against current beliefs and pick the best valid one."""
    if state.template is None or not state.plans:
        return False
    state.plans = [p for p in state.plans if p.key not in state.failed_bindings]
    _rescore(state.plans, beliefs)
    state.needs_rescore = False
    for plan in state.plans:
        if _plan_still_valid(plan, 0, beliefs):
            state.active = plan
            state.step_index = 0
            return True
    return False


@dataclass
class AdvanceEvent:
    kind: str  # step_ok | step_failed | new_belief
    literal: Literal | None = None


def _plan_still_valid(plan: GroundedPlan, step_index: int, beliefs: BeliefState) -> bool:
    assumed = {
        (s.target.key(), s.target.positive)
        for s in plan.steps
        if isinstance(s, ResolutionAction) and not s.resolved
    }
    for step in plan.steps[step_index:]:
        if isinstance(step, ResolutionAction):
            if not step.resolved and beliefs.truth(step.target) is Truth.FALSE:
                return False
            continue
        for lit in step.precondition_literals():
            if beliefs.truth(lit) is Truth.FALSE and (lit.key(), lit.positive) not in assumed:
                return False
    return True


def _rescore(plans: list[GroundedPlan], beliefs: BeliefState) -> None:
    for plan in plans:
        for step in plan.steps:
            if isinstance(step, ResolutionAction):
                if not step.resolved and beliefs.truth(step.target) is not Truth.UNKNOWN:
                    step.resolved = True
        plan.uncertainty_count = sum(
            1
            for step in plan.steps
            if isinstance(step, ResolutionAction)
            and beliefs.truth(step.target) is Truth.UNKNOWN
        )
    plans.sort(key=lambda p: (p.uncertainty_count, p.key))


def _update_active(plan: GroundedPlan, beliefs: BeliefState, schema_name: str) -> None:
    for step in plan.steps:
        if isinstance(step, ResolutionAction) and step.target.schema.name == schema_name:
            if not step.resolved and beliefs.truth(step.target) is not Truth.UNKNOWN:
                step.resolved = True
    plan.uncertainty_count = sum(
        1
        for step in plan.steps
        if isinstance(step, ResolutionAction) and beliefs.truth(step.target) is Truth.UNKNOWN
    )


def advance(
    state: PlannerState,
    event: AdvanceEvent,
    beliefs: BeliefState,
    now: float,
    config: PlannerConfig | None = None,
) -> Directive:
    """Feed one execution event into the planner state machine."""
    config = config or PlannerConfig()
    if state.active is None:
        return Directive("fail_and_wait")

    if event.kind == "step_ok":
        state.step_index += 1
        if state.current_step() is None:
            return Directive("done")
        return Directive("continue", state.active)

    if event.kind == "new_belief":
        assert event.literal is not None
        state.needs_rescore = True
        _update_active(state.active, beliefs, event.literal.schema.name)
        if not _plan_still_valid(state.active, state.step_index, beliefs):
            return _rebind(state, beliefs, now, config)
        # a strictly better binding may now exist, but switching mid-flight
        # would thrash; the current binding continues unless invalidated
        if state.current_step() is None:
            return Directive("done")
        return Directive("continue", state.active)

    if event.kind == "step_failed":
        state.failed_bindings.add(state.active.key)
        return _rebind(state, beliefs, now, config)

    raise ValueError(f"unknown event {event.kind!r}")


def _rebind(
    state: PlannerState, beliefs: BeliefState, now: float, config: PlannerConfig
) -> Directive:
    if state.needs_rescore:
        state.plans = [p for p in state.plans if p.key not in state.failed_bindings]
        _rescore(state.plans, beliefs)
        state.needs_rescore = False
    for plan in state.plans:
        if plan.key in state.failed_bindings or plan is state.active:
            continue
        if _plan_still_valid(plan, 0, beliefs):
            state.active = plan
            state.step_index = 0
            return Directive("rebind", plan)
    # no bindings left: back-track to the prior search branch
    if state.branches is not None:
        for template in state.branches:
            plans = plan_stage2(template, beliefs, config)
            if plans:
                state.template = template
                state.plans = plans
                state.active = plans[0]
                state.step_index = 0
                state.failed_bindings = set()
                return Directive("backtrack", plans[0])
    state.active = None
    state.retry_wait_until = now + config.retry_wait
    return Directive("fail_and_wait")
