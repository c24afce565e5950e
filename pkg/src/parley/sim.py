"""Discrete-time, continuous-space world: disc agents that sense, hear,
plan, talk, and act.

Each tick runs a fixed phase order per agent (sorted by id): sense nearby
entities, process heard utterances, plan or re-plan if needed, then execute
the current controller. Utterances emitted during a tick are delivered at
the end of it (range plus line-of-sight) and processed by listeners on the
next tick, so agent order never changes who hears what.
"""

from __future__ import annotations

import random
import time
import zlib
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import planner as planning
from .dialogue import absorb, interpret, respond
from .domain import DomainSpec, Entity, Literal
from .geometry import NavGrid, line_of_sight, obstacle_edges, point_in_region
from .kb import BeliefState, Truth
from .nlg import (
    PhoneticNameRegistry,
    assign_phonetic_name,
    generate_question,
    generate_statement,
)
from .nlu import Lexicon, generate_training_data, parse, parse_lexicon, train
from .planner import (
    AdvanceEvent,
    BoundStep,
    PlannerConfig,
    PlanTrace,
    ResolutionAction,
    advance,
    replan,
)


@dataclass
class SimConfig:
    dt: float = 0.1
    sense_radius: float = 5.0
    hearing_range: float = 10.0
    max_speed: float = 1.4
    interact_range: float = 1.0
    agent_radius: float = 0.3
    ask_cooldown: float = 30.0
    answer_timeout: float = 5.0
    retry_wait: float = 5.0
    grid_cell: float = 0.25
    grid_inflate: float = 0.35
    fallback_threshold: float = 0.4
    nli_enabled: bool = True
    nlu_cap_per_label: int = 40
    nlu_seed: int = 0

    @classmethod
    def from_spec(cls, spec: DomainSpec, **overrides) -> "SimConfig":
        kwargs = {}
        for key in cls.__dataclass_fields__:
            value = spec.config_value(key)
            if value is not None:
                kwargs[key] = value
        kwargs.update(overrides)
        return cls(**kwargs)


@dataclass
class UtteranceEvent:
    speaker: str
    text: str
    position: tuple[float, float]
    tick: int
    addressee: str | None = None  # agent/avatar id; None is a broadcast
    kind: str = "other"  # question | statement | other
    speaker_is_agent: bool = True


@dataclass
class Metrics:
    questions: int = 0
    statements: int = 0
    questions_answered: int = 0
    facts_overheard: int = 0
    parser_failures: int = 0
    replans: int = 0
    planning_time: float = 0.0  # wall seconds, full plans
    replan_time: float = 0.0  # wall seconds across replan/rescore events
    replan_events: int = 0
    initial_plan_times: list[float] = field(default_factory=list)
    replan_times: list[float] = field(default_factory=list)
    per_agent: dict[str, dict[str, int]] = field(default_factory=dict)
    traces: list[PlanTrace] = field(default_factory=list)

    def bump(self, agent_id: str, key: str, amount: int = 1) -> None:
        row = self.per_agent.setdefault(agent_id, {})
        row[key] = row.get(key, 0) + amount


class Agent:
    def __init__(self, world: "World", spec_entity: Entity, agent_spec, name: str):
        self.world = world
        self.id = spec_entity.id
        self.name = name
        self.radius = world.config.agent_radius
        pos = spec_entity.position or (0.0, 0.0)
        self.pos = np.array(pos, dtype=float)
        self.vel = np.zeros(2)
        self.kb = BeliefState(world.domain)
        for lit in agent_spec.beliefs:
            self.kb.assert_belief(lit)
        for eid, attr, value in agent_spec.attribute_beliefs:
            self.kb.set_attribute(eid, attr, value)
        self.desires = list(agent_spec.desires)
        self.warn_literal = agent_spec.warn_literal
        self.warn_cooldown = agent_spec.warn_cooldown
        self.last_warned = -1e9
        self.rng = random.Random(zlib.crc32(self.id.encode()) ^ world.seed)
        self.plan_state: planning.PlannerState | None = None
        self.retry_until = 0.0
        self.planned_once = False
        self.inbox: list[UtteranceEvent] = []
        self.sensed_locations: dict[str, int] = {}
        # controller context
        self.active_step: Any = None
        self.waypoints: list[tuple[float, float]] | None = None
        self.wait_left = 0.0
        self.ask_deadline: float | None = None
        self.current_action = "idle"

    # -- desires -----------------------------------------------------------

    def desires_satisfied(self) -> bool:
        return all(self.kb.truth(d) is Truth.TRUE for d in self.desires)

    # -- planning ------------------------------------------------------------

    def ensure_plan(self) -> None:
        world = self.world
        now = world.now
        if self.desires_satisfied():
            return
        if self.plan_state is not None and self.plan_state.active is not None:
            return
        if now < self.retry_until:
            return
        # fast path: a retained template whose bindings can be re-ranked
        if self.plan_state is not None and self.plan_state.template is not None:
            t0 = time.perf_counter()
            ok = planning.resume(self.plan_state, self.kb, world.planner_config)
            elapsed = time.perf_counter() - t0
            world.metrics.replans += 1
            world.metrics.replan_time += elapsed
            world.metrics.replan_times.append(elapsed)
            world.metrics.replan_events += 1
            if ok:
                self._reset_controller()
                return
            self.plan_state = None  # spent; plan from scratch below
        trace = PlanTrace()
        t0 = time.perf_counter()
        state = replan(
            self.kb,
            self.desires,
            list(world.domain.actions),
            world.domain,
            cached_template=None,
            config=world.planner_config,
            trace=trace,
        )
        elapsed = time.perf_counter() - t0
        world.metrics.traces.append(trace)
        world.metrics.planning_time += elapsed
        if not self.planned_once:
            world.metrics.initial_plan_times.append(elapsed)
            self.planned_once = True
        if state.active is None:
            self.plan_state = None
            self.retry_until = now + world.planner_config.retry_wait
        else:
            self.plan_state = state
            self._reset_controller()

    def handle_new_belief(self, lit: Literal) -> None:
        if self.plan_state is None or self.plan_state.active is None:
            return
        t0 = time.perf_counter()
        directive = advance(
            self.plan_state,
            AdvanceEvent("new_belief", lit),
            self.kb,
            self.world.now,
            self.world.planner_config,
        )
        elapsed = time.perf_counter() - t0
        self.world.metrics.replan_time += elapsed
        self.world.metrics.replan_times.append(elapsed)
        self.world.metrics.replan_events += 1
        self._after_directive(directive, count_replan=directive.kind in ("rebind", "backtrack"))

    def _after_directive(self, directive, count_replan: bool = False) -> None:
        if count_replan:
            self.world.metrics.replans += 1
        if directive.kind in ("rebind", "backtrack"):
            self._reset_controller()
        elif directive.kind == "fail_and_wait":
            if self.plan_state is not None:
                self.retry_until = self.plan_state.retry_wait_until
            self._reset_controller()
        elif directive.kind == "done":
            self._reset_controller()
            if not self.desires_satisfied() and self.plan_state is not None:
                # the plan ran out without delivering; retire this binding
                if self.plan_state.active is not None:
                    self.plan_state.failed_bindings.add(self.plan_state.active.key)
                self.plan_state.active = None

    def _reset_controller(self) -> None:
        self.active_step = None
        self.waypoints = None
        self.wait_left = 0.0
        self.ask_deadline = None


class Avatar:
    """Human-piloted participant: a disc with no beliefs and no planner."""

    def __init__(self, avatar_id: str, name: str, pos, radius: float = 0.3):
        self.id = avatar_id
        self.name = name
        self.pos = np.array(pos, dtype=float)
        self.radius = radius
        self.waypoints: list[tuple[float, float]] | None = None
        self.say_queue: list[str] = []
        self.inbox: list[UtteranceEvent] = []
        self.heard: list[UtteranceEvent] = []
        self.current_action = "idle"


class World:
    def __init__(
        self,
        domain: DomainSpec,
        seed: int = 0,
        config: SimConfig | None = None,
    ):
        self.domain = domain
        self.seed = seed
        self.config = config or SimConfig.from_spec(domain)
        self.planner_config = PlannerConfig(retry_wait=self.config.retry_wait)
        self.tick_index = 0
        self.bus: list[UtteranceEvent] = []
        self.recent_utterances: list[UtteranceEvent] = []
        self.metrics = Metrics()
        self.truth = BeliefState(domain)
        for lit in domain.ground_facts:
            self.truth.assert_belief(lit)
        for ent in domain.entities:
            for attr, value in ent.attributes:
                self.truth.set_attribute(ent.id, attr, value)
        self.grid = NavGrid(
            domain.world.bounds,
            domain.world.obstacles,
            cell=self.config.grid_cell,
            inflate=self.config.grid_inflate,
        )
        self.edges = obstacle_edges(domain.world.obstacles)
        self.registry = PhoneticNameRegistry()
        configured_names = domain.config_value("agent_names") or {}
        if isinstance(configured_names, dict):
            for agent_id, name in sorted(configured_names.items()):
                self.registry.assignments[agent_id] = name
        self.lexicon: Lexicon | None = None
        self.model = None
        if domain.lexicon is not None:
            self.lexicon = parse_lexicon(domain.lexicon)
            examples = generate_training_data(
                self.lexicon,
                domain,
                rng_seed=self.config.nlu_seed,
                cap_per_label=self.config.nlu_cap_per_label,
            )
            self.model = train(examples)
        self.agents: list[Agent] = []
        for agent_spec in sorted(domain.agents, key=lambda a: a.id):
            name = assign_phonetic_name(self.registry, agent_spec.id)
            self.agents.append(Agent(self, domain.entity(agent_spec.id), agent_spec, name))
        self.avatars: dict[str, Avatar] = {}
        self.solved_tick: int | None = None
        self._location_entities = [e for e in domain.entities if e.region is not None]
        self._observable = [p for p in domain.predicates if p.observable]

    # -- helpers ---------------------------------------------------------

    @property
    def now(self) -> float:
        return self.tick_index * self.config.dt

    def agent(self, agent_id: str) -> Agent:
        for a in self.agents:
            if a.id == agent_id:
                return a
        raise KeyError(agent_id)

    def add_avatar(self, avatar_id: str, pos=None) -> Avatar:
        name = assign_phonetic_name(self.registry, avatar_id)
        if pos is None:
            b = self.domain.world.bounds
            pos = ((b[0] + b[2]) / 2.0, (b[1] + b[3]) / 2.0)
        avatar = Avatar(avatar_id, name, pos, self.config.agent_radius)
        self.avatars[avatar_id] = avatar
        return avatar

    def hearers(self, speaker_id: str, position) -> list[str]:
        """Agents and avatars that a voice at `position` reaches."""
        out = []
        for other in self.agents:
            if other.id == speaker_id:
                continue
            if self._audible(position, other.pos):
                out.append(other.id)
        for avatar in sorted(self.avatars.values(), key=lambda a: a.id):
            if avatar.id != speaker_id and self._audible(position, avatar.pos):
                out.append(avatar.id)
        return out

    def _audible(self, p, q) -> bool:
        dx = float(p[0]) - float(q[0])
        dy = float(p[1]) - float(q[1])
        if dx * dx + dy * dy > self.config.hearing_range**2:
            return False
        return line_of_sight(self.edges, p, q)

    def names_map(self) -> dict[str, str]:
        return {name: agent_id for agent_id, name in self.registry.assignments.items()}

    def say(
        self,
        speaker_id: str,
        text: str,
        position,
        addressee: str | None = None,
        kind: str = "other",
        is_agent: bool = True,
    ) -> None:
        self.bus.append(
            UtteranceEvent(
                speaker_id,
                text,
                (float(position[0]), float(position[1])),
                self.tick_index,
                addressee,
                kind,
                is_agent,
            )
        )
        if is_agent:
            if kind == "question":
                self.metrics.questions += 1
                self.metrics.bump(speaker_id, "questions")
            elif kind == "statement":
                self.metrics.statements += 1
                self.metrics.bump(speaker_id, "statements")

    # -- per-tick phases -------------------------------------------------------

    def tick(self) -> None:
        self.tick_index += 1
        for agent in self.agents:
            self._sense(agent)
            self._hear(agent)
            agent.ensure_plan()
            self._execute(agent)
        self._move_avatars()
        self._flush_bus()
        if self.solved_tick is None and self.agents and all(
            a.desires_satisfied() for a in self.agents
        ):
            self.solved_tick = self.tick_index

    def run(self, max_ticks: int, stop_when_solved: bool = True) -> None:
        for _ in range(max_ticks):
            self.tick()
            if stop_when_solved and self.solved_tick is not None:
                break

    # -- sensing ----------------------------------------------------------------

    def _sense(self, agent: Agent) -> None:
        changes: list[Literal] = []
        r2 = self.config.sense_radius**2
        for ent in self.domain.entities:
            if ent.id == agent.id or ent.position is None:
                continue
            dx = ent.position[0] - agent.pos[0]
            dy = ent.position[1] - agent.pos[1]
            inside_region = ent.region is not None and point_in_region(
                ent.region, agent.pos
            )
            if not inside_region:
                if dx * dx + dy * dy > r2:
                    continue
                if not line_of_sight(self.edges, agent.pos, ent.position):
                    continue
            if ent.region is not None:
                agent.sensed_locations[ent.id] = self.tick_index
                changes.extend(self._sense_location_contents(agent, ent))
            changes.extend(self._sense_entity_facts(agent, ent))
            for attr, _ in ent.type.attribute_defs:
                value = self.truth.query_attribute(ent.id, attr)
                if value is not Truth.UNKNOWN:
                    agent.kb.set_attribute(ent.id, attr, value)
        for lit in changes:
            agent.handle_new_belief(lit)

    def _sense_entity_facts(self, agent: Agent, ent: Entity) -> list[Literal]:
        changed = []
        for stored in list(self.truth.literals()):
            if not stored.schema.observable:
                continue
            if ent.id in stored.args:
                if agent.kb.assert_belief(stored).changed:
                    changed.append(stored)
        return changed

    def _sense_location_contents(self, agent: Agent, loc: Entity) -> list[Literal]:
        """Standing at a location also reveals what is absent from it."""
        changed = []
        for schema in self._observable:
            f = schema.functional_slot
            if f is None or schema.arity != 2:
                continue
            place_slot = schema.slots[f]
            if place_slot.types and loc.type.name not in place_slot.types:
                continue
            thing_slot = schema.slots[1 - f]
            for thing in self.domain.entities_of_types(thing_slot.types):
                args = [None, None]
                args[f] = loc.id
                args[1 - f] = thing.id
                lit = Literal(schema, tuple(args), True)
                truth = self.truth.truth(lit)
                if truth is Truth.TRUE:
                    if agent.kb.assert_belief(lit).changed:
                        changed.append(lit)
                elif truth is Truth.FALSE:
                    neg = lit.negated()
                    if agent.kb.truth(neg) is not Truth.TRUE:
                        if agent.kb.assert_belief(neg).changed:
                            changed.append(neg)
        return changed

    # -- hearing and dialogue ---------------------------------------------------

    def _hear(self, agent: Agent) -> None:
        events, agent.inbox = agent.inbox, []
        for event in events:
            if self.model is None or self.lexicon is None:
                continue
            parsed = parse(
                self.model,
                self.lexicon,
                event.text,
                threshold=self.config.fallback_threshold,
                extra_names=self.names_map(),
            )
            meaning = interpret(parsed, self.domain, agent.kb)
            if meaning.kind == "unintelligible" and event.speaker_is_agent:
                self.metrics.parser_failures += 1
            addressed_to_me = meaning.addressee == agent.id or event.addressee == agent.id
            is_broadcast = event.addressee is None and meaning.addressee is None
            if meaning.kind in ("statement", "attr_statement"):
                report = absorb(meaning, agent.kb)
                if report.changed and not addressed_to_me:
                    self.metrics.facts_overheard += 1
                    self.metrics.bump(agent.id, "facts_overheard")
                for lit in report.added:
                    if lit is not None:
                        agent.handle_new_belief(lit)
            elif meaning.kind in ("info_question", "confirm_question", "attr_question"):
                if not self.config.nli_enabled:
                    continue
                if addressed_to_me or is_broadcast:
                    reply = respond(meaning, agent.kb, self.lexicon, agent.rng)
                    if reply.answered_question:
                        self.metrics.questions_answered += 1
                        for text in reply.texts:
                            self.say(
                                agent.id, text, agent.pos, addressee=event.speaker,
                                kind="statement",
                            )
                    elif addressed_to_me:
                        # no-knowledge shrugs only when asked directly,
                        # which keeps broadcast storms quiet
                        for text in reply.texts:
                            self.say(agent.id, text, agent.pos, addressee=event.speaker)
            elif meaning.kind == "out_of_domain" and not event.speaker_is_agent:
                if self.config.nli_enabled and (addressed_to_me or is_broadcast):
                    reply = respond(meaning, agent.kb, self.lexicon, agent.rng)
                    for text in reply.texts:
                        self.say(agent.id, text, agent.pos, addressee=event.speaker)

    # -- controllers ----------------------------------------------------------------

    def _execute(self, agent: Agent) -> None:
        agent.current_action = "idle"
        if agent.plan_state is None or agent.plan_state.active is None:
            self._maybe_warn(agent)
            return
        step = agent.plan_state.current_step()
        if step is None:
            directive = advance(
                agent.plan_state, AdvanceEvent("step_ok"), agent.kb, self.now,
                self.planner_config,
            )
            agent._after_directive(directive)
            return
        if step is not agent.active_step:
            agent.active_step = step
            agent.waypoints = None
            agent.wait_left = step.action.duration if isinstance(step, BoundStep) else 0.0
            agent.ask_deadline = None
        if isinstance(step, ResolutionAction):
            self._execute_resolution(agent, step)
        else:
            self._execute_action(agent, step)

    def _finish_step(self, agent: Agent, ok: bool) -> None:
        directive = advance(
            agent.plan_state,
            AdvanceEvent("step_ok" if ok else "step_failed"),
            agent.kb,
            self.now,
            self.planner_config,
        )
        agent._after_directive(directive, count_replan=not ok and directive.kind in ("rebind", "backtrack"))

    def _maybe_warn(self, agent: Agent) -> None:
        if agent.warn_literal is None or not self.config.nli_enabled:
            return
        if agent.kb.truth(agent.warn_literal) is not Truth.TRUE:
            return
        if self.now - agent.last_warned < agent.warn_cooldown:
            return
        if not self.hearers(agent.id, agent.pos):
            return
        text = generate_statement(agent.warn_literal, self.lexicon, agent.rng)
        self.say(agent.id, text, agent.pos, kind="statement")
        agent.last_warned = self.now
        agent.current_action = "utter"

    def _execute_resolution(self, agent: Agent, step: ResolutionAction) -> None:
        if step.resolved:
            self._finish_step(agent, ok=True)
            return
        truth = agent.kb.truth(step.target)
        if truth is not Truth.UNKNOWN:
            step.resolved = True
            self._finish_step(agent, ok=truth is Truth.TRUE)
            return
        if step.strategy is None:
            step.strategy = self._choose_resolution(agent, step)
        if step.strategy == "ask":
            if agent.ask_deadline is None:
                self._utter_question(agent, step)
                agent.current_action = "utter"
                return
            if self.now >= agent.ask_deadline:
                step.strategy = None
                agent.ask_deadline = None
                self._finish_step(agent, ok=False)
                return
            agent.current_action = "wait"
        elif step.strategy == "dwell":
            # arrived somewhere to look around; give sensing a couple of
            # ticks before declaring the exploration spent
            agent.current_action = "wait"
            if agent.ask_deadline is not None and self.now >= agent.ask_deadline:
                step.strategy = None
                agent.ask_deadline = None
                self._finish_step(agent, ok=False)
        else:  # explore
            target = self._explore_target(agent, step)
            if target is None:
                self._finish_step(agent, ok=False)
                return
            goal = target.position or (0.0, 0.0)
            state = self._move_along(agent, goal)
            agent.current_action = "move_to"
            if state == "unreachable":
                self._finish_step(agent, ok=False)
            elif state == "arrived":
                agent.waypoints = None
                step.strategy = "dwell"
                agent.ask_deadline = self.now + 3 * self.config.dt

    def choose_resolution_strategy(self, agent: Agent, step: ResolutionAction) -> str:
        return self._choose_resolution(agent, step)

    def _choose_resolution(self, agent: Agent, step: ResolutionAction) -> str:
        if not self.config.nli_enabled:
            return "explore"
        key = repr(step.question_form)
        neighbors = [
            h
            for h in self.hearers(agent.id, agent.pos)
            if not agent.kb.was_recently_asked(key, h, self.now, self.config.ask_cooldown)
        ]
        if not neighbors:
            return "explore"
        if agent.kb.was_recently_asked(key, "*", self.now, self.config.ask_cooldown) and len(
            neighbors
        ) > 1:
            return "explore"
        return "ask"

    def _utter_question(self, agent: Agent, step: ResolutionAction) -> None:
        key = repr(step.question_form)
        neighbors = [
            h
            for h in self.hearers(agent.id, agent.pos)
            if not agent.kb.was_recently_asked(key, h, self.now, self.config.ask_cooldown)
        ]
        addressee = None
        addressee_name = None
        if len(neighbors) == 1:
            addressee = neighbors[0]
            addressee_name = self.registry.assignments.get(addressee)
        question = generate_question(
            step.question_form, self.lexicon, agent.rng, addressee_name=addressee_name
        )
        self.say(agent.id, question, agent.pos, addressee=addressee, kind="question")
        if addressee is not None:
            agent.kb.record_asked(key, addressee, self.now)
        else:
            agent.kb.record_asked(key, "*", self.now)
            for h in neighbors:
                agent.kb.record_asked(key, h, self.now)
        agent.ask_deadline = self.now + self.config.answer_timeout

    def _explore_target(self, agent: Agent, step: ResolutionAction) -> Entity | None:
        # prefer places that could hold the unknown fact, then fall back to
        # any unexplored location entity
        place_types: frozenset[str] | None = None
        f = step.target.schema.functional_slot
        if f is not None:
            place_types = step.target.schema.slots[f].types
        candidates = [
            e
            for e in self._location_entities
            if place_types is None or not place_types or e.type.name in place_types
        ] or self._location_entities
        if not candidates:
            return None
        unseen = [e for e in candidates if e.id not in agent.sensed_locations]
        pool = unseen or sorted(candidates, key=lambda e: (agent.sensed_locations.get(e.id, 0), e.id))[:1]
        def dist2(e: Entity):
            p = e.position or (0.0, 0.0)
            return (
                (p[0] - agent.pos[0]) ** 2 + (p[1] - agent.pos[1]) ** 2,
                e.id,
            )
        return min(pool, key=dist2)

    def _execute_action(self, agent: Agent, step: BoundStep) -> None:
        controller = step.action.controller
        agent.current_action = controller
        if controller == "wait":
            agent.wait_left -= self.config.dt
            if agent.wait_left <= 0:
                self._apply_effects(agent, step)
                self._finish_step(agent, ok=True)
            return
        if controller == "utter":
            text = None
            if step.action.utterance is not None and self.lexicon is not None:
                lit = step.action.utterance.substitute(step.binding)
                if self.config.nli_enabled:
                    text = generate_statement(lit, self.lexicon, agent.rng)
            if text is not None:
                self.say(agent.id, text, agent.pos, kind="statement")
            self._apply_effects(agent, step)
            self._finish_step(agent, ok=True)
            return
        # move_to / interact: walk to the target entity, then take effect
        target = self._step_target(step)
        if target is None:
            self._finish_step(agent, ok=False)
            return
        goal = target.position or (0.0, 0.0)
        in_range = self._within_reach(agent, target)
        if not in_range:
            state = self._move_along(agent, goal)
            if state == "unreachable":
                self._finish_step(agent, ok=False)
                return
            in_range = self._within_reach(agent, target) or state == "arrived"
        if in_range:
            for lit in step.precondition_literals():
                if self.truth.truth(lit) is Truth.FALSE:
                    self._finish_step(agent, ok=False)
                    return
            self._apply_effects(agent, step)
            self._finish_step(agent, ok=True)

    def _step_target(self, step: BoundStep) -> Entity | None:
        name = step.action.target_param
        if name is None:
            for param, value in step.binding.items():
                ent = self.domain.entity(value)
                if ent.position is not None:
                    return ent
            return None
        return self.domain.entity(step.binding[name])

    def _within_reach(self, agent: Agent, target: Entity) -> bool:
        if target.region is not None and point_in_region(target.region, agent.pos):
            return True
        if target.position is None:
            return True
        dx = target.position[0] - agent.pos[0]
        dy = target.position[1] - agent.pos[1]
        return dx * dx + dy * dy <= self.config.interact_range**2

    def _move_along(self, agent: Agent, goal) -> str:
        """Advance along the cached path for one tick.

        Returns "arrived", "moving", or "unreachable"."""
        if agent.waypoints is None:
            path = self.grid.path(tuple(agent.pos), tuple(goal))
            if path is None:
                return "unreachable"
            agent.waypoints = path[1:]
        before = agent.pos.copy()
        budget = self.config.max_speed * self.config.dt
        while budget > 1e-9 and agent.waypoints:
            target = np.array(agent.waypoints[0])
            delta = target - agent.pos
            d = float(np.hypot(delta[0], delta[1]))
            if d <= budget:
                agent.pos = target
                budget -= d
                agent.waypoints.pop(0)
            else:
                agent.pos = agent.pos + delta / d * budget
                budget = 0.0
        agent.vel = (agent.pos - before) / self.config.dt
        return "arrived" if not agent.waypoints else "moving"

    def _apply_effects(self, agent: Agent, step: BoundStep) -> None:
        for lit in step.effect_literals():
            self.truth.assert_belief(lit)
            agent.kb.assert_belief(lit)

    # -- avatars and delivery ------------------------------------------------------

    def _move_avatars(self) -> None:
        for avatar in sorted(self.avatars.values(), key=lambda a: a.id):
            for text in avatar.say_queue:
                self.say(
                    avatar.id, text, avatar.pos, kind="other", is_agent=False
                )
            avatar.say_queue = []
            if avatar.waypoints:
                budget = self.config.max_speed * self.config.dt
                while budget > 1e-9 and avatar.waypoints:
                    target = np.array(avatar.waypoints[0])
                    delta = target - avatar.pos
                    d = float(np.hypot(delta[0], delta[1]))
                    if d <= budget:
                        avatar.pos = target
                        budget -= d
                        avatar.waypoints.pop(0)
                    else:
                        avatar.pos = avatar.pos + delta / d * budget
                        budget = 0.0
                avatar.current_action = "move_to" if avatar.waypoints else "idle"

    def deliver_utterances(self) -> dict[str, list[UtteranceEvent]]:
        """Current-bus deliveries per listener under range + line of sight;
        speakers never hear themselves, and non-addressees receive the same
        events (overhearing)."""
        deliveries: dict[str, list[UtteranceEvent]] = {}
        for event in self.bus:
            for listener_id in self.hearers(event.speaker, event.position):
                deliveries.setdefault(listener_id, []).append(event)
        return deliveries

    def _flush_bus(self) -> None:
        for listener_id, events in self.deliver_utterances().items():
            if listener_id in self.avatars:
                self.avatars[listener_id].inbox.extend(events)
                self.avatars[listener_id].heard.extend(events)
            else:
                self.agent(listener_id).inbox.extend(events)
        events, self.bus = self.bus, []
        self.recent_utterances.extend(events)
        horizon = self.tick_index - int(5.0 / self.config.dt)
        self.recent_utterances = [
            e for e in self.recent_utterances if e.tick >= horizon
        ]

    def path_to(self, frm, to) -> list[tuple[float, float]] | None:
        """Waypoints from a point to a point, entity id, or region target."""
        if isinstance(to, str):
            ent = self.domain.entity(to)
            goal = ent.position
            if goal is None and ent.region is not None:
                goal = (
                    sum(p[0] for p in ent.region) / len(ent.region),
                    sum(p[1] for p in ent.region) / len(ent.region),
                )
            if goal is None:
                return None
            return self.grid.path(tuple(frm), goal)
        return self.grid.path(tuple(frm), tuple(to))

    # -- snapshots --------------------------------------------------------------

    def static_geometry(self) -> dict:
        return {
            "bounds": list(self.domain.world.bounds),
            "obstacles": [
                [list(p) for p in poly] for poly in self.domain.world.obstacles
            ],
            "locations": [
                {
                    "id": e.id,
                    "region": [list(p) for p in e.region],
                    "position": list(e.position or (0, 0)),
                }
                for e in self._location_entities
            ],
            "items": [
                {"id": e.id, "position": list(e.position)}
                for e in self.domain.entities
                if e.region is None
                and e.position is not None
                and all(a.id != e.id for a in self.agents)
            ],
        }

    def snapshot(self) -> dict:
        return {
            "tick": self.tick_index,
            "time": round(self.now, 3),
            "agents": [
                {
                    "id": a.id,
                    "name": a.name,
                    "position": [round(float(a.pos[0]), 3), round(float(a.pos[1]), 3)],
                    "radius": a.radius,
                    "action": a.current_action,
                }
                for a in self.agents
            ],
            "avatars": [
                {
                    "id": av.id,
                    "name": av.name,
                    "position": [round(float(av.pos[0]), 3), round(float(av.pos[1]), 3)],
                    "radius": av.radius,
                    "action": av.current_action,
                }
                for av in sorted(self.avatars.values(), key=lambda a: a.id)
            ],
            "utterances": [
                {
                    "speaker": e.speaker,
                    "speaker_name": self.registry.assignments.get(e.speaker, e.speaker),
                    "text": e.text,
                    "tick": e.tick,
                    "addressee": e.addressee,
                }
                for e in self.recent_utterances
            ],
        }


def build_world(domain: DomainSpec, seed: int = 0, **config_overrides) -> World:
    config = SimConfig.from_spec(domain, **config_overrides)
    return World(domain, seed=seed, config=config)
