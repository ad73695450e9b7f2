"""
Grid engine for the constrained VGDL subset and a breadth-first winnability solver.

Only the avatar moves. Supported: MovingAvatar and Immovable sprites,
stepBack/killSprite/removeSprite interactions and SpriteCounter terminations.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from vgdl_ast import VGDLError, covering_types, resolve_sprite_class
from vgdl_validator import sprite_counter_rule

logger = logging.getLogger(__name__)

SUPPORTED_CLASSES = frozenset({'MovingAvatar', 'Immovable'})
SUPPORTED_METHODS = frozenset({'stepBack', 'killSprite', 'removeSprite'})
AVATAR_CLASS = 'MovingAvatar'
EOS = 'EOS'
DEFAULT_BACKGROUND = frozenset({' ', '.'})
DEFAULT_MAX_STEPS = 1000


class EngineErrorKind(str, Enum):
    AVATAR_COUNT = 'AvatarCount'
    TERMINATED = 'Terminated'
    UNSUPPORTED = 'Unsupported'
    UNMAPPABLE = 'Unmappable'


class EngineError(VGDLError):
    def __init__(self, kind, message):
        super().__init__(f'{kind.value}: {message}')
        self.kind = kind


class Action(str, Enum):
    UP = 'Up'
    DOWN = 'Down'
    LEFT = 'Left'
    RIGHT = 'Right'
    NOOP = 'Noop'

    @property
    def delta(self):
        return _DELTAS[self]


_DELTAS = {
    Action.UP: (0, -1),
    Action.DOWN: (0, 1),
    Action.LEFT: (-1, 0),
    Action.RIGHT: (1, 0),
    Action.NOOP: (0, 0),
}

MOVES = (Action.UP, Action.DOWN, Action.LEFT, Action.RIGHT)


class Status(str, Enum):
    RUNNING = 'Running'
    WON = 'Won'
    LOST = 'Lost'


class SolveVerdict(str, Enum):
    WINNABLE = 'Winnable'
    NOT_WINNABLE = 'NotWinnable'
    BUDGET = 'Budget'


@dataclass(frozen=True, order=True)
class SpriteInstance:
    id: int
    stype: str
    x: int
    y: int

    @property
    def cell(self):
        return self.x, self.y


@dataclass(frozen=True)
class GameState:
    """Immutable snapshot; instances are the live sprites in id order"""

    instances: Tuple[SpriteInstance, ...]
    avatar_id: int
    width: int
    height: int
    step_count: int = 0
    status: Status = Status.RUNNING

    @property
    def avatar(self) -> Optional[SpriteInstance]:
        for instance in self.instances:
            if instance.id == self.avatar_id:
                return instance
        return None

    @property
    def avatar_pos(self):
        avatar = self.avatar
        return avatar.cell if avatar is not None else None

    def occupants(self, x, y):
        return [instance for instance in self.instances if instance.x == x and instance.y == y]

    def count(self, stypes):
        return sum(1 for instance in self.instances if instance.stype in stypes)

    def key(self):
        """Search identity: avatar cell plus the ids still alive"""
        return self.avatar_pos, frozenset(instance.id for instance in self.instances)


@dataclass(frozen=True)
class SolveResult:
    verdict: SolveVerdict
    steps: Optional[int] = None
    actions: Tuple[Action, ...] = ()
    explored: int = 0

    def to_dict(self):
        return {
            'verdict': self.verdict.value,
            'steps': self.steps,
            'actions': [action.value for action in self.actions],
            'explored': self.explored,
        }

    def __str__(self):
        if self.verdict is SolveVerdict.WINNABLE:
            return f'Winnable({self.steps})'
        return self.verdict.value


@dataclass(frozen=True)
class _Rule:
    sentence: str
    method: str
    subject_types: frozenset
    object_types: frozenset


class GridEngine:
    """Compiled rules of one game"""

    def __init__(self, spec, background_chars=DEFAULT_BACKGROUND):
        self.spec = spec
        self.background_chars = frozenset(background_chars)
        self._check_supported()

        self.rules = [
            _Rule(
                sentence=rule.sentence(),
                method=rule.method,
                subject_types=covering_types(spec, rule.subject),
                object_types=covering_types(spec, rule.object),
            )
            for rule in spec.interaction_set
        ]
        self.counters = []
        for termination in spec.termination_set:
            counter, _ = sprite_counter_rule(termination)
            self.counters.append((counter, covering_types(spec, counter.stype)))

        self.avatar_types = frozenset(
            stype for stype in spec.defined_types()
            if resolve_sprite_class(spec, stype) == AVATAR_CLASS
        )

    def _check_supported(self):
        spec = self.spec
        for stype in spec.defined_types():
            sprite_class = resolve_sprite_class(spec, stype)
            if sprite_class not in SUPPORTED_CLASSES:
                raise EngineError(
                    EngineErrorKind.UNSUPPORTED,
                    f"sprite '{stype}' has class '{sprite_class}', supported: {sorted(SUPPORTED_CLASSES)}",
                )
        for rule in spec.interaction_set:
            if rule.method not in SUPPORTED_METHODS:
                raise EngineError(EngineErrorKind.UNSUPPORTED, f"interaction method '{rule.method}'")
        for termination in spec.termination_set:
            if termination.termination_class != 'SpriteCounter':
                raise EngineError(
                    EngineErrorKind.UNSUPPORTED, f"termination '{termination.termination_class}'"
                )
            _, problems = sprite_counter_rule(termination)
            if problems:
                raise EngineError(EngineErrorKind.UNSUPPORTED, f'SpriteCounter {problems[0]}')

    def _status(self, instances):
        for counter, stypes in self.counters:
            alive = sum(1 for instance in instances if instance.stype in stypes)
            if alive <= counter.limit:
                return Status.WON if counter.win else Status.LOST
        return Status.RUNNING

    def init_state(self, level):
        """
        Instantiate a level

        Args:
            level (LevelGrid): Level to instantiate

        Returns:
            GameState: Initial state, already terminated if a counter holds

        Raises:
            EngineError: UNMAPPABLE for unmapped characters, UNSUPPORTED for
                undefined mapped sprite types, AVATAR_COUNT unless exactly
                one avatar is placed
        """
        mapping = self.spec.mapped_chars()
        defined = set(self.spec.defined_types())
        instances = []
        for x, y, ch in level.cells():
            if ch not in mapping:
                if ch in self.background_chars and ch != '#':
                    continue
                raise EngineError(EngineErrorKind.UNMAPPABLE, f"character '{ch}' at ({x},{y}) is not mapped")
            for stype in mapping[ch]:
                if stype not in defined:
                    raise EngineError(EngineErrorKind.UNSUPPORTED, f"mapped sprite type '{stype}' is not defined")
                instances.append(SpriteInstance(len(instances), stype, x, y))

        avatars = [instance for instance in instances if instance.stype in self.avatar_types]
        if len(avatars) != 1:
            raise EngineError(EngineErrorKind.AVATAR_COUNT, f'expected one avatar, found {len(avatars)}')

        return GameState(
            instances=tuple(instances),
            avatar_id=avatars[0].id,
            width=level.width,
            height=level.height,
            status=self._status(instances),
        )

    def _matches(self, rule, mover, other):
        """(first, second) instances when the rule applies to the pair"""
        if mover.stype in rule.subject_types and other.stype in rule.object_types:
            return mover, other
        if other.stype in rule.subject_types and mover.stype in rule.object_types:
            return other, mover
        return None

    def _collide(self, mover_id, prior, live, events):
        mover = live[mover_id]
        occupants = sorted(
            instance for instance in live.values()
            if instance.id != mover_id and instance.cell == mover.cell
        )
        for other in occupants:
            for rule in self.rules:
                if other.id not in live:
                    break
                pair = self._matches(rule, mover, other)
                if pair is None:
                    continue
                first, second = pair
                if rule.method == 'stepBack':
                    if first.id != mover_id:
                        continue
                    live[mover_id] = replace(mover, x=prior[0], y=prior[1])
                    events.append(rule.sentence)
                    return
                removed = first if rule.method == 'killSprite' else second
                del live[removed.id]
                events.append(rule.sentence)
                if removed.id == mover_id:
                    return

    def _collide_eos(self, mover_id, live, events):
        mover = live[mover_id]
        fired = False
        for rule in self.rules:
            if mover.stype in rule.subject_types and EOS in rule.object_types:
                first, second = mover, None
            elif EOS in rule.subject_types and mover.stype in rule.object_types:
                first, second = None, mover
            else:
                continue
            fired = True
            events.append(rule.sentence)
            if rule.method == 'stepBack':
                return
            removed = first if rule.method == 'killSprite' else second
            if removed is not None:
                del live[mover_id]
                return
        if not fired:
            events.append(f'{mover.stype} {EOS} > stepBack (default)')

    def advance(self, state, action):
        """
        Apply one action

        Args:
            state (GameState): Running state
            action (Action): Avatar action

        Returns:
            tuple: (next GameState, list of fired interaction sentences)

        Raises:
            EngineError: TERMINATED if the state is no longer running
        """
        if state.status is not Status.RUNNING:
            raise EngineError(EngineErrorKind.TERMINATED, f'game already {state.status.value}')

        events: List[str] = []
        live: Dict[int, SpriteInstance] = {instance.id: instance for instance in state.instances}
        avatar = live.get(state.avatar_id)
        if avatar is not None and action is not Action.NOOP:
            dx, dy = action.delta
            nx, ny = avatar.x + dx, avatar.y + dy
            if 0 <= nx < state.width and 0 <= ny < state.height:
                live[avatar.id] = replace(avatar, x=nx, y=ny)
                self._collide(avatar.id, avatar.cell, live, events)
            else:
                self._collide_eos(avatar.id, live, events)

        instances = tuple(sorted(live.values()))
        next_state = replace(
            state,
            instances=instances,
            step_count=state.step_count + 1,
            status=self._status(instances),
        )
        return next_state, events

    def step(self, state, action):
        return self.advance(state, action)[0]

    def _successors(self, state):
        return [(action, self.step(state, action)) for action in MOVES]

    def solve(self, level, max_steps=DEFAULT_MAX_STEPS, workers=1):
        """
        Breadth-first search for the shortest winning action sequence

        Args:
            level (LevelGrid): Level to solve
            max_steps (int): Depth budget
            workers (int): Threads expanding each frontier; the result does
                not depend on it

        Returns:
            SolveResult: Winnable with steps and witness actions, NotWinnable
                when the reachable states are exhausted, Budget otherwise
        """
        start = self.init_state(level)
        if start.status is Status.WON:
            return SolveResult(SolveVerdict.WINNABLE, 0, (), 1)
        if start.status is Status.LOST:
            return SolveResult(SolveVerdict.NOT_WINNABLE, explored=1)

        parents = {start.key(): None}
        frontier = [start]
        executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
        try:
            for depth in range(1, max_steps + 1):
                if executor is not None:
                    expanded = list(executor.map(self._successors, frontier))
                else:
                    expanded = [self._successors(state) for state in frontier]

                next_frontier = []
                for state, successors in zip(frontier, expanded):
                    for action, successor in successors:
                        key = successor.key()
                        if key in parents:
                            continue
                        parents[key] = (state.key(), action)
                        if successor.status is Status.WON:
                            actions = _reconstruct(parents, key)
                            logger.debug(f'Solved in {depth} steps after {len(parents)} states')
                            return SolveResult(SolveVerdict.WINNABLE, depth, actions, len(parents))
                        if successor.status is Status.RUNNING:
                            next_frontier.append(successor)

                if not next_frontier:
                    return SolveResult(SolveVerdict.NOT_WINNABLE, explored=len(parents))
                frontier = next_frontier
        finally:
            if executor is not None:
                executor.shutdown()

        logger.debug(f'Search budget of {max_steps} steps exhausted after {len(parents)} states')
        return SolveResult(SolveVerdict.BUDGET, explored=len(parents))

    def run_actions(self, level, actions):
        """
        Play an action sequence and record a trace

        Args:
            level (LevelGrid): Level to play
            actions (list): Actions, stopping early once the game ends

        Returns:
            tuple: (final GameState, list of trace lines)
        """
        state = self.init_state(level)
        trace = []
        for action in actions:
            if state.status is not Status.RUNNING:
                break
            state, events = self.advance(state, action)
            trace.append(format_trace_line(state, action, events))
        return state, trace


def format_trace_line(state, action, events):
    """step=<n> action=<a> avatar=<x>,<y>|removed fired=<sentences>|- status=<s>"""
    pos = state.avatar_pos
    avatar = f'{pos[0]},{pos[1]}' if pos is not None else 'removed'
    fired = '; '.join(events) if events else '-'
    return f'step={state.step_count} action={action.value} avatar={avatar} fired={fired} status={state.status.value}'


def _reconstruct(parents, key):
    actions = []
    while parents[key] is not None:
        key, action = parents[key]
        actions.append(action)
    actions.reverse()
    return tuple(actions)


@lru_cache(maxsize=64)
def engine_for(spec):
    return GridEngine(spec)


def init_state(spec, level):
    return engine_for(spec).init_state(level)


def step(state, spec, action):
    return engine_for(spec).step(state, action)


def solve(spec, level, max_steps=DEFAULT_MAX_STEPS, workers=1):
    return engine_for(spec).solve(level, max_steps, workers)


def run_actions(spec, level, actions):
    return engine_for(spec).run_actions(level, actions)


def parse_actions(text):
    """Parse 'Up,Right,...' or 'U R D L' into actions"""
    shorthand = {'U': Action.UP, 'D': Action.DOWN, 'L': Action.LEFT, 'R': Action.RIGHT, 'N': Action.NOOP}
    actions = []
    for word in text.replace(',', ' ').split():
        name = word.strip().capitalize()
        if name in shorthand:
            actions.append(shorthand[name])
        else:
            try:
                actions.append(Action(name))
            except ValueError:
                raise ValueError(f"Unknown action '{word}'")
    return actions
