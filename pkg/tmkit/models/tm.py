"""
Immutable values of the static TM model: thimacs, their stages, flow and trigger arcs, events, behaviors, scenarios
"""

import functools
from dataclasses import dataclass
from enum import StrEnum

# module imports
from tmkit.diagnostics import PathError

Path = tuple[str, ...]


class Action(StrEnum):
    """The five generic actions of a machine; receive stands for arrive and accept"""
    CREATE = 'create'
    PROCESS = 'process'
    RELEASE = 'release'
    TRANSFER = 'transfer'
    RECEIVE = 'receive'


ACTION_ORDER = {x: i for i, x in enumerate(Action)}


class ArcKind(StrEnum):
    FLOW = 'flow'
    TRIGGER = 'trigger'

    @property
    def arrow(self) -> str:
        return '->' if self is ArcKind.FLOW else '~>'


class ThimacKind(StrEnum):
    THING = 'thing'
    OBJECT = 'object'

    @property
    def keyword(self) -> str:
        """DSL keyword opening a declaration of this kind"""
        return 'thimac' if self is ThimacKind.THING else 'object'


class Locality(StrEnum):
    SAME = 'same'
    CROSS = 'cross'


def fmt_path(path: Path) -> str:
    return '.'.join(path)


@dataclass(frozen=True, order=True)
class StageRef:
    """A stage identified by its owning thimac and its action"""
    thimac: Path
    action: Action

    def __str__(self):
        return self.path

    @property
    def path(self) -> str:
        return f'{fmt_path(self.thimac)}.{self.action}'


@dataclass(frozen=True)
class ArcRef:
    """An arc identified by its endpoints, as written in event regions"""
    kind: ArcKind
    src: StageRef
    dst: StageRef

    def __str__(self):
        return f'{self.src} {self.kind.arrow} {self.dst}'

    @property
    def path(self) -> str:
        return str(self)


@dataclass(frozen=True)
class Arc:
    id: int;         """Positional ordinal in the model's arc list"""
    kind: ArcKind
    src: StageRef
    dst: StageRef

    def __str__(self):
        return f'{self.src} {self.kind.arrow} {self.dst}'

    @property
    def path(self) -> str:
        return str(self)

    @property
    def ref(self) -> ArcRef:
        return ArcRef(self.kind, self.src, self.dst)


@dataclass(frozen=True)
class Thimac:
    path: Path;                     """Fully qualified path, unique in the model"""
    kind: ThimacKind
    stages: tuple[Action, ...];     """Declared stages in declaration order; create is implied when absent"""
    children: tuple[Path, ...];     """Subthimacs in declaration order"""

    def __str__(self):
        return fmt_path(self.path)

    @property
    def name(self) -> str:
        return self.path[-1]

    @property
    def parent(self) -> Path | None:
        return self.path[:-1] or None

    def has_stage(self, action: Action) -> bool:
        return action is Action.CREATE or action in self.stages

    def stage_refs(self) -> tuple[StageRef, ...]:
        """All stages, the implicit create first"""
        actions = self.stages if Action.CREATE in self.stages else (Action.CREATE,) + self.stages
        return tuple(StageRef(self.path, x) for x in actions)


RegionItem = StageRef | ArcRef


@dataclass(frozen=True)
class Event:
    """A region of the static model whose joint firing is one occurrence of the event"""
    name: str
    region: tuple[RegionItem, ...]


@dataclass(frozen=True)
class BehaviorGraph:
    """Chronology over events; a self-loop denotes repetition"""
    name: str
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    @classmethod
    def from_chains(cls, name: str, chains) -> 'BehaviorGraph':
        """
        Canonical graph from chains of event names: nodes touched by edges in order of first appearance along
        the edge list, then isolated nodes; duplicate edges dropped.
        """
        edges = []
        for chain in chains:
            for pair in zip(chain, chain[1:]):
                if pair not in edges:
                    edges.append(pair)
        nodes = []
        for pair in edges:
            for x in pair:
                if x not in nodes:
                    nodes.append(x)
        for chain in chains:
            for x in chain:
                if x not in nodes:
                    nodes.append(x)
        return cls(name, tuple(nodes), tuple(edges))

    def chains(self) -> list[list[str]]:
        """Edges merged into maximal consecutive chains, isolated nodes as single-name chains"""
        chains: list[list[str]] = []
        for src, dst in self.edges:
            if chains and chains[-1][-1] == src:
                chains[-1].append(dst)
            else:
                chains.append([src, dst])
        touched = {x for pair in self.edges for x in pair}
        chains.extend([x] for x in self.nodes if x not in touched)
        return chains


@dataclass(frozen=True)
class Injection:
    """A thing entering the model from outside at a given round"""
    label: str
    stage: StageRef
    step: int


@dataclass(frozen=True)
class Scenario:
    name: str
    injections: tuple[Injection, ...]


@dataclass(frozen=True)
class StaticModel:
    """Containment forest of thimacs with flow and trigger arcs, plus events, behaviors and scenarios"""
    thimacs: tuple[Thimac, ...] = ();          """Depth-first, in declaration order"""
    arcs: tuple[Arc, ...] = ()
    events: tuple[Event, ...] = ()
    behaviors: tuple[BehaviorGraph, ...] = ()
    scenarios: tuple[Scenario, ...] = ()

    @functools.cached_property
    def _by_path(self) -> dict[Path, Thimac]:
        return {x.path: x for x in self.thimacs}

    @functools.cached_property
    def _order(self) -> dict[Path, int]:
        return {x.path: i for i, x in enumerate(self.thimacs)}

    @functools.cached_property
    def _outgoing(self) -> dict[tuple[StageRef, ArcKind], tuple[Arc, ...]]:
        index: dict[tuple[StageRef, ArcKind], list[Arc]] = {}
        for arc in self.arcs:
            index.setdefault((arc.src, arc.kind), []).append(arc)
        return {k: tuple(v) for k, v in index.items()}

    @property
    def roots(self) -> tuple[Thimac, ...]:
        return tuple(x for x in self.thimacs if x.parent is None)

    def thimac(self, path: Path) -> Thimac:
        try:
            return self._by_path[path]
        except KeyError:
            raise PathError(f'no thimac {fmt_path(path)}') from None

    def has_thimac(self, path: Path) -> bool:
        return path in self._by_path

    def has_stage(self, stage: StageRef) -> bool:
        return stage.thimac in self._by_path and self._by_path[stage.thimac].has_stage(stage.action)

    def has_arc(self, ref: ArcRef) -> bool:
        return self.find_arc(ref) is not None

    def find_arc(self, ref: ArcRef) -> Arc | None:
        for arc in self._outgoing.get((ref.src, ref.kind), ()):
            if arc.dst == ref.dst:
                return arc
        return None

    def flows_from(self, stage: StageRef) -> tuple[Arc, ...]:
        """Outgoing flow arcs in arc order"""
        return self._outgoing.get((stage, ArcKind.FLOW), ())

    def triggers_from(self, stage: StageRef) -> tuple[Arc, ...]:
        """Outgoing trigger arcs in arc order"""
        return self._outgoing.get((stage, ArcKind.TRIGGER), ())

    def subtree(self, path: Path) -> list[Thimac]:
        """The thimac and all its descendants, depth-first"""
        result = []
        pending = [path]
        while pending:
            thimac = self.thimac(pending.pop())
            result.append(thimac)
            pending.extend(reversed(thimac.children))
        return result

    def stage_key(self, stage: StageRef) -> tuple[int, int]:
        """Sort key: thimac declaration order, then action order"""
        return self._order[stage.thimac], ACTION_ORDER[stage.action]

    def objects(self) -> list[Thimac]:
        return [x for x in self.thimacs if x.kind is ThimacKind.OBJECT]

    def event(self, name: str) -> Event:
        for x in self.events:
            if x.name == name:
                return x
        raise PathError(f'no event {name}')

    def behavior(self, name: str) -> BehaviorGraph:
        for x in self.behaviors:
            if x.name == name:
                return x
        raise PathError(f'no behavior {name}')

    def scenario(self, name: str) -> Scenario:
        for x in self.scenarios:
            if x.name == name:
                return x
        raise PathError(f'no scenario {name}')


def is_within(path: Path, ancestor: Path) -> bool:
    """True if the path is the ancestor itself or lies below it"""
    return path[:len(ancestor)] == ancestor


def locality(a: StageRef, b: StageRef) -> Locality:
    """Stages of one thimac, or of a thimac and one of its descendants, share a machine"""
    if is_within(a.thimac, b.thimac) or is_within(b.thimac, a.thimac):
        return Locality.SAME
    return Locality.CROSS
