"""Communication optimizer: greedy tag-graph decomposition into a tag tree and plan synthesis."""
import json
import logging
from collections import Counter
from dataclasses import dataclass, field

from dgsflow.errors import ConfigError, NoMatch
from dgsflow.plan import SyncPlan, WorkerNode, routing_targets, responsible_worker
from dgsflow.streams import is_heartbeat
from dgsflow.tags import ImplTag, Tag

logger = logging.getLogger(__name__)


@dataclass
class RateSpec:
    rates: dict = field(default_factory=dict)
    locations: dict = field(default_factory=dict)

    def rate(self, itag):
        return self.rates[itag]

    def location(self, itag):
        return self.locations.get(itag)

    def require(self, itags):
        missing = sorted(i for i in itags if i not in self.rates)
        if missing:
            raise ConfigError('rates missing for itags: ' + ', '.join(map(str, missing)),
                              missing=[str(i) for i in missing])
        return self

    @classmethod
    def from_dict(cls, data):
        spec = cls()
        try:
            for entry in data['itags']:
                itag = ImplTag(Tag.parse(entry['tag']), int(entry['stream']))
                rate = float(entry['rate'])
                if rate <= 0:
                    raise ConfigError(f'rate of {itag} must be positive', itag=str(itag))
                spec.rates[itag] = rate
                spec.locations[itag] = entry.get('location', f'E{itag.stream}')
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f'malformed rates document: {e}')
        return spec

    @classmethod
    def from_json_file(cls, path):
        try:
            with open(path, encoding='utf-8') as handle:
                return cls.from_dict(json.load(handle))
        except OSError as e:
            raise ConfigError(f'cannot read rates file {path}: {e}')
        except ValueError as e:
            raise ConfigError(f'rates file {path} is not valid JSON: {e}')

    @classmethod
    def from_streams(cls, streams):
        """Observed event counts per itag, located at their stream."""
        counts = Counter(m.itag for stream in streams for m in stream if not is_heartbeat(m))
        return cls({i: float(c) for i, c in counts.items()}, {i: f'E{i.stream}' for i in counts})

    def to_dict(self):
        return {'itags': [{'tag': str(i.tag), 'stream': i.stream, 'rate': r, 'location': self.locations.get(i)}
                          for i, r in sorted(self.rates.items())]}


@dataclass(frozen=True)
class TagGraph:
    vertices: frozenset
    edges: frozenset

    def neighbours(self, v):
        return {u for edge in self.edges if v in edge for u in edge if u != v}

    def has_self_loop(self, v):
        return frozenset((v,)) in self.edges

    def components(self, within=None):
        remaining = set(self.vertices if within is None else within)
        adjacency = {v: self.neighbours(v) & remaining for v in remaining}
        found = []
        while remaining:
            start = min(remaining)
            component, stack = set(), [start]
            while stack:
                v = stack.pop()
                if v in component:
                    continue
                component.add(v)
                stack.extend(adjacency[v] - component)
            remaining -= component
            found.append(frozenset(component))
        return found


@dataclass(frozen=True)
class TagNode:
    owned: tuple = ()
    children: tuple = ()

    def itags(self):
        yield from self.owned
        for child in self.children:
            yield from child.itags()

    def depth(self):
        return 1 + max((c.depth() for c in self.children), default=0)


def build_tag_graph(itags, rel):
    ordered = sorted(itags)
    edges = set()
    for pos, a in enumerate(ordered):
        for b in ordered[pos:]:
            if rel.itags_depend(a, b) or rel.itags_depend(b, a):
                edges.add(frozenset((a, b)))
    return TagGraph(frozenset(ordered), frozenset(edges))


def _total_rate(component, rates):
    return sum(rates.rate(i) for i in component)


def _order_components(components, rates):
    return sorted(components, key=lambda c: (-_total_rate(c, rates), min(c)))


def greedy_split(g, rates, within=None):
    """Remove lowest-rate itags until the residual graph falls apart into >= 2 components."""
    residual = set(g.vertices if within is None else within)
    removed = []
    while True:
        components = g.components(residual)
        if len(components) >= 2:
            return removed, _order_components(components, rates)
        if not residual:
            return removed, []
        victim = min(residual, key=lambda i: (rates.rate(i), i))
        residual.discard(victim)
        removed.append(victim)


def _build(g, rates, vertices):
    removed, components = greedy_split(g, rates, vertices)
    if not components:
        return TagNode(tuple(removed))
    rest = frozenset().union(*components[1:])
    return TagNode(tuple(removed), (_build(g, rates, components[0]), _build(g, rates, rest)))


def build_tag_tree(itags, rel, rates):
    itags = frozenset(itags)
    rates.require(itags)
    g = build_tag_graph(itags, rel)
    return _build(g, rates, itags)


def random_tag_tree(itags, rel, rng, max_depth=4):
    """A random decomposition: random removal order and random grouping of components."""
    g = build_tag_graph(itags, rel)

    def build(vertices, depth):
        residual = set(vertices)
        removed = []
        if depth >= max_depth:
            return TagNode(tuple(sorted(residual)))
        while True:
            components = g.components(residual)
            if len(components) >= 2 and rng.random() < 0.8:
                break
            if not residual or rng.random() < 0.1:
                return TagNode(tuple(removed + sorted(residual)))
            victim = rng.choice(sorted(residual))
            residual.discard(victim)
            removed.append(victim)
        rng.shuffle(components)
        cut = rng.randint(1, len(components) - 1)
        left = frozenset().union(*components[:cut])
        right = frozenset().union(*components[cut:])
        return TagNode(tuple(removed), (build(left, depth + 1), build(right, depth + 1)))

    return build(frozenset(itags), 1)


def _location(node_itags, subtree_itags, rates):
    if rates is None:
        return None
    if node_itags:
        return rates.location(min(node_itags, key=lambda i: (-rates.rate(i), i)))
    if subtree_itags:
        return rates.location(min(subtree_itags, key=lambda i: (rates.rate(i), i)))
    return None


def _match(p, node, sid):
    """Depth-first search for state types and fork/join bindings realising `node` at type `sid`."""
    tags = {i.tag for i in node.itags()}
    if not tags <= p.pred(sid):
        return None
    if not node.children:
        return (sid, None, None, ())
    for fork, join in p.compatible_pairs(source=sid):
        matched = []
        for child, target in zip(node.children, fork.targets):
            found = _match(p, child, target)
            if found is None:
                break
            matched.append(found)
        else:
            return (sid, fork.name, join.name, tuple(matched))
    return None


def synthesize_plan(p, tree, rates=None):
    found = _match(p, tree, 0)
    if found is None:
        raise NoMatch(
            f'no fork/join assignment of {p.name} realises the tag tree',
            node=sorted(str(i) for i in tree.owned))
    counter = iter(range(1, 1 << 30))

    def to_worker(node, binding):
        sid, fork, join, child_bindings = binding
        worker_id = f'w{next(counter)}'
        children = tuple(to_worker(c, b) for c, b in zip(node.children, child_bindings))
        return WorkerNode(
            id=worker_id,
            state_type=sid,
            itags=frozenset(node.owned),
            fork=fork,
            join=join,
            children=children,
            location=_location(node.owned, list(node.itags()), rates),
        )

    plan = SyncPlan((to_worker(tree, found),))
    logger.debug('synthesized plan with %d workers', len(plan.workers()))
    return plan


def optimize(p, itags, rates):
    return synthesize_plan(p, build_tag_tree(itags, p.rel, rates), rates)


def random_plan(p, itags, rng, max_depth=4):
    return synthesize_plan(p, random_tag_tree(itags, p.rel, rng, max_depth))


def comm_cost(plan, rates):
    cost = 0.0
    for itag in sorted(plan.owned_itags()):
        rate = rates.rate(itag)
        owner = plan.worker(responsible_worker(plan, itag))
        if not owner.is_leaf:
            cost += rate
        cost += rate * (len(routing_targets(plan, itag)) - 1)
    return cost
