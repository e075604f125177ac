"""Synchronization plans: worker trees, validity checking, ownership and routing."""
import json
import logging
from dataclasses import dataclass
from functools import cached_property

from dgsflow.errors import InvalidPlan, Unowned, Violation
from dgsflow.tags import ImplTag

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WorkerNode:
    """A worker: its state type, the itags it is responsible for, and its fork/join bindings."""

    id: str
    state_type: int = 0
    itags: frozenset = frozenset()
    fork: str = None
    join: str = None
    children: tuple = ()
    location: str = None
    update: int = None

    @property
    def is_leaf(self):
        return not self.children

    @property
    def update_binding(self):
        return self.state_type if self.update is None else self.update

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def to_dict(self):
        return {
            'id': self.id,
            'state_type': self.state_type,
            'itags': [i.to_dict() for i in sorted(self.itags)],
            'location': self.location,
            'fork': self.fork,
            'join': self.join,
            'children': [c.to_dict() for c in self.children],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                id=str(data['id']),
                state_type=int(data.get('state_type', 0)),
                itags=frozenset(ImplTag.from_dict(i) for i in data.get('itags', [])),
                fork=data.get('fork'),
                join=data.get('join'),
                children=tuple(cls.from_dict(c) for c in data.get('children', [])),
                location=data.get('location'),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidPlan(f'malformed worker node: {e}')


@dataclass(frozen=True)
class SyncPlan:
    roots: tuple

    def __post_init__(self):
        object.__setattr__(self, 'roots', tuple(self.roots))

    @cached_property
    def _parents(self):
        parents = {}
        for root in self.roots:
            parents.setdefault(root.id, None)
            for node in root.walk():
                for child in node.children:
                    parents[child.id] = node.id
        return parents

    @cached_property
    def _workers(self):
        return {node.id: node for root in self.roots for node in root.walk()}

    @cached_property
    def _owners(self):
        owners = {}
        for node in self.workers():
            for itag in node.itags:
                owners.setdefault(itag, node.id)
        return owners

    def workers(self):
        """Workers in pre-order, tree by tree."""
        return [node for root in self.roots for node in root.walk()]

    def worker(self, worker_id):
        return self._workers[worker_id]

    def parent(self, worker_id):
        return self._parents.get(worker_id)

    def ancestors(self, worker_id):
        chain, current = [], self.parent(worker_id)
        while current is not None:
            chain.append(current)
            current = self.parent(current)
        return chain

    def descendants(self, worker_id):
        return [n.id for n in self.worker(worker_id).walk()][1:]

    def depth(self):
        """Workers on the longest root-to-leaf path."""
        def height(node):
            return 1 + max((height(c) for c in node.children), default=0)
        return max((height(r) for r in self.roots), default=0)

    def owned_itags(self):
        return frozenset(i for n in self.workers() for i in n.itags)

    def leaves(self):
        return [n for n in self.workers() if n.is_leaf]

    def to_dict(self):
        return {'trees': [r.to_dict() for r in self.roots]}

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or not isinstance(data.get('trees'), list):
            raise InvalidPlan('plan JSON must be an object with a "trees" list')
        return cls(tuple(WorkerNode.from_dict(t) for t in data['trees']))

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except ValueError as e:
            raise InvalidPlan(f'plan is not valid JSON: {e}')
        return cls.from_dict(data)

    def to_dot(self):
        lines = ['digraph plan {', '  node [shape=box];']
        for node in self.workers():
            owned = '\\n'.join(str(i) for i in sorted(node.itags)) or '-'
            where = f' @{node.location}' if node.location else ''
            lines.append(f'  "{node.id}" [label="{node.id}{where}\\nstate {node.state_type}\\n{owned}"];')
            for child in node.children:
                lines.append(f'  "{node.id}" -> "{child.id}";')
        lines.append('}')
        return '\n'.join(lines)


def subtree_tags(worker):
    """Tags owned anywhere in the subtree: the fork predicate handed to this worker."""
    return frozenset(i.tag for node in worker.walk() for i in node.itags)


def single_worker_plan(itags, worker_id='w1', location=None):
    return SyncPlan((WorkerNode(worker_id, 0, frozenset(itags), location=location),))


def responsible_worker(plan, itag):
    try:
        return plan._owners[itag]
    except KeyError:
        raise Unowned(f'no worker owns {itag}', itag=str(itag))


def routing_targets(plan, itag):
    owner = responsible_worker(plan, itag)
    return frozenset([owner, *plan.descendants(owner)])


def _check_bindings(p, node, violations):
    if node.update_binding != node.state_type:
        violations.append(Violation('V1', f'{node.id} binds update {node.update} to state type {node.state_type}',
                                    (node.id,)))
    if node.is_leaf:
        if node.fork or node.join:
            violations.append(Violation('V1', f'leaf {node.id} declares fork/join bindings', (node.id,)))
        return
    if len(node.children) != 2:
        violations.append(Violation('binary', f'{node.id} has {len(node.children)} children', (node.id,)))
        return
    try:
        fork, join = p.fork(node.fork), p.join(node.join)
    except KeyError as e:
        violations.append(Violation('V1', f'{node.id}: {e.args[0]}', (node.id,)))
        return
    child_types = tuple(c.state_type for c in node.children)
    if fork.source != node.state_type or tuple(fork.targets) != child_types:
        violations.append(Violation(
            'V1', f'fork {fork.name} does not map state type {node.state_type} to {child_types}', (node.id,)))
    if join.target != node.state_type or tuple(join.sources) != child_types:
        violations.append(Violation(
            'V1', f'join {join.name} does not map {child_types} to state type {node.state_type}', (node.id,)))


def validate_plan(p, plan, all_itags):
    violations = []
    workers = plan.workers()
    ids = [n.id for n in workers]
    if len(set(ids)) != len(ids):
        violations.append(Violation('ids', 'worker ids are not unique'))
        return violations

    count = len(p.state_types)
    for root in plan.roots:
        if root.state_type != 0:
            violations.append(Violation('V1', f'root {root.id} must hold state type 0', (root.id,)))
    for node in workers:
        if not 0 <= node.state_type < count:
            violations.append(Violation('V1', f'{node.id} has unknown state type {node.state_type}', (node.id,)))
            continue
        pred = p.pred(node.state_type)
        outside = sorted(str(t) for t in subtree_tags(node) if t not in pred)
        if outside:
            violations.append(Violation(
                'V1', f'state type {node.state_type} of {node.id} does not admit {", ".join(outside)}', (node.id,)))
        _check_bindings(p, node, violations)

    seen = {}
    for node in workers:
        for itag in node.itags:
            if itag in seen:
                violations.append(Violation('ownership', f'{itag} owned by {seen[itag]} and {node.id}',
                                            (seen[itag], node.id)))
            seen.setdefault(itag, node.id)

    lineage = {n.id: set(plan.ancestors(n.id)) for n in workers}
    for a_pos, a in enumerate(workers):
        for b in workers[a_pos + 1:]:
            if a.id in lineage[b.id] or b.id in lineage[a.id]:
                continue
            shared = a.itags & b.itags
            if shared:
                violations.append(Violation('V2', f'{a.id} and {b.id} both own {sorted(map(str, shared))}',
                                            (a.id, b.id)))
            clash = sorted((str(x), str(y)) for x in a.itags for y in b.itags if p.rel.itags_depend(x, y))
            if clash:
                violations.append(Violation(
                    'V2', f'{a.id} and {b.id} own dependent itags {clash[0][0]} and {clash[0][1]}', (a.id, b.id)))

    all_itags = frozenset(all_itags)
    owned = frozenset(seen)
    missing = all_itags - owned
    if missing:
        violations.append(Violation('coverage', 'unowned itags: ' + ', '.join(sorted(map(str, missing)))))
    extra = owned - all_itags
    if extra:
        violations.append(Violation('coverage', 'itags not in the run: ' + ', '.join(sorted(map(str, extra)))))
    return violations
