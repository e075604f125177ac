"""Tags, implementation tags, tag predicates and the dependence relation."""
import re
from dataclasses import dataclass, field

from dgsflow.errors import UnknownTag, Violation

_TAG_PATTERN = re.compile(r'^([A-Za-z_][A-Za-z0-9_]*)(?:\(([-0-9, ]*)\))?$')


@dataclass(frozen=True, order=True)
class Tag:
    """Parallelization-relevant part of an event: a constructor name plus integer keys."""

    name: str
    key: tuple = ()

    def __str__(self):
        if not self.key:
            return self.name
        return f"{self.name}({','.join(str(k) for k in self.key)})"

    @classmethod
    def of(cls, name, *key):
        return cls(name, tuple(key))

    @classmethod
    def parse(cls, text):
        match = _TAG_PATTERN.match(text.strip())
        if not match:
            raise UnknownTag(f'Cannot parse tag {text!r}')
        name, args = match.groups()
        if not args:
            return cls(name)
        return cls(name, tuple(int(a) for a in args.split(',') if a.strip()))


@dataclass(frozen=True, order=True)
class ImplTag:
    """A tag together with the input stream that produces it."""

    tag: Tag
    stream: int

    def __str__(self):
        return f'{self.tag}@{self.stream}'

    def to_dict(self):
        return {'tag': str(self.tag), 'stream': self.stream}

    @classmethod
    def from_dict(cls, data):
        return cls(Tag.parse(data['tag']), int(data['stream']))


def predicate(*tags):
    """Build a tag predicate (a finite tag set)."""
    return frozenset(tags)


def satisfies(pred, tag):
    return tag in pred


@dataclass(frozen=True)
class DependenceRelation:
    """Directed pair store; `depends` looks pairs up as stored, so asymmetry is observable."""

    pairs: frozenset = frozenset()
    _adjacency: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        adjacency = {}
        for a, b in self.pairs:
            adjacency.setdefault(a, set()).add(b)
        object.__setattr__(self, '_adjacency', {k: frozenset(v) for k, v in adjacency.items()})

    @classmethod
    def symmetric(cls, pairs):
        closed = set()
        for a, b in pairs:
            closed.add((a, b))
            closed.add((b, a))
        return cls(frozenset(closed))

    @classmethod
    def from_function(cls, alphabet, depends):
        """Tabulate a symbolic `depends(t1, t2)` over a finite alphabet."""
        ordered = sorted(alphabet)
        return cls(frozenset((a, b) for a in ordered for b in ordered if depends(a, b)))

    def depends(self, a, b):
        return b in self._adjacency.get(a, ())

    def indep(self, a, b):
        return not self.depends(a, b)

    def dependents(self, tag):
        return self._adjacency.get(tag, frozenset())

    def itags_depend(self, x, y):
        """Lifting rule: implementation tags depend iff their tags do."""
        return self.depends(x.tag, y.tag)

    def to_dict(self):
        return {'pairs': sorted([str(a), str(b)] for a, b in self.pairs)}


def validate_dependence(rel, alphabet):
    violations = []
    for a, b in sorted(rel.pairs):
        if a not in alphabet or b not in alphabet:
            violations.append(Violation('unknown_tag', f'pair ({a}, {b}) uses a tag outside the alphabet', (a, b)))
            continue
        if not rel.depends(b, a):
            violations.append(Violation('asymmetric', f'({a}, {b}) is present but ({b}, {a}) is not', (a, b)))
    return violations


def indep_preds(p1, p2, rel):
    """True iff every tag in p1 is independent of every tag in p2."""
    for a in p1:
        deps = rel.dependents(a)
        if deps and any(b in deps for b in p2):
            return False
    return True
