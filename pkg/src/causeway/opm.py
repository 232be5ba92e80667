"""OPM edge inference: Datalog closure, causal edge semantics, and their audit."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .cause import CausalSituation, part_of_cause_relation
from .provenance import Interpretation, ProvenanceGraph, to_causal_situation

USED = "used"
GENERATED = "wasGeneratedBy"
DERIVED = "wasDerivedFrom"
TRIGGERED = "wasTriggeredBy"
DERIVED_PLUS = "wasDerivedFrom+"
TRIGGERED_PLUS = "wasTriggeredBy+"

RELATIONS = (USED, GENERATED, DERIVED, TRIGGERED, DERIVED_PLUS, TRIGGERED_PLUS)


class EdgeFact(NamedTuple):
    relation: str
    subject: str
    object: str

    def __str__(self) -> str:
        return f"{self.relation}({self.subject}, {self.object})"


class Derivation(NamedTuple):
    rule: str
    premises: tuple


# head(a, c) :- first(a, b), second(b, c); second None means head(a, b) :- first(a, b)
RULES = (
    ("derived", DERIVED, GENERATED, USED),
    ("triggered", TRIGGERED, USED, GENERATED),
    ("derived+base", DERIVED_PLUS, DERIVED, None),
    ("derived+step", DERIVED_PLUS, DERIVED, DERIVED_PLUS),
    ("triggered+base", TRIGGERED_PLUS, TRIGGERED, None),
    ("triggered+step", TRIGGERED_PLUS, TRIGGERED, TRIGGERED_PLUS),
)


class FactBase:
    """Edge facts, each with the rule instance that first derived it (None for base facts)."""

    def __init__(self, facts: Iterable[EdgeFact] = ()):
        self.derivations: dict = {}
        for f in facts:
            self.add(EdgeFact(*f))

    def add(self, fact: EdgeFact, derivation: Derivation | None = None) -> bool:
        if fact in self.derivations:
            return False
        self.derivations[fact] = derivation
        return True

    def __contains__(self, fact) -> bool:
        return EdgeFact(*fact) in self.derivations

    def __iter__(self):
        return iter(sorted(self.derivations))

    def __len__(self) -> int:
        return len(self.derivations)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactBase):
            return NotImplemented
        return set(self.derivations) == set(other.derivations)

    def facts(self, relation: str | None = None) -> set:
        return {f for f in self.derivations if relation is None or f.relation == relation}

    def pairs(self, relation: str) -> set:
        return {(f.subject, f.object) for f in self.derivations if f.relation == relation}

    def dump(self) -> str:
        return "".join(f"{f}\n" for f in sorted(self.derivations, key=str))


def base_facts(g: ProvenanceGraph) -> FactBase:
    facts = [EdgeFact(USED, p, a) for p, a, _ in g.used]
    facts += [EdgeFact(GENERATED, a, p) for a, p in g.generated]
    return FactBase(facts)


def _index(facts) -> dict:
    idx: dict = {}
    for f in facts:
        idx.setdefault(f.relation, {}).setdefault(f.subject, set()).add(f.object)
    return idx


def datalog_closure(base: FactBase) -> FactBase:
    """Least fixpoint of the OPM rules by semi-naive iteration.

    A new fact must use at least one fact from the previous round's delta.
    Deltas are scanned in sorted order so recorded first derivations are stable.
    """
    out = FactBase()
    for f in base:
        out.add(f, base.derivations[f])
    delta = sorted(out.derivations)
    while delta:
        full_idx = _index(out.derivations)
        delta_idx = _index(delta)
        fresh: list = []
        for name, head, first, second in RULES:
            if second is None:
                for a, objs in sorted(delta_idx.get(first, {}).items()):
                    for b in sorted(objs):
                        fresh.append((EdgeFact(head, a, b), Derivation(name, (EdgeFact(first, a, b),))))
                continue
            # delta on the left, anything on the right; then old on the left, delta on the right
            for left, right in ((delta_idx, full_idx), (full_idx, delta_idx)):
                for a, mids in sorted(left.get(first, {}).items()):
                    for b in sorted(mids):
                        for c in sorted(right.get(second, {}).get(b, ())):
                            prem = (EdgeFact(first, a, b), EdgeFact(second, b, c))
                            fresh.append((EdgeFact(head, a, c), Derivation(name, prem)))
        delta = []
        for fact, how in fresh:
            if out.add(fact, how):
                delta.append(fact)
        delta.sort()
    return out


def apply_rules_once(facts: FactBase) -> set:
    """Every fact any rule derives from *facts* in one naive step (fixpoint checks)."""
    idx = _index(facts.derivations)
    out = set()
    for _, head, first, second in RULES:
        for a, mids in idx.get(first, {}).items():
            for b in mids:
                if second is None:
                    out.add(EdgeFact(head, a, b))
                else:
                    out.update(EdgeFact(head, a, c) for c in idx.get(second, {}).get(b, ()))
    return out


class SituationMismatch(ValueError):
    pass


def _between(poc: set, far: str, near: str, candidates) -> bool:
    return any(m != far and m != near and (far, m) in poc and (m, near) in poc for m in candidates)


def semantic_edges(sit: CausalSituation, g: ProvenanceGraph, max_cause_size: int | None = None,
                   poc: set | None = None) -> FactBase:
    """OPM edges read through actual causation.

    ``poc`` holds ``(x, y)`` when x's value is part of an actual cause of
    y's value.  Immediacy ("no actual cause between") is semantic: no third
    node m with ``(far, m)`` and ``(m, near)`` in ``poc``.
    """
    artifacts = sorted(g.artifacts)
    processes = sorted(g.process_names)
    endo = set(sit.model.endogenous)
    missing = (set(artifacts) | set(processes)) - endo
    if missing:
        raise SituationMismatch(
            f"situation was not compiled from this graph with input proxies (missing {sorted(missing)})")
    if poc is None:
        poc = part_of_cause_relation(sit, max_cause_size)
    nodes = artifacts + processes
    facts = []
    used = {(p, x) for p in processes for x in artifacts
            if (x, p) in poc and not _between(poc, x, p, nodes)}
    gen = {(a, p) for a in artifacts for p in processes
           if (p, a) in poc and not _between(poc, p, a, nodes)}
    facts += [EdgeFact(USED, p, x) for p, x in used]
    facts += [EdgeFact(GENERATED, a, p) for a, p in gen]
    for x in artifacts:
        for y in artifacts:
            if x != y and (y, x) in poc:
                facts.append(EdgeFact(DERIVED_PLUS, x, y))
                if not _between(poc, y, x, artifacts):
                    facts.append(EdgeFact(DERIVED, x, y))
    for p in processes:
        for q in processes:
            if p != q and (q, p) in poc:
                facts.append(EdgeFact(TRIGGERED_PLUS, p, q))
                if any((p, x) in used and (x, q) in gen for x in artifacts):
                    facts.append(EdgeFact(TRIGGERED, p, q))
    return FactBase(facts)


def transitive_closure(pairs: set) -> set:
    succ: dict = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    out = set()
    for start in succ:
        seen, todo = set(), list(succ[start])
        while todo:
            n = todo.pop()
            if n not in seen:
                seen.add(n)
                todo.extend(succ.get(n, ()))
        out.update((start, n) for n in seen)
    return out


@dataclass
class AuditReport:
    sound: dict = field(default_factory=dict)
    unsound: dict = field(default_factory=dict)
    missed: dict = field(default_factory=dict)
    # transitive closure of the semantic one-step relation vs the unconstrained reading
    conjecture_counterexamples: list = field(default_factory=list)

    def all(self, section: str) -> list:
        part = getattr(self, section)
        return sorted((f for rel in RELATIONS for f in part.get(rel, ())), key=str)

    @property
    def clean(self) -> bool:
        return not self.all("unsound") and not self.all("missed")

    def text(self) -> str:
        out = []
        for title, section in (("SOUND", "sound"), ("UNSOUND", "unsound"), ("MISSED", "missed")):
            facts = self.all(section)
            out.append(f"{title} ({len(facts)})")
            out.extend(f"  {f}" for f in facts)
        if self.conjecture_counterexamples:
            out.append(f"CONJECTURE COUNTEREXAMPLES ({len(self.conjecture_counterexamples)})")
            out.extend(f"  {c}" for c in self.conjecture_counterexamples)
        return "\n".join(out) + "\n"

    def to_json(self) -> str:
        doc = {
            section: {rel: sorted([f.subject, f.object] for f in getattr(self, section).get(rel, ()))
                      for rel in RELATIONS}
            for section in ("sound", "unsound", "missed")
        }
        doc["conjecture_counterexamples"] = list(self.conjecture_counterexamples)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def compare(syntactic: FactBase, semantic: FactBase) -> AuditReport:
    rep = AuditReport()
    for rel in RELATIONS:
        syn, sem = syntactic.facts(rel), semantic.facts(rel)
        rep.sound[rel] = syn & sem
        rep.unsound[rel] = syn - sem
        rep.missed[rel] = sem - syn
    for one, plus in ((DERIVED, DERIVED_PLUS), (TRIGGERED, TRIGGERED_PLUS)):
        closed = transitive_closure(semantic.pairs(one))
        direct = semantic.pairs(plus)
        for s, o in sorted(closed - direct):
            rep.conjecture_counterexamples.append(
                f"{plus}: ({s}, {o}) follows from {one} steps but is not part of an actual cause")
        for s, o in sorted(direct - closed):
            rep.conjecture_counterexamples.append(
                f"{plus}: ({s}, {o}) is part of an actual cause but not a chain of {one} steps")
    return rep


def audit(g: ProvenanceGraph, interp: Interpretation, max_cause_size: int | None = None) -> AuditReport:
    syntactic = datalog_closure(base_facts(g))
    sit = to_causal_situation(g, interp, proxy_inputs=True)
    return compare(syntactic, semantic_edges(sit, g, max_cause_size))
