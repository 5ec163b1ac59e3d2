"""Inject every configured pattern instance into a populated graph."""

from __future__ import annotations

import logging

from ..config import TYPOLOGIES
from ..errors import PatternError, PatternInjectionFailed
from ..model import CASH_NODE_ID, insert_transaction
from ..rng import PATTERNS, substream
from .typologies import INJECTORS

log = logging.getLogger(__name__)


def generate_instances(graph, gcfg, pcfg, master_seed, typologies=TYPOLOGIES):
    """Build instances against the unlabelled graph.

    Instance ``i`` of typology ``t`` draws from substream ``(t, i)``.  With
    per-typology exclusivity it only excludes entities used by earlier
    instances of the same typology, so typologies never depend on each other;
    global exclusivity excludes every entity used so far.
    """
    instances, failures = [], []
    shared = set()
    for t_idx, name in enumerate(TYPOLOGIES):
        if name not in typologies:
            continue
        p = pcfg.typology(name)
        used = shared if pcfg.exclusivity == "global" else set()
        for i in range(p.instance_count):
            rng = substream(master_seed, PATTERNS, t_idx, i)
            try:
                inst = INJECTORS[name](graph, gcfg, p, rng, exclude=frozenset(used), instance_id=i)
            except PatternError as exc:
                failures.append((name, i, exc))
                continue
            used.update(inst.entity_ids())
            instances.append(inst)
    return instances, failures


def apply_instances(graph, instances):
    """Insert instance edges and propagate fraud labels to every participant."""
    for inst in instances:
        for edge in inst.transactions:
            insert_transaction(graph, edge)
            for nid in (edge.source_id, edge.target_id):
                if nid != CASH_NODE_ID:
                    graph.mark_fraudulent(nid)
        for nid in inst.entity_ids():
            graph.mark_fraudulent(nid)


def inject_all(graph, gcfg, pcfg, master_seed):
    """Generate and apply all instances; returns ``(instances, warnings)``."""
    instances, failures = generate_instances(graph, gcfg, pcfg, master_seed)
    if failures and pcfg.strict:
        raise PatternInjectionFailed(failures)
    warnings = []
    for name, i, exc in failures:
        msg = f"skipped {name} instance {i}: {exc}"
        log.warning(msg)
        warnings.append(msg)
    apply_instances(graph, instances)
    return instances, warnings
