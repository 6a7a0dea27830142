"""Query construction and solver dispatch shared by the CLI and service."""
from __future__ import annotations

import math

from .dataset import Dataset
from .ett import group_attributes, solve_ett
from .hc import HCConfig, solve_hc
from .nbc import DESIRABLE, UNDESIRABLE, Model, ModelError, Query, TagSelection
from .oracle import TopK, solve_naive
from .pa import group_tags, solve_pa

ALGORITHMS = ("naive", "ett", "pa", "hc")


def parse_tag_spec(spec) -> tuple[str, float, str]:
    """Normalize one tag selection to (name, weight, polarity).

    Accepts a bare name ("T1"), a "!"-prefixed name for undesirable
    ("!T2"), or a mapping with name/weight/polarity keys.
    """
    if isinstance(spec, str):
        name = spec.strip()
        polarity = DESIRABLE
        if name.startswith("!"):
            polarity = UNDESIRABLE
            name = name[1:].strip()
        if not name:
            raise ModelError("empty tag name in selection")
        return name, 1.0, polarity
    if isinstance(spec, dict):
        if "name" not in spec:
            raise ModelError("tag selection object needs a 'name'")
        name = str(spec["name"])
        weight = spec.get("weight", 1.0)
        if not isinstance(weight, (int, float)) or isinstance(weight, bool):
            raise ModelError(f"weight for {name!r} must be a number")
        polarity = str(spec.get("polarity", DESIRABLE))
        return name, float(weight), polarity
    raise ModelError(f"unsupported tag selection {spec!r}")


def build_query(model: Model, tag_specs, k: int) -> Query:
    """Resolve tag names against the model and assemble a validated Query."""
    if not tag_specs:
        raise ModelError("select at least one tag")
    selections = []
    for spec in tag_specs:
        name, weight, polarity = parse_tag_spec(spec)
        selections.append(TagSelection(tag=model.tag_index(name), weight=weight,
                                       polarity=polarity))
    query = Query(selections=tuple(selections), k=k)
    query.validate(model)
    return query


def run_solver(model: Model, query: Query, algo: str, *,
               mprime: int | None = None, grouping_method: str = "contiguous",
               ds: Dataset | None = None, epsilon: float | None = None,
               sigma: float | None = None, zprime: int = 2,
               restarts: int = 16, max_steps: int | None = None, seed: int = 0,
               trace: bool = False) -> TopK:
    """Run one named algorithm with its parameters."""
    if algo == "naive":
        return solve_naive(model, query)
    if algo == "ett":
        grouping = None
        if grouping_method != "contiguous":
            if ds is None:
                raise ModelError(
                    f"grouping method {grouping_method!r} needs the training dataset")
            l = math.ceil(model.m / (mprime if mprime else 3))
            grouping = group_attributes(ds, l, grouping_method)
        return solve_ett(model, query, grouping=grouping, mprime=mprime, trace=trace)
    if algo == "pa":
        grouping = None
        if grouping_method != "contiguous":
            grouping = group_tags(query, zprime, grouping_method, ds)
        return solve_pa(model, query, epsilon=epsilon, sigma=sigma, zprime=zprime,
                        grouping=grouping, ds=ds, trace=trace)
    if algo == "hc":
        cfg = HCConfig(restarts=restarts, max_steps=max_steps, seed=seed)
        return solve_hc(model, query, cfg, trace=trace)
    raise ModelError(f"unknown algorithm {algo!r}, expected one of {ALGORITHMS}")
