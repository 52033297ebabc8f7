# classical_sets.py
"""Hand-simplified determining sets, each paired with the generated variant it should match.

Terms are written over the signature of the named builtin variety. A bare y1
stands for the identity term that any determining set may carry for free.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

from bit_witness import builtin
from errors import UnknownVariety
from term_core import parse_term
from termset_gen import Provenance, TermSet, Variant, gen_termset

logger = logging.getLogger("bit_termset")


@dataclass(frozen=True)
class ReferenceSet:
    name: str
    variety: str
    variant: Variant
    terms: Tuple[str, ...]
    note: str = ""

    def termset(self) -> TermSet:
        spec = builtin(self.variety)
        parsed = tuple(parse_term(t, spec.sig) for t in self.terms)
        prov = tuple(Provenance("reference", tau=self.name) for _ in parsed)
        return TermSet(None, False, parsed, prov, spec.sig, spec.witness, label=self.name)

    def generated(self) -> TermSet:
        return gen_termset(builtin(self.variety), self.variant)


GROUP_NORMAL = (
    "mul(y1,y2)",
    "mul(mul(x1,y1),inv(x1))",
    "mul(mul(inv(x1),inv(y1)),x1)",
    "y1",
)

RING_IDEAL = ("add(y1,y2)", "neg(y1)", "mul(x1,y1)", "mul(y1,x1)")

# y1y2, y1/y2 and the lifted product and quotients
LOOP_LIFTED = (
    "mul(y1,y2)",
    "rdiv(y1,y2)",
    "rdiv(mul(mul(y1,x1),mul(y2,x2)),mul(x1,x2))",
    "rdiv(rdiv(mul(y1,x1),mul(y2,x2)),rdiv(x1,x2))",
    "rdiv(ldiv(mul(y1,x1),mul(y2,x2)),ldiv(x1,x2))",
)

LOOP_CONJUGATES = (
    "mul(y1,y2)",
    "rdiv(mul(mul(y1,x1),x2),mul(x1,x2))",
    "rdiv(mul(x1,mul(y1,x2)),mul(x1,x2))",
    "rdiv(rdiv(mul(y1,x1),x2),rdiv(x1,x2))",
    "rdiv(ldiv(x1,mul(y1,x2)),ldiv(x1,x2))",
)

# the shift term lifts both y1 and y2 over the same x1; with two different x it is not a 0-ideal term
LOOP_SINGLE_SLOT = (
    ("rdiv(mul(y1,x1),mul(y2,x1))",)
    + LOOP_CONJUGATES
    + ("rdiv(rdiv(x1,mul(y1,x2)),rdiv(x1,x2))", "rdiv(ldiv(mul(y1,x1),x2),ldiv(x1,x2))")
)

LOOP_NORMAL_SUBLOOP = LOOP_CONJUGATES + ("rdiv(y1,y2)", "ldiv(y1,y2)")

OMEGA_GROUP_RIGHT = (
    "mul(omega(mul(y1,x1),x2),inv(omega(x1,x2)))",
    "mul(omega(x1,mul(y1,x2)),inv(omega(x1,x2)))",
)

OMEGA_GROUP_LEFT = (
    "mul(inv(omega(x1,x2)),omega(mul(y1,x1),x2))",
    "mul(inv(omega(x1,x2)),omega(x1,mul(y1,x2)))",
)

OMEGA_LOOP_SLOTS = (
    "rdiv(omega(mul(y1,x1),x2),omega(x1,x2))",
    "rdiv(omega(x1,mul(y1,x2)),omega(x1,x2))",
)

SEMILOOP_LIFTED = LOOP_LIFTED[:4]

SEMILOOP_SWAPPED = (
    "mul(y1,y2)",
    "rdiv(y1,y2)",
    "rdiv(mul(x1,x2),mul(mul(y1,x1),mul(y2,x2)))",
    "rdiv(rdiv(x1,x2),rdiv(mul(y1,x1),mul(y2,x2)))",
)

REFERENCE_SETS: Tuple[ReferenceSet, ...] = (
    ReferenceSet("group-normal", "group", Variant.IV, GROUP_NORMAL, "normal subgroups"),
    ReferenceSet("ring-ideal", "ring", Variant.IV, RING_IDEAL, "two-sided ring ideals"),
    ReferenceSet("loop-lifted", "loop", Variant.I, LOOP_LIFTED),
    ReferenceSet("loop-single-slot", "loop", Variant.IV, LOOP_SINGLE_SLOT),
    ReferenceSet("loop-normal-subloop", "loop", Variant.IV, LOOP_NORMAL_SUBLOOP, "normal subloops"),
    ReferenceSet("omega-group-single-slot", "omega_group_demo", Variant.IV, GROUP_NORMAL + OMEGA_GROUP_RIGHT),
    ReferenceSet("omega-group-left-quotient", "omega_group_demo", Variant.IV, GROUP_NORMAL + OMEGA_GROUP_LEFT,
                 "operator ideals with quotients taken on the left"),
    ReferenceSet("omega-loop-lifted", "omega_loop_demo", Variant.I,
                 LOOP_LIFTED + ("rdiv(omega(mul(y1,x1),mul(y2,x2)),omega(x1,x2))",)),
    ReferenceSet("omega-loop-single-slot", "omega_loop_demo", Variant.IV, LOOP_SINGLE_SLOT + OMEGA_LOOP_SLOTS),
    ReferenceSet("omega-loop-normal", "omega_loop_demo", Variant.IV, LOOP_NORMAL_SUBLOOP + OMEGA_LOOP_SLOTS),
    ReferenceSet("semiloop-lifted", "semiloop", Variant.I, SEMILOOP_LIFTED),
    ReferenceSet("semiloop-swapped-quotient", "semiloop", Variant.I, SEMILOOP_SWAPPED,
                 "numerators and denominators of the lifted quotients exchanged"),
    ReferenceSet("divisible-groupoid-lifted", "div_inv_groupoid", Variant.I, SEMILOOP_LIFTED),
)


@lru_cache(maxsize=None)
def _by_name() -> Dict[str, ReferenceSet]:
    return {r.name: r for r in REFERENCE_SETS}


def reference_set(name: str) -> ReferenceSet:
    try:
        return _by_name()[name]
    except KeyError:
        raise UnknownVariety(f"reference set {name}") from None


def reference_sets_for(variety: str) -> List[ReferenceSet]:
    return [r for r in REFERENCE_SETS if r.variety == variety]
