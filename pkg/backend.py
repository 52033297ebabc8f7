import logging
from typing import List, Optional

from fastapi import Depends, FastAPI, Header, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

import config
from bit_witness import BUILTINS, VarietySpec, builtin, parse_signature, verify_variety
from errors import BitError, Budget, BudgetExceeded
from finite_algebra import FiniteAlgebra, all_congruences, kernel_of, parse_algebra
from ideal_engine import (
    ClosureReport, CongruenceReport, IdealList, IdealReport, KernelRelation, build_ideal_report, derived_ops,
    ideal_closure, kernel_relation_check, list_ideals,
)
from termset_gen import dedupe_syntactic, extend_termset, gen_termset, render_termset


class VarietyRef(BaseModel):
    variety: Optional[str] = "group"
    signature: Optional[str] = None  # .sig text; overrides variety
    algebra: Optional[str] = None  # bundled model name
    algebra_text: Optional[str] = None  # .alg text; overrides algebra
    budget: Optional[int] = None


class TermsRequest(VarietyRef):
    set: str = "iv"
    semiabelian: bool = False
    extend: Optional[str] = None
    mode: str = "a"
    unique: bool = False


class IdealRequest(VarietyRef):
    subset: List[int]
    methods: List[str] = ["all"]
    semiabelian: bool = False
    timing: bool = False


class ClosureRequest(VarietyRef):
    seed: List[int] = []
    set: str = "iv"
    semiabelian: bool = False


class KernelRelationRequest(VarietyRef):
    subset: List[int]
    a: int
    b: int


class VarietyInfo(BaseModel):
    name: str
    signature: List[str]
    semiabelian: bool
    models: List[str]


logger = logging.getLogger("bit_backend")
logging.basicConfig(level=config.LOG_LEVEL)

app = FastAPI(title="BIT Ideal Toolkit")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)


def require_api_key(x_api_key: Optional[str] = Header(None)):
    if config.API_KEY and x_api_key != config.API_KEY:
        raise HTTPException(401, "Invalid or missing x-api-key")
    return True


def _spec(req: VarietyRef) -> VarietySpec:
    if req.signature:
        return parse_signature(req.signature)
    return builtin(req.variety or "group")


def _algebra(req: VarietyRef, spec: VarietySpec) -> FiniteAlgebra:
    if req.algebra_text:
        return parse_algebra(req.algebra_text, spec.sig)
    if not req.algebra:
        raise ValueError("algebra or algebra_text is required")
    return spec.model(req.algebra)


def _budget(req: VarietyRef) -> Budget:
    return Budget(req.budget if req.budget is not None else config.BUDGET)


def _run(label: str, fn):
    try:
        return fn()
    except HTTPException:
        raise
    except BudgetExceeded as e:
        logger.warning("%s over budget: %s", label, e)
        raise HTTPException(413, str(e))
    except (BitError, ValueError) as e:
        logger.warning("%s rejected: %s", label, e)
        raise HTTPException(400, str(e))
    except Exception as e:
        logger.exception("%s failed", label)
        raise HTTPException(500, str(e))


@app.get("/health")
def health():
    return {"status": "ok", "varieties": len(BUILTINS)}


@app.get("/api/varieties", dependencies=[Depends(require_api_key)], response_model=List[VarietyInfo])
def varieties():
    out = []
    for name in BUILTINS:
        spec = builtin(name)
        out.append(VarietyInfo(
            name=name,
            signature=[f"{s}/{a}" for s, a in spec.sig.ops],
            semiabelian=spec.semiabelian,
            models=[alg.name for alg in spec.bundled],
        ))
    return out


@app.post("/api/verify-witness", dependencies=[Depends(require_api_key)])
def verify(req: VarietyRef):
    def go():
        spec = _spec(req)
        algebras = [_algebra(req, spec)] if (req.algebra or req.algebra_text) else None
        return verify_variety(spec, algebras, _budget(req))
    return _run("verify-witness", go)


@app.post("/api/gen-terms", dependencies=[Depends(require_api_key)], response_class=PlainTextResponse)
def gen_terms(req: TermsRequest):
    def go():
        spec = _spec(req)
        ts = gen_termset(spec, req.set, req.semiabelian)
        if req.extend:
            ts = extend_termset(ts, builtin(req.extend), req.mode)
        if req.unique:
            ts = dedupe_syntactic(ts)
        return render_termset(ts)
    return _run("gen-terms", go)


@app.post("/api/check-ideal", dependencies=[Depends(require_api_key)], response_model=IdealReport,
          response_model_exclude_none=True)
def check_ideal(req: IdealRequest):
    def go():
        spec = _spec(req)
        alg = _algebra(req, spec)
        return build_ideal_report(alg, spec, req.subset, req.methods, req.semiabelian, _budget(req), req.timing)
    return _run("check-ideal", go)


@app.post("/api/ideal-closure", dependencies=[Depends(require_api_key)], response_model=ClosureReport)
def closure(req: ClosureRequest):
    def go():
        spec = _spec(req)
        alg = _algebra(req, spec)
        ts = gen_termset(spec, req.set, req.semiabelian)
        result = ideal_closure(alg, ts, req.seed, _budget(req))
        return ClosureReport(algebra=alg.name, seed=sorted(set(req.seed)), termset=ts.label, closure=sorted(result))
    return _run("ideal-closure", go)


@app.post("/api/list-ideals", dependencies=[Depends(require_api_key)], response_model=IdealList)
def ideals(req: VarietyRef):
    def go():
        spec = _spec(req)
        alg = _algebra(req, spec)
        found = list_ideals(alg, derived_ops(alg, spec.witness).zero, _budget(req))
        return IdealList(algebra=alg.name, count=len(found), ideals=[sorted(I) for I in found])
    return _run("list-ideals", go)


@app.post("/api/congruences", dependencies=[Depends(require_api_key)], response_model=CongruenceReport)
def congruences(req: VarietyRef):
    def go():
        spec = _spec(req)
        alg = _algebra(req, spec)
        zero = derived_ops(alg, spec.witness).zero
        lattice = all_congruences(alg, _budget(req))
        return CongruenceReport(algebra=alg.name, count=len(lattice), congruences=[p.as_lists() for p in lattice],
                                kernels=[sorted(kernel_of(p, zero)) for p in lattice])
    return _run("congruences", go)


@app.post("/api/kernel-relation", dependencies=[Depends(require_api_key)], response_model=KernelRelation)
def kernel_relation(req: KernelRelationRequest):
    def go():
        spec = _spec(req)
        alg = _algebra(req, spec)
        for e in (req.a, req.b):
            if not 0 <= e < alg.size:
                raise ValueError(f"element {e} is outside the carrier of {alg.name}")
        return kernel_relation_check(alg, spec.witness, req.subset, req.a, req.b, _budget(req))
    return _run("kernel-relation", go)


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("backend:app", host="0.0.0.0", port=8000, reload=False)
