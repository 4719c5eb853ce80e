"""FastAPI service exposing the pipeline; the CLI is a client of this app."""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from ..f2rank import MemoryBudgetError
from ..report import __version__
from ..sms import SmsParseError
from ..unipotent import GroupBudgetError
from . import models, ops
from .ops import LongRunRefused

app = FastAPI(title="chevlink", version=__version__)

_CLIENT_ERRORS = (ValueError, KeyError, FileNotFoundError, SmsParseError,
                  GroupBudgetError, MemoryBudgetError, LongRunRefused,
                  NotImplementedError)


def _respond(fn, *args, **kwargs):
    try:
        report = fn(*args, **kwargs)
    except _CLIENT_ERRORS as exc:
        return JSONResponse(status_code=400, content=models.ErrorResponse(
            error=str(exc), error_type=type(exc).__name__).model_dump())
    return models.ReportResponse(passed=report.get("passed"), report=report)


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/build", response_model=models.ReportResponse,
          responses={400: {"model": models.ErrorResponse}})
def build(req: models.BuildRequest):
    return _respond(ops.op_build, req.config, req.q, req.out_tri,
                    req.out_edge, req.allow_long, req.realization)


@app.post("/rank", response_model=models.ReportResponse,
          responses={400: {"model": models.ErrorResponse}})
def rank(req: models.RankRequest):
    return _respond(ops.op_rank, req.path, req.p, req.dense_threshold,
                    req.mem_budget_mb)


@app.post("/check-homology", response_model=models.ReportResponse,
          responses={400: {"model": models.ErrorResponse}})
def check_homology(req: models.CheckHomologyRequest):
    return _respond(ops.op_check_homology, req.config, req.q, req.p,
                    req.allow_long, req.dense_threshold)


@app.post("/verify/steinberg", response_model=models.ReportResponse,
          responses={400: {"model": models.ErrorResponse}})
def verify_steinberg(req: models.SteinbergRequest):
    return _respond(ops.op_verify_steinberg, req.system, req.q)


@app.post("/verify/lift", response_model=models.ReportResponse,
          responses={400: {"model": models.ErrorResponse}})
def verify_lift(req: models.LiftRequest):
    return _respond(ops.op_verify_lift, req.config, req.p, req.k, req.specs,
                    req.pairs, req.seed, req.homogeneous)


@app.post("/verify/relations", response_model=models.ReportResponse,
          responses={400: {"model": models.ErrorResponse}})
def verify_relations(req: models.RelationsRequest):
    return _respond(ops.op_verify_relations, req.config, req.q,
                    req.exhaustive_limit, req.samples, req.seed, req.jobs)


@app.post("/verify/filling-a3", response_model=models.ReportResponse,
          responses={400: {"model": models.ErrorResponse}})
def verify_filling_a3(req: models.FillingA3Request):
    return _respond(ops.op_verify_filling_a3, req.q)


@app.post("/verify/normal-form", response_model=models.ReportResponse,
          responses={400: {"model": models.ErrorResponse}})
def verify_normal_form(req: models.NormalFormRequest):
    return _respond(ops.op_verify_normal_form, req.config, req.q,
                    req.allow_long)


@app.post("/cone-radius", response_model=models.ReportResponse,
          responses={400: {"model": models.ErrorResponse}})
def cone_radius(req: models.ConeRadiusRequest):
    return _respond(ops.op_cone_radius, req.config, req.q, req.apex,
                    req.allow_long)
