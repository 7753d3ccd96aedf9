"""HTTP facade over the library: thresholds, bounds, and full sweeps.

Request and response bodies are pydantic models, so the service and the
in-process API validate identically. Run requests execute synchronously;
sweeps are CPU-bound simulations and the caller wants the rows.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .asymptotics import biawgn_capacity, csa_required_slots, csa_required_symbols, density_evolution_threshold, noisy_csa_required_symbols
from .cs import empirical_m_estimate, required_m_bound
from .csa import DEFAULT_DISTRIBUTION, DegreeDistribution, IdCodec
from .errors import ConfigError
from .experiments import ExperimentSpec, ResultRow
from .output import compare_rows
from .runner import run as run_sweep


class ThresholdRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    degree_distribution: dict[int, float] | None = None
    tol: float = 1e-4


class ThresholdResponse(BaseModel):
    g_star: float
    mean_degree: float
    tol: float


class BoundsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    N: int = Field(ge=2)
    k: int = Field(ge=0)
    delta: float = 0.01
    constant_c: float = 4.0
    degree_distribution: dict[int, float] | None = None
    sigma: float | None = None


class BoundsResponse(BaseModel):
    """Symbol budgets for both frameworks at the requested operating point.

    cs_m_sufficient is the provable unslotted budget, cs_m_empirical the
    simulation-backed one. csa_slots and csa_symbols are the slotted
    budgets at threshold load; the noisy figure divides by binary-input
    AWGN capacity and uses the coded slot length.
    """

    id_bits: int
    g_star: float
    cs_m_sufficient: int
    cs_m_empirical: int
    csa_slots: int
    csa_symbols: int
    capacity: float | None = None
    csa_symbols_noisy: int | None = None


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: ExperimentSpec
    threads: int = Field(default=1, ge=1)


class RunResponse(BaseModel):
    rows: list[ResultRow]


class CompareRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cs_rows: list[ResultRow]
    csa_rows: list[ResultRow]


class CompareResponse(BaseModel):
    rows: list[dict]


def _distribution(mapping: dict[int, float] | None) -> DegreeDistribution:
    if mapping is None:
        return DEFAULT_DISTRIBUTION
    return DegreeDistribution.from_mapping(mapping)


def create_app() -> FastAPI:
    app = FastAPI(title="user activity detection service", version=__version__)

    @app.exception_handler(ConfigError)
    async def _config_error(request, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/threshold", response_model=ThresholdResponse)
    def threshold(req: ThresholdRequest):
        dist = _distribution(req.degree_distribution)
        res = density_evolution_threshold(dist, tol=req.tol)
        return ThresholdResponse(g_star=res.g_star, mean_degree=dist.mean, tol=res.tol)

    @app.post("/bounds", response_model=BoundsResponse)
    def bounds(req: BoundsRequest):
        dist = _distribution(req.degree_distribution)
        g_star = density_evolution_threshold(dist).g_star
        id_bits = IdCodec(req.N).id_bits
        resp = BoundsResponse(
            id_bits=id_bits,
            g_star=g_star,
            cs_m_sufficient=required_m_bound(req.N, req.k, req.delta, req.constant_c),
            cs_m_empirical=empirical_m_estimate(req.N, req.k),
            csa_slots=csa_required_slots(req.k, g_star),
            csa_symbols=csa_required_symbols(req.k, g_star, id_bits),
        )
        if req.sigma is not None:
            coded = IdCodec(req.N, coded=True)
            resp.capacity = biawgn_capacity(req.sigma)
            resp.csa_symbols_noisy = noisy_csa_required_symbols(
                req.k, g_star, coded.slot_symbols, req.sigma)
        return resp

    @app.post("/run", response_model=RunResponse)
    def run(req: RunRequest):
        return RunResponse(rows=run_sweep(req.spec, threads=req.threads))

    @app.post("/compare", response_model=CompareResponse)
    def compare(req: CompareRequest):
        return CompareResponse(rows=compare_rows(req.cs_rows, req.csa_rows))

    return app


app = create_app()
