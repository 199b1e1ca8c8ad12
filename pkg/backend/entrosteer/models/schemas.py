"""Pydantic schemas for results and run configuration."""

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# ─── Bounds ───────────────────────────────────────────────────────────────────

Provenance = Literal["analytic", "conjectured", "numerical"]


class MinimizerReport(BaseModel):
    """Certificate produced by the pure-state minimiser."""
    best_value: float
    restarts: int
    evaluations: int
    converged_restarts: int
    state_re: list[float]          # minimising vector (product of locals when separable)
    state_im: list[float]
    local_states: Optional[list[tuple[list[float], list[float]]]] = None


class BoundValue(BaseModel):
    value: float                   # nats
    provenance: Provenance
    tag: str                       # which relation produced the value
    notes: list[str] = Field(default_factory=list)
    certificate: Optional[MinimizerReport] = None

    @field_validator("value")
    @classmethod
    def _non_negative(cls, v: float) -> float:
        if v < -1e-12:
            raise ValueError(f"bound value must be non-negative, got {v}")
        return max(v, 0.0)


# ─── Criteria ─────────────────────────────────────────────────────────────────

class CriterionReport(BaseModel):
    criterion: str                 # shannon | tsallis | renyi | guhne | huang | linear | ...
    lhs: float
    bound: BoundValue
    violated: bool
    terms: list[float] = Field(default_factory=list)   # one per measurement setting
    tolerance: float = 1e-9
    parameter: Optional[float] = None                  # q or r where applicable
    rests_on_conjecture: bool = False
    notes: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _verdict_consistent(self):
        expected = self.lhs < self.bound.value - self.tolerance
        if expected != self.violated:
            raise ValueError("violated flag disagrees with lhs < bound - tol")
        return self

    @property
    def margin(self) -> float:
        """lhs − bound; negative means the criterion is violated."""
        return self.lhs - self.bound.value


# ─── Solvers ──────────────────────────────────────────────────────────────────

class ThresholdResult(BaseModel):
    family: str
    criterion: str
    critical: float
    resolution: float
    bracket: tuple[float, float]    # (not violated, violated)
    evaluations: int
    bound: Optional[BoundValue] = None


class SweepPoint(BaseModel):
    parameter: float
    critical: Optional[float] = None
    status: str = "ok"              # ok | no_violation | non_monotone | error
    message: Optional[str] = None


class SweepCurve(BaseModel):
    family: str
    criterion: str
    parameter_name: str             # "q" or "r"
    points: list[SweepPoint]

    @field_validator("points")
    @classmethod
    def _strictly_increasing(cls, pts: list[SweepPoint]) -> list[SweepPoint]:
        grid = [p.parameter for p in pts]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("sweep grid must be strictly increasing")
        return pts


class OptimizationResult(BaseModel):
    report: CriterionReport
    start_lhs: float                # lhs with the unrotated measurement sets
    restarts: int
    evaluations: int
    unitaries_re: list[list[list[float]]]    # one unitary per party
    unitaries_im: list[list[list[float]]]


class SurveyRow(BaseModel):
    category: str
    count: int
    fraction: float
    ci_low: float                   # Wilson 95% interval
    ci_high: float


class SurveyTable(BaseModel):
    n: int
    seed: int
    rows: list[SurveyRow]

    def row(self, category: str) -> SurveyRow:
        for r in self.rows:
            if r.category == category:
                return r
        raise KeyError(category)


class EntropyReport(BaseModel):
    probs: list[float]
    values: dict[str, float]


# ─── Figures ──────────────────────────────────────────────────────────────────

class FigureColumn(BaseModel):
    name: str
    doc: str


class FigureData(BaseModel):
    """Rows behind one figure or table; None cells mean no violation / not applicable."""
    figure: str
    description: str
    columns: list[FigureColumn]
    rows: list[dict[str, Optional[Union[float, str]]]]
    seed: int = 0

    @model_validator(mode="after")
    def _rows_match_columns(self):
        names = [c.name for c in self.columns]
        for i, row in enumerate(self.rows):
            if list(row) != names:
                raise ValueError(f"row {i} keys {list(row)} differ from columns {names}")
        return self


# ─── CLI ──────────────────────────────────────────────────────────────────────

class FamilySpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str                       # werner | isotropic | bloch | example2 | ...
    params: dict[str, float] = Field(default_factory=dict)


class EntropySpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["shannon", "tsallis", "renyi"] = "shannon"
    q: Optional[float] = None
    r: Optional[float] = None

    @model_validator(mode="after")
    def _parameter_present(self):
        if self.kind == "tsallis" and (self.q is None or self.q <= 0):
            raise ValueError("tsallis needs --q > 0")
        if self.kind == "renyi" and (self.r is None or self.r <= 0):
            raise ValueError("renyi needs --r > 0")
        return self


class RunConfig(BaseModel):
    """Parse-validated configuration; unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid")

    subcommand: str
    family: Optional[FamilySpec] = None
    measurements: Optional[str] = None
    num_settings: Optional[int] = None
    criterion: Optional[str] = None
    entropy: EntropySpec = Field(default_factory=EntropySpec)
    scenario: Literal["single", "separable", "any"] = "single"
    seed: int = 0
    out: Optional[str] = None
    format: Literal["csv", "json"] = "json"
    resolution: float = 1e-4
    threads: int = 1
    options: dict[str, str] = Field(default_factory=dict)  # subcommand-specific values

    @field_validator("threads")
    @classmethod
    def _threads_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("--threads must be >= 1")
        return v

    @field_validator("resolution")
    @classmethod
    def _resolution_positive(cls, v: float) -> float:
        if not 0 < v < 0.5:
            raise ValueError("--resolution must lie in (0, 0.5)")
        return v


# ─── Run ledger ───────────────────────────────────────────────────────────────

class RunSummary(BaseModel):
    id: int
    subcommand: str
    config: dict
    format: str
    seed: int
    exit_code: int
    created_at: str


class RunHistory(BaseModel):
    runs: list[RunSummary]
    artifact: Optional[str] = None      # set when a single run is shown
