"""
JSON file schemas

Every file the library reads or writes is described by a pydantic model here.
Loaders in the domain modules validate through these models and then build
the numeric objects; nothing in this module depends on numpy.
"""

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator


class CardinalitySidecar(BaseModel):
    """Optional `<samples>.json` next to a CSV that overrides inferred sizes."""
    cardinalities: Dict[str, int] = Field(..., description="Column name -> number of states")

    @field_validator('cardinalities')
    def validate_sizes(cls, v):
        for name, size in v.items():
            if size < 2:
                raise ValueError(f'Cardinality of {name} must be at least 2, got {size}')
        return v


class JointFile(BaseModel):
    """A dense joint distribution over named variables, flattened row-major."""
    variables: List[str] = Field(..., min_length=1)
    cardinalities: List[int] = Field(..., min_length=1)
    probs: List[float] = Field(..., min_length=1)

    @model_validator(mode='after')
    def validate_shape(self):
        if len(self.variables) != len(self.cardinalities):
            raise ValueError('variables and cardinalities must have the same length')
        if len(set(self.variables)) != len(self.variables):
            raise ValueError('variable names must be unique')
        size = 1
        for c in self.cardinalities:
            if c < 2:
                raise ValueError('every cardinality must be at least 2')
            size *= c
        if size != len(self.probs):
            raise ValueError(f'expected {size} probabilities, got {len(self.probs)}')
        return self


class CreationOrderFile(BaseModel):
    """{"k": 2, "base": [1, 2], "steps": [[[1, 2], 3], ...]}"""
    k: int = Field(..., ge=1)
    base: List[int]
    steps: List[Tuple[List[int], int]] = Field(default=[])

    @model_validator(mode='after')
    def validate_sizes(self):
        if len(self.base) != self.k:
            raise ValueError(f'base must hold exactly k={self.k} vertices')
        for clique, _ in self.steps:
            if len(clique) != self.k:
                raise ValueError(f'every step clique must hold exactly k={self.k} vertices')
        return self


class CptEntry(BaseModel):
    """One conditional table; `table` is flattened over (parents..., var)."""
    var: int = Field(..., ge=1)
    parents: List[int] = Field(default=[])
    table: List[float]


class ModelFile(BaseModel):
    """A fitted Markov k-tree."""
    k: int = Field(..., ge=1)
    n: int = Field(..., ge=1)
    names: Optional[List[str]] = None
    cardinalities: List[int]
    order: CreationOrderFile
    cpts: List[CptEntry]

    @model_validator(mode='after')
    def validate_counts(self):
        if len(self.cardinalities) != self.n:
            raise ValueError('cardinalities must list one size per variable')
        if len(self.cpts) != self.n:
            raise ValueError('model must carry one cpt per variable')
        if self.names is not None and len(self.names) != self.n:
            raise ValueError('names must list one name per variable')
        for cpt in self.cpts:
            if any(v < 1 or v > self.n for v in cpt.parents + [cpt.var]):
                raise ValueError(f'cpt of variable {cpt.var} references a variable outside 1..{self.n}')
        if sorted(cpt.var for cpt in self.cpts) != list(range(1, self.n + 1)):
            raise ValueError('model must carry exactly one cpt for each variable')
        return self


class ScoreEntry(BaseModel):
    x: int = Field(..., ge=1)
    parents: List[int] = Field(default=[])
    f: float


class ScoreTableFile(BaseModel):
    """{"n", "k", "entries": [{"x", "parents": [...], "f"}]}"""
    n: int = Field(..., ge=2)
    k: int = Field(..., ge=1)
    entries: List[ScoreEntry]

    @model_validator(mode='after')
    def validate_entries(self):
        for e in self.entries:
            if e.x > self.n or any(p < 1 or p > self.n for p in e.parents):
                raise ValueError(f'entry for x={e.x} references a variable outside 1..{self.n}')
            if len(e.parents) > self.k:
                raise ValueError(f'entry for x={e.x} has more than k={self.k} parents')
            if e.x in e.parents:
                raise ValueError(f'entry for x={e.x} lists x among its own parents')
        return self


class InferenceQuery(BaseModel):
    """
    A query for `infer`.

    type: "marginal" needs `var`; "mpe" and "evidence" use only `evidence`.
    Evidence keys are variable indices (as strings in JSON) or column names.
    """
    type: Literal["marginal", "mpe", "evidence"]
    var: Optional[int] = Field(default=None, ge=1)
    evidence: Dict[str, int] = Field(default={})

    @model_validator(mode='after')
    def validate_var(self):
        if self.type == "marginal" and self.var is None:
            raise ValueError('a marginal query needs "var"')
        return self

    class Config:
        json_schema_extra = {
            "example": {
                "type": "marginal",
                "var": 3,
                "evidence": {"1": 1, "2": 1}
            }
        }
