"""JSON document format for potentials: {"coeffs": [{"n", "re", "im"}], "meta": {}}."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import ParseError
from .fourier import FourierPotential, from_fourier


class CoefficientEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int
    re: float = 0.0
    im: float = 0.0


class PotentialDocument(BaseModel):
    """Canonical ingestion format for potentials."""

    model_config = ConfigDict(extra="forbid")

    coeffs: List[CoefficientEntry] = Field(default_factory=list)
    meta: Dict[str, Any] = Field(default_factory=dict)

    def to_potential(self) -> FourierPotential:
        merged: Dict[int, complex] = {}
        for entry in self.coeffs:
            merged[entry.n] = merged.get(entry.n, 0j) + complex(entry.re, entry.im)
        return from_fourier(merged, meta=self.meta)

    @classmethod
    def from_potential(cls, p: FourierPotential) -> "PotentialDocument":
        return cls(
            coeffs=[
                CoefficientEntry(n=n, re=complex(v).real, im=complex(v).imag)
                for n, v in sorted(p.coeffs.items())
            ],
            meta=dict(p.meta),
        )


def parse_potential(payload: str | bytes | Dict[str, Any]) -> FourierPotential:
    """Validate a JSON payload (text or decoded) and build the potential."""

    try:
        if isinstance(payload, dict):
            document = PotentialDocument.model_validate(payload)
        else:
            document = PotentialDocument.model_validate_json(payload)
    except ValidationError as exc:
        raise ParseError(f"Invalid potential document: {exc}") from exc
    return document.to_potential()


def load_potential(path: str | Path) -> FourierPotential:
    """Read a potential JSON file; ``FileNotFoundError`` propagates."""

    text = Path(path).read_text(encoding="utf-8")
    return parse_potential(text)


def dump_potential(p: FourierPotential) -> str:
    document = PotentialDocument.from_potential(p)
    return json.dumps(document.model_dump(), sort_keys=True, indent=2)
