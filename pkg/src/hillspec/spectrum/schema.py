"""Band output documents: {"bands": [{"n", "samples": [{"t", "re", "im", "mult"}]}], "meta"}."""
from __future__ import annotations

import csv
import io
from typing import Any, Dict, List, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import ParseError
from .bands import SpectralCurve
from .eigenvalues import BlochEigenvalue


class BandSample(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t: float
    re: float
    im: float
    mult: int = 1


class BandEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int
    samples: List[BandSample] = Field(default_factory=list)
    closed: bool = False
    suspect: bool = False


class BandDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    bands: List[BandEntry] = Field(default_factory=list)
    meta: Dict[str, Any] = Field(default_factory=dict)


def bands_document(curves: Sequence[SpectralCurve], meta: Dict[str, Any] | None = None) -> Dict[str, Any]:
    document = BandDocument(
        bands=[
            BandEntry(
                n=curve.n,
                samples=[
                    BandSample(t=s.t, re=s.lam.real, im=s.lam.imag, mult=s.multiplicity)
                    for s in curve.samples
                ],
                closed=curve.closed,
                suspect=curve.suspect,
            )
            for curve in curves
        ],
        meta=dict(meta or {}),
    )
    return document.model_dump()


def bands_from_document(payload: str | bytes | Dict[str, Any]) -> tuple[List[SpectralCurve], Dict[str, Any]]:
    """Rebuild curves (and the stored meta) from a band document."""

    try:
        if isinstance(payload, dict):
            document = BandDocument.model_validate(payload)
        else:
            document = BandDocument.model_validate_json(payload)
    except ValidationError as exc:
        raise ParseError(f"Invalid band document: {exc}") from exc
    curves = [
        SpectralCurve(
            n=entry.n,
            samples=[
                BlochEigenvalue(n=entry.n, t=s.t, lam=complex(s.re, s.im), multiplicity=s.mult)
                for s in entry.samples
            ],
            closed=entry.closed,
            suspect=entry.suspect,
        )
        for entry in document.bands
    ]
    return curves, dict(document.meta)


def bands_to_csv(curves: Sequence[SpectralCurve]) -> str:
    """Rows (t, n, re, im) for external plotting."""

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t", "n", "re", "im"])
    for curve in curves:
        for s in curve.samples:
            writer.writerow([repr(s.t), curve.n, repr(s.lam.real), repr(s.lam.imag)])
    return buffer.getvalue()
