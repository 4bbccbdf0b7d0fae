"""
Canonical JSON for structure-constant tables.

A table is a list of ``{d, k, inputs, output, coeff}`` records sorted by arity, ħ-power, then the
canonical mask order of the inputs and of the output. Rational coefficients are spelled ``"p/q"``;
ℚ(ζ₅) coefficients are 4-vectors of such strings. Dumps use sorted keys and fixed separators so
equal tables always give identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Iterable, Mapping
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

from algebra.exterior import mask_order
from algebra.scalars import Cyc5, Scalar, format_rat, parse_rat

CKey = tuple[tuple[int, ...], int, int]

TABLE_FORMAT_VERSION = 1


def coeff_to_json(value: Scalar) -> Union[str, list[str]]:
    if isinstance(value, Cyc5):
        if value.is_rational():
            return format_rat(value.to_rational())
        return [format_rat(c) for c in value.coeffs]
    return format_rat(Fraction(value))


def coeff_from_json(raw: Union[str, int, list]) -> Scalar:
    if isinstance(raw, list):
        return Cyc5([parse_rat(c) for c in raw])
    return parse_rat(raw)


def record_key(inputs: tuple[int, ...], output: int, hbar: int) -> tuple:
    return (len(inputs), hbar, tuple(mask_order(m) for m in inputs), mask_order(output))


def entries_to_records(entries: Mapping[CKey, Scalar]) -> list[dict[str, Any]]:
    records = []
    for (inputs, output, hbar), coeff in sorted(entries.items(), key=lambda item: record_key(*item[0])):
        if not coeff:
            continue
        records.append(
            {"d": len(inputs), "k": hbar, "inputs": list(inputs), "output": output, "coeff": coeff_to_json(coeff)}
        )
    return records


def records_to_entries(records: Iterable[Mapping[str, Any]]) -> dict[CKey, Scalar]:
    entries: dict[CKey, Scalar] = {}
    for record in records:
        inputs = tuple(int(m) for m in record["inputs"])
        if len(inputs) != int(record["d"]):
            raise ValueError(f"record arity {record['d']} does not match its {len(inputs)} inputs")
        entries[(inputs, int(record["output"]), int(record["k"]))] = coeff_from_json(record["coeff"])
    return entries


def canonical_dumps(document: Any) -> str:
    return json.dumps(document, sort_keys=True, indent=1, ensure_ascii=True) + "\n"


def dump_constant_table(entries: Mapping[CKey, Scalar], n: int, metadata: Mapping[str, Any]) -> str:
    document = {
        "version": TABLE_FORMAT_VERSION,
        "n": n,
        "metadata": dict(metadata),
        "entries": entries_to_records(entries),
    }
    return canonical_dumps(document)


def load_constant_table(text: str) -> tuple[int, dict[str, Any], dict[CKey, Scalar]]:
    document = json.loads(text)
    if document.get("version") != TABLE_FORMAT_VERSION:
        raise ValueError(f"unsupported table format version {document.get('version')!r}")
    return int(document["n"]), dict(document.get("metadata", {})), records_to_entries(document["entries"])


def content_hash(document: Any) -> str:
    """SHA-256 of the canonical JSON spelling of ``document``."""
    return hashlib.sha256(canonical_dumps(document).encode("utf-8")).hexdigest()


def file_hash(path: Path) -> str:
    if not path.exists():
        return ""
    return hashlib.sha256(path.read_bytes()).hexdigest()
