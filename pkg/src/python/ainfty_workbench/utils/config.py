"""
Job configuration: defaults for the main n = 3 run, overridable from the environment (``.env``
is loaded by ``main.py``), from CLI flags and from a JSON job file.
"""

import json
import logging
import os
from typing import Any, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from algebra.koszul import OneForm, sign_normalize_gamma
from algebra.koszul import superpotential as default_superpotential
from algebra.polynomials import HPoly, Poly
from services.groups import DEFAULT_G_GENERATORS, DEFAULT_Z_GENERATOR, GroupSpec
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

PRINTED_GAMMA = ["-v2*v3/3 + hbar*v1**4", "-v3*v1/3 + hbar*v2**4", "-v1*v2/3 + hbar*v3**4"]
DEFAULT_SEED = 20240601


class JobConfig(BaseModel):
    n: int = Field(default=3, ge=1, le=6)
    gamma: list[str] = Field(default_factory=lambda: list(PRINTED_GAMMA))
    normalize_gamma: bool = True
    superpotential: Optional[str] = None
    group_generators: list[list[int]] = Field(default_factory=lambda: [list(g) for g in DEFAULT_G_GENERATORS])
    z_generator: list[int] = Field(default_factory=lambda: list(DEFAULT_Z_GENERATOR))
    d_max: int = Field(default=6, ge=1)
    truncation: int = Field(default=15, ge=3)
    threads: int = Field(default=1, ge=1)
    seed: int = DEFAULT_SEED
    cache_dir: Optional[str] = None
    conventions_file: Optional[str] = None

    @field_validator("z_generator")
    @classmethod
    def _z_nonzero(cls, value: list[int]) -> list[int]:
        if not any(x % 5 for x in value):
            raise ValueError("the Z generator must be nonzero mod 5")
        return value

    @model_validator(mode="after")
    def _shapes_agree(self) -> "JobConfig":
        if len(self.gamma) != self.n:
            raise ValueError(f"gamma has {len(self.gamma)} components but n = {self.n}")
        for text in self.gamma:
            try:
                HPoly.from_sympy(text, self.n)
            except Exception as exc:
                raise ValueError(f"gamma component {text!r} is not a polynomial in v1..v{self.n}, hbar: {exc}") from exc
        for g in [*self.group_generators, self.z_generator]:
            if len(g) != self.n:
                raise ValueError(f"group generator {g} does not have {self.n} entries")
        return self

    # construction ---------------------------------------------------------------------------

    @classmethod
    def from_env(cls, **overrides: Any) -> "JobConfig":
        """Defaults, then AINFTY_* environment variables, then explicit non-None ``overrides``."""
        values: dict[str, Any] = {}
        env_map = {
            "AINFTY_THREADS": ("threads", int),
            "AINFTY_SEED": ("seed", int),
            "AINFTY_CACHE_DIR": ("cache_dir", str),
            "AINFTY_CONVENTIONS_FILE": ("conventions_file", str),
        }
        for var, (name, kind) in env_map.items():
            raw = os.getenv(var)
            if raw:
                try:
                    values[name] = kind(raw)
                except ValueError as exc:
                    raise ConfigError(f"{var}={raw!r} is not a valid {kind.__name__}") from exc
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.build(values)

    @classmethod
    def build(cls, values: dict[str, Any]) -> "JobConfig":
        try:
            return cls(**values)
        except ValidationError as exc:
            raise ConfigError(f"invalid job configuration: {exc}") from exc

    @classmethod
    def from_json(cls, text: str, base: Optional["JobConfig"] = None) -> "JobConfig":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"job file is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise ConfigError("job file must hold a JSON object")
        merged = base.model_dump() if base is not None else {}
        merged.update(payload)
        return cls.build(merged)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True, indent=1) + "\n"

    # derived objects -------------------------------------------------------------------------

    def target_superpotential(self) -> Poly:
        if self.superpotential:
            return Poly.from_sympy(self.superpotential, self.n)
        if self.n != 3:
            raise ConfigError("a superpotential must be given when n != 3")
        return default_superpotential(self.n)

    def one_form(self) -> tuple[OneForm, int]:
        """γ and the recorded flip: the sign-normalised γ when ``normalize_gamma`` is set."""
        gamma = OneForm.from_strings(self.gamma, self.n)
        if not self.normalize_gamma:
            return gamma, 1
        try:
            return sign_normalize_gamma(gamma, self.target_superpotential())
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def group(self) -> GroupSpec:
        return GroupSpec.of(self.n, self.group_generators)

    def z_group(self) -> GroupSpec:
        return GroupSpec.of(self.n, [self.z_generator])
