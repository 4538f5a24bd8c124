"""Run configuration loaded from TOML files and command-line flags."""

import tomllib
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import ConfigDict, Field, ValidationError, field_validator

from kmweyl.base import FrozenModel
from kmweyl.exceptions import ConfigurationError, KmWeylError
from kmweyl.utils import parse_algebra, parse_bounds, parse_int_list


class Tolerances(FrozenModel):
    """Numerical tolerances shared by the float layers."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    closed_form: float = 1e-8
    pole: float = 1e-12
    eigen: float = 1e-9
    support: float = 1e-8
    conditioning: float = 1e8


class AlgebraSpec(FrozenModel):
    """The (n, m) pair of (A_n)_-m."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(ge=2)
    m: int = Field(ge=0)

    @classmethod
    def parse(cls, text: str) -> "AlgebraSpec":
        """Build from an "aNmM" string."""
        n, m = parse_algebra(text)
        return cls(n=n, m=m)

    def __str__(self) -> str:
        return f"a{self.n}m{self.m}"


class RunConfig(FrozenModel):
    """Validated settings for one CLI run.

    Unknown keys are rejected. String forms ("a2m2", "0,1,2", "0:0,0:5") are
    accepted for algebra, word, seed and bounds so config files can use the same
    spelling as the command line.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    algebra: AlgebraSpec = AlgebraSpec(n=2, m=2)
    word: Optional[Tuple[int, ...]] = None
    seed: Optional[Tuple[int, ...]] = None
    bounds: Optional[Tuple[Tuple[int, int], ...]] = None
    k_window: int = Field(default=8, ge=0)
    level: int = Field(default=5, ge=0)
    coupling: float = 1.0
    couplings: Dict[str, float] = Field(default_factory=dict)
    tolerances: Tolerances = Tolerances()
    output: Literal["tsv", "json"] = "tsv"
    seed_paths: List[str] = Field(default_factory=list)
    threads: Optional[int] = Field(default=None, ge=1)

    @field_validator("algebra", mode="before")
    @classmethod
    def _parse_algebra(cls, value: object) -> object:
        if isinstance(value, str):
            n, m = parse_algebra(value)
            return {"n": n, "m": m}
        return value

    @field_validator("word", "seed", mode="before")
    @classmethod
    def _parse_int_list(cls, value: object) -> object:
        if isinstance(value, str):
            return parse_int_list(value)
        return value

    @field_validator("bounds", mode="before")
    @classmethod
    def _parse_bounds(cls, value: object) -> object:
        if isinstance(value, str):
            return tuple(parse_bounds(value))
        return value

    def coupling_for(self, key: str) -> float:
        """Per-term coupling override, falling back to the global coupling."""
        return self.couplings.get(key, self.coupling)

    def merged(self, **overrides: object) -> "RunConfig":
        """Copy with the non-None overrides applied and revalidated."""
        data = self.model_dump()
        data.update({key: val for key, val in overrides.items() if val is not None})
        return RunConfig.model_validate(data)


def load_config(path: str | Path) -> RunConfig:
    """Load and validate a TOML run configuration.

    Args:
        path: Path of a TOML file with RunConfig keys at the top level

    Returns:
        The validated configuration

    Raises:
        ConfigurationError: If the file is missing, unparsable or invalid
    """
    path = Path(path)
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except OSError as e:
        raise ConfigurationError(str(path), f"cannot read file ({e})") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(str(path), f"not valid TOML ({e})") from e

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigurationError(str(path), details) from e
    except KmWeylError as e:
        raise ConfigurationError(str(path), str(e)) from e


def load_seeds(paths: Sequence[str | Path]) -> List[Tuple[int, ...]]:
    """Read seed roots, one comma-separated coefficient list per line.

    Blank lines and lines starting with "#" are skipped.

    Raises:
        ConfigurationError: If a file is missing or a line is not a seed
    """
    seeds: List[Tuple[int, ...]] = []
    for path in map(Path, paths):
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigurationError(str(path), f"cannot read file ({e})") from e
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                seeds.append(parse_int_list(line))
            except KmWeylError as e:
                raise ConfigurationError(str(path), f"line {number}: {e}") from e
    return seeds
