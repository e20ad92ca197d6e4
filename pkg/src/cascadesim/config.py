"""Config files: TOML with the documented keys.

Top level: N, T, dt, seed (or seeds = [..]), scheme, K (row-major matrix),
snapshot_times, snapshot_bins, snapshot_range, record_paths.  One
``[[regions]]`` table per region carrying ``name`` and either ``pieces``
(list of {lo, hi, weight} inline tables) or ``quantile_table`` (path to a
two-column u,quantile text file, resolved relative to the config file).
"""

from __future__ import annotations

from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .cascade import CouplingMatrix
from .engine import SimulationConfig
from .errors import ConfigurationError
from .laws import InitialLaw, QuantileTableLaw, UniformPiece, load_quantile_table

_KNOWN_KEYS = {"N", "T", "dt", "seed", "seeds", "scheme", "K",
               "snapshot_times", "snapshot_bins", "snapshot_range",
               "record_paths", "regions"}


def _region_law(entry: dict, base_dir: Path, index: int):
    if "pieces" in entry:
        try:
            pieces = tuple(UniformPiece(float(p["lo"]), float(p["hi"]),
                                        float(p["weight"]))
                           for p in entry["pieces"])
            return InitialLaw(pieces,
                              allow_boundary=bool(entry.get("allow_boundary")))
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(
                f"regions[{index}].pieces: each piece needs lo, hi, weight "
                f"({exc})") from exc
    if "quantile_table" in entry:
        return load_quantile_table(base_dir / entry["quantile_table"])
    if "quantile_u" in entry:  # inline table, as echoed into manifests
        return QuantileTableLaw(u=tuple(entry["quantile_u"]),
                                q=tuple(entry["quantile_q"]))
    raise ConfigurationError(
        f"regions[{index}]: needs either 'pieces' or 'quantile_table'")


def config_from_dict(data: dict, base_dir: Path | None = None,
                     seed_override: int | None = None,
                     scheme_override: str | None = None) -> SimulationConfig:
    base_dir = base_dir or Path(".")
    unknown = set(data) - _KNOWN_KEYS - {"allow_boundary"}
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    for key in ("N", "T", "dt", "K", "regions"):
        if key not in data:
            raise ConfigurationError(f"config is missing required key {key!r}")
    regions = data["regions"]
    if not isinstance(regions, list) or not regions:
        raise ConfigurationError("regions must be a non-empty list of tables")
    laws = tuple(_region_law(entry, base_dir, i)
                 for i, entry in enumerate(regions))
    names = tuple(str(entry.get("name", i)) for i, entry in enumerate(regions))
    seed = seed_override
    if seed is None:
        seed = data.get("seed", data.get("seeds", [0])[0]
                        if isinstance(data.get("seeds"), list) else 0)
    snapshot_range = data.get("snapshot_range")
    return SimulationConfig(
        n_particles=int(data["N"]),
        horizon=float(data["T"]),
        dt=float(data["dt"]),
        seed=int(seed),
        coupling=CouplingMatrix(tuple(tuple(float(x) for x in row)
                                      for row in data["K"])),
        regions=laws,
        scheme=scheme_override or data.get("scheme", "grid"),
        snapshot_times=tuple(data.get("snapshot_times", ())),
        snapshot_bins=int(data.get("snapshot_bins", 100)),
        snapshot_range=tuple(snapshot_range) if snapshot_range else None,
        record_paths=bool(data.get("record_paths", False)),
        region_names=names,
    )


def load_config(path, seed_override: int | None = None,
                scheme_override: str | None = None) -> SimulationConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    return config_from_dict(data, base_dir=path.parent,
                            seed_override=seed_override,
                            scheme_override=scheme_override)


def load_config_seeds(path) -> list[int]:
    """The seed list a multi-run command should iterate (default: [seed])."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    if "seeds" in data:
        seeds = data["seeds"]
        if not isinstance(seeds, list) or not seeds:
            raise ConfigurationError("seeds must be a non-empty list")
        return [int(s) for s in seeds]
    return [int(data.get("seed", 0))]
