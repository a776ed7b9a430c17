"""Flat key = value model-parameter files.

Format: one `key = value` per line, `#` starts a comment, blank lines ignored.
Recognized keys: a0, a1, c0, c1, eps, beta, gamma0, m0, s0, gamma1, m1, s1.
a0 is required; everything else defaults to zero (absent jump measures keep a
placeholder std of 1).  Unknown keys are rejected with their line number.
"""

from __future__ import annotations

from .model import GaussianJumpMeasure, ModelParams

__all__ = ["parse_model_config", "load_model_config", "format_model_config"]

_KEYS = ("a0", "a1", "c0", "c1", "eps", "beta", "gamma0", "m0", "s0", "gamma1", "m1", "s1")


def parse_model_config(text: str, origin: str = "<config>") -> ModelParams:
    values: dict[str, float] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{origin}:{line_no}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _KEYS:
            raise ValueError(f"{origin}:{line_no}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"{origin}:{line_no}: duplicate key {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError:
            raise ValueError(f"{origin}:{line_no}: bad number {val.strip()!r}") from None
    if "a0" not in values:
        raise ValueError(f"{origin}: missing required key 'a0'")

    def measure(prefix: str) -> GaussianJumpMeasure:
        gamma = values.get(f"gamma{prefix}", 0.0)
        std = values.get(f"s{prefix}", 1.0 if gamma == 0.0 else 0.0)
        return GaussianJumpMeasure(gamma, values.get(f"m{prefix}", 0.0), std)

    return ModelParams(
        a0=values["a0"],
        a1=values.get("a1", 0.0),
        c0=values.get("c0", 0.0),
        c1=values.get("c1", 0.0),
        eps=values.get("eps", 0.0),
        beta=values.get("beta", 0.0),
        nu0=measure("0"),
        nu1=measure("1"),
    )


def load_model_config(path) -> ModelParams:
    with open(path) as fh:
        return parse_model_config(fh.read(), origin=str(path))


def format_model_config(params: ModelParams) -> str:
    """Render parameters back in the flat file format (round-trips parse)."""
    lines = [
        f"a0 = {params.a0!r}",
        f"a1 = {params.a1!r}",
        f"c0 = {params.c0!r}",
        f"c1 = {params.c1!r}",
        f"eps = {params.eps!r}",
        f"beta = {params.beta!r}",
        f"gamma0 = {params.nu0.intensity!r}",
        f"m0 = {params.nu0.mean!r}",
        f"s0 = {params.nu0.std!r}",
        f"gamma1 = {params.nu1.intensity!r}",
        f"m1 = {params.nu1.mean!r}",
        f"s1 = {params.nu1.std!r}",
    ]
    return "\n".join(lines) + "\n"
