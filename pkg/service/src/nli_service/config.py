"""Service configuration, sourced from the environment.

NLI_MODEL_ID   checkpoint identifier, or "stub"/"table:<path>" for the
               hermetic backends (default "stub")
NLI_MAX_BATCH  largest accepted pairs list (default 64)
NLI_DEVICE     torch device string (default "cpu")
NLI_DETERMINISTIC  "1" pins seeds and eval mode (default on)
NLI_LABEL_MAP  optional "entail=i,neutral=j,contradict=k" override when a
               checkpoint's label names are nonstandard
"""

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class ServiceConfig:
    model_id: str = "stub"
    max_batch: int = 64
    device: str = "cpu"
    deterministic: bool = True
    label_map: dict[str, int] | None = None

    def __post_init__(self) -> None:
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")
        if self.label_map is not None:
            if set(self.label_map) != {"entail", "neutral", "contradict"}:
                raise ValueError("label_map must assign entail, neutral and contradict")


def parse_label_map(raw: str) -> dict[str, int]:
    pairs = [item.split("=") for item in raw.split(",") if item]
    return {name.strip(): int(index) for name, index in pairs}


def config_from_env() -> ServiceConfig:
    raw_map = os.environ.get("NLI_LABEL_MAP")
    return ServiceConfig(
        model_id=os.environ.get("NLI_MODEL_ID", "stub"),
        max_batch=int(os.environ.get("NLI_MAX_BATCH", "64")),
        device=os.environ.get("NLI_DEVICE", "cpu"),
        deterministic=os.environ.get("NLI_DETERMINISTIC", "1") != "0",
        label_map=parse_label_map(raw_map) if raw_map else None,
    )
